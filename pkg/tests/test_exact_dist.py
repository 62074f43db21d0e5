import mpmath as mp
import pytest
from scipy import stats

from lockstep import exact_dist as ed


def test_policy_validation():
    with pytest.raises(ValueError):
        ed.PrecisionPolicy(bits=32)
    with pytest.raises(ValueError):
        ed.PrecisionPolicy(max_escalations=0)
    assert ed.PrecisionPolicy(bits=100, max_escalations=2).levels() == [100, 200, 400]


def test_escalate_agrees_and_fails():
    v, bits = ed.escalate(lambda b: mp.mpf(1) / 3, ed.PrecisionPolicy(bits=64, target_tol=1e-15))
    assert abs(v - mp.mpf(1) / 3) < 1e-15
    with pytest.raises(ed.PrecisionError):
        ed.escalate(lambda b: mp.mpf(b), ed.PrecisionPolicy(bits=64, max_escalations=2))


@pytest.mark.parametrize("N,t", [(2, 0.3), (4, 0.5), (7, 0.7)])
def test_l1_closed_form(N, t):
    with mp.workprec(256):
        exact = (1 - mp.mpf(t) ** 2) ** (mp.mpf(N) * (N - 1) / 2)
    assert abs(ed.phi_hankel(N, 1, t) - exact) < 1e-20
    assert abs(ed.phi_opuc(N, 1, t) - exact) < 1e-20


def test_known_values():
    assert abs(ed.phi_hankel(4, 1, 0.5) - mp.mpf("0.177978515625")) < 1e-20
    # 0.3 is not a binary fraction, so compare at double precision
    assert abs(ed.phi_hankel(2, 1, 0.3) - mp.mpf("0.91")) < 1e-16


@pytest.mark.parametrize("N,l", [(3, 3), (3, 5), (4, 5)])
def test_unrestricted_rows_give_one(N, l):
    assert abs(ed.phi_hankel(N, l, 0.5) - 1) < 1e-20
    assert abs(ed.phi_opuc(N, l, 0.5) - 1) < 1e-20


@pytest.mark.parametrize("N,t,l", [(6, 0.5, 3), (10, 0.3, 5), (12, 0.7, 7), (16, 0.5, 9)])
def test_routes_agree(N, t, l):
    h = ed.phi_hankel(N, l, t)
    o = ed.phi_opuc(N, l, t)
    assert 0 < h < 1
    assert abs(h - o) < 1e-20


def test_phi_monotone_in_l():
    vals = [ed.phi_hankel(10, l, 0.5) for l in (1, 3, 5, 7, 9)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    lo, hi = ed.phi_bracket(10, 4, 0.5)
    assert lo == vals[1] and hi == vals[2]


def test_bernstein_szego_finite():
    d = ed.verblunsky_converged(3, 0.5, 8)
    assert all(abs(p) < 1e-100 for p in d.pi0[4:])
    assert abs(d.pi0[3]) > 0.1


def test_direct_sum_matches():
    ds = ed.phi_direct_sum(2, 1, 0.3)
    assert abs(ds.value - ed.phi_hankel(2, 1, 0.3)) <= ds.tail_bound + 1e-20
    ds = ed.phi_direct_sum(2, 3, 0.4, beta=0.5)
    lo, hi = ed.phi_bracket(2, 3, 0.4)
    assert abs(ds.value - lo) <= ds.tail_bound + 1e-20


def test_direct_sum_rejects_bad_beta():
    with pytest.raises(ValueError):
        ed.phi_direct_sum(2, 1, 0.5, beta=2.5)


def test_negbin_cdf_against_scipy():
    for r, a, j in [(5, 0.3, 4), (10, 0.5, 12), (3, 0.8, 20)]:
        assert abs(float(ed.negbin_cdf(r, a, j)) - stats.nbinom.cdf(j, r, 1 - a)) < 1e-12
    assert ed.negbin_cdf(4, 0.5, -1) == 0


def test_depoisson_constant_sequence():
    r = ed.depoisson_G(0.3, 10, [0.5] * 3)
    assert abs(r.G - 0.5) < 1e-30
    assert ed.depoisson_G(0.3, 10, [0]).G == 0
    with pytest.raises(ValueError):
        ed.depoisson_G(0.3, 10, [0.2, 0.5])


def test_depoisson_step_bracket():
    r = ed.depoisson_G(0.5, 200, lambda j: 1 if j <= 200 else 0)
    assert r.q_lower == 0 and r.q_upper == 1
    assert r.n_star < 200 < r.n_star2
    assert r.q_lower <= r.G <= r.q_upper
    assert abs(r.G - 0.52) < 0.01  # one-sided mass just above 1/2


def test_hankel_moment_catalan_at_N0():
    assert abs(ed.hankel_moment(0, 0.5, 1, 1) - 1) < 1e-20
    assert abs(ed.hankel_moment(0, 0.5, 2, 2) - 2) < 1e-20
    assert abs(ed.hankel_moment(0, 0.5, 1, 2)) < 1e-20


def test_toeplitz_coeff_quadrature():
    with mp.workdps(30):
        ref = mp.quad(lambda th: (1 + mp.mpf(0.3) ** 2 - 2 * mp.mpf(0.3) * mp.cos(th)) ** -2, [0, 2 * mp.pi]) / (2 * mp.pi)
        assert abs(ed.toeplitz_coeff(2, 0.3, 0) - ref) < 1e-25


def test_direct_sum_single_row():
    ds = ed.phi_direct_sum(1, 3, 0.4)
    assert abs(ds.value - 1) <= ds.tail_bound + 1e-20


def test_sandwich_contains_phi():
    sb = ed.sandwich_bounds(6, 3, 0.5, 1.0)
    # bounds are rounded at the policy precision
    assert float(sb.lower - sb.phi) < 1e-60 and sb.phi <= sb.upper
    assert sb.mu_minus <= sb.mu_plus and sb.nu_minus <= sb.nu_plus


def test_window_substitution_centres():
    (tm, bm), (tp, bp) = ed.window_substitution(20, 100, 10, 0.5)
    assert 0 < tm < tp < 1
    assert 0 < bm * tm < 1 and 0 < bp * tp < 1
