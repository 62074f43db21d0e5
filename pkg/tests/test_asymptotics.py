import math
from fractions import Fraction

import numpy as np
import pytest

from lockstep import asymptotics as asy
from lockstep import combinatorics as cb


def test_scaling_constants():
    s = asy.scaling(0.5)
    assert s.eta == pytest.approx(2 / 3)
    assert s.rho == pytest.approx(0.25 ** (1 / 3) / 1.5)
    with pytest.raises(ValueError):
        asy.scaling(1.0)


def test_x_l_round_trip():
    for N in (10, 50, 200):
        for x in (-3.0, 0.0, 2.2):
            l = asy.l_of(N, 0.5, x)
            assert asy.x_of(N, 0.5, l) <= x < asy.x_of(N, 0.5, l + 1)


def test_x_of_ratio_inverse():
    for n, x in [(100, -2.0), (200, 1.5), (50, 0.0)]:
        assert asy.x_of_ratio(n, asy.N_for_x(n, 0.5, x), 0.5) == pytest.approx(x, abs=1e-9)


@pytest.mark.parametrize("gamma,t", [(0.5, 0.3), (1.0, 0.5), (2.0, 0.5), (4.0, 0.8)])
def test_equilibrium_unit_mass(gamma, t):
    e = asy.equilibrium(gamma, t)
    assert abs(e.mass() - 1) < 1e-10
    assert e.regime in {"full-support", "gapped"}


def test_equilibrium_regimes():
    t = 0.5
    crit = (1 + t) / (2 * t)
    assert asy.equilibrium(0.5 * crit, t).regime == "full-support"
    g = asy.equilibrium(2 * crit, t)
    assert g.regime == "gapped" and 0 < g.theta_c < math.pi
    assert abs(float(asy.equilibrium(crit, t).psi(math.pi))) < 1e-10


def test_equilibrium_density_nonnegative():
    e = asy.equilibrium(3.0, 0.5)
    th = np.linspace(-e.theta_c, e.theta_c, 201)
    assert np.all(np.asarray(e.psi(th)) >= -1e-12)


def test_variational_inequality_in_gap():
    e = asy.equilibrium(3.0, 0.5)
    for th in np.linspace(e.theta_c, math.pi, 12)[1:-1]:
        assert e.variational(float(th)) < 0
    assert abs(e.variational(0.3)) < 1e-8


def test_classify():
    t, n = 0.5, 100
    assert asy.classify(n, asy.N_for_x(n, t, 0.0), t) == 3
    assert asy.classify(n, 0.5 * n, t) == 1
    assert asy.classify(n, 3 * n, t) == 5
    n = 1000
    s = lambda N: 2 * t / (1 + t) * N / n  # noqa: E731
    N2 = asy.N_for_x(n, t, 4.5)
    assert 0.9 < s(N2) < 1 and asy.classify(n, N2, t) == 2
    N4 = asy.N_for_x(n, t, -4.5)
    assert 1 < s(N4) < 1 / 0.9 and asy.classify(n, N4, t) == 4
    with pytest.raises(ValueError):
        asy.classify(n, n, t, a=1.5)


def test_rhp_predict_regime3_sign(sol):
    n, t = 100, 0.5
    p = asy.rhp_predict(n, asy.N_for_x(n, t, 0.0), t, sol)
    # pi_n(0) carries (-1)^{n+1} and u(0) < 0
    assert p.regime == 3
    assert p.predicted_pi0 * (-1) ** (n + 1) * n ** (1 / 3) == pytest.approx(
        asy.painleve_constant(t) * -0.367061551548, rel=1e-6)


def test_rhp_predict_trivial_regime():
    p = asy.rhp_predict(100, 10, 0.5)
    assert p.regime == 1 and p.predicted_pi0 == 0.0 and p.predicted_norm_inv == 1.0


def test_ratio_a_matches_counts():
    N, k = 7, 20
    for m in range(0, k - 1, 2):
        assert asy.ratio_a(N, k, m) == Fraction(asy.a_m(N, k, m + 2), asy.a_m(N, k, m))


def test_unimodality_mode():
    u = asy.unimodality(30, 300)
    assert u.decreasing
    ms = range(0, 301, 2)
    mode = max(ms, key=lambda m: asy.a_m(30, 300, m))
    assert u.m_c == mode


def test_window_mass_is_probability():
    wm = asy.window_mass(20, 133, 0.5)
    assert 0 < wm <= 1
    assert asy.window_mass(20, 133, 0.5, eps=3) == 1


def test_path_count_closed_form_parity():
    # the closed form counts both parity classes of m, the exact count only one
    for N in (30, 50):
        k = round(0.25 * N * N / 0.75)
        r = asy.path_count_ratio(N, k, 0.5)
        assert 0.45 < r < 0.56
        assert asy.path_count_ratio(N, k, 0.5, parity=True) == pytest.approx(2 * r)
    assert abs(asy.path_count_ratio(50, 833, 0.5, parity=True) - 1) < abs(
        asy.path_count_ratio(30, 300, 0.5, parity=True) - 1)


def test_path_count_asym_log():
    a = asy.path_count_asym(30, 300, 0.5)
    assert a.log_value == pytest.approx(math.log(cb.path_count(30, 300)), abs=1.0)
