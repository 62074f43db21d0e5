import math

import mpmath as mp
import numpy as np
import pytest

from lockstep import painleve as pl


@pytest.mark.parametrize("x", [-5.0, -1.0, 0.0, 2.5, 6.0, 8.0])
def test_airy_matches_mpmath(x):
    a = pl.airy(x)
    with mp.workdps(40):
        assert abs(a.ai - mp.airyai(x)) <= mp.mpf(10) ** -35 * max(1, abs(mp.airyai(x)))
        assert abs(a.ai_prime - mp.airyai(x, 1)) <= mp.mpf(10) ** -33


def test_airy_asymptotic_and_bi():
    a = pl.airy(7.0, method="asymptotic")
    assert abs(a.ai / mp.airyai(7) - 1) < 1e-10
    b, bp = pl.airy_bi(1.5)
    with mp.workdps(40):
        assert abs(b - mp.airybi(1.5)) < 1e-30
    with pytest.raises(ValueError):
        pl.airy(2.0, method="asymptotic")
    with pytest.raises(ValueError):
        pl.airy(100.0)


def test_airy_integral_tail():
    with mp.workdps(40):
        ref = mp.quad(mp.airyai, [3, mp.inf])
        assert abs(pl.airy_integral_tail(3.0) - ref) < 1e-25
        assert abs(pl.airy_integral_tail(0.0) - mp.mpf(1) / 3) < 1e-30


def test_fornberg_weights_second_derivative():
    xs = [mp.mpf(v) for v in (-1, 0, 1)]
    w = pl.fornberg_weights(mp.mpf(0), xs, 2)
    assert [float(w[k][2]) for k in range(3)] == [1.0, -2.0, 1.0]


def test_taylor_vs_collocation_agree(sol):
    assert sol.disagreement < 1e-8


def test_u0(sol):
    assert abs(float(sol.u_at(0.0)) - (-0.367061551548078)) < 1e-10


def test_u_tracks_airy_on_the_right(sol):
    # u ~ -Ai for large x
    for x in (6.0, 7.0):
        assert abs(float(sol.u_at(x)) / float(mp.airyai(x)) + 1) < 1e-4


def test_residuals_small(sol):
    assert sol.residuals().max() < 1e-9
    assert sol.residuals("alt").max() < 1e-9


def test_state_at_outside_range(sol):
    with pytest.raises(pl.GridError):
        sol.state_at(9.0)


def test_f1_monotone_and_limits(table):
    assert np.all(np.diff(table.F1) > 0)
    assert table.F1[0] < 1e-15
    assert 1 - table.F1[-1] < 1e-7
    assert np.all(table.F1_prime > 0)


def test_f1_derivative_consistent(sol):
    for x in (-3.0, -1.2, 0.0, 1.5):
        h = 1e-3
        fd = (pl.f1(x + h, sol) - pl.f1(x - h, sol)) / (2 * h)
        assert abs(float(fd) - float(pl.f1_prime_closed(x, sol))) < 1e-6


def test_f1_moments(sol):
    st = pl.f1_stats(sol)
    assert abs(st.mean - (-1.2065335745820)) < 1e-8
    assert abs(st.variance - 1.6077810345814) < 1e-8
    assert abs(st.mass - 1) < 1e-8


def test_table_interpolation(table, sol):
    x = -1.2345
    assert abs(float(table(x)) - float(pl.f1(x, sol))) < 1e-6
    assert table(100.0) == 1.0 and table(-100.0) == 0.0


def test_table_csv(table):
    text = table.to_csv("hello")
    lines = text.splitlines()
    assert lines[0] == "# hello"
    assert lines[1] == "x,u,v,F1,F1_prime"
    assert len(lines) == 2 + len(table.x)


def test_f1_table_range_check(sol):
    with pytest.raises(pl.GridError):
        pl.f1_table(sol, -20.0, 0.0)
