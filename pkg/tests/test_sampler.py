import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from lockstep import _kernels
from lockstep import combinatorics as cb
from lockstep import sampler as sp
from lockstep._accel import USE_NUMBA


def test_jm_table_small():
    tab = sp.jm_table(2, 2)
    assert tab.weights == (1, 3)
    assert list(tab.ms) == [0, 2] and list(tab.js) == [1, 0]
    assert tab.cdf[-1] == 1.0
    assert tab.probability(0, 2) == Fraction(3, 4)
    assert sum(sp.jm_table(6, 14).weights) == cb.path_count(6, 14)


def test_config_validation():
    with pytest.raises(ValueError):
        sp.SamplerConfig(0, 1)
    with pytest.raises(ValueError):
        sp.SamplerConfig(3, 2, worker_count=0)
    with pytest.raises(ValueError):
        sp.SamplerConfig(3, 2, seed=-1)


def test_k_for():
    assert sp.k_for(50, 0.5) == 833
    assert sp.k_for(200, 0.5) == 13333


def _chi2_pvalue(counts, probs):
    n = sum(counts)
    exp = np.array(probs) * n
    return stats.chisquare(counts, exp).pvalue


@pytest.mark.parametrize("backend", ["numpy", pytest.param("numba", marks=pytest.mark.skipif(not USE_NUMBA, reason="numba off"))])
def test_multiset_uniform(backend):
    B, n = 3, 3
    outcomes = list(cb.compositions(n, B))
    rng = np.random.default_rng(7)
    c = Counter(tuple(_kernels.multiset(rng, B, n, backend)) for _ in range(20000))
    assert set(c) <= set(outcomes)
    assert _chi2_pvalue([c[o] for o in outcomes], [1 / len(outcomes)] * len(outcomes)) > 1e-4


def test_exact_multiset_reference_uniform():
    outcomes = list(cb.compositions(2, 4))
    rng = np.random.default_rng(3)
    c = Counter(tuple(sp.sample_multiset(4, 2, rng)) for _ in range(10000))
    assert _chi2_pvalue([c[o] for o in outcomes], [1 / len(outcomes)] * len(outcomes)) > 1e-4


def test_L1_law_small():
    # N=3, k=4: {1: 15, 2: 21, 3: 3} / 39
    cfg = sp.SamplerConfig(3, 4, seed=11, n_samples=20000)
    L = sp.sample_many(cfg)
    counts = [int(np.sum(L == v)) for v in (1, 2, 3)]
    assert sum(counts) == len(L)
    assert _chi2_pvalue(counts, [15 / 39, 21 / 39, 3 / 39]) > 1e-4


def test_L1_law_matches_exact_cdf():
    N, k = 4, 6
    cfg = sp.SamplerConfig(N, k, seed=5, n_samples=20000)
    L = sp.sample_many(cfg)
    for l in range(1, 4):
        p = float(cb.conditional_cdf_exact(N, k, l))
        sigma = math.sqrt(p * (1 - p) / len(L)) or 1e-12
        assert abs(np.mean(L <= l) - p) < 5 * sigma


@pytest.mark.skipif(not USE_NUMBA, reason="numba off")
def test_backends_bit_identical():
    cfg = sp.SamplerConfig(40, sp.k_for(40, 0.5), seed=99, n_samples=300)
    assert np.array_equal(sp.sample_many(cfg, "numpy"), sp.sample_many(cfg, "numba"))


def test_worker_count_invariance():
    base = sp.SamplerConfig(20, sp.k_for(20, 0.5), seed=1234, n_samples=500)
    a = sp.sample_many(base)
    b = sp.sample_many(sp.SamplerConfig(20, base.k, seed=1234, n_samples=500, worker_count=4))
    assert np.array_equal(a, b)


def test_substreams_differ():
    a = sp.substream(1, 0).random(4)
    b = sp.substream(1, 1).random(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, sp.substream(1, 0).random(4))


def test_k_zero():
    assert np.all(sp.sample_many(sp.SamplerConfig(5, 0, n_samples=10)) == 0)
    assert sp.sample_L1(5, 0, np.random.default_rng(0)) == 0


def test_L1_bounds():
    rng = np.random.default_rng(0)
    for _ in range(200):
        L = sp.sample_L1(6, 10, rng)
        assert 1 <= L <= 6


def test_empirical_cdf_and_ks(table):
    cfg = sp.SamplerConfig(30, sp.k_for(30, 0.5), seed=3, n_samples=2000)
    res = sp.empirical_cdf(cfg, 0.5, table)
    e = res.ecdf
    assert e.n_samples == 2000
    assert e(np.inf) == 1.0 and e(-np.inf) == 0.0
    assert 0 < res.ks_distance < 0.3
    s = res.summary()
    assert s["N"] == 30 and s["seed"] == 3 and "backend" in s
    lines = e.to_csv("c").splitlines()
    assert lines[1] == "sample_index,L1,scaled_value" and len(lines) == 2002


def test_ks_distance_exact_for_step():
    e = sp.EmpiricalCdf(np.array([0, 0, 1, 1]), N=1, k=0, t=0.5, eta=0.0, rho=1.0)
    # F = uniform on [0, 1]: jumps at 0 and 1, sup gap 0.5
    assert e.ks_distance(lambda x: np.clip(x, 0, 1)) == pytest.approx(0.5)


def test_mu_guard(table):
    with pytest.raises(ValueError):
        sp.empirical_cdf(sp.SamplerConfig(30, 10, n_samples=10), 0.5, table)


def test_underspan(sol):
    from lockstep import painleve as pl

    narrow = pl.f1_table(sol, -1.0, 1.0)
    cfg = sp.SamplerConfig(30, sp.k_for(30, 0.5), seed=3, n_samples=500)
    with pytest.raises(sp.UnderspanError):
        sp.empirical_cdf(cfg, 0.5, narrow)


def test_demo_walk_valid():
    rng = np.random.default_rng(0)
    for _ in range(20):
        p = sp.demo_walk(6, 4, rng)
        assert cb.collision_free(p)
        cb.gov_to_tableau(p)  # the tableau is semistandard
