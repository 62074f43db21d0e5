"""Exact uniform sampling of lock-step configurations and the law of L_1.

A configuration with ``k`` left moves is drawn through its symmetric-matrix
image: first the split ``k = 2j + m`` with weight ``b_inf(N, j, m)``, then a
uniform filling of the diagonal (``m`` balls in ``N`` boxes) and of the strict
upper triangle (``j`` balls in ``N(N-1)/2`` boxes). ``L_1`` is the longest
strictly decreasing subsequence of the associated two-rowed array.

Every sample ``i`` draws from its own Philox substream keyed by
``seed + i * 2**64``, so results do not depend on how work is split.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from . import _kernels
from ._accel import backend_name
from .asymptotics import scaling
from .combinatorics import PathConfig, b_inf_row

SEED_MASK = (1 << 64) - 1


class UnderspanError(ValueError):
    """The F1 table does not cover the sampled range."""


def substream(seed: int, index: int) -> np.random.Generator:
    if not 0 <= seed <= SEED_MASK:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.Philox(key=seed + (index << 64)))


# ----------------------------------------------------------------------------
# (j, m) split


@dataclass(frozen=True)
class JmTable:
    N: int
    k: int
    js: np.ndarray
    ms: np.ndarray
    weights: tuple  # exact big-int weights
    cdf: np.ndarray  # float cumulative, last entry exactly 1

    def probability(self, j, m) -> Fraction:
        total = sum(self.weights)
        for jj, mm, w in zip(self.js, self.ms, self.weights):
            if jj == j and mm == m:
                return Fraction(w, total)
        return Fraction(0)


@lru_cache(maxsize=64)
def jm_table(N: int, k: int) -> JmTable:
    """Exact weights ``b_inf(N, (k-m)/2, m)`` over admissible ``m``; CDF rounded from exact rationals."""
    if N < 1 or k < 0:
        raise ValueError("need N >= 1 and k >= 0")
    ms = [m for m in range(k % 2, k + 1, 2) if N > 1 or m == k]
    js = [(k - m) // 2 for m in ms]
    w = b_inf_row(N, k)
    if N == 1:
        w = w[-1:]
    total = sum(w)
    acc = 0
    cdf = []
    for x in w:
        acc += x
        cdf.append(acc / total)  # int true division rounds correctly
    cdf[-1] = 1.0
    return JmTable(N, k, np.array(js, dtype=np.int64), np.array(ms, dtype=np.int64), tuple(w), np.array(cdf))


def sample_jm(N, k, rng: np.random.Generator):
    tab = jm_table(N, k)
    idx = int(np.searchsorted(tab.cdf, rng.random(), side="right"))
    return int(tab.js[idx]), int(tab.ms[idx])


# ----------------------------------------------------------------------------
# multisets


def sample_multiset(B: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform multiset of ``n`` balls in ``B`` boxes, box by box.

    Box ``b`` receives ``c`` balls with probability
    ``C(R-b-2+n_b-c, n_b-c) / C(R-b-1+n_b, n_b)`` given ``n_b`` balls remain
    for the ``R - b`` remaining boxes, evaluated in exact integers.
    """
    if B < 1:
        raise ValueError("need at least one box")
    if n < 0:
        raise ValueError("ball count must be >= 0")
    out = np.zeros(B, dtype=np.int64)
    left = n
    for b in range(B - 1):
        if left == 0:
            break
        rest = B - b - 1  # boxes after this one
        total = comb(rest + left, left)
        # draw an exact integer in [0, total) via rejection on 64-bit chunks
        target = _uniform_bigint(rng, total)
        acc = 0
        for c in range(left + 1):
            acc += comb(rest - 1 + left - c, left - c)
            if target < acc:
                break
        out[b] = c
        left -= c
    out[B - 1] += left
    return out


def _uniform_bigint(rng, n: int) -> int:
    bits = n.bit_length()
    words = (bits + 63) // 64
    while True:
        v = 0
        for _ in range(words):
            v = (v << 64) | int(rng.integers(0, 1 << 64, dtype=np.uint64, endpoint=False))
        v >>= words * 64 - bits
        if v < n:
            return v


# ----------------------------------------------------------------------------
# L_1


def sample_L1(N: int, k: int, rng: np.random.Generator, backend=None) -> int:
    """``L_1`` of one uniform configuration in ``P(N, k)``."""
    if k == 0:
        return 0
    tab = jm_table(N, k)
    return _kernels.sample_one(rng, N, tab.cdf, tab.js, tab.ms, backend)[2]


@dataclass(frozen=True)
class SamplerConfig:
    N: int
    k: int
    seed: int = 0
    n_samples: int = 1000
    worker_count: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.k < 0:
            raise ValueError("k must be >= 0")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.worker_count < 1:
            raise ValueError("worker_count must be >= 1")
        if not 0 <= self.seed <= SEED_MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _run_chunk(cfg: SamplerConfig, lo: int, hi: int, out: np.ndarray, backend):
    tab = jm_table(cfg.N, cfg.k)
    for i in range(lo, hi):
        if cfg.k == 0:
            out[i] = 0
            continue
        rng = substream(cfg.seed, i)
        out[i] = _kernels.sample_one(rng, cfg.N, tab.cdf, tab.js, tab.ms, backend)[2]


def sample_many(cfg: SamplerConfig, backend=None) -> np.ndarray:
    """``L_1`` for samples ``0..n_samples-1``, indexed by sample number."""
    out = np.zeros(cfg.n_samples, dtype=np.int64)
    if cfg.k > 0:
        jm_table(cfg.N, cfg.k)
    W = min(cfg.worker_count, cfg.n_samples)
    bounds = np.linspace(0, cfg.n_samples, W + 1).astype(int)
    if W == 1:
        _run_chunk(cfg, 0, cfg.n_samples, out, backend)
    else:
        with ThreadPoolExecutor(W) as ex:
            futs = [ex.submit(_run_chunk, cfg, int(a), int(b), out, backend) for a, b in zip(bounds[:-1], bounds[1:])]
            for f in futs:
                f.result()
    return out


# ----------------------------------------------------------------------------
# empirical law


@dataclass
class EmpiricalCdf:
    samples: np.ndarray  # L_1 in sample order
    N: int
    k: int
    t: float
    eta: float
    rho: float
    sorted_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.sorted_values = np.sort(self.scaled)

    @property
    def scaled(self) -> np.ndarray:
        return (self.samples - self.eta * self.N) / (self.rho * self.N ** (1 / 3))

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def __call__(self, x):
        """``F_hat(x) = #{scaled <= x} / n``."""
        return np.searchsorted(self.sorted_values, np.asarray(x, dtype=float), side="right") / self.n_samples

    def ks_distance(self, F) -> float:
        """``sup_x |F_hat(x) - F(x)|`` for a continuous ``F``; attained at the jumps."""
        vals, counts = np.unique(self.sorted_values, return_counts=True)
        upper = np.cumsum(counts) / self.n_samples
        lower = upper - counts / self.n_samples
        Fv = np.asarray(F(vals), dtype=float)
        return float(max(np.max(np.abs(upper - Fv)), np.max(np.abs(lower - Fv))))

    def to_csv(self, header_comment=None) -> str:
        buf = io.StringIO()
        if header_comment:
            buf.write("# " + header_comment + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["sample_index", "L1", "scaled_value"])
        for i, (L, s) in enumerate(zip(self.samples, self.scaled)):
            w.writerow([i, int(L), f"{s:.17g}"])
        return buf.getvalue()


def check_span(ecdf: EmpiricalCdf, table, tol=1e-5):
    """Raise :class:`UnderspanError` when samples fall where the table cannot stand in for F1."""
    lo, hi = float(table.x[0]), float(table.x[-1])
    if ecdf.sorted_values[0] < lo and table.F1[0] > tol:
        raise UnderspanError(f"samples reach {ecdf.sorted_values[0]:.3f} below grid start {lo}")
    if ecdf.sorted_values[-1] > hi and 1 - table.F1[-1] > tol:
        raise UnderspanError(f"samples reach {ecdf.sorted_values[-1]:.3f} above grid end {hi}")


@dataclass(frozen=True)
class EcdfResult:
    ecdf: EmpiricalCdf
    ks_distance: float
    config: SamplerConfig

    def summary(self) -> dict:
        return {
            "N": self.config.N,
            "k": self.config.k,
            "t": self.ecdf.t,
            "eta": self.ecdf.eta,
            "rho": self.ecdf.rho,
            "n_samples": self.config.n_samples,
            "ks_distance": self.ks_distance,
            "seed": self.config.seed,
            "backend": backend_name(),
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def k_for(N, t) -> int:
    """``round(t^2 N^2 / (1 - t^2))``."""
    return round(t * t * N * N / (1 - t * t))


def empirical_cdf(cfg: SamplerConfig, t: float, table=None, backend=None) -> EcdfResult:
    """Sample, scale and compare with F1 (``table`` defaults to the GOE table on [-10, 8])."""
    sc = scaling(t)
    mu = cfg.k / cfg.N - t * t * cfg.N / (1 - t * t)
    if abs(mu) > 2 * cfg.N ** (1 / 3) + 2:
        raise ValueError(f"k={cfg.k} is far from t^2 N^2/(1-t^2) for t={t}")
    if table is None:
        from .painleve import default_solution, f1_table

        table = f1_table(default_solution())
    ecdf = EmpiricalCdf(sample_many(cfg, backend), cfg.N, cfg.k, t, sc.eta, sc.rho)
    check_span(ecdf, table)
    return EcdfResult(ecdf, ecdf.ks_distance(table), cfg)


# ----------------------------------------------------------------------------
# raw exclusion-process walk (demonstration only)


def demo_walk(N: int, W: int, rng: np.random.Generator) -> PathConfig:
    """Unconditioned exclusion-process run of the first ``W`` particles over ``N`` ticks.

    Particles start at ``1..W``. A particle whose left site is free picks
    uniformly among staying put or moving left together with ``s`` of its
    adjacent successors, ``s = 0..(number of adjacent successors)``. Particles
    beyond ``W`` are frozen. No claim is made about the induced law.
    """
    if W < 1 or N < 0:
        raise ValueError("need W >= 1 and N >= 0")
    pos = list(range(1, W + 1))
    moves = [[] for _ in range(W)]
    for tick in range(1, N + 1):
        movers = []
        occupied = set(pos)
        w = 0
        while w < W:
            if pos[w] - 1 not in occupied:
                succ = 0
                while w + succ + 1 < W and pos[w + succ + 1] == pos[w + succ] + 1:
                    succ += 1
                choice = int(rng.integers(0, succ + 2))  # 0 = stay, else move with choice-1 successors
                if choice:
                    movers.extend(range(w, w + choice))
                w += succ + 1
            else:
                w += 1
        for w in movers:
            pos[w] -= 1
            moves[w].append(tick)
    return PathConfig(N, tuple(tuple(m) for m in moves))
