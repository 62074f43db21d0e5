"""Numba vs numpy timings for the sampling kernels.

    python benchmarks/bench_kernels.py [--reps 200] [--Ns 50,100,200]

Both backends read the same substreams, so the script also checks that they
return identical samples.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from lockstep import _kernels
from lockstep import sampler as sp
from lockstep._accel import USE_NUMBA


def timed(fn, reps):
    fn()  # warm-up (and JIT compile)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def bench_N(N, t, reps):
    k = sp.k_for(N, t)
    tab = sp.jm_table(N, k)
    j, m = int(tab.js[len(tab.js) // 2]), int(tab.ms[len(tab.ms) // 2])
    B = N * (N - 1) // 2
    rng = np.random.default_rng(0)
    diag = _kernels.multiset(rng, N, m, "numpy")
    upper = _kernels.multiset(rng, B, j, "numpy")
    S = _kernels.support_np(N, diag, upper)
    rows = []

    def pair(label, f_np, f_nb):
        a = timed(f_np, reps)
        b = timed(f_nb, reps) if USE_NUMBA else float("nan")
        rows.append((N, label, a, b))

    pair("multiset(upper)",
         lambda: _kernels.multiset(rng, B, j, "numpy"),
         lambda: _kernels.multiset(rng, B, j, "numba"))
    pair("chain",
         lambda: _kernels.chain_np(S),
         lambda: _kernels.chain_nb(N, diag, upper))
    counter = iter(range(10**9))
    pair("sample_one",
         lambda: _kernels.sample_one(sp.substream(1, next(counter)), N, tab.cdf, tab.js, tab.ms, "numpy"),
         lambda: _kernels.sample_one(sp.substream(1, next(counter)), N, tab.cdf, tab.js, tab.ms, "numba"))
    return rows


def identical(N, t, n):
    cfg = sp.SamplerConfig(N, sp.k_for(N, t), seed=7, n_samples=n)
    return bool(np.array_equal(sp.sample_many(cfg, "numpy"), sp.sample_many(cfg, "numba")))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--Ns", default="50,100,200")
    p.add_argument("--t", type=float, default=0.5)
    args = p.parse_args(argv)
    if not USE_NUMBA:
        print("numba disabled; timing numpy only", file=sys.stderr)
    print(f"{'N':>5} {'kernel':<16} {'numpy ms':>10} {'numba ms':>10} {'speedup':>8}")
    for N in (int(v) for v in args.Ns.split(",")):
        for n_, label, a, b in bench_N(N, args.t, args.reps):
            print(f"{n_:>5} {label:<16} {a * 1e3:>10.4f} {b * 1e3:>10.4f} {a / b:>8.1f}")
        if USE_NUMBA:
            print(f"{N:>5} {'bit-identical':<16} {identical(N, args.t, 200)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
