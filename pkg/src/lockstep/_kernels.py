"""Hot sampling kernels in two flavours: numba-compiled loops and numpy.

Both consume the generator in the same order (one ``random()`` for the
``(j, m)`` split, then Floyd's subset draws), so a given substream yields
the same sample on either backend.
"""
import numpy as np

from ._accel import USE_NUMBA, numba, numba_default


# ----------------------------------------------------------------------------
# numpy flavour


def multiset_np(rng, B, n):
    """Uniform occupancy of ``n`` balls in ``B`` boxes (stars and bars + Floyd)."""
    out = np.zeros(B, dtype=np.int64)
    if n == 0:
        return out
    T = B + n - 1
    marked = np.zeros(T, dtype=np.bool_)
    for r in range(T - n, T):
        v = rng.integers(0, r + 1)
        if marked[v]:
            marked[r] = True
        else:
            marked[v] = True
    pos = np.flatnonzero(marked)
    # ball at sorted slot s_r (0-based rank r) sits in box s_r - r
    return np.bincount(pos - np.arange(n), minlength=B).astype(np.int64)


def chain_np(support):
    """Longest chain ``i_1 < i_2 < ...``, ``k_1 > k_2 > ...`` through nonzero cells."""
    N = support.shape[0]
    prev = np.zeros(N + 1, dtype=np.int64)
    for i in range(N):
        c = np.maximum(prev[:N], support[i] * (1 + prev[1:]))
        cur = np.empty(N + 1, dtype=np.int64)
        cur[:N] = np.maximum.accumulate(c[::-1])[::-1]
        cur[N] = 0
        prev = cur
    return int(prev[0])


def support_np(N, diag, upper):
    S = np.zeros((N, N), dtype=np.int64)
    S[np.diag_indices(N)] = diag > 0
    iu = np.triu_indices(N, 1)
    S[iu] = upper > 0
    S[(iu[1], iu[0])] = upper > 0
    return S


def sample_one_np(rng, N, cdf, js, ms):
    u = rng.random()
    idx = int(np.searchsorted(cdf, u, side="right"))
    j, m = int(js[idx]), int(ms[idx])
    diag = multiset_np(rng, N, m)
    upper = multiset_np(rng, N * (N - 1) // 2, j)
    return j, m, chain_np(support_np(N, diag, upper))


# ----------------------------------------------------------------------------
# numba flavour


def _multiset_loop(rng, B, n, out):
    if n == 0:
        return
    T = B + n - 1
    marked = np.zeros(T, dtype=np.bool_)
    for r in range(T - n, T):
        v = rng.integers(0, r + 1)
        if marked[v]:
            marked[r] = True
        else:
            marked[v] = True
    box = 0
    for p in range(T):
        if marked[p]:
            out[box] += 1
        else:
            box += 1


def _chain_loop(N, diag, upper):
    # dense support from the symmetric parts; upper is row-major over i < k
    S = np.zeros((N, N), dtype=np.bool_)
    for i in range(N):
        S[i, i] = diag[i] > 0
    p = 0
    for i in range(N):
        for k in range(i + 1, N):
            if upper[p] > 0:
                S[i, k] = True
                S[k, i] = True
            p += 1
    prev = np.zeros(N + 1, dtype=np.int64)
    cur = np.zeros(N + 1, dtype=np.int64)
    for i in range(N):
        cur[N] = 0
        for k in range(N - 1, -1, -1):
            best = prev[k]
            if cur[k + 1] > best:
                best = cur[k + 1]
            if S[i, k] and prev[k + 1] + 1 > best:
                best = prev[k + 1] + 1
            cur[k] = best
        prev, cur = cur, prev
    return prev[0]


def _sample_one_loop(rng, N, cdf, js, ms):
    u = rng.random()
    idx = np.searchsorted(cdf, u, side="right")
    j = js[idx]
    m = ms[idx]
    diag = np.zeros(N, dtype=np.int64)
    upper = np.zeros(N * (N - 1) // 2, dtype=np.int64)
    multiset_nb(rng, N, m, diag)
    multiset_nb(rng, N * (N - 1) // 2, j, upper)
    return j, m, chain_nb(N, diag, upper)


if USE_NUMBA:
    multiset_nb = numba.njit(**numba_default)(_multiset_loop)
    chain_nb = numba.njit(**numba_default)(_chain_loop)
    sample_one_nb = numba.njit(**numba_default)(_sample_one_loop)
else:
    multiset_nb = _multiset_loop
    chain_nb = _chain_loop
    sample_one_nb = _sample_one_loop


def multiset(rng, B, n, backend=None):
    if (backend or ("numba" if USE_NUMBA else "numpy")) == "numba":
        out = np.zeros(B, dtype=np.int64)
        multiset_nb(rng, B, n, out)
        return out
    return multiset_np(rng, B, n)


def sample_one(rng, N, cdf, js, ms, backend=None):
    if (backend or ("numba" if USE_NUMBA else "numpy")) == "numba":
        j, m, L = sample_one_nb(rng, N, cdf, js, ms)
        return int(j), int(m), int(L)
    return sample_one_np(rng, N, cdf, js, ms)
