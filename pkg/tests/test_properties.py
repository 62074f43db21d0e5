import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from lockstep import _kernels
from lockstep import combinatorics as cb
from lockstep import sampler as sp

small_partition = st.lists(st.integers(1, 3), min_size=0, max_size=4).map(lambda xs: tuple(sorted(xs, reverse=True)))


@given(small_partition, st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_ssyt_count_equals_enumeration(lam, N):
    assert cb.ssyt_count(lam, N) == sum(1 for _ in cb.iter_ssyt(lam, N))


@given(small_partition)
def test_conjugate_involution(lam):
    p = cb.Partition(lam)
    assert p.conjugate().conjugate() == p
    assert p.conjugate().size == p.size


@given(st.integers(1, 12), st.integers(0, 40))
@settings(max_examples=80, deadline=None)
def test_b_inf_row_sum(N, k):
    row = cb.b_inf_row(N, k)
    assert sum(row) == cb.path_count(N, k)
    assert all(v >= 0 for v in row)


@given(st.integers(1, 30), st.integers(0, 30), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_multiset_totals(B, n, seed):
    rng = np.random.default_rng(seed)
    out = _kernels.multiset(rng, B, n)
    assert out.sum() == n and len(out) == B and out.min() >= 0


@given(st.integers(2, 12), st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_chain_kernels_agree(N, seed):
    rng = np.random.default_rng(seed)
    diag = rng.integers(0, 2, N)
    upper = rng.integers(0, 2, N * (N - 1) // 2)
    a = _kernels.chain_np(_kernels.support_np(N, diag, upper))
    b = int(_kernels.chain_nb(N, diag.astype(np.int64), upper.astype(np.int64)))
    assert a == b
    c = cb.SymConfig.from_parts(N, diag.tolist(), upper.tolist())
    assert a == cb.lds_length(c.genperm())


@given(st.integers(1, 8), st.integers(1, 20), st.integers(0, 2**63))
@settings(max_examples=30, deadline=None)
def test_sample_in_range(N, k, seed):
    L = sp.sample_L1(N, k, sp.substream(seed, 0))
    assert 1 <= L <= min(N, k)


@given(st.lists(st.integers(1, 4), min_size=0, max_size=6))
def test_lds_at_most_length(word):
    L = cb.lds_length(word)
    assert L <= len(word)
    assert L == len(cb.rsk_insert(word))
