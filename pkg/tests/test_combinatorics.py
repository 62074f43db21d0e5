from fractions import Fraction
from itertools import product

import pytest

from lockstep import combinatorics as cb


def test_partition_validation():
    with pytest.raises(ValueError):
        cb.Partition((1, 2))
    with pytest.raises(ValueError):
        cb.Partition((2, 0))


def test_conjugate_and_odd_rows():
    lam = cb.Partition((3, 1))
    assert cb.conjugate(lam).parts == (2, 1, 1)
    assert lam.odd_rows() == 2
    assert lam.odd_columns() == 2
    assert cb.conjugate(cb.conjugate(lam)) == lam


def test_partition_counts():
    # p(n) for n = 0..10
    assert [len(list(cb.partitions(n))) for n in range(11)] == [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]


def test_ssyt_count_matches_enumeration():
    for lam in [(1,), (2,), (1, 1), (2, 1), (3, 1), (2, 2), (2, 1, 1)]:
        for N in range(1, 5):
            assert cb.ssyt_count(lam, N) == sum(1 for _ in cb.iter_ssyt(lam, N))


def test_ssyt_hook_content():
    # d_(2,1)(3) = 8, d_(2,2)(3) = 6, d_(1,1,1)(3) = 1
    assert cb.ssyt_count((2, 1), 3) == 8
    assert cb.ssyt_count((2, 2), 3) == 6
    assert cb.ssyt_count((1, 1, 1), 3) == 1
    assert cb.ssyt_count((1, 1, 1, 1), 3) == 0


def test_budget():
    with pytest.raises(cb.BudgetError):
        cb.ssyt_count((15,), 2)
    with pytest.raises(cb.BudgetError):
        cb.path_count_enumerated(3, 15)


def test_invalid_tableau():
    with pytest.raises(cb.InvalidTableauError):
        cb.Ssyt(((1, 1), (1,)))
    with pytest.raises(cb.InvalidTableauError):
        cb.Ssyt(((2, 1),))


@pytest.mark.parametrize("N,k", [(n, k) for n in range(1, 5) for k in range(0, 11)])
def test_b_exact_inf_equals_closed_form(N, k):
    for m in range(k % 2, k + 1, 2):
        j = (k - m) // 2
        assert cb.b_exact(N, j, m) == cb.b_inf(N, j, m)


def test_path_count_small():
    assert cb.path_count(2, 2) == 4
    assert cb.path_count(6, 14) == 5149056
    assert cb.path_count(6, 14) == cb.path_count_enumerated(6, 14)


def test_b_inf_row_matches_direct():
    for N, k in product(range(1, 9), range(0, 25)):
        direct = [cb.b_inf(N, (k - m) // 2, m) for m in range(k % 2, k + 1, 2)]
        assert cb.b_inf_row(N, k) == direct


def test_conditional_cdf():
    assert cb.conditional_cdf_exact(2, 2, 1) == Fraction(3, 4)
    # N=3, k=4: L_1 law {1: 15, 2: 21, 3: 3} / 39
    assert cb.path_count(3, 4) == 39
    assert cb.conditional_cdf_exact(3, 4, 1) == Fraction(15, 39)
    assert cb.conditional_cdf_exact(3, 4, 2) == Fraction(36, 39)
    assert cb.conditional_cdf_exact(3, 4, 3) == 1


def test_p_ratio_monotone_small():
    for N, j, m in product(range(1, 4), range(0, 3), range(0, 3)):
        if not cb.b_inf(N, j, m):
            continue
        for l in range(0, 6):
            p = cb.p_ratio(N, j, m, l)
            assert 0 <= p <= 1
            if cb.b_inf(N, j + 1, m):
                assert cb.p_ratio(N, j + 1, m, l) <= p
            if cb.b_inf(N, j, m + 1):
                assert cb.p_ratio(N, j, m + 1, l) <= p


def test_gov_round_trip():
    for lam in [(2, 1), (2, 2), (3, 1)]:
        for t in cb.iter_ssyt(lam, 3):
            p = cb.gov_to_path(t, 3)
            assert cb.collision_free(p)
            assert cb.gov_to_tableau(p) == t


def test_collision_detected():
    with pytest.raises(cb.InvalidPathError):
        cb.PathConfig(2, ((2,), (1,)))
    # moving together in lock step is allowed
    assert cb.PathConfig(2, ((1,), (1,))).total_moves == 2


def test_symconfig_count_and_rsk():
    import numpy as np

    from lockstep import _kernels

    for N, j, m in [(2, 1, 1), (3, 1, 2), (3, 2, 0), (3, 2, 1)]:
        configs = list(cb.iter_symconfigs(N, j, m))
        assert len(configs) == cb.b_inf(N, j, m)
        for c in configs:
            word = c.genperm().bottom
            L = cb.lds_length(word)
            # Schensted: strictly decreasing runs give the number of rows
            assert L == len(cb.rsk_insert(word)) == cb.rsk_shape(c).length
            # symmetric input: odd columns of the shape count the diagonal mass
            assert cb.rsk_shape(c).odd_columns() == m
            diag = np.array([c.entries[i][i] for i in range(N)])
            upper = np.array([c.entries[i][k] for i in range(N) for k in range(i + 1, N)])
            assert _kernels.chain_np(_kernels.support_np(N, diag, upper)) == L


def test_lds_simple():
    assert cb.lds_length([3, 2, 2, 1]) == 3
    assert cb.lds_length([]) == 0
    assert cb.lds_length([1, 2, 3]) == 1


def test_compositions():
    assert len(list(cb.compositions(3, 3))) == 10
    assert all(sum(c) == 4 for c in cb.compositions(4, 2))
