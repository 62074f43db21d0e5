"""Exact integer combinatorics for lock-step vicious walkers.

Partitions, semistandard tableaux, the Guttmann-Owczarek-Viennot (GOV)
path/tableau bijection, RSK on symmetric matrices and the closed-form
counts. Everything here is exact (Python ints and ``Fraction``) and
serves as the ground truth for the numerical modules.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

# Enumeration budget for tableau counting by direct DP.
MAX_SIZE = 14
MAX_ENTRY = 6


class BudgetError(ValueError):
    """Raised when an enumeration would exceed the configured budget."""


class InvalidTableauError(ValueError):
    pass


class InvalidPathError(ValueError):
    pass


# ----------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class Partition:
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"parts must be positive: {parts}")
        if any(a < b for a, b in zip(parts, parts[1:])):
            raise ValueError(f"parts must be weakly decreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        """Number of rows, i.e. the length of the first column."""
        return len(self.parts)

    def conjugate(self) -> "Partition":
        return conjugate(self)

    def odd_rows(self) -> int:
        return odd_rows(self)

    def odd_columns(self) -> int:
        return odd_rows(conjugate(self))

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __repr__(self):
        return f"Partition{self.parts}"


def _as_partition(lam) -> Partition:
    return lam if isinstance(lam, Partition) else Partition(tuple(lam))


def conjugate(lam) -> Partition:
    lam = _as_partition(lam)
    if not lam.parts:
        return Partition(())
    return Partition(tuple(sum(1 for p in lam.parts if p > c) for c in range(lam.parts[0])))


def odd_rows(lam) -> int:
    return sum(p & 1 for p in _as_partition(lam).parts)


def partitions(n: int, max_parts: int | None = None, max_part: int | None = None) -> Iterator[Partition]:
    """Partitions of ``n`` in reverse lexicographic order.

    ``max_parts`` bounds the number of rows and ``max_part`` the first row.
    """
    if n < 0:
        return
    if max_parts is None:
        max_parts = n
    if max_part is None:
        max_part = n

    def rec(remaining, cap, rows_left):
        if remaining == 0:
            yield ()
            return
        if rows_left == 0:
            return
        for first in range(min(remaining, cap), 0, -1):
            # the rest cannot fit in the remaining rows
            if first * rows_left < remaining:
                break
            for rest in rec(remaining - first, first, rows_left - 1):
                yield (first,) + rest

    for parts in rec(n, max_part, max_parts):
        yield Partition(parts)


# ----------------------------------------------------------------------------
# tableaux


@dataclass(frozen=True)
class Ssyt:
    """Semistandard Young tableau stored row by row."""

    rows: tuple[tuple[int, ...], ...] = ()
    bound: int | None = None

    def __post_init__(self):
        rows = tuple(tuple(int(v) for v in r) for r in self.rows if len(r) > 0)
        object.__setattr__(self, "rows", rows)
        _check_ssyt(rows, self.bound)

    @property
    def shape(self) -> Partition:
        return Partition(tuple(len(r) for r in self.rows))

    @property
    def size(self) -> int:
        return sum(len(r) for r in self.rows)

    def columns(self) -> list[list[int]]:
        if not self.rows:
            return []
        return [[r[c] for r in self.rows if len(r) > c] for c in range(len(self.rows[0]))]

    def entries(self) -> list[int]:
        return [v for r in self.rows for v in r]


def _check_ssyt(rows, bound):
    for a, b in zip(rows, rows[1:]):
        if len(b) > len(a):
            raise InvalidTableauError("row lengths must be weakly decreasing")
    for r in rows:
        if any(v < 1 for v in r):
            raise InvalidTableauError("entries must be positive")
        if bound is not None and any(v > bound for v in r):
            raise InvalidTableauError(f"entry exceeds bound {bound}")
        if any(a > b for a, b in zip(r, r[1:])):
            raise InvalidTableauError("rows must weakly increase")
    for upper, lower in zip(rows, rows[1:]):
        if any(lower[c] <= upper[c] for c in range(len(lower))):
            raise InvalidTableauError("columns must strictly increase")


def _check_budget(size, N, max_size, max_entry):
    if size > max_size or N > max_entry:
        raise BudgetError(
            f"enumeration budget exceeded: size {size} (max {max_size}), entries {N} (max {max_entry})"
        )


@lru_cache(maxsize=None)
def _ssyt_count_dp(col_heights: tuple[int, ...], N: int) -> int:
    # columns left to right; state is the content of the previous column,
    # which must dominate-from-below the next one row by row
    if not col_heights:
        return 1
    counts: dict[tuple[int, ...], int] = {
        col: 1 for col in itertools.combinations(range(1, N + 1), col_heights[0])
    }
    for h in col_heights[1:]:
        nxt: dict[tuple[int, ...], int] = {}
        for col in itertools.combinations(range(1, N + 1), h):
            total = 0
            for prev, c in counts.items():
                if all(prev[r] <= col[r] for r in range(h)):
                    total += c
            if total:
                nxt[col] = total
        counts = nxt
    return sum(counts.values())


def ssyt_count(lam, N: int, max_size: int = MAX_SIZE, max_entry: int = MAX_ENTRY) -> int:
    """Number of SSYT of shape ``lam`` with entries in ``{1..N}``.

    Counted by dynamic programming over columns, no product formula.
    """
    lam = _as_partition(lam)
    if N < 0:
        raise ValueError("N must be nonnegative")
    if lam.length > N:
        return 0 if lam.size else 1
    _check_budget(lam.size, N, max_size, max_entry)
    return _ssyt_count_dp(tuple(conjugate(lam).parts), N)


def iter_ssyt(lam, N: int) -> Iterator[Ssyt]:
    """All SSYT of shape ``lam`` with entries ``<= N`` (row by row backtracking)."""
    lam = _as_partition(lam)
    shape = lam.parts
    cells = [(r, c) for r, ln in enumerate(shape) for c in range(ln)]
    grid = [[0] * ln for ln in shape]

    def rec(i):
        if i == len(cells):
            yield Ssyt(tuple(tuple(row) for row in grid), bound=N)
            return
        r, c = cells[i]
        lo = 1
        if c > 0:
            lo = max(lo, grid[r][c - 1])
        if r > 0:
            lo = max(lo, grid[r - 1][c] + 1)
        for v in range(lo, N + 1):
            grid[r][c] = v
            yield from rec(i + 1)
        grid[r][c] = 0

    yield from rec(0)


# ----------------------------------------------------------------------------
# closed-form and enumerated counts


def b_inf(N: int, j: int, m: int) -> int:
    """Tableaux of size ``2j+m`` with ``m`` odd columns, entries ``<= N``."""
    if j < 0 or m < 0:
        return 0
    upper = N * (N - 1) // 2
    first = 1 if j == 0 else (comb(upper + j - 1, j) if upper > 0 else 0)
    second = 1 if m == 0 else (comb(N + m - 1, m) if N > 0 else 0)
    return first * second


def b_exact(N: int, j: int, m: int, l: int | None = None, max_size: int = MAX_SIZE,
            max_entry: int = MAX_ENTRY) -> int:
    """Sum of ``d_lambda(N)`` over ``lambda |- 2j+m`` with ``m`` odd columns and at most ``l`` rows.

    ``l=None`` removes the row restriction.
    """
    n = 2 * j + m
    if n == 0:
        return 1
    rows = N if l is None else min(l, N)
    if rows <= 0:
        return 0
    _check_budget(n, N, max_size, max_entry)
    total = 0
    for lam in partitions(n, max_parts=rows):
        if odd_rows(conjugate(lam)) == m:
            total += ssyt_count(lam, N, max_size, max_entry)
    return total


def path_count(N: int, k: int) -> int:
    """``|P(N,k)|``: lock-step configurations over ``N`` steps with ``k`` left moves."""
    if N < 0 or k < 0:
        raise ValueError("N and k must be nonnegative")
    return sum(b_inf_row(N, k))


def b_inf_row(N: int, k: int) -> list[int]:
    """``b_inf(N, (k-m)/2, m)`` for ``m = k%2, k%2+2, ..., k``.

    Consecutive terms obey
    ``a(m+2)/a(m) = (N+m+1)(N+m)(k-m) / ((m+2)(m+1)(N(N-1)+k-m-2))`` and the
    division is exact, which avoids recomputing huge binomials.
    """
    if N < 0 or k < 0:
        raise ValueError("N and k must be nonnegative")
    ms = range(k % 2, k + 1, 2)
    if N < 2:
        return [b_inf(N, (k - m) // 2, m) for m in ms]
    out = []
    a = b_inf(N, k // 2, k % 2)
    for m in ms:
        out.append(a)
        if m + 2 <= k:
            num = a * (N + m + 1) * (N + m) * (k - m)
            den = (m + 2) * (m + 1) * (N * (N - 1) + k - m - 2)
            a, rem = divmod(num, den)
            if rem:
                raise ArithmeticError("inexact ratio step")
    return out


def path_count_enumerated(N: int, k: int, max_size: int = MAX_SIZE, max_entry: int = MAX_ENTRY) -> int:
    """Brute-force ``|P(N,k)|`` as the number of SSYT of size ``k`` with entries ``<= N``."""
    _check_budget(k, N, max_size, max_entry)
    return sum(ssyt_count(lam, N, max_size, max_entry) for lam in partitions(k, max_parts=N))


def p_ratio(N: int, j: int, m: int, l: int | None, **budget) -> Fraction:
    return Fraction(b_exact(N, j, m, l, **budget), b_inf(N, j, m))


def conditional_cdf_exact(N: int, k: int, l: int, **budget) -> Fraction:
    """Exact ``P(L_1(N,k) <= l)`` under the uniform measure on ``P(N,k)``."""
    num = sum(b_exact(N, (k - m) // 2, m, l, **budget) for m in range(k % 2, k + 1, 2))
    return Fraction(num, path_count(N, k))


# ----------------------------------------------------------------------------
# GOV bijection


@dataclass(frozen=True)
class PathConfig:
    """Left-move times of each walker over a horizon of ``N`` steps.

    Walker ``w`` (0-based, leftmost first) made its left moves at the sorted
    times ``left_moves[w]``. Walkers that never move left are omitted.
    """

    horizon: int
    left_moves: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        moves = tuple(tuple(int(v) for v in w) for w in self.left_moves)
        while moves and not moves[-1]:
            moves = moves[:-1]
        object.__setattr__(self, "left_moves", moves)
        for w in moves:
            if any(v < 1 or v > self.horizon for v in w):
                raise InvalidPathError("move time outside 1..N")
            if any(a >= b for a, b in zip(w, w[1:])):
                raise InvalidPathError("move times must be strictly increasing per walker")
        if not collision_free(self):
            raise InvalidPathError("walkers collide")

    @property
    def total_moves(self) -> int:
        return sum(len(w) for w in self.left_moves)

    def moves_of(self, walker: int) -> int:
        return len(self.left_moves[walker]) if walker < len(self.left_moves) else 0

    def positions(self):
        """Lattice positions, shape ``(N+1, W)``, for the walkers that move left.

        Walker ``w`` starts at ``2w``; every tick it moves by +1 or -1.
        """
        W = len(self.left_moves)
        out = [[2 * w for w in range(W)]]
        for step in range(1, self.horizon + 1):
            prev = out[-1]
            out.append([prev[w] + (-1 if step in set(self.left_moves[w]) else 1) for w in range(W)])
        return out


def collision_free(p: PathConfig) -> bool:
    """Check the lock-step exclusion directly on trajectories.

    Walkers beyond the last listed one never move left; they only need to stay
    clear of it, which is automatic since they move right every tick.
    """
    W = len(p.left_moves)
    pos = [2 * w for w in range(W)]
    sets = [set(w) for w in p.left_moves]
    for step in range(1, p.horizon + 1):
        pos = [pos[w] + (-1 if step in sets[w] else 1) for w in range(W)]
        if any(a >= b for a, b in zip(pos, pos[1:])):
            return False
    return True


def gov_to_tableau(p: PathConfig) -> Ssyt:
    """Column ``w`` of the tableau lists the left-move times of walker ``w``."""
    cols = p.left_moves
    if not cols:
        return Ssyt((), bound=p.horizon)
    depth = max(len(c) for c in cols)
    rows = tuple(tuple(c[r] for c in cols if len(c) > r) for r in range(depth))
    return Ssyt(rows, bound=p.horizon)


def gov_to_path(t: Ssyt, N: int) -> PathConfig:
    _check_ssyt(t.rows, N)
    return PathConfig(N, tuple(tuple(c) for c in t.columns()))


# ----------------------------------------------------------------------------
# generalized permutations and RSK


@dataclass(frozen=True)
class GenPerm:
    """Two-rowed array in lexicographic order."""

    top: tuple[int, ...] = ()
    bottom: tuple[int, ...] = ()

    def __post_init__(self):
        top = tuple(int(v) for v in self.top)
        bottom = tuple(int(v) for v in self.bottom)
        if len(top) != len(bottom):
            raise ValueError("rows must have equal length")
        for r in range(len(top) - 1):
            if (top[r], bottom[r]) > (top[r + 1], bottom[r + 1]):
                raise ValueError("pairs must be in lexicographic order")
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple[int, int]]) -> "GenPerm":
        pairs = sorted(pairs)
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @classmethod
    def from_matrix(cls, a) -> "GenPerm":
        """Pair ``(i, k)`` repeated ``a[i][k]`` times, 1-based labels."""
        top, bottom = [], []
        for i, row in enumerate(a):
            for k, cnt in enumerate(row):
                top.extend([i + 1] * int(cnt))
                bottom.extend([k + 1] * int(cnt))
        return cls(tuple(top), tuple(bottom))

    def __len__(self):
        return len(self.top)


@dataclass(frozen=True)
class SymConfig:
    """Symmetric nonnegative integer matrix encoding a configuration."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        a = tuple(tuple(int(v) for v in row) for row in self.entries)
        n = len(a)
        if any(len(row) != n for row in a):
            raise ValueError("matrix must be square")
        for i in range(n):
            for k in range(n):
                if a[i][k] < 0:
                    raise ValueError("entries must be nonnegative")
                if a[i][k] != a[k][i]:
                    raise ValueError("matrix must be symmetric")
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return len(self.entries)

    @property
    def diag_sum(self) -> int:
        return sum(self.entries[i][i] for i in range(self.dim))

    @property
    def upper_sum(self) -> int:
        n = self.dim
        return sum(self.entries[i][k] for i in range(n) for k in range(i + 1, n))

    def genperm(self) -> GenPerm:
        return GenPerm.from_matrix(self.entries)

    @classmethod
    def from_parts(cls, N: int, diagonal: Sequence[int], upper: Sequence[int]) -> "SymConfig":
        """Build from diagonal occupancies and strict-upper occupancies in row-major order."""
        a = [[0] * N for _ in range(N)]
        for i in range(N):
            a[i][i] = int(diagonal[i])
        idx = 0
        for i in range(N):
            for k in range(i + 1, N):
                a[i][k] = a[k][i] = int(upper[idx])
                idx += 1
        return cls(tuple(tuple(r) for r in a))


def lds_length(g) -> int:
    """Longest strictly decreasing subsequence of the bottom row.

    Patience sorting on the negated word: a strictly decreasing run in the
    word is a strictly increasing run after negation.
    """
    word = g.bottom if isinstance(g, GenPerm) else g
    tails: list[int] = []
    for v in word:
        x = -v
        pos = bisect.bisect_left(tails, x)
        if pos == len(tails):
            tails.append(x)
        else:
            tails[pos] = x
    return len(tails)


def rsk_insert(word: Sequence[int]) -> list[list[int]]:
    """Row-insertion tableau of ``word`` (Schensted bumping, weak rows)."""
    P: list[list[int]] = []
    for v in word:
        x = v
        for row in P:
            pos = bisect.bisect_right(row, x)
            if pos == len(row):
                row.append(x)
                x = None
                break
            row[pos], x = x, row[pos]
        if x is not None:
            P.append([x])
    return P


def rsk_shape(c: SymConfig) -> Partition:
    P = rsk_insert(c.genperm().bottom)
    return Partition(tuple(len(r) for r in P))


def iter_symconfigs(N: int, j: int, m: int) -> Iterator[SymConfig]:
    """All symmetric ``N x N`` matrices with diagonal sum ``m`` and strict-upper sum ``j``."""
    B = N * (N - 1) // 2
    for diag in compositions(m, N):
        for upper in compositions(j, B):
            yield SymConfig.from_parts(N, diag, upper)


def compositions(n: int, boxes: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``n`` into ``boxes`` parts (balls into boxes)."""
    if boxes == 0:
        if n == 0:
            yield ()
        return
    if boxes == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in compositions(n - first, boxes - 1):
            yield (first,) + rest
