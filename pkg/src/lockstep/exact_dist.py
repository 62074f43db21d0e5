"""High-precision evaluation of the column generating function phi(N, l, t, beta).

Two independent routes are provided for odd ``l = 2l'+1``:

* the Hankel route, ``(1-t^2)^{N(N-1)/2} det H_{l'}`` with the moment matrix
  of the weight ``(1+t^2-2tx)^{-N} sqrt(1-x^2)`` on ``[-1, 1]``;
* the OPUC route, an infinite product over Verblunsky coefficients and norms
  of the orthogonal polynomials for the circle weight
  ``(1-tz)^{-N}(1-t/z)^{-N}``, produced by the Levinson recursion.

A third, purely combinatorial route (``phi_direct_sum``) sums tableau counts
directly and carries a certified tail bound. All arithmetic is mpmath at a
working precision chosen by :class:`PrecisionPolicy`; a result is accepted
once two consecutive precision levels agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Sequence

import mpmath as mp

from . import combinatorics as cb


class PrecisionError(ArithmeticError):
    """Two precision levels never agreed, or a positivity check failed."""


@dataclass(frozen=True)
class PrecisionPolicy:
    bits: int = 256
    target_tol: float = 1e-24
    max_escalations: int = 4

    def __post_init__(self):
        if self.bits < 64:
            raise ValueError("bits must be at least 64")
        if self.max_escalations < 1:
            raise ValueError("max_escalations must be at least 1")

    def levels(self):
        return [self.bits * 2**i for i in range(self.max_escalations + 1)]


DEFAULT_POLICY = PrecisionPolicy()


def escalate(compute: Callable[[int], object], policy: PrecisionPolicy, distance=None):
    """Run ``compute(bits)`` at doubling precision until two levels agree.

    Returns ``(value, bits)`` for the higher of the two agreeing levels.
    ``compute`` may raise :class:`PrecisionError` to force the next level.
    """
    if distance is None:
        distance = lambda a, b: abs(a - b)  # noqa: E731
    prev = None
    last_err = None
    for bits in policy.levels():
        try:
            cur = compute(bits)
        except PrecisionError as exc:
            last_err = exc
            prev = None
            continue
        if prev is not None:
            with mp.workprec(bits):
                if distance(prev, cur) <= policy.target_tol:
                    return cur, bits
        prev = cur
    raise PrecisionError(
        f"no agreement within {policy.target_tol:g} up to {policy.levels()[-1]} bits"
        + (f" ({last_err})" if last_err else "")
    )


def _check_t(t):
    if not 0 < float(t) < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")


# ----------------------------------------------------------------------------
# Toeplitz moments of the circle weight


@dataclass(frozen=True)
class ToeplitzMoments:
    """Fourier coefficients ``c_0..c_K`` of ``(1-tz)^{-N}(1-t/z)^{-N}``."""

    t: float
    N: float
    coeffs: tuple
    truncation_error: object
    bits: int

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[abs(k)]


def _binomial_series(N, t, bits, rel_tol_bits):
    """Taylor coefficients ``b_j = binom(N+j-1, j) t^j`` of ``(1-tz)^{-N}``.

    Returns the list, a certified bound on the dropped ``sum_{j>J} b_j^2``
    and the ratio bound used for it.
    """
    t = mp.mpf(t)
    b = [mp.mpf(1)]
    j = 0
    total_sq = mp.mpf(1)
    eps = mp.ldexp(1, -rel_tol_bits)
    while True:
        r = t * (N + j) / (j + 1)
        nxt = b[-1] * r
        # later ratios t(N+m)/(m+1) decrease in m when N >= 1 and increase to t otherwise
        r_bound = max(r, t) if N < 1 else r
        if r_bound < 1:
            tail_sq = nxt * nxt / (1 - r_bound * r_bound)
            if tail_sq <= eps * total_sq:
                return b, tail_sq, r_bound
        b.append(nxt)
        total_sq += nxt * nxt
        j += 1


def _binomial_series_int(N, t, frac_bits, rel_tol_bits):
    """Fixed-point version of :func:`_binomial_series` for integer ``N``.

    ``t`` is the exact binary fraction of the float; ``B_j ~ b_j 2^frac_bits``
    with a truncation error of at most ``j`` units in the last place.
    """
    num, den = float(t).as_integer_ratio()
    one = 1 << frac_bits
    B = [one]
    total_sq = one * one
    j = 0
    while True:
        nxt = B[-1] * (N + j) * num // ((j + 1) * den)
        # ratio bound t(N+j)/(j+1) is nonincreasing in j for N >= 1
        r_num, r_den = (N + j) * num, (j + 1) * den
        if r_num < r_den:
            # tail_sq <= nxt^2 / (1 - r^2), compared against 2^-rel_tol_bits * total
            lhs = (nxt + 1) ** 2 * r_den * r_den << rel_tol_bits
            rhs = total_sq * (r_den * r_den - r_num * r_num)
            if lhs <= rhs:
                tail_sq = mp.mpf((nxt + 1) ** 2) / mp.mpf(one) ** 2 / (1 - mp.mpf(r_num) ** 2 / mp.mpf(r_den) ** 2)
                return B, tail_sq
        B.append(nxt)
        total_sq += nxt * nxt
        j += 1


@lru_cache(maxsize=256)
def _toeplitz_cached(N, t, K, bits):
    with mp.workprec(bits):
        if N == 0:
            coeffs = (mp.mpf(1),) + tuple(mp.mpf(0) for _ in range(K))
            return ToeplitzMoments(t, N, coeffs, mp.mpf(0), bits)
        guard = 32
        if float(N) == int(N):
            N = int(N)
            frac_bits = bits + guard + K.bit_length() + 8
            B, tail_sq = _binomial_series_int(N, t, frac_bits, bits + guard)
            L = len(B)
            scale = mp.ldexp(1, -2 * frac_bits)
            coeffs = []
            for k in range(K + 1):
                if k < L:
                    s = sum(x * y for x, y in zip(B[: L - k], B[k:]))
                else:
                    s = 0
                coeffs.append(mp.mpf(s) * scale)
            # fixed-point rounding: each B_j is low by at most j+1 ulps
            rounding = mp.mpf(2 * L * (L + 1)) * mp.sqrt(mp.mpf(sum(x * x for x in B))) * mp.ldexp(1, -2 * frac_bits)
            err = tail_sq + rounding
        else:
            N = mp.mpf(N)
            b, tail_sq, _ = _binomial_series(N, t, bits + guard, bits + guard)
            L = len(b)
            coeffs = [mp.fdot(b[: L - k], b[k:]) if k < L else mp.mpf(0) for k in range(K + 1)]
            err = tail_sq
        # Cauchy-Schwarz: the dropped part of sum_m b_m b_{m+k} is at most the dropped sum of squares
        return ToeplitzMoments(float(t), N, tuple(coeffs), err, bits)


def toeplitz_moments(N, t, K, policy: PrecisionPolicy = DEFAULT_POLICY, bits=None) -> ToeplitzMoments:
    """Coefficients ``c_0..c_K`` at ``bits`` (default: ``policy.bits``)."""
    _check_t(t)
    if N < 0:
        raise ValueError("N must be nonnegative")
    return _toeplitz_cached(N, float(t), int(K), int(bits or policy.bits))


def toeplitz_coeff(N, t, k, policy: PrecisionPolicy = DEFAULT_POLICY):
    """``c_k = t^k sum_m binom(N+m-1, m) binom(N+m+k-1, m+k) t^{2m}``."""
    k = abs(int(k))
    return toeplitz_moments(N, t, k, policy).coeffs[k]


# ----------------------------------------------------------------------------
# Hankel moments


@lru_cache(maxsize=None)
def _mode_coefficients(s: int) -> tuple[tuple[int, int], ...]:
    """Integer coefficients ``E_p`` of ``(z + 1/z)^s (z - 1/z)^2``, keyed by ``|p|``.

    ``cos^s(theta) sin^2(theta) = -2^{-(s+2)} sum_p E_p z^p`` with ``z = e^{i theta}``.
    """
    coef: dict[int, int] = {}
    for r in range(s + 1):
        base = comb(s, r)
        e = s - 2 * r
        for shift, w in ((2, 1), (0, -2), (-2, 1)):
            p = abs(e + shift)
            coef[p] = coef.get(p, 0) + base * w
    return tuple(sorted((p, v) for p, v in coef.items() if v))


def hankel_moment_modes(s: int, moments: ToeplitzMoments):
    """``h_s`` by pairing the cosine modes of ``x^s (1-x^2)`` with ``c_p``."""
    terms = _mode_coefficients(s)
    if terms[-1][0] >= len(moments.coeffs):
        raise ValueError(f"need c_k up to k={terms[-1][0]}")
    with mp.workprec(moments.bits):
        return -mp.fsum(v * moments.coeffs[p] for p, v in terms) / 2


def hankel_moment_quadrature(N, t, s: int, bits: int, rel_tol=None, max_nodes=1 << 16):
    """``h_s`` by nested Gauss-Chebyshev (second kind) quadrature with node doubling.

    Nodes ``x_i = cos(i pi/(n+1))``; going from ``n`` to ``2n+1`` reuses every
    old node, so successive estimates are compared until they agree.
    """
    with mp.workprec(bits):
        t = mp.mpf(t)
        tol = mp.ldexp(1, -bits + 8) if rel_tol is None else mp.mpf(rel_tol)
        a = 1 + t * t

        def g(theta):
            x = mp.cos(theta)
            return x**s * (a - 2 * t * x) ** (-N) * mp.sin(theta) ** 2

        n = 15
        # store sums over interior nodes theta_i = i pi/(n+1); the |g| sum sets
        # the scale so that a vanishing moment still converges
        vals = [g(mp.pi * i / (n + 1)) for i in range(1, n + 1)]
        acc, acc_abs = mp.fsum(vals), mp.fsum(abs(v) for v in vals)
        prev = acc * mp.pi / (n + 1)
        while True:
            m = 2 * n + 1
            vals = [g(mp.pi * i / (m + 1)) for i in range(1, m + 1, 2)]
            acc += mp.fsum(vals)
            acc_abs += mp.fsum(abs(v) for v in vals)
            n = m
            cur = acc * mp.pi / (n + 1)
            if abs(cur - prev) <= tol * acc_abs * mp.pi / (n + 1):
                return mp.ldexp(cur, s + 1) / mp.pi
            if n > max_nodes:
                raise PrecisionError("quadrature did not converge")
            prev = cur


def hankel_moment(N, t, j, k, policy: PrecisionPolicy = DEFAULT_POLICY):
    """``h_{jk}`` checked by two evaluators (mode pairing and quadrature).

    Returns the mode-pairing value; raises :class:`PrecisionError` when the
    evaluators disagree beyond ``policy.target_tol`` (relative to ``max(1, |h|)``)
    after all escalations.
    """
    _check_t(t)
    s = j + k

    def both(bits):
        c = toeplitz_moments(N, t, s + 2, bits=bits)
        a = hankel_moment_modes(s, c)
        b = hankel_moment_quadrature(N, t, s, bits)
        with mp.workprec(bits):
            if abs(a - b) > policy.target_tol * max(1, abs(a)):
                raise PrecisionError(f"moment evaluators disagree at {bits} bits: {a} vs {b}")
        return a

    value, _ = escalate(both, policy, distance=lambda x, y: abs(x - y) / max(1, abs(y)))
    return value


@dataclass(frozen=True)
class MomentMatrix:
    l: int
    moments: tuple  # h_0 .. h_{2l-2}
    bits: int

    def matrix(self):
        with mp.workprec(self.bits):
            return mp.matrix([[self.moments[i + j] for j in range(self.l)] for i in range(self.l)])

    def entry(self, i, j):
        return self.moments[i + j]


def moment_matrix(N, t, l, bits, check_quadrature=False, rel_tol=None) -> MomentMatrix:
    c = toeplitz_moments(N, t, max(2 * l, 2), bits=bits)
    hs = []
    for s in range(max(2 * l - 1, 0)):
        h = hankel_moment_modes(s, c)
        if check_quadrature:
            q = hankel_moment_quadrature(N, t, s, bits)
            tol = mp.ldexp(1, -bits // 2) if rel_tol is None else rel_tol
            with mp.workprec(bits):
                if abs(h - q) > tol * max(1, abs(h)):
                    raise PrecisionError(f"h_{s}: modes {h} vs quadrature {q}")
        hs.append(h)
    return MomentMatrix(l, tuple(hs), bits)


def ldl_pivots(M: MomentMatrix):
    """Pivots of the symmetric LDL^T factorisation, no pivoting.

    All pivots positive is equivalent to every leading principal minor
    being positive.
    """
    n = M.l
    with mp.workprec(M.bits):
        A = [[M.entry(i, j) for j in range(n)] for i in range(n)]
        L = [[mp.mpf(0)] * n for _ in range(n)]
        d = []
        for j in range(n):
            dj = A[j][j] - mp.fsum(L[j][k] ** 2 * d[k] for k in range(j))
            if dj <= 0:
                raise PrecisionError(f"moment matrix not positive definite at pivot {j}")
            d.append(dj)
            for i in range(j + 1, n):
                L[i][j] = (A[i][j] - mp.fsum(L[i][k] * L[j][k] * d[k] for k in range(j))) / dj
        return d


def _odd_half(l_odd):
    l_odd = int(l_odd)
    if l_odd < 1 or l_odd % 2 == 0:
        raise ValueError(f"route needs odd l >= 1, got {l_odd}")
    return (l_odd - 1) // 2


def _phi_hankel_at(N, t, lh, bits, check_quadrature):
    M = moment_matrix(N, t, lh, bits, check_quadrature=check_quadrature)
    d = ldl_pivots(M) if lh else []
    with mp.workprec(bits):
        t = mp.mpf(t)
        pref = (1 - t * t) ** (mp.mpf(N) * (N - 1) / 2)
        return pref * mp.fprod(d)


def phi_hankel(N, l_odd, t, policy: PrecisionPolicy = DEFAULT_POLICY, check_quadrature=True):
    """``phi(N, 2l'+1, t) = (1-t^2)^{N(N-1)/2} det H_{l'}``."""
    _check_t(t)
    lh = _odd_half(l_odd)

    def run(bits):
        return _phi_hankel_at(N, t, lh, bits, False)

    value, bits = escalate(run, policy)
    if check_quadrature and lh:
        # independent moment evaluator at the accepted precision
        moment_matrix(N, t, lh, bits, check_quadrature=True)
    if value - 1 > policy.target_tol or value < -policy.target_tol:
        raise PrecisionError(f"phi_hankel out of [0, 1]: {value}")
    return value


def hankel_minors(N, t, l, bits=256):
    """Leading principal minors ``det H_1 .. det H_l``."""
    d = ldl_pivots(moment_matrix(N, t, l, bits))
    with mp.workprec(bits):
        out, acc = [], mp.mpf(1)
        for v in d:
            acc *= v
            out.append(acc)
        return out


# ----------------------------------------------------------------------------
# Levinson recursion / Verblunsky coefficients


@dataclass
class VerblunskyData:
    """``pi0[n] = pi_n(0)`` for ``n >= 1`` (``pi0[0] = 1``) and norms ``N_n``."""

    pi0: list = field(default_factory=list)
    norms: list = field(default_factory=list)
    bits: int = 256

    @property
    def n_max(self):
        return len(self.norms) - 1


class Levinson:
    """Incremental Levinson recursion for a real even Toeplitz weight.

    The monic polynomials obey ``pi_{n+1}(z) = z pi_n(z) + pi_{n+1}(0) pi_n^*(z)``
    and the norms ``N_{n+1} = (1 - pi_{n+1}(0)^2) N_n``.
    """

    def __init__(self, moments: ToeplitzMoments):
        self.moments = moments
        self.bits = moments.bits
        with mp.workprec(self.bits):
            self.poly = [mp.mpf(1)]
            self.data = VerblunskyData([mp.mpf(1)], [moments.coeffs[0]], self.bits)

    def extend(self, n_max):
        c = self.moments.coeffs
        if n_max >= len(c):
            raise ValueError(f"need c_k up to k={n_max}, have {len(c) - 1}")
        with mp.workprec(self.bits):
            a = self.poly
            data = self.data
            while data.n_max < n_max:
                n = data.n_max
                Nn = data.norms[-1]
                s = mp.fdot(a, c[1 : n + 2])
                alpha = -s / Nn
                if abs(alpha) >= 1:
                    raise PrecisionError(f"|pi_{n + 1}(0)| >= 1: precision exhausted")
                # pi_n^* has reversed coefficients
                new = [mp.mpf(0)] * (n + 2)
                for i in range(n + 1):
                    new[i + 1] += a[i]
                    new[i] += alpha * a[n - i]
                a = new
                data.pi0.append(alpha)
                data.norms.append((1 - alpha * alpha) * Nn)
            self.poly = a
        return data


def levinson(moments: ToeplitzMoments, n_max: int) -> VerblunskyData:
    return Levinson(moments).extend(n_max)


def verblunsky(N, t, n_max, bits) -> VerblunskyData:
    return _verblunsky_cached(N, float(t), int(n_max), int(bits))


@lru_cache(maxsize=64)
def _verblunsky_cached(N, t, n_max, bits):
    return levinson(toeplitz_moments(N, t, n_max + 1, bits=bits), n_max)


def verblunsky_converged(N, t, n_max, policy: PrecisionPolicy = DEFAULT_POLICY):
    """Levinson output accepted once two precision levels agree on every ``pi_n(0)``
    and on ``1/N_n`` (relative)."""

    def run(bits):
        return verblunsky(N, t, n_max, bits)

    def dist(a, b):
        d1 = max(abs(x - y) for x, y in zip(a.pi0, b.pi0))
        d2 = max(abs(1 - x / y) for x, y in zip(a.norms, b.norms))
        return max(d1, d2)

    value, _ = escalate(run, policy, distance=dist)
    return value


def _opuc_factors(data: VerblunskyData, lh):
    """``log((1 - pi_{2j+2}(0)) / N_{2j+2})`` for ``j >= lh`` while available."""
    out = []
    j = lh
    while 2 * j + 2 <= data.n_max:
        n = 2 * j + 2
        out.append(mp.log(1 - data.pi0[n]) - mp.log(data.norms[n]))
        j += 1
    return out


def _tail_bound(logs, window=4):
    """Geometric bound on the sum of the remaining ``|log f_j|`` or ``None``."""
    if len(logs) < window + 1:
        return None
    mags = [abs(x) for x in logs[-window - 1 :]]
    if mags[-1] == 0:
        return mp.mpf(0)
    ratios = [mags[i + 1] / mags[i] if mags[i] else mp.inf for i in range(window)]
    r = max(ratios)
    if not r < 1:
        return None
    # require decay to be steady, not a lucky dip
    if any(mags[i + 1] > mags[i] for i in range(window)):
        return None
    return mags[-1] * r / (1 - r)


def _phi_opuc_at(N, t, lh, bits, tol, n_cap):
    with mp.workprec(bits):
        if N == 0:
            return mp.mpf(1), mp.mpf(0)
        if float(N) == int(N):
            # 1/|1-tz|^{2N} is a Bernstein-Szego weight: pi_n(0) = 0 for n > N
            # and N_n = 1 for n >= N, so the product is finite.
            N = int(N)
            n_max = max(N, 2 * lh + 2) + 8
            data = verblunsky(N, t, n_max, bits)
            eps = mp.ldexp(1, -bits // 2)
            for n in range(N + 1, n_max + 1):
                if abs(data.pi0[n]) > eps or abs(data.norms[n] - 1) > eps:
                    raise PrecisionError(f"Verblunsky tail not vanishing at n={n}")
            logs = _opuc_factors(data, lh)[: max(0, (N - 2 * lh) // 2)]
            return mp.exp(mp.fsum(logs)), mp.mpf(0)
        n_max = max(2 * lh + 16, 2 * int(2 * t / (1 + t) * N / 0.9) + 16, 24)
        while True:
            data = verblunsky(N, t, n_max, bits)
            logs = _opuc_factors(data, lh)
            tail = _tail_bound(logs)
            if tail is not None and tail <= tol:
                return mp.exp(mp.fsum(logs)), tail
            if n_max >= n_cap:
                raise PrecisionError(f"OPUC product not converged by n={n_max}")
            n_max = min(2 * n_max, n_cap)


def phi_opuc(N, l_odd, t, policy: PrecisionPolicy = DEFAULT_POLICY, n_cap=4096, with_tail=False):
    """``phi(N, 2l'+1, t) = prod_{j>=l'} (1 - pi_{2j+2}(0)) / N_{2j+2}``."""
    _check_t(t)
    lh = _odd_half(l_odd)
    tol = mp.mpf(policy.target_tol) / 10

    def run(bits):
        return _phi_opuc_at(N, t, lh, bits, tol, n_cap)

    (value, tail), _ = escalate(run, policy, distance=lambda a, b: abs(a[0] - b[0]))
    return (value, tail) if with_tail else value


def phi_bracket(N, l, t, policy: PrecisionPolicy = DEFAULT_POLICY, route="hankel"):
    """``(lo, hi)`` with ``lo <= phi(N, l, t) <= hi``; equal for odd ``l``.

    Even ``l`` uses monotonicity in ``l``: ``phi(l-1) <= phi(l) <= phi(l+1)``.
    """
    f = phi_hankel if route == "hankel" else phi_opuc
    if l <= 0:
        return mp.mpf(0), mp.mpf(0)
    if l % 2:
        v = f(N, l, t, policy)
        return v, v
    return f(N, l - 1, t, policy), f(N, l + 1, t, policy)


# ----------------------------------------------------------------------------
# direct combinatorial sum


@dataclass(frozen=True)
class DirectSum:
    value: object
    tail_bound: object
    cutoff: int


def _gf_all(N, s):
    """``sum_n s^n |P(N,n)| = (1-s^2)^{-N(N-1)/2} (1-s)^{-N}``."""
    return (1 - s * s) ** (-mp.mpf(N) * (N - 1) / 2) * (1 - s) ** (-N)


def phi_direct_sum(N, l, t, beta=1.0, size_cutoff=40, policy: PrecisionPolicy = DEFAULT_POLICY) -> DirectSum:
    """``phi`` from tableau counts with ``|lambda| <= size_cutoff``.

    The dropped part is bounded by the full generating function at
    ``s = t max(1, beta)`` minus its partial sums, which is exact.
    """
    _check_t(t)
    if not 0 < beta * t < 1 or beta <= 0:
        raise ValueError("need 0 < beta t < 1")
    N = int(N)
    with mp.workprec(policy.bits):
        t_ = mp.mpf(t)
        b_ = mp.mpf(beta)
        rows = min(int(l), N)
        total = mp.mpf(0)
        for n in range(size_cutoff + 1):
            inner = mp.mpf(0)
            for lam in cb.partitions(n, max_parts=rows):
                d = cb.ssyt_count(lam, N, max_size=size_cutoff, max_entry=max(N, 1))
                inner += b_ ** cb.odd_rows(cb.conjugate(lam)) * d
            total += t_**n * inner
        pref = (1 - t_ * t_) ** (mp.mpf(N) * (N - 1) / 2) * (1 - b_ * t_) ** N
        s = t_ * max(b_, 1)
        partial = mp.fsum(s**n * cb.path_count(N, n) for n in range(size_cutoff + 1))
        tail = max(_gf_all(N, s) - partial, mp.mpf(0))
        return DirectSum(pref * total, pref * tail, size_cutoff)


# ----------------------------------------------------------------------------
# de-Poissonization


def depoisson_c1(a, d):
    """Smallest ``c_1`` with ``(1-a)^2 c_1^2 / (2a) - 1 >= d``."""
    return mp.sqrt(2 * mp.mpf(a) * (d + 1)) / (1 - mp.mpf(a))


@dataclass(frozen=True)
class DepoissonResult:
    G: object
    q_upper: object  # q at N*  (index below the mean)
    q_lower: object  # q at N** (index above the mean)
    n_star: int
    n_star2: int
    c1: object
    truncation: object


def _check_monotone(q_seq):
    for a, b in zip(q_seq, q_seq[1:]):
        if b > a:
            raise ValueError("q must be nonincreasing")
        if not (0 <= a <= 1):
            raise ValueError("q must lie in [0, 1]")


def depoisson_G(a, N, q, d=2, bits=128, tol=None) -> DepoissonResult:
    """``G(N) = (1-a)^N sum_j a^j binom(N+j-1, j) q_j`` with its de-Poissonization bracket.

    ``q`` is a sequence or a callable ``j -> q_j``; values beyond a finite
    sequence repeat its last element. The returned bracket is
    ``(q_{N**}, q_{N*})``; the ``C/N^d`` slack is not quantified.
    """
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if callable(q):
        qf = q
    else:
        q = list(q)
        _check_monotone(q)
        qf = lambda j: q[j] if j < len(q) else q[-1]  # noqa: E731
    with mp.workprec(bits):
        a_ = mp.mpf(a)
        tol = mp.ldexp(1, -bits + 8) if tol is None else mp.mpf(tol)
        w = (1 - a_) ** N
        acc_w = mp.mpf(0)
        acc = mp.mpf(0)
        j = 0
        prev_q = None
        while True:
            qj = mp.mpf(qf(j))
            if prev_q is not None and qj > prev_q:
                raise ValueError("q must be nonincreasing")
            if not 0 <= qj <= 1:
                raise ValueError("q must lie in [0, 1]")
            prev_q = qj
            acc += w * qj
            acc_w += w
            # weights sum to 1, so 1 - acc_w bounds the dropped part
            if j > a_ / (1 - a_) * N and 1 - acc_w <= tol:
                break
            w = w * a_ * (N + j) / (j + 1)
            j += 1
        c1 = depoisson_c1(a, d)
        mean = a_ / (1 - a_) * N
        spread = c1 * mp.sqrt(N * mp.log(N)) if N > 1 else mp.mpf(0)
        n1 = max(int(mp.floor(mean - spread)), 0)
        n2 = int(mp.ceil(mean + spread))
        return DepoissonResult(G=acc, q_upper=mp.mpf(qf(n1)), q_lower=mp.mpf(qf(n2)), n_star=n1, n_star2=n2,
                               c1=c1, truncation=max(1 - acc_w, mp.mpf(0)))


def negbin_cdf(r, a, j, bits=128):
    """``P(X <= j)`` for ``P(X = i) = (1-a)^r a^i binom(r+i-1, i)``."""
    if j < 0:
        return mp.mpf(0)
    if r == 0:
        return mp.mpf(1)
    with mp.workprec(bits):
        return mp.betainc(r, j + 1, 0, 1 - mp.mpf(a), regularized=True)


@dataclass(frozen=True)
class SandwichBounds:
    """Bracket for ``phi`` against tableau probabilities.

    ``p(N, mu_plus, nu_plus, l) - slack_plus <= phi <= p(N, mu_minus, nu_minus, l) + slack_minus``
    where the slacks are the exact negative-binomial masses outside the
    corresponding quadrants (they play the role of ``C/N^d``).
    ``lower``/``upper`` bracket the probabilities: ``p(mu_minus, nu_minus) >= lower``
    and ``p(mu_plus, nu_plus) <= upper``.
    """

    phi: object
    lower: object
    upper: object
    mu_plus: int
    mu_minus: int
    nu_plus: int
    nu_minus: int
    c0: object
    slack_plus: object
    slack_minus: object
    constant: str = "C uncontrolled"


def sandwich_bounds(N, l, t, beta, d=2, c0=None, policy: PrecisionPolicy = DEFAULT_POLICY) -> SandwichBounds:
    _check_t(t)
    if not (beta > 0 and 0 < beta * t < 1):
        raise ValueError("need beta > 0 and 0 < beta t < 1")
    if N < 2:
        raise ValueError("N >= 2 required (log N appears in the windows)")
    with mp.workprec(policy.bits):
        t_ = mp.mpf(t)
        bt = mp.mpf(beta) * t_
        if c0 is None:
            c0 = max(depoisson_c1(t_ * t_, d), depoisson_c1(bt, d))
        c0 = mp.mpf(c0)
        logN = mp.log(N)
        mu_c = t_**2 / (2 * (1 - t_**2)) * N**2
        nu_c = bt / (1 - bt) * N
        mu_p = int(mp.floor(mu_c + c0 * N * mp.sqrt(logN)))
        mu_m = max(int(mp.floor(mu_c - c0 * N * mp.sqrt(logN))), 0)
        nu_p = int(mp.floor(nu_c + c0 * mp.sqrt(N * logN)))
        nu_m = max(int(mp.floor(nu_c - c0 * mp.sqrt(N * logN))), 0)
        lo, hi = phi_bracket(N, l, t, policy)
        r = N * (N - 1) // 2
        Fj_p, Fm_p = negbin_cdf(r, t_ * t_, mu_p, policy.bits), negbin_cdf(N, bt, nu_p, policy.bits)
        Fj_m, Fm_m = negbin_cdf(r, t_ * t_, mu_m - 1, policy.bits), negbin_cdf(N, bt, nu_m - 1, policy.bits)
        slack_plus = max(1 - Fj_p * Fm_p, mp.mpf(0))
        slack_minus = max(1 - (1 - Fj_m) * (1 - Fm_m), mp.mpf(0))
        return SandwichBounds(
            phi=(lo + hi) / 2 if lo != hi else lo,
            lower=lo - slack_minus,
            upper=hi + slack_plus,
            mu_plus=mu_p,
            mu_minus=mu_m,
            nu_plus=nu_p,
            nu_minus=nu_m,
            c0=c0,
            slack_plus=slack_plus,
            slack_minus=slack_minus,
        )


def window_substitution(N, k, m, c0):
    """Parameters ``(t, beta)`` at which the concentration windows centre on ``(j, m)``.

    Returns ``((t_minus, beta_minus), (t_plus, beta_plus))``; the ``minus``
    pair uses ``-c0`` (gives the upper bound on ``p``), the ``plus`` pair
    ``+c0`` (lower bound).
    """
    out = []
    for sgn in (-1, 1):
        s1 = k - m + sgn * 2 * c0 * N * mp.sqrt(mp.log(N))
        s2 = m + sgn * c0 * mp.sqrt(N * mp.log(N))
        if s1 <= 0 or s2 <= 0:
            out.append(None)
            continue
        tt = mp.sqrt(s1 / (N**2 + s1))
        bt = s2 / (N + s2)
        out.append((tt, bt / tt))
    return tuple(out)

