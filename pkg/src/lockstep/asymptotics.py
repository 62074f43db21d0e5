"""Closed-form large-N predictions: scaling constants, equilibrium measure,
path-count asymptotics and the five-regime Verblunsky/norm predictions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .combinatorics import b_inf, path_count


def _check_t(t):
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")


# ----------------------------------------------------------------------------
# scaling


@dataclass(frozen=True)
class ScalingConstants:
    t: float
    eta: float
    rho: float


def scaling(t) -> ScalingConstants:
    """``eta = 2t/(1+t)``, ``rho = (t(1-t))^{1/3}/(1+t)``."""
    _check_t(t)
    return ScalingConstants(t=t, eta=2 * t / (1 + t), rho=(t * (1 - t)) ** (1 / 3) / (1 + t))


def x_of(N, t, l) -> float:
    s = scaling(t)
    return (l - s.eta * N) / (s.rho * N ** (1 / 3))


def l_of(N, t, x) -> int:
    s = scaling(t)
    return math.floor(s.eta * N + x * s.rho * N ** (1 / 3))


# ----------------------------------------------------------------------------
# equilibrium measure


@dataclass(frozen=True)
class EquilibriumMeasure:
    gamma: float
    t: float
    regime: str  # "full-support" | "gapped"
    theta_c: float
    lagrange_l: float

    @property
    def critical_gamma(self):
        return (1 + self.t) / (2 * self.t)

    def psi(self, theta):
        """Density w.r.t. ``dtheta/2pi`` (vectorised, zero off the support)."""
        th = np.asarray(theta, dtype=float)
        g, t = self.gamma, self.t
        if self.regime == "full-support":
            return 1 - g + g * (1 - t * t) / (1 + t * t - 2 * t * np.cos(th))
        a = np.abs(th)
        tc = self.theta_c
        # sin^2(tc/2) - sin^2(th/2) = sin((tc-th)/2) sin((tc+th)/2), no cancellation near tc
        diff = np.sin((tc - a) / 2) * np.sin((tc + a) / 2)
        root = np.sqrt(np.clip(diff, 0.0, None))
        val = 4 * (g - 1) * np.cos(a / 2) / ((1 - t) ** 2 / t + 4 * np.sin(a / 2) ** 2) * root
        return np.where(a <= tc, val, 0.0)

    def psi_mp(self, theta):
        g, t = mp.mpf(self.gamma), mp.mpf(self.t)
        th = mp.mpf(theta)
        if self.regime == "full-support":
            return 1 - g + g * (1 - t * t) / (1 + t * t - 2 * t * mp.cos(th))
        a = abs(th)
        tc = mp.mpf(self.theta_c)
        if a > tc:
            return mp.mpf(0)
        diff = mp.sin((tc - a) / 2) * mp.sin((tc + a) / 2)
        return 4 * (g - 1) * mp.cos(a / 2) / ((1 - t) ** 2 / t + 4 * mp.sin(a / 2) ** 2) * mp.sqrt(diff)

    @property
    def support(self):
        return (-math.pi, math.pi) if self.regime == "full-support" else (-self.theta_c, self.theta_c)

    def mass(self, dps=30):
        """``(1/2pi) int psi dtheta`` by adaptive (tanh-sinh) quadrature."""
        lo, hi = self.support
        with mp.workdps(dps):
            return float(mp.quad(self.psi_mp, [lo, 0, hi]) / (2 * mp.pi))

    def potential(self, theta):
        """``V(e^{i theta}) = gamma log|1 - t e^{i theta}|^2``."""
        return self.gamma * math.log(1 + self.t**2 - 2 * self.t * math.cos(theta))

    def variational(self, theta, dps=25):
        """``2 int log|z - s| dmu(s) - V(z) + l`` at ``z = e^{i theta}``.

        Zero on the support; strictly negative in the gap.
        """
        lo, hi = self.support
        with mp.workdps(dps):
            th = mp.mpf(theta)

            def integrand(p):
                return mp.log(abs(2 * mp.sin((th - p) / 2))) * self.psi_mp(p)

            pts = sorted({mp.mpf(lo), mp.mpf(hi), mp.mpf(0)} | ({th} if lo < theta < hi else set()))
            energy = 2 * mp.quad(integrand, pts) / (2 * mp.pi)
            V = self.gamma * mp.log(1 + mp.mpf(self.t) ** 2 - 2 * self.t * mp.cos(th))
            return float(energy - V + self.lagrange_l)


def theta_c_of(gamma, t):
    s2 = (1 - t) ** 2 * (2 * gamma - 1) / (4 * t * (gamma - 1) ** 2)
    return 2 * math.asin(math.sqrt(s2))


def lagrange_constant(gamma, t):
    g = gamma
    return 2 * g * math.log((2 * g - 1) * (1 - t) / (2 * (g - 1))) - math.log(
        (2 * g - 1) * (1 - t) ** 2 / (4 * t * (g - 1) ** 2)
    )


def equilibrium(gamma, t) -> EquilibriumMeasure:
    _check_t(t)
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    if gamma <= (1 + t) / (2 * t):
        return EquilibriumMeasure(gamma, t, "full-support", math.pi, 0.0)
    return EquilibriumMeasure(gamma, t, "gapped", theta_c_of(gamma, t), lagrange_constant(gamma, t))


# ----------------------------------------------------------------------------
# Verblunsky / norm predictions


REGIME_DEFAULTS = {"a": 0.9, "M": 4.0}


@dataclass(frozen=True)
class RhpPrediction:
    regime: int
    predicted_norm_inv: float
    predicted_pi0: float
    error_scale: float
    x: float
    ratio: float


def painleve_constant(t):
    """``[2(1+t)^2/(1-t)]^{1/3}``."""
    return (2 * (1 + t) ** 2 / (1 - t)) ** (1 / 3)


def x_of_ratio(n, N, t):
    """Scaled variable from ``(2t/(1+t)) N/n = 1 - [(1-t)/(2(1+t)^2)]^{1/3} x / n^{2/3}``."""
    s = 2 * t / (1 + t) * N / n
    return (1 - s) * n ** (2 / 3) / ((1 - t) / (2 * (1 + t) ** 2)) ** (1 / 3)


def N_for_x(n, t, x):
    """Real ``N`` placing ``(n, N)`` at the scaled variable ``x``."""
    c = ((1 - t) / (2 * (1 + t) ** 2)) ** (1 / 3)
    return (1 - c * x / n ** (2 / 3)) * n * (1 + t) / (2 * t)


def classify(n, N, t, a=REGIME_DEFAULTS["a"], M=REGIME_DEFAULTS["M"]) -> int:
    """Regime 1..5. ``|x| <= M`` wins; otherwise split by ``s = 2tN/((1+t)n)``
    at ``a`` below 1 and ``1/a`` above 1."""
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    s = 2 * t / (1 + t) * N / n
    x = x_of_ratio(n, N, t)
    if abs(x) <= M:
        return 3
    if s < 1:
        return 1 if s <= a else 2
    return 5 if s >= 1 / a else 4


def rhp_predict(n, N, t, sol=None, a=REGIME_DEFAULTS["a"], M=REGIME_DEFAULTS["M"]) -> RhpPrediction:
    """Leading-order predictions for ``1/N_{n-1}`` and ``pi_n(0)``.

    Regime 3 needs a Hastings-McLeod solution ``sol`` (built on demand).
    ``error_scale`` is the n-dependence of the error bound with unit constants.
    """
    _check_t(t)
    if n < 1:
        raise ValueError("n must be >= 1")
    s = 2 * t / (1 + t) * N / n
    x = x_of_ratio(n, N, t)
    reg = classify(n, N, t, a, M)
    sign = -1.0 if n % 2 else 1.0
    if reg == 1:
        return RhpPrediction(1, 1.0, 0.0, math.exp(-n), x, s)
    if reg == 2:
        return RhpPrediction(2, 1.0, 0.0, n ** (-1 / 3) * math.exp(-abs(x) ** 1.5), x, s)
    if reg == 3:
        if sol is None:
            from .painleve import default_solution

            sol = default_solution()
        u, _, v_int, _, _ = sol.state_at(x)
        K = painleve_constant(t)
        # the norm correction carries v = -int_x^inf u^2
        norm_inv = 1 - K * float(v_int) / n ** (1 / 3)
        pi0 = -sign * K * float(u) / n ** (1 / 3)
        return RhpPrediction(3, norm_inv, pi0, n ** (-2 / 3), x, s)
    eq = equilibrium(N / n, t)
    tc, lam = eq.theta_c, eq.lagrange_l
    norm_inv = math.exp(n * lam) * math.sin(tc / 2)
    pi0 = sign * math.cos(tc / 2)
    err = 1 / (s * n - n) if reg == 4 else 1 / n
    return RhpPrediction(reg, norm_inv, pi0, err, x, s)


# ----------------------------------------------------------------------------
# path counts


@dataclass(frozen=True)
class PathCountAsymptotic:
    N: int
    k: int
    t: float
    mu: float
    value: object  # mpf

    @property
    def log_value(self):
        return float(mp.log(self.value))

    @property
    def value_parity(self):
        """Closed form halved: only ``m`` with ``k - m`` even contribute to the sum."""
        return self.value / 2


def path_count_asym(N, k, t, dps=30) -> PathCountAsymptotic:
    """Large-N closed form of ``|P(N,k)|`` with ``mu = k/N - t^2 N/(1-t^2)``."""
    _check_t(t)
    if N < 1 or k < 0:
        raise ValueError("need N >= 1, k >= 0")
    with mp.workdps(dps):
        t_ = mp.mpf(t)
        mu = mp.mpf(k) / N - t_**2 * N / (1 - t_**2)
        lt = mp.log(t_)
        expo = -(N * N * t_**2 / (1 - t_**2)) * lt - mu * N * lt - (mu * (1 - t_**2) / t_ - 1) ** 2 / 4
        log_den = (
            mp.log(mp.sqrt(mp.pi) * t_ * N)
            + N * mp.log(1 - t_)
            + (mp.mpf(N * (N - 1)) / 2 - 1) * mp.log(1 - t_**2)
        )
        return PathCountAsymptotic(N, k, float(t), float(mu), mp.exp(expo - log_den))


def path_count_ratio(N, k, t, parity=False) -> float:
    """Exact ``|P(N,k)|`` over the closed form (or its parity-halved version)."""
    exact = path_count(N, k)
    with mp.workdps(30):
        a = path_count_asym(N, k, t)
        return float(mp.mpf(exact) / (a.value_parity if parity else a.value))


def concentration_window(N, t, eps=1 / 3):
    """Range of ``m`` with ``|m - tN/(1-t)| <= N^{1/2+eps/2}``."""
    c = t * N / (1 - t)
    w = N ** (0.5 + eps / 2)
    return math.ceil(c - w), math.floor(c + w)


def window_mass(N, k, t, eps=1 / 3) -> Fraction:
    """Exact share of ``|P(N,k)|`` carried by the concentration window."""
    lo, hi = concentration_window(N, t, eps)
    inside = sum(b_inf(N, (k - m) // 2, m) for m in range(max(lo, 0), min(hi, k) + 1) if (k - m) % 2 == 0)
    return Fraction(inside, path_count(N, k))


def a_m(N, k, m) -> int:
    if m < 0 or m > k or (k - m) % 2:
        raise ValueError("need 0 <= m <= k with k - m even")
    return b_inf(N, (k - m) // 2, m)


def ratio_a(N, k, m) -> Fraction:
    """``a(m+2)/a(m) = (N+m+1)(N+m)(k-m) / ((m+2)(m+1)(N(N-1)+k-m-2))``."""
    if not 0 <= m <= k - 2:
        raise ValueError("need 0 <= m <= k-2")
    return Fraction((N + m + 1) * (N + m) * (k - m), (m + 2) * (m + 1) * (N * (N - 1) + k - m - 2))


@dataclass(frozen=True)
class Unimodality:
    m_c: int
    decreasing: bool
    ratios: tuple


def unimodality(N, k) -> Unimodality:
    """Scan ``a(m+2)/a(m)`` over the parity class of ``k``; ``m_c`` is the mode of ``a``."""
    ms = list(range(k % 2, k - 1, 2))
    rs = tuple(ratio_a(N, k, m) for m in ms)
    dec = all(rs[i + 1] < rs[i] for i in range(len(rs) - 1))
    m_c = k % 2
    for m, r in zip(ms, rs):
        if r > 1:
            m_c = m + 2
    return Unimodality(m_c, dec, rs)
