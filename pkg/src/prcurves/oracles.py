"""Ground-truth PR curves for analytic pairs.

Covers the scaled-Gaussian pair P = N(0, I_d), Q = N(0, psi^2 I_d) in closed
form, Chernoff upper bounds for it, and a Monte-Carlo likelihood-ratio
estimator that works for any pair of :class:`DistributionSpec`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammainc, gammaincc, gammaln, log_ndtr, ndtr

from .core import LambdaGrid, PrCurve
from .distributions import DistributionSpec, log_density_ratio, make_rng

ORIENTATIONS = ("accept_inside", "accept_outside", "accept_all", "accept_none")


@dataclass(frozen=True)
class DecisionRegion:
    """Radial Bayes region {x : lambda dP(x) >= dQ_psi(x)}."""

    threshold: float
    orientation: str

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation!r}")

    def contains(self, radius) -> np.ndarray:
        r = np.asarray(radius, dtype=float)
        if self.orientation == "accept_all":
            return np.ones(r.shape, bool)
        if self.orientation == "accept_none":
            return np.zeros(r.shape, bool)
        if self.orientation == "accept_outside":
            return r >= self.threshold
        return r <= self.threshold


@dataclass(frozen=True)
class ChernoffResult:
    coefficient: float
    argmin_gamma: float
    divergence: float


def log_likelihood_ratio_radial(psi: float, d: int, radius) -> np.ndarray:
    """log r_psi at distance ``radius`` from the origin: d log psi - r^2 (1 - 1/psi^2) / 2."""
    r = np.asarray(radius, dtype=float)
    return d * math.log(psi) - 0.5 * r * r * (1.0 - 1.0 / psi**2)


def scale_threshold(psi: float, lam: float, d: int) -> DecisionRegion:
    """Radius where psi^d exp(-T^2 (1 - 1/psi^2) / 2) = 1 / lambda, with its orientation.

    For psi < 1 the ratio grows with the radius so the region is the outside
    of a ball; for psi > 1 it is the inside.
    """
    if not psi > 0 or psi == 1:
        raise ValueError("psi must be positive and different from 1")
    if not lam > 0 or d < 1:
        raise ValueError("lambda must be positive and d >= 1")
    # log of psi^d * lambda; the region is empty/full when it has the wrong sign
    log_gap = d * math.log(psi) + math.log(lam)
    if psi < 1:
        if log_gap > 0:
            return DecisionRegion(0.0, "accept_all")
        t2 = 2 * psi**2 / (1 - psi**2) * (-log_gap)
        return DecisionRegion(math.sqrt(t2), "accept_outside")
    if log_gap < 0:
        return DecisionRegion(0.0, "accept_none")
    t2 = 2 * psi**2 / (psi**2 - 1) * log_gap
    return DecisionRegion(math.sqrt(t2), "accept_inside")


def _log_unit_sphere_factor(d: int) -> float:
    # log(S_{d-1} (2 pi)^{-d/2}) = (1 - d/2) log 2 - log Gamma(d/2)
    return (1 - d / 2) * math.log(2.0) - gammaln(d / 2)


def chi_tail_recurrence(d: int, t) -> np.ndarray:
    """P(|N(0, I_d)| >= t) through the integration-by-parts recurrence.

    J_m(t) = int_t^inf r^m e^{-r^2/2} dr obeys J_m = t^{m-1} e^{-t^2/2} + (m-1) J_{m-2}
    with J_0 = sqrt(2 pi) (1 - Phi(t)) and J_1 = e^{-t^2/2}. Every term is
    positive, so running it in log space loses nothing to cancellation.
    """
    t = np.asarray(t, dtype=float)
    if d < 1 or np.any(t < 0):
        raise ValueError("need d >= 1 and t >= 0")
    m_target = d - 1
    half_t2 = 0.5 * t * t
    with np.errstate(divide="ignore"):
        log_t = np.log(t)
    if m_target % 2 == 0:
        log_j = 0.5 * math.log(2 * math.pi) + log_ndtr(-t)
        m = 0
    else:
        log_j = -half_t2
        m = 1
    while m < m_target:
        m += 2
        # t^{m-1} with t = 0 and m - 1 > 0 vanishes
        lead = np.where(t > 0, (m - 1) * log_t, -np.inf) - half_t2
        log_j = np.logaddexp(lead, math.log(m - 1) + log_j)
    return np.exp(_log_unit_sphere_factor(d) + log_j)


def chi_tail_gamma(d: int, t) -> np.ndarray:
    """P(|N(0, I_d)| >= t) = Q(d/2, t^2/2), the regularized upper incomplete gamma."""
    t = np.asarray(t, dtype=float)
    if d < 1 or np.any(t < 0):
        raise ValueError("need d >= 1 and t >= 0")
    return gammaincc(d / 2, 0.5 * t * t)


def chi_tail(d: int, t) -> np.ndarray:
    """Tail mass of the chi distribution with ``d`` degrees of freedom beyond ``t``."""
    return chi_tail_gamma(d, t)


def _chi_cdf(d: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return gammainc(d / 2, 0.5 * t * t)


def analytic_rates_scale(psi: float, lam: float, d: int) -> tuple[float, float]:
    """(fpr, fnr) of the Bayes classifier between N(0, I_d) and N(0, psi^2 I_d)."""
    if psi == 1:
        # any classifier is Bayes-optimal; take the trivial one that attains min(lambda, 1)
        return (0.0, 1.0) if lam >= 1 else (1.0, 0.0)
    region = scale_threshold(psi, lam, d)
    t = region.threshold
    if region.orientation == "accept_all":
        return 0.0, 1.0
    if region.orientation == "accept_none":
        return 1.0, 0.0
    if region.orientation == "accept_outside":
        # P misses the ball, Q lands outside it (radius rescaled by psi)
        return float(_chi_cdf(d, t)), float(chi_tail(d, t / psi))
    return float(chi_tail(d, t)), float(_chi_cdf(d, t / psi))


def analytic_alpha_scale(psi: float, lam: float, d: int) -> float:
    """Exact alpha_lambda(N(0, I_d), N(0, psi^2 I_d))."""
    if not psi > 0 or not lam > 0:
        raise ValueError("psi and lambda must be positive")
    if psi == 1:
        return min(lam, 1.0)
    fpr, fnr = analytic_rates_scale(psi, lam, d)
    return min(lam * fpr + fnr, lam, 1.0)


def analytic_curve_scale(psi: float, d: int, grid: LambdaGrid) -> PrCurve:
    alphas = [analytic_alpha_scale(psi, lam, d) for lam in grid.lambdas]
    alphas = np.maximum.accumulate(alphas)  # rounding-level wobble only
    return PrCurve.from_alphas(grid.lambdas, alphas, kind="analytic")


def ideal_curve(grid: LambdaGrid) -> PrCurve:
    """alpha_lambda = min(lambda, 1), the P = Q frontier."""
    return PrCurve.from_alphas(grid.lambdas, np.minimum(grid.lambdas, 1.0), kind="analytic")


def analytic_alpha_shift(shift_norm: float, lam) -> np.ndarray:
    """alpha_lambda for N(0, I) vs N(mu, I) with |mu| = shift_norm.

    The log-ratio is Gaussian along mu, so the Bayes risk reduces to
    lambda Phi(-delta/2 - log(lambda)/delta) + Phi(-delta/2 + log(lambda)/delta).
    """
    lam = np.asarray(lam, dtype=float)
    delta = float(shift_norm)
    if delta == 0:
        return np.minimum(lam, 1.0)
    u = np.log(lam) / delta
    return lam * ndtr(-0.5 * delta - u) + ndtr(-0.5 * delta + u)


def chernoff_moment(psi: float, gamma) -> np.ndarray:
    """m(gamma) = E_Q[(p/q)^gamma] for p = N(0, 1), q = N(0, psi^2).

    Completing the square in int p^gamma q^{1-gamma} gives
    psi^gamma (1 + gamma (psi^2 - 1))^{-1/2}.
    """
    g = np.asarray(gamma, dtype=float)
    return psi**g / np.sqrt(1.0 + g * (psi * psi - 1.0))


def chernoff_coefficient(psi: float) -> ChernoffResult:
    """C = min over gamma in [0, 1] of m(gamma), with D_C = -log C."""
    if not psi > 0:
        raise ValueError("psi must be positive")
    if psi == 1:
        return ChernoffResult(1.0, 0.5, 0.0)
    # log m is convex in gamma (cumulant generating function), so one minimum
    res = minimize_scalar(lambda g: math.log(float(chernoff_moment(psi, g))), bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": 1e-10})
    gamma = float(res.x)
    c = float(chernoff_moment(psi, gamma))
    c = min(c, 1.0)
    return ChernoffResult(c, gamma, -math.log(c))


def chernoff_bound(psi: float, lam: float, d: int, gamma: float) -> float:
    """lambda^gamma m(gamma)^d, an upper bound on alpha_lambda for the scaled pair."""
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    return float(lam**gamma * np.exp(d * np.log(chernoff_moment(psi, gamma))))


def _mc_rates(lr_p: np.ndarray, lr_q: np.ndarray, lambdas: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """fpr/fnr of 1{log dP/dQ >= -log lambda} from log-ratios of P- and Q-samples."""
    thr = -np.log(lambdas)
    sp, sq = np.sort(lr_p), np.sort(lr_q)
    fpr = np.searchsorted(sp, thr, side="left") / sp.size
    fnr = (sq.size - np.searchsorted(sq, thr, side="left")) / sq.size
    return fpr, fnr


def gt_rates_mc(p_spec: DistributionSpec, q_spec: DistributionSpec, n_gt: int,
                grid: LambdaGrid, seed: int) -> tuple[np.ndarray, np.ndarray]:
    if n_gt < 1000:
        raise ValueError("n_gt must be at least 1000")
    xp = p_spec.sample(n_gt, make_rng(seed, 101))
    xq = q_spec.sample(n_gt, make_rng(seed, 102))
    return _mc_rates(log_density_ratio(p_spec, q_spec, xp),
                     log_density_ratio(p_spec, q_spec, xq), grid.lambdas)


def gt_curve_mc(p_spec: DistributionSpec, q_spec: DistributionSpec, n_gt: int,
                grid: LambdaGrid, seed: int = 0) -> PrCurve:
    """Likelihood-ratio classifier risk lambda * fpr + fnr on a large fresh sample."""
    fpr, fnr = gt_rates_mc(p_spec, q_spec, n_gt, grid, seed)
    return PrCurve.from_alphas(grid.lambdas, grid.lambdas * fpr + fnr, kind="mc_ground_truth")
