"""Scalar summaries of a PR curve."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .core import PrCurve, curve_area, curve_polyline

IOU_GRID_POINTS = 10_000


@dataclass(frozen=True)
class SummaryReport:
    f_b: float
    f_inv_b: float
    b: float
    pr_median: tuple[float, float, float]
    alpha_inf_hat: float
    beta_0_hat: float
    iou_vs_reference: Optional[float] = None

    def to_flat(self, prefix: str = "") -> dict[str, float]:
        d = asdict(self)
        lam, a, b = d.pop("pr_median")
        d.update(pr_median_lambda=lam, pr_median_alpha=a, pr_median_beta=b)
        return {prefix + key: val for key, val in d.items()}


def f_score(curve: PrCurve, b: float) -> float:
    """max over curve points of (1 + b^2) / (b^2 / alpha + 1 / beta); zero rates score 0."""
    if curve is None or len(curve) == 0:
        raise ValueError("empty curve")
    if not b > 0:
        raise ValueError("b must be positive")
    beta, alpha = curve.clamped()
    ok = (alpha > 0) & (beta > 0)
    if not ok.any():
        return 0.0
    b2 = b * b
    vals = (1 + b2) / (b2 / alpha[ok] + 1 / beta[ok])
    return float(min(vals.max(), 1.0))


def _region_polygon(curve: PrCurve) -> np.ndarray:
    bx, ay = curve_polyline(curve)
    return np.column_stack([np.concatenate([[0.0], bx, [bx[-1]]]),
                            np.concatenate([[0.0], ay, [0.0]])])


def _shoelace(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _clip_above_ray(poly: np.ndarray, lam: float) -> np.ndarray:
    """Part of the polygon where alpha >= lam * beta (one half-plane clip)."""
    s = poly[:, 1] - lam * poly[:, 0]
    out = []
    n = len(poly)
    for i in range(n):
        j = (i + 1) % n
        if s[i] >= 0:
            out.append(poly[i])
        if (s[i] >= 0) != (s[j] >= 0):
            t = s[i] / (s[i] - s[j])
            out.append(poly[i] + t * (poly[j] - poly[i]))
    return np.array(out) if out else np.zeros((0, 2))


def area_above_ray(curve: PrCurve, lam: float) -> float:
    return _shoelace(_clip_above_ray(_region_polygon(curve), lam))


def pr_median(curve: PrCurve, rtol: float = 1e-6) -> tuple[float, float, float]:
    """The ray alpha = lam * beta splitting the area under the curve in half, and where it meets the curve.

    Bisection runs on log(lambda) so a swap-symmetric curve stops at lambda = 1 exactly.
    """
    total = curve_area(curve)
    if not total > 0:
        raise ValueError("curve encloses no area")
    poly = _region_polygon(curve)
    half = 0.5 * total

    def excess(log_lam: float) -> float:
        return _shoelace(_clip_above_ray(poly, math.exp(log_lam))) - half

    lo, hi = -50.0, 50.0
    mid = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = excess(mid)
        if abs(g) <= rtol * half:
            break
        if g > 0:
            lo = mid
        else:
            hi = mid
    lam = math.exp(mid)
    beta, alpha = _ray_hit(curve, lam)
    return lam, alpha, beta


def _ray_hit(curve: PrCurve, lam: float) -> tuple[float, float]:
    """Intersection of alpha = lam * beta with the frontier polyline (closed by its vertical drop)."""
    bx, ay = curve_polyline(curve)
    bx = np.append(bx, bx[-1])
    ay = np.append(ay, 0.0)
    s = ay - lam * bx
    for i in range(len(s) - 1):
        if s[i] >= 0 >= s[i + 1] and s[i] != s[i + 1]:
            t = s[i] / (s[i] - s[i + 1])
            return float(bx[i] + t * (bx[i + 1] - bx[i])), float(ay[i] + t * (ay[i + 1] - ay[i]))
        if s[i] == 0:
            return float(bx[i]), float(ay[i])
    return float(bx[-1]), float(ay[-1])


def envelope_height(curve: PrCurve, beta_grid: np.ndarray) -> np.ndarray:
    """Height of the under-curve region above each beta in ``beta_grid``."""
    bx, ay = curve_polyline(curve)
    # vertical runs (repeated beta) collapse to their top
    ub, inv = np.unique(bx, return_inverse=True)
    top = np.full(ub.size, -np.inf)
    np.maximum.at(top, inv, ay)
    return np.interp(beta_grid, ub, top, right=0.0)


def curve_iou(a: PrCurve, b: PrCurve, n_grid: int = IOU_GRID_POINTS) -> float:
    """Jaccard index of the two under-curve regions, integrated on a shared beta grid."""
    grid = np.linspace(0.0, 1.0, n_grid)
    ha, hb = envelope_height(a, grid), envelope_height(b, grid)
    inter = np.trapezoid(np.minimum(ha, hb), grid)
    union = np.trapezoid(np.maximum(ha, hb), grid)
    if union <= 0:
        return 1.0
    return float(np.clip(inter / union, 0.0, 1.0))


def extremes(curve: PrCurve) -> tuple[float, float]:
    """(alpha at the largest lambda, beta at the smallest lambda)."""
    return float(curve.alphas[-1]), float(curve.betas[0])


def summarize(curve: PrCurve, b: float = 8.0, reference: Optional[PrCurve] = None) -> SummaryReport:
    a_inf, b_0 = extremes(curve)
    iou = None if reference is None else curve_iou(curve, reference)
    try:
        med = pr_median(curve)
    except ValueError:
        med = (float("nan"),) * 3
    return SummaryReport(f_score(curve, b), f_score(curve, 1 / b), float(b), med, a_inf, b_0, iou)
