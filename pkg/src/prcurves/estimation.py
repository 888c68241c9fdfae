"""Empirical PR curves by weighted-risk minimization over a classifier family.

For each trade-off level lambda the estimate is

    alpha_hat(lambda) = min_f  lambda * fpr_hat(f) + fnr_hat(f)

where f ranges over a fitted family {f_gamma} plus the two constant
classifiers. Rates are measured on a held-out half of each sample unless
splitting is disabled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from .classifiers import (METHODS, ClassifierFamily, _chunks, _kth_excluding, _sqdist,
                          build_neighbor_index, count_ratios, make_family, neighbor_counts)
from .core import PrCurve, SampleSet, as_points, make_lambda_grid, split_pool
from .distributions import make_rng

EXTREME_METHODS = ("ipr", "coverage", "eas", "prc", "ppr")
_SPLIT_STREAM = 7


@dataclass(frozen=True)
class EstimatorConfig:
    """How to turn two samples into a curve.

    ``k`` is an integer or ``"sqrt_n"`` (k = round(sqrt(n)) with n the smaller
    sample size before splitting). ``split_ratio`` is the training share;
    1 disables the split. ``gamma_mode="exact"`` minimizes over every
    classifier the family can realize instead of the gamma grid.
    """

    method: str = "knn"
    k: Union[int, str] = "sqrt_n"
    split_ratio: float = 0.5
    lambda_grid_size: int = 201
    gamma_grid_size: int = 201
    seed: int = 0
    gamma_mode: str = "grid"

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.lambda_grid_size < 3 or self.gamma_grid_size < 3:
            raise ValueError("grids need at least 3 points")
        if not 0 < self.split_ratio <= 1:
            raise ValueError("split_ratio must lie in (0, 1]")
        if self.gamma_mode not in ("grid", "exact"):
            raise ValueError("gamma_mode must be 'grid' or 'exact'")
        if not (self.k == "sqrt_n" or (isinstance(self.k, (int, np.integer)) and self.k >= 1)):
            raise ValueError("k must be a positive integer or 'sqrt_n'")


@dataclass(frozen=True)
class RatePair:
    fpr: float
    fnr: float


def resolve_k(k: Union[int, str], n: int) -> int:
    if k == "sqrt_n":
        return max(1, int(round(math.sqrt(n))))
    return int(k)


def make_gamma_grid(n_points: int) -> np.ndarray:
    """The lambda-grid values bracketed by the symbolic extremes 0 and +inf."""
    return np.concatenate([[0.0], make_lambda_grid(n_points).lambdas, [np.inf]])


def empirical_rates(family: ClassifierFamily, gamma: float, val_x, val_y, in_sample: bool = False) -> RatePair:
    """fpr_hat = mean over val_x of 1 - f, fnr_hat = mean over val_y of f.

    ``in_sample=True`` states that val_x / val_y are the training samples
    themselves (no split).
    """
    vx, vy = as_points(val_x), as_points(val_y)
    if vx.shape[0] == 0 or vy.shape[0] == 0:
        raise ValueError("validation sets must be nonempty")
    fx = family.predict(gamma, vx, "x" if in_sample else None)
    fy = family.predict(gamma, vy, "y" if in_sample else None)
    return RatePair(float(np.sum(~fx) / fx.size), float(np.sum(fy) / fy.size))


def _positive_counts(ratio: np.ndarray, void: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """How many points each f_gamma labels 1, by binary search on sorted ratios.

    Uses exactly the comparisons of :func:`predict_from_ratios`.
    """
    r = np.sort(ratio[~void])  # +inf sorts last
    n_void = int(void.sum())
    n_finite = int(np.isfinite(r).sum())
    out = np.empty(gammas.size, dtype=np.int64)
    for j, g in enumerate(gammas):
        if g == np.inf:
            out[j] = n_finite
        elif g == 0:
            out[j] = np.searchsorted(r, 0.0, side="right")
        elif g >= 1:
            out[j] = np.searchsorted(r, g, side="right") + n_void
        else:
            out[j] = np.searchsorted(r, g, side="left")
    return out


def rates_for_gammas(ratio_x, void_x, ratio_y, void_y, gammas) -> tuple[np.ndarray, np.ndarray]:
    gammas = np.asarray(gammas, dtype=float)
    n_x, n_y = ratio_x.size, ratio_y.size
    pos_x = _positive_counts(ratio_x, void_x, gammas)
    pos_y = _positive_counts(ratio_y, void_y, gammas)
    return (n_x - pos_x) / n_x, pos_y / n_y


def realizable_gammas(ratio_x, ratio_y) -> np.ndarray:
    """One gamma per distinct classifier of the family on the given validation points.

    Predictions only change when gamma crosses a ratio b/a or the value 1
    (where the inequality switches from strict to loose), so the ratios,
    1, the midpoints between consecutive events, values beyond both ends,
    and the extremes 0 and +inf cover every realizable classifier.
    """
    r = np.concatenate([ratio_x, ratio_y])
    r = r[np.isfinite(r) & (r > 0)]
    events = np.unique(np.concatenate([r, [1.0]]))
    mids = 0.5 * (events[1:] + events[:-1])
    return np.unique(np.concatenate([[0.0, events[0] / 2, events[-1] * 2, np.inf], events, mids]))


def min_risk_alphas(lambdas: np.ndarray, fpr: np.ndarray, fnr: np.ndarray) -> np.ndarray:
    """min over candidates and the constant classifiers of lambda * fpr + fnr."""
    fpr = np.concatenate([fpr, [0.0, 1.0]])  # f = 1, f = 0
    fnr = np.concatenate([fnr, [1.0, 0.0]])
    lam = np.asarray(lambdas, dtype=float)[:, None]
    return np.min(lam * fpr[None, :] + fnr[None, :], axis=1)


def _check_inputs(x, y) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = as_points(x), as_points(y)
    if xs.shape[1] != ys.shape[1]:
        raise ValueError("samples must share the same dimension")
    if xs.shape[0] < 4 or ys.shape[0] < 4:
        raise ValueError("need at least 4 points per sample")
    return xs, ys


def estimate_curves(x, y, cfg: EstimatorConfig, methods: Optional[Iterable[str]] = None) -> dict[str, PrCurve]:
    """Curves for several methods sharing one split and one distance pass.

    ``cfg.method`` is ignored when ``methods`` is given.
    """
    methods = [cfg.method] if methods is None else list(methods)
    for m in methods:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}")
    xs, ys = _check_inputs(x, y)
    pool = split_pool(SampleSet(xs), SampleSet(ys), cfg.split_ratio, make_rng(cfg.seed, _SPLIT_STREAM))
    k = resolve_k(cfg.k, min(xs.shape[0], ys.shape[0]))
    tx, ty = pool.train_x.data, pool.train_y.data
    fams = [make_family(m, tx, ty, k) for m in methods]
    in_sample = not pool.split_applied
    cx = neighbor_counts(fams, tx if in_sample else pool.val_x.data, "x" if in_sample else None)
    cy = neighbor_counts(fams, ty if in_sample else pool.val_y.data, "y" if in_sample else None)

    grid = make_lambda_grid(cfg.lambda_grid_size)
    curves = {}
    for f in fams:
        rx, vx = count_ratios(*cx[f.method], f.n_x, f.n_y)
        ry, vy = count_ratios(*cy[f.method], f.n_x, f.n_y)
        if cfg.gamma_mode == "grid":
            gammas = make_gamma_grid(cfg.gamma_grid_size)
        else:
            gammas = realizable_gammas(rx, ry)
        fpr, fnr = rates_for_gammas(rx, vx, ry, vy, gammas)
        alphas = min_risk_alphas(grid.lambdas, fpr, fnr)
        if np.any(np.diff(alphas) < 0):
            raise RuntimeError(f"{f.method}: alpha_hat is not monotone in lambda")
        curves[f.method] = PrCurve.from_alphas(grid.lambdas, alphas, kind="empirical")
    return curves


def estimate_curve(x, y, cfg: EstimatorConfig) -> PrCurve:
    return estimate_curves(x, y, cfg)[cfg.method]


def _mean_knn_radius(points: np.ndarray, k: int) -> float:
    return float(build_neighbor_index(points, k).radii.mean())


def extreme_scalar(method: str, x, y, k: int = 3, k_prime: int = 1, ppr_form: str = "complement",
                   ppr_k: Optional[int] = None) -> float:
    """Published extreme-precision estimators on raw, unsplit samples.

    ipr: share of y inside some kNN ball of X; coverage: share of y whose own
    kNN ball (within Y) holds some x; eas: the smaller of the two; prc: share
    of y whose kNN ball holds at least ``k_prime`` points of X; ppr: average
    over y of a tent-kernel score with bandwidth R = mean kNN radius of X.
    ``ppr_form="complement"`` scores 1 - prod(1 - tau), ``"as-written"``
    scores 1 - prod(tau).
    """
    if method not in EXTREME_METHODS:
        raise ValueError(f"unknown extreme method {method!r}")
    xs, ys = as_points(x), as_points(y)
    if xs.shape[1] != ys.shape[1]:
        raise ValueError("samples must share the same dimension")
    k = int(k)
    if not 1 <= k <= min(xs.shape[0], ys.shape[0]) - 1:
        raise ValueError(f"k must lie in [1, {min(xs.shape[0], ys.shape[0]) - 1}]")
    if method == "prc" and int(k_prime) < 1:
        raise ValueError("k_prime must be >= 1")
    if ppr_form not in ("complement", "as-written"):
        raise ValueError("ppr_form must be 'complement' or 'as-written'")
    if method == "eas":
        return min(extreme_scalar("ipr", xs, ys, k), extreme_scalar("coverage", xs, ys, k))

    n_y = ys.shape[0]
    if method == "ipr":
        rx2 = build_neighbor_index(xs, k).sq_radii
    if method == "ppr":
        big_r = _mean_knn_radius(xs, k if ppr_k is None else int(ppr_k))
    score = np.empty(n_y)
    for s, e in _chunks(n_y, xs.shape[0] + n_y):
        dx = _sqdist(ys[s:e], xs)
        if method == "ipr":
            score[s:e] = (dx <= rx2).any(1)
        elif method in ("coverage", "prc"):
            ry = _kth_excluding(_sqdist(ys[s:e], ys), k, np.arange(s, e))
            inside = (dx <= ry[:, None]).sum(1)
            score[s:e] = inside >= (1 if method == "coverage" else int(k_prime))
        else:
            tau = np.maximum(0.0, 1.0 - np.sqrt(dx) / big_r) if big_r > 0 else (dx == 0).astype(float)
            if ppr_form == "complement":
                score[s:e] = 1.0 - np.prod(1.0 - tau, axis=1)
            else:
                score[s:e] = 1.0 - np.prod(tau, axis=1)
    return float(score.mean())
