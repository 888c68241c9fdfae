"""Seeded experiment harness: presets, ground truth, per-seed fits and aggregation."""
from __future__ import annotations

import json
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy

from .classifiers import METHODS
from .core import PrCurve, SampleSet, atomic_write_text, make_lambda_grid
from .distributions import DistributionSpec, make_rng
from .estimation import EstimatorConfig, estimate_curves
from .oracles import analytic_curve_scale, gt_curve_mc, ideal_curve
from .summary import curve_iou, summarize

PRESETS = ("shift", "gmm", "outlier", "highdim", "pq_equal", "scale", "custom")
SHIFT_VALUES = (0.12, 0.21, 0.29, 0.38)
SEED_STRIDE = 1000
_X_STREAM, _Y_STREAM = 1, 2

GMM_CENTERS = (0.0, -5.0, 3.0, 5.0)
GMM_P_WEIGHTS = (0.3, 0.2, 0.5, 0.0)
GMM_Q_WEIGHTS = (0.0, 0.5, 0.2, 0.3)


def sample(spec: DistributionSpec, n: int, seed: int, outlier=None, stream: int = 0) -> SampleSet:
    """n draws from ``spec``; an ``outlier`` replaces the last row."""
    if n < 1:
        raise ValueError("n must be >= 1")
    data = spec.sample(n, make_rng(seed, stream))
    if outlier is not None:
        data[-1] = np.broadcast_to(np.asarray(outlier, dtype=float), (spec.d,))
    return SampleSet(data, seed, spec.spec_id)


def seed_list(master_seed: int, n_seeds: int) -> list[int]:
    return [int(master_seed) + SEED_STRIDE * i for i in range(n_seeds)]


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str
    p_spec: DistributionSpec
    q_spec: DistributionSpec
    n: int = 10_000
    methods: tuple = METHODS
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    n_seeds: int = 10
    master_seed: int = 0
    outlier: Optional[tuple] = None
    n_gt: int = 100_000
    out_dir: Optional[Path] = None
    jobs: int = 1

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ValueError(f"unknown preset {self.preset!r}")
        if self.n_seeds < 1:
            raise ValueError("n_seeds must be >= 1")
        if self.p_spec.d != self.q_spec.d:
            raise ValueError("P and Q must share the dimension")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}")
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.outlier is not None:
            object.__setattr__(self, "outlier", tuple(float(v) for v in np.broadcast_to(
                np.asarray(self.outlier, dtype=float), (self.p_spec.d,))))

    @property
    def seeds(self) -> list[int]:
        return seed_list(self.master_seed, self.n_seeds)

    def to_dict(self) -> dict:
        est = self.estimator
        return {
            "preset": self.preset, "p": self.p_spec.to_dict(), "q": self.q_spec.to_dict(),
            "n": self.n, "methods": list(self.methods), "n_seeds": self.n_seeds,
            "master_seed": self.master_seed, "n_gt": self.n_gt,
            "outlier": None if self.outlier is None else list(self.outlier),
            "k": est.k, "split_ratio": est.split_ratio, "lambda_points": est.lambda_grid_size,
            "gamma_points": est.gamma_grid_size, "gamma_mode": est.gamma_mode,
        }

    @classmethod
    def from_dict(cls, cfg: dict) -> "ExperimentConfig":
        """Build from a plain dict such as a parsed JSON config file.

        Preset keys (``shift``, ``dim``, ``psi``) are honoured unless ``p`` and
        ``q`` are given explicitly, which selects the custom preset.
        """
        est = EstimatorConfig(
            k=cfg.get("k", "sqrt_n"), split_ratio=cfg.get("split_ratio", 0.5),
            lambda_grid_size=cfg.get("lambda_points", 201), gamma_grid_size=cfg.get("gamma_points", 201),
            gamma_mode=cfg.get("gamma_mode", "grid"))
        common = dict(n=cfg.get("n"), methods=cfg.get("methods"), n_seeds=cfg.get("n_seeds"),
                      master_seed=cfg.get("master_seed"), n_gt=cfg.get("n_gt"), estimator=est)
        if "p" in cfg and "q" in cfg:
            return make_preset("custom", p_spec=DistributionSpec.from_dict(cfg["p"]),
                               q_spec=DistributionSpec.from_dict(cfg["q"]), outlier=cfg.get("outlier"), **common)
        return make_preset(cfg.get("preset", "shift"), d=cfg.get("dim"), shift=cfg.get("shift"),
                           psi=cfg.get("psi"), **common)


def make_preset(name: str, *, d: Optional[int] = None, shift: Optional[float] = None,
                psi: Optional[float] = None, n: Optional[int] = None, methods=None,
                n_seeds: Optional[int] = None, master_seed: Optional[int] = None,
                n_gt: Optional[int] = None, estimator: Optional[EstimatorConfig] = None,
                p_spec: Optional[DistributionSpec] = None, q_spec: Optional[DistributionSpec] = None,
                outlier=None, out_dir=None, jobs: int = 1) -> ExperimentConfig:
    """Experiment settings for one of the toy studies.

    ``shift`` is the per-coordinate offset of Q, so |mu| = shift * sqrt(d).
    Unset arguments fall back to the preset's defaults.
    """
    est = estimator if estimator is not None else EstimatorConfig()
    outlier_pt = None
    if name == "shift":
        d = d or 64
        shift = SHIFT_VALUES[0] if shift is None else shift
        p, q = DistributionSpec.shifted(d), DistributionSpec.shifted(d, shift)
    elif name == "highdim":
        d = d or 2048
        shift = 1 / math.sqrt(d) if shift is None else shift
        p, q = DistributionSpec.shifted(d), DistributionSpec.shifted(d, shift)
    elif name == "outlier":
        d = d or 64
        shift = 3 / math.sqrt(d) if shift is None else shift
        p, q = DistributionSpec.shifted(d), DistributionSpec.shifted(d, shift)
        outlier_pt = 4.0 if outlier is None else outlier
        if estimator is None:
            est = EstimatorConfig(k=4, split_ratio=1.0)
    elif name == "gmm":
        d = d or 64
        centers = np.asarray(GMM_CENTERS)[:, None] * np.ones(d)
        p = DistributionSpec.gmm(d, GMM_P_WEIGHTS, centers)
        q = DistributionSpec.gmm(d, GMM_Q_WEIGHTS, centers)
        n = n or 1000
    elif name == "pq_equal":
        d = d or 64
        p = q = DistributionSpec.shifted(d)
    elif name == "scale":
        d = d or 8
        p, q = DistributionSpec.scaled(d, 1.0), DistributionSpec.scaled(d, 0.5 if psi is None else psi)
    elif name == "custom":
        if p_spec is None or q_spec is None:
            raise ValueError("the custom preset needs p_spec and q_spec")
        p, q = p_spec, q_spec
        outlier_pt = outlier
    else:
        raise ValueError(f"unknown preset {name!r}")
    return ExperimentConfig(
        preset=name, p_spec=p, q_spec=q, n=n or 10_000, methods=tuple(methods or METHODS),
        estimator=est, n_seeds=n_seeds or 10, master_seed=master_seed or 0, outlier=outlier_pt,
        n_gt=n_gt or 100_000, out_dir=None if out_dir is None else Path(out_dir), jobs=jobs)


def _is_standard(spec: DistributionSpec) -> bool:
    if spec.variant == "scaled_gaussian":
        return spec.psi == 1.0
    return spec.variant == "shifted_gaussian" and not np.any(spec.mu)


def ground_truth(p_spec: DistributionSpec, q_spec: DistributionSpec, lambda_points: int,
                 n_gt: int = 100_000, seed: int = 0) -> PrCurve:
    """Closed form when P = Q or for the (standard, scaled) pair, Monte-Carlo otherwise."""
    grid = make_lambda_grid(lambda_points)
    if p_spec.to_dict() == q_spec.to_dict():
        return ideal_curve(grid)
    if _is_standard(p_spec) and q_spec.variant == "scaled_gaussian":
        return analytic_curve_scale(q_spec.psi, p_spec.d, grid)
    return gt_curve_mc(p_spec, q_spec, n_gt, grid, seed)


def aggregate(curves: Sequence[PrCurve]) -> tuple[PrCurve, PrCurve, PrCurve]:
    """Per-lambda mean of alpha and mean -/+ its population standard deviation."""
    if len(curves) == 0:
        raise ValueError("need at least one curve")
    lam = curves[0].lambdas
    for c in curves[1:]:
        if not np.array_equal(c.lambdas, lam):
            raise ValueError("curves are on different lambda grids")
    a = np.stack([c.alphas for c in curves])
    mean = a.mean(axis=0)
    sigma = a.std(axis=0)
    kind = "empirical" if all(c.kind == "empirical" for c in curves) else "band"
    return (PrCurve.from_alphas(lam, mean, kind),
            PrCurve.from_alphas(lam, mean - sigma, "band"),
            PrCurve.from_alphas(lam, mean + sigma, "band"))


@dataclass
class RunResult:
    config: ExperimentConfig
    gt: PrCurve
    curves: dict = field(default_factory=dict)      # (method, seed) -> PrCurve
    mean: dict = field(default_factory=dict)        # method -> PrCurve
    lower: dict = field(default_factory=dict)
    upper: dict = field(default_factory=dict)
    summaries: dict = field(default_factory=dict)   # method -> SummaryReport
    seed_iou: dict = field(default_factory=dict)    # method -> array over seeds

    def sigma(self, method: str) -> np.ndarray:
        return 0.5 * (self.upper[method].alphas - self.lower[method].alphas)

    def mean_iou(self, method: str) -> float:
        """IoU vs ground truth averaged over seeds."""
        return float(np.mean(self.seed_iou[method]))


def _fit_seed(cfg: ExperimentConfig, seed: int) -> dict[str, PrCurve]:
    x = sample(cfg.p_spec, cfg.n, seed, cfg.outlier, _X_STREAM)
    y = sample(cfg.q_spec, cfg.n, seed, None, _Y_STREAM)
    return estimate_curves(x, y, replace(cfg.estimator, seed=seed), cfg.methods)


def _manifest(cfg: ExperimentConfig, done: list[int], status: str, result: Optional[RunResult]) -> str:
    flat: dict = {"status": status, "seeds": cfg.seeds, "completed_seeds": done,
                  "version.python": platform.python_version(), "version.numpy": np.__version__,
                  "version.scipy": scipy.__version__}
    for key, val in cfg.to_dict().items():
        flat["config." + key] = val
    if result is not None:
        for m, rep in result.summaries.items():
            flat.update(rep.to_flat(m + "."))
            flat[m + ".iou_seed_mean"] = result.mean_iou(m)
            flat[m + ".iou_seed_std"] = float(np.std(result.seed_iou[m]))
            flat[m + ".sigma_max"] = float(result.sigma(m).max())
    return json.dumps(flat, indent=1, sort_keys=True) + "\n"


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Fit every method on every seed, aggregate, score against ground truth and write outputs."""
    out = cfg.out_dir
    gt = ground_truth(cfg.p_spec, cfg.q_spec, cfg.estimator.lambda_grid_size, cfg.n_gt, cfg.master_seed)
    result = RunResult(cfg, gt)
    if out is not None:
        gt.to_csv(out / "gt.csv")
    done: list[int] = []
    try:
        if cfg.jobs > 1:
            with ProcessPoolExecutor(cfg.jobs) as pool:
                fits = pool.map(_fit_seed, [cfg] * cfg.n_seeds, cfg.seeds)
                per_seed = list(zip(cfg.seeds, fits))
        else:
            per_seed = ((s, _fit_seed(cfg, s)) for s in cfg.seeds)
        for seed, curves in per_seed:
            for m, c in curves.items():
                result.curves[(m, seed)] = c
                if out is not None:
                    c.to_csv(out / "curves" / f"{m}_{seed}.csv")
            done.append(seed)
    except BaseException:
        if out is not None:
            atomic_write_text(out / "manifest.json", _manifest(cfg, done, "failed", None))
        raise

    for m in cfg.methods:
        runs = [result.curves[(m, s)] for s in cfg.seeds]
        result.mean[m], result.lower[m], result.upper[m] = aggregate(runs)
        result.seed_iou[m] = np.array([curve_iou(c, gt) for c in runs])
        result.summaries[m] = summarize(result.mean[m], reference=gt)
        if out is not None:
            for tag, c in (("mean", result.mean[m]), ("lo", result.lower[m]), ("hi", result.upper[m])):
                c.to_csv(out / "aggregate" / f"{m}_{tag}.csv")
    if out is not None:
        atomic_write_text(out / "manifest.json", _manifest(cfg, done, "complete", result))
    return result


def summary_table(result: RunResult) -> str:
    rows = ["method,iou_mean_curve,iou_seed_mean,f_8,f_1/8,pr_median_lambda,alpha_inf,beta_0"]
    for m, rep in result.summaries.items():
        rows.append(f"{m},{rep.iou_vs_reference:.4f},{result.mean_iou(m):.4f},{rep.f_b:.4f},"
                    f"{rep.f_inv_b:.4f},{rep.pr_median[0]:.4f},{rep.alpha_inf_hat:.4f},{rep.beta_0_hat:.4f}")
    return "\n".join(rows) + "\n"

