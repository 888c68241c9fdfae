"""Precision-recall curves between two samples via weighted classification risk."""
from .classifiers import METHODS, ClassifierFamily, build_neighbor_index, evaluate, make_family
from .consistency import asymptotic_knn_risk, hoeffding_envelope, mu_lambda
from .core import LambdaGrid, PrCurve, SampleSet, curve_area, make_lambda_grid, split_pool
from .distributions import DistributionSpec, log_density_ratio, make_rng
from .estimation import EstimatorConfig, RatePair, empirical_rates, estimate_curve, estimate_curves, extreme_scalar
from .experiments import ExperimentConfig, RunResult, aggregate, make_preset, run_experiment, sample
from .oracles import (analytic_alpha_scale, analytic_curve_scale, chernoff_bound, chernoff_coefficient,
                      chi_tail, gt_curve_mc, ideal_curve, scale_threshold)
from .summary import SummaryReport, curve_iou, extremes, f_score, pr_median, summarize

__version__ = "0.1.0"

__all__ = [
    "METHODS", "ClassifierFamily", "build_neighbor_index", "evaluate", "make_family",
    "asymptotic_knn_risk", "hoeffding_envelope", "mu_lambda",
    "LambdaGrid", "PrCurve", "SampleSet", "curve_area", "make_lambda_grid", "split_pool",
    "DistributionSpec", "log_density_ratio", "make_rng",
    "EstimatorConfig", "RatePair", "empirical_rates", "estimate_curve", "estimate_curves", "extreme_scalar",
    "ExperimentConfig", "RunResult", "aggregate", "make_preset", "run_experiment", "sample",
    "analytic_alpha_scale", "analytic_curve_scale", "chernoff_bound", "chernoff_coefficient",
    "chi_tail", "gt_curve_mc", "ideal_curve", "scale_threshold",
    "SummaryReport", "curve_iou", "extremes", "f_score", "pr_median", "summarize",
]
