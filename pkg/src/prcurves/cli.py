"""Command-line entry point (``prcurves``)."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .classifiers import METHODS
from .consistency import consistency_sweep, sweep_to_csv
from .core import PrCurve, atomic_write_text, make_lambda_grid
from .estimation import EXTREME_METHODS, EstimatorConfig, estimate_curves, extreme_scalar
from .experiments import PRESETS, ExperimentConfig, ground_truth, make_preset, run_experiment, summary_table
from .io import read_matrix
from .oracles import analytic_alpha_scale, chernoff_bound, chernoff_coefficient
from .summary import summarize


def _k_value(args) -> object:
    if args.k is not None:
        return args.k
    return args.k_rule


def _estimator(args) -> EstimatorConfig:
    return EstimatorConfig(
        k=_k_value(args), split_ratio=1.0 if args.no_split else args.split,
        lambda_grid_size=args.lambda_points, gamma_grid_size=args.gamma_points,
        seed=args.seed, gamma_mode=getattr(args, "gamma_mode", "grid"))


def _emit(text: str, out: Optional[Path], name: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(out / name, text)
        print(f"wrote {out / name}")


def _add_estimator_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k", type=int, default=None, help="fixed neighbour count")
    p.add_argument("--k-rule", choices=["sqrt_n"], default="sqrt_n")
    p.add_argument("--split", type=float, default=0.5, help="training share of each sample")
    p.add_argument("--no-split", action="store_true", help="fit and evaluate on the same samples")
    p.add_argument("--lambda-points", type=int, default=201)
    p.add_argument("--gamma-points", type=int, default=201)
    p.add_argument("--gamma-mode", choices=["grid", "exact"], default="grid")


def _cmd_gt(args) -> int:
    cfg = make_preset(args.preset, d=args.dim, shift=args.shift, psi=args.psi)
    curve = ground_truth(cfg.p_spec, cfg.q_spec, args.lambda_points, args.n_gt, args.seed)
    _emit(curve.to_csv(), args.out, "gt.csv")
    return 0


def _cmd_estimate(args) -> int:
    x, y = read_matrix(args.x), read_matrix(args.y)
    cfg = _estimator(args)
    methods = METHODS if args.method == "all" else [args.method]
    curves = estimate_curves(x, y, cfg, methods)
    for m, c in curves.items():
        _emit(c.to_csv(), args.out, f"{m}.csv")
    if args.extremes:
        k = args.k if args.k is not None else 3
        vals = {m: extreme_scalar(m, x, y, k=k, ppr_form=args.ppr_form) for m in EXTREME_METHODS}
        _emit(json.dumps(vals, indent=1) + "\n", args.out, "extremes.json")
    return 0


def _cmd_experiment(args) -> int:
    if args.config is not None:
        raw = json.loads(Path(args.config).read_text())
        cfg = ExperimentConfig.from_dict(raw)
    else:
        methods = METHODS if args.method == "all" else (args.method,)
        est = _estimator(args) if (args.k is not None or args.no_split or args.split != 0.5
                                   or args.lambda_points != 201 or args.gamma_points != 201) else None
        cfg = make_preset(args.preset, d=args.dim, shift=args.shift, psi=args.psi, n=args.n,
                          methods=methods, n_seeds=args.seeds, master_seed=args.seed,
                          n_gt=args.n_gt, estimator=est)
    cfg = replace(cfg, out_dir=args.out, jobs=args.jobs)
    result = run_experiment(cfg)
    sys.stdout.write(summary_table(result))
    return 0


def _cmd_summarize(args) -> int:
    curve = PrCurve.from_csv(args.curve, kind="band")
    ref = PrCurve.from_csv(args.reference, kind="band") if args.reference else None
    rep = summarize(curve, b=args.b, reference=ref)
    _emit(json.dumps(rep.to_flat(), indent=1, sort_keys=True) + "\n", args.out, "summary.json")
    return 0


def _cmd_consistency(args) -> int:
    ps = np.linspace(0.0, 1.0, args.p_points)
    rows = consistency_sweep(ps, args.ks, args.lambdas)
    _emit(sweep_to_csv(rows), args.out, "consistency.csv")
    return 0


def _cmd_chernoff(args) -> int:
    res = chernoff_coefficient(args.psi)
    grid = make_lambda_grid(args.lambda_points)
    lines = [f"# C={res.coefficient:.17g} gamma*={res.argmin_gamma:.17g} D_C={res.divergence:.17g}",
             "lambda,alpha,bound"]
    g = min(max(res.argmin_gamma, 1e-6), 1 - 1e-6)
    for lam in grid.lambdas:
        lines.append(f"{lam:.17g},{analytic_alpha_scale(args.psi, lam, args.dim):.17g},"
                     f"{chernoff_bound(args.psi, lam, args.dim, g):.17g}")
    _emit("\n".join(lines) + "\n", args.out, "chernoff.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="prcurves", description="Precision-recall curves between two samples.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", type=Path, default=None, help="output directory (stdout if omitted)")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gt", help="ground-truth curve for a preset pair")
    p.add_argument("--preset", choices=[q for q in PRESETS if q != "custom"], default="shift")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--shift", type=float, default=None)
    p.add_argument("--psi", type=float, default=None)
    p.add_argument("--lambda-points", type=int, default=201)
    p.add_argument("--n-gt", type=int, default=100_000)
    common(p)
    p.set_defaults(func=_cmd_gt)

    p = sub.add_parser("estimate", help="curve from two point matrices (CSV or binary)")
    p.add_argument("x", type=Path)
    p.add_argument("y", type=Path)
    p.add_argument("--method", choices=list(METHODS) + ["all"], default="knn")
    p.add_argument("--extremes", action="store_true", help="also report the scalar extreme estimators")
    p.add_argument("--ppr-form", choices=["complement", "as-written"], default="complement")
    _add_estimator_flags(p)
    common(p)
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("experiment", help="run a preset (or a JSON config) over several seeds")
    p.add_argument("--preset", choices=PRESETS[:-1], default="shift")
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--method", choices=list(METHODS) + ["all"], default="all")
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--shift", type=float, default=None)
    p.add_argument("--psi", type=float, default=None)
    p.add_argument("--n-gt", type=int, default=100_000)
    p.add_argument("--jobs", type=int, default=1)
    _add_estimator_flags(p)
    common(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("summarize", help="F-scores, PR median, extremes and optional IoU of a curve file")
    p.add_argument("curve", type=Path)
    p.add_argument("--reference", type=Path, default=None)
    p.add_argument("--b", type=float, default=8.0)
    common(p, seed=False)
    p.set_defaults(func=_cmd_summarize)

    p = sub.add_parser("consistency", help="binomial risk sweep with its Hoeffding envelope")
    p.add_argument("--p-points", type=int, default=51)
    p.add_argument("--ks", type=int, nargs="+", default=[10, 100, 1000])
    p.add_argument("--lambdas", type=float, nargs="+", default=[0.25, 1.0, 4.0])
    common(p, seed=False)
    p.set_defaults(func=_cmd_consistency)

    p = sub.add_parser("chernoff", help="Chernoff bound vs exact alpha for the scaled pair")
    p.add_argument("--psi", type=float, default=0.5)
    p.add_argument("--dim", type=int, default=8)
    p.add_argument("--lambda-points", type=int, default=201)
    common(p, seed=False)
    p.set_defaults(func=_cmd_chernoff)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if not 0 < getattr(args, "split", 0.5) <= 1:
        print("error: --split must lie in (0, 1]", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
