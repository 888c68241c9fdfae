"""Acceptance checks, one report line per criterion.

The CI-scale variants run by default. Set ``PRCURVES_FULL=1`` to also run the
desktop-scale reproductions (n = 10^4 with 10 and 100 seeds). Every line is
collected in ``REPORT`` and echoed in the pytest terminal summary by conftest.py.
Run this file directly with ``python3 tests/test_acceptance.py`` to get the
lines without pytest.
"""
import math
import os
import time

import numpy as np
import pytest

import bruteforce
from prcurves.classifiers import METHODS
from prcurves.consistency import hoeffding_envelope, mu_lambda
from prcurves.core import SampleSet, make_lambda_grid, split_pool
from prcurves.distributions import DistributionSpec, make_rng
from prcurves.estimation import EstimatorConfig, estimate_curve, estimate_curves, extreme_scalar
from prcurves.experiments import make_preset, run_experiment, sample
from prcurves.oracles import (analytic_rates_scale, chernoff_bound, chi_tail_gamma, chi_tail_recurrence,
                              gt_curve_mc)
from prcurves.summary import curve_iou

FULL = os.environ.get("PRCURVES_FULL") == "1"
REPORT: list[str] = []

# pinned tolerances
CHI_RTOL = 1e-10
CHI_SECONDS = 1.0
MC_SE = 3.0
MC_FRACTION = 0.99
MC_SECONDS = 60.0
SHIFT_TARGETS = {
    0.12: {"ipr": 0.81, "knn": 0.87, "parzen": 0.84, "coverage": 0.92},
    0.38: {"ipr": 0.63, "knn": 0.84, "parzen": 0.75, "coverage": 0.93},
}
IOU_TOL_CI, IOU_TOL_FULL = 0.10, 0.05
IOU_CI_SECONDS, IOU_FULL_SECONDS = 180.0, 1800.0
IDEAL_IOU = 0.90
SIGMA_CI, SIGMA_FULL = 2e-2, 1e-2
OUTLIER_IOU = 0.98

PSIS = (0.25, 0.5, 2.0, 4.0)
DIMS = (1, 2, 8, 64)


def report(number, ok: bool, detail: str) -> None:
    line = f"CRITERION {number}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    REPORT.append(line)


def skip_full(number, what: str) -> None:
    line = f"CRITERION {number}: SKIPPED {what} (set PRCURVES_FULL=1)"
    print(line)
    REPORT.append(line)
    pytest.skip(what)


def test_c01_chi_tail_paths_agree():
    t = np.linspace(0.0, 20.0, 401)
    start = time.perf_counter()
    worst = 0.0
    for d in range(1, 129):
        a, b = chi_tail_recurrence(d, t), chi_tail_gamma(d, t)
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny))))
    elapsed = time.perf_counter() - start
    ok = worst < CHI_RTOL and elapsed < CHI_SECONDS
    report(1, ok, f"max rel diff {worst:.2e} (< {CHI_RTOL:g}), {elapsed:.2f}s (< {CHI_SECONDS:g}s)")
    assert ok


def test_c02_monte_carlo_matches_closed_form():
    grid = make_lambda_grid(201)
    n_gt = 100_000
    start = time.perf_counter()
    inside = total = 0
    for psi in PSIS:
        for d in DIMS:
            # the harness default seed; the 201 points of one draw share a sample, so misses come in blocks
            mc = gt_curve_mc(DistributionSpec.scaled(d, 1.0), DistributionSpec.scaled(d, psi), n_gt, grid, seed=0)
            for lam, a_mc in zip(grid.lambdas, mc.alphas):
                fpr, fnr = analytic_rates_scale(psi, lam, d)
                se = math.sqrt((lam * lam * fpr * (1 - fpr) + fnr * (1 - fnr)) / n_gt)
                inside += abs(a_mc - (lam * fpr + fnr)) <= MC_SE * se + 1e-15
                total += 1
    elapsed = time.perf_counter() - start
    frac = inside / total
    ok = frac >= MC_FRACTION and elapsed < MC_SECONDS
    report(2, ok, f"{inside}/{total} points within {MC_SE:g} SE ({frac:.4f} >= {MC_FRACTION}), "
                  f"{elapsed:.1f}s (< {MC_SECONDS:g}s)")
    assert ok


def test_c03_chernoff_dominance():
    grid = make_lambda_grid(201)
    violations = checked = 0
    for psi in PSIS:
        for d in DIMS:
            for lam in grid.lambdas:
                fpr, fnr = analytic_rates_scale(psi, lam, d)
                alpha = lam * fpr + fnr
                for g in np.arange(1, 10) / 10:
                    checked += 1
                    violations += chernoff_bound(psi, lam, d, g) < alpha * (1 - 1e-12)
    report(3, violations == 0, f"{violations} violations in {checked} (psi, d, lambda, gamma) cases")
    assert violations == 0


def _shift_run(shift: float, n: int, n_seeds: int) -> dict[str, float]:
    cfg = make_preset("shift", shift=shift, n=n, n_seeds=n_seeds)
    res = run_experiment(cfg)
    return {m: res.mean_iou(m) for m in METHODS}


def _shift_check(number, n: int, tol: float, budget: float) -> None:
    start = time.perf_counter()
    misses, parts = [], []
    for shift, targets in SHIFT_TARGETS.items():
        got = _shift_run(shift, n, 10)
        for m in METHODS:
            parts.append(f"{shift}/{m} {got[m]:.3f} vs {targets[m]:.2f}")
            if abs(got[m] - targets[m]) > tol:
                misses.append(f"{shift}/{m}")
    elapsed = time.perf_counter() - start
    ok = not misses and elapsed < budget
    report(number, ok, f"n={n}, tol {tol:g}, {elapsed:.0f}s (< {budget:g}s); " + "; ".join(parts)
           + (f"; outside tolerance: {', '.join(misses)}" if misses else ""))
    assert ok


def test_c04_shift_iou_ci():
    _shift_check("4 (CI)", 2000, IOU_TOL_CI, IOU_CI_SECONDS)


def test_c04_shift_iou_full():
    if not FULL:
        skip_full("4 (full)", "n=10000 shifted-Gaussian IoU")
    _shift_check("4 (full)", 10_000, IOU_TOL_FULL, IOU_FULL_SECONDS)


def test_c05_equal_distributions_give_ideal_curve():
    res = run_experiment(make_preset("pq_equal", n=10_000, n_seeds=3))
    ious = {m: res.summaries[m].iou_vs_reference for m in METHODS}
    ok = min(ious.values()) >= IDEAL_IOU
    report(5, ok, "mean-curve IoU vs min(lambda, 1): " + ", ".join(f"{m} {v:.4f}" for m, v in ious.items())
           + f" (>= {IDEAL_IOU})")
    assert ok


def _sigma_check(number, n_seeds: int, bound: float) -> None:
    res = run_experiment(make_preset("shift", n=10_000, n_seeds=n_seeds))
    sig = {m: float(res.sigma(m).max()) for m in METHODS}
    iou_std = {m: float(np.std(res.seed_iou[m])) for m in METHODS}
    ok = max(sig.values()) < bound
    report(number, ok, f"{n_seeds} seeds, max per-lambda std: " + ", ".join(f"{m} {v:.4f}" for m, v in sig.items())
           + f" (< {bound:g}); for reference, IoU std across seeds: "
           + ", ".join(f"{m} {v:.4f}" for m, v in iou_std.items()))
    assert ok


def test_c06_variance_ci():
    _sigma_check("6 (CI)", 20, SIGMA_CI)


def test_c06_variance_full():
    if not FULL:
        skip_full("6 (full)", "100-seed variance study")
    _sigma_check("6 (full)", 100, SIGMA_FULL)


def test_c07_consistency():
    # (a) Hoeffding envelope on a 50 x 20 x 10 grid
    ps = np.linspace(0.0, 1.0, 50)
    ks = np.array([1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 233, 377, 610, 987, 1597, 2584, 4181, 6765, 10946])
    lams = np.geomspace(0.05, 20.0, 10)
    violations = 0
    for k in ks:
        for lam in lams:
            limit = np.minimum(lam * ps, 1 - ps)
            gap = np.abs(mu_lambda(ps, int(k), lam) - limit)
            violations += int(np.sum(gap > hoeffding_envelope(ps, int(k), lam) + 1e-12))
    ok_a = violations == 0 and ks.size == 20

    # (b) equality at p = 1 / (lam + 1) whenever k / (lam + 1) is fractional
    worst_b, cases = 0.0, 0
    for k in (3, 7, 10, 31, 101, 1000):
        for lam in (0.3, 0.5, 1.0, 2.0, 3.7):
            t = k / (lam + 1)
            if abs(t - round(t)) < 1e-9:
                continue
            p = 1 / (lam + 1)
            worst_b = max(worst_b, abs(float(mu_lambda(p, k, lam)) - lam * p) / (lam * p))
            cases += 1
    ok_b = worst_b < 1e-12

    # (c) knn IoU vs ground truth over growing n
    ious = []
    for n in (250, 1000, 4000):
        res = run_experiment(make_preset("shift", shift=0.21, n=n, n_seeds=10, methods=("knn",)))
        ious.append(res.mean_iou("knn"))
    ok_c = ious[0] <= ious[1] <= ious[2]

    ok = ok_a and ok_b and ok_c
    report(7, ok, f"(a) {violations} envelope violations on 50x{ks.size}x10; "
                  f"(b) max rel gap {worst_b:.1e} over {cases} cases; "
                  f"(c) knn IoU n=250/1000/4000: {ious[0]:.4f} <= {ious[1]:.4f} <= {ious[2]:.4f}")
    assert ok


def test_c08_small_instances_match_enumeration():
    rng = np.random.default_rng(20240508)
    lam = make_lambda_grid(41).lambdas
    mismatches = 0
    for trial in range(200):
        nx, ny, d = rng.integers(4, 9), rng.integers(4, 9), rng.integers(1, 4)
        method = METHODS[trial % len(METHODS)]
        split = 1.0 if trial % 2 else 0.5
        x = rng.normal(size=(nx, d))
        y = rng.normal(size=(ny, d)) + rng.uniform(0, 1.5)
        seed = int(rng.integers(0, 10_000))
        pool = split_pool(SampleSet(x), SampleSet(y), split, make_rng(seed, 7))
        tx, ty = pool.train_x.data, pool.train_y.data
        k = int(rng.integers(1, min(len(tx), len(ty))))
        cfg = EstimatorConfig(method=method, k=k, split_ratio=split, lambda_grid_size=41, seed=seed,
                              gamma_mode="exact")
        got = estimate_curve(x, y, cfg).alphas
        ref = bruteforce.exhaustive_alphas(method, tx, ty, pool.val_x.data, pool.val_y.data, k, lam,
                                           in_sample=split == 1.0)
        mismatches += not np.array_equal(got, ref)
    report(8, mismatches == 0, f"{mismatches} of 200 instances differ from exhaustive enumeration")
    assert mismatches == 0


def test_c09_extreme_identities():
    rng = np.random.default_rng(99)
    bad = 0
    for _ in range(100):
        n, d, k = int(rng.integers(10, 60)), int(rng.integers(1, 6)), int(rng.integers(1, 6))
        x = rng.normal(size=(n, d))
        y = rng.normal(size=(int(rng.integers(10, 60)), d)) * rng.uniform(0.5, 2) + rng.uniform(0, 2)
        bad += extreme_scalar("prc", x, y, k=k, k_prime=1) != extreme_scalar("coverage", x, y, k=k)
        bad += extreme_scalar("eas", x, y, k=k) != min(extreme_scalar("ipr", x, y, k=k),
                                                      extreme_scalar("coverage", x, y, k=k))
    same = rng.normal(size=(50, 3))
    self_vals = [extreme_scalar(m, same, same.copy(), k=3) for m in ("ipr", "coverage")]
    ok = bad == 0 and self_vals == [1.0, 1.0]
    report(9, ok, f"{bad} identity failures in 100 instances; X=Y gives ipr {self_vals[0]}, "
                  f"coverage {self_vals[1]}")
    assert ok


def test_c10_outlier_robustness():
    cfg = make_preset("outlier")
    x_clean = sample(cfg.p_spec, cfg.n, 0, None, 1)
    x_dirty = sample(cfg.p_spec, cfg.n, 0, cfg.outlier, 1)
    y = sample(cfg.q_spec, cfg.n, 0, None, 2)
    clean = estimate_curves(x_clean, y, cfg.estimator, METHODS)
    dirty = estimate_curves(x_dirty, y, cfg.estimator, METHODS)
    iou = {m: curve_iou(clean[m], dirty[m]) for m in METHODS}
    others = [iou[m] for m in METHODS if m != "ipr"]
    ok = min(others) >= OUTLIER_IOU and iou["ipr"] < min(others)
    report(10, ok, "with-vs-without IoU: " + ", ".join(f"{m} {v:.4f}" for m, v in iou.items())
           + f" (others >= {OUTLIER_IOU}, ipr strictly lowest)")
    assert ok


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_c") and callable(fn):
            try:
                fn()
            except (AssertionError, pytest.skip.Exception):
                pass
