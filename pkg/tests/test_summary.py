import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from prcurves.core import PrCurve, make_lambda_grid
from prcurves.estimation import EstimatorConfig, estimate_curve, extreme_scalar
from prcurves.oracles import analytic_alpha_scale, analytic_curve_scale, ideal_curve
from prcurves.summary import (SummaryReport, area_above_ray, curve_iou, extremes, f_score, pr_median,
                              summarize)

GRID = make_lambda_grid(201)


def rectangle(h=0.5, grid=GRID):
    return PrCurve.from_alphas(grid.lambdas, np.minimum(h * grid.lambdas, h), kind="analytic")


class TestFScore:
    def test_ideal(self):
        for b in (0.125, 1.0, 8.0):
            assert f_score(ideal_curve(GRID), b) == pytest.approx(1.0, abs=1e-15)

    def test_rectangle(self):
        assert f_score(rectangle(), 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_matches_dense_grid(self):
        c = analytic_curve_scale(0.5, 8, GRID)
        lam = make_lambda_grid(100_000).lambdas
        a = np.array([analytic_alpha_scale(0.5, v, 8) for v in lam])
        ok = a > 0
        dense = np.max(65 / (64 / a[ok] + lam[ok] / a[ok]))
        assert f_score(c, 8.0) == pytest.approx(dense, abs=1e-3)

    def test_approaches_extremes(self):
        c = analytic_curve_scale(0.5, 4, GRID)
        a_inf, b_0 = extremes(c)
        gaps = [a_inf - f_score(c, b) for b in (1, 8, 64, 512)]
        assert all(g1 >= g2 for g1, g2 in zip(gaps, gaps[1:]))
        gaps = [b_0 - f_score(c, 1 / b) for b in (1, 8, 64, 512)]
        assert all(g1 >= g2 for g1, g2 in zip(gaps, gaps[1:]))

    def test_zero_curve(self):
        assert f_score(PrCurve.from_alphas(GRID.lambdas, np.zeros(len(GRID))), 1.0) == 0.0

    def test_bad_b(self):
        with pytest.raises(ValueError):
            f_score(ideal_curve(GRID), 0.0)


class TestPrMedian:
    def test_ideal(self):
        lam, a, b = pr_median(ideal_curve(GRID))
        assert lam == 1.0
        assert a == pytest.approx(1.0, abs=1e-12) and b == pytest.approx(1.0, abs=1e-12)

    def test_rectangle(self):
        assert pr_median(rectangle())[0] == 1.0

    def test_polar_oracle(self):
        # area above the ray of angle phi is the integral of rho^2 / 2 with rho^2 = alpha^2 + beta^2
        psi, d = 0.5, 4

        def rho2(t):
            lam = math.tan(t)
            a = analytic_alpha_scale(psi, lam, d)
            return a * a + (a / lam) ** 2

        def above(phi):
            return quad(lambda t: 0.5 * rho2(t), phi, math.pi / 2, limit=200, epsabs=1e-13)[0]

        total = above(1e-12)
        phi = brentq(lambda p: above(p) - total / 2, 1e-6, math.pi / 2 - 1e-6, xtol=1e-14)
        lam_bar = pr_median(analytic_curve_scale(psi, d, make_lambda_grid(2001)))[0]
        assert lam_bar == pytest.approx(math.tan(phi), rel=1e-4)

    def test_halves_the_area(self):
        c = analytic_curve_scale(2.0, 3, GRID)
        lam = pr_median(c)[0]
        total = area_above_ray(c, 0.0)
        assert area_above_ray(c, lam) == pytest.approx(total / 2, rel=1e-5)

    def test_zero_area(self):
        with pytest.raises(ValueError):
            pr_median(PrCurve.from_alphas(GRID.lambdas, np.zeros(len(GRID))))


class TestIoU:
    def test_self(self):
        c = analytic_curve_scale(0.5, 8, GRID)
        assert curve_iou(c, c) == 1.0

    def test_ideal_vs_rectangle(self):
        assert curve_iou(ideal_curve(GRID), rectangle()) == pytest.approx(0.25, abs=3e-3)

    def test_symmetric_and_bounded(self):
        a, b = analytic_curve_scale(0.5, 8, GRID), analytic_curve_scale(3.0, 2, GRID)
        v = curve_iou(a, b)
        assert v == curve_iou(b, a) and 0 <= v <= 1

    def test_grid_doubling_stable(self):
        a, b = analytic_curve_scale(0.5, 8, GRID), rectangle(0.7)
        assert abs(curve_iou(a, b) - curve_iou(a, b, n_grid=20_000)) < 1e-3

    def test_both_empty(self):
        z = PrCurve.from_alphas(GRID.lambdas, np.zeros(len(GRID)))
        assert curve_iou(z, z) == 1.0


class TestExtremes:
    def test_ideal(self):
        assert extremes(ideal_curve(GRID)) == (1.0, 1.0)

    def test_widening_grid_goes_to_one(self):
        # the grid edge sits at tan(pi / (4n)), so the approach is slow in general; a mild pair shows it
        ext = [extremes(analytic_curve_scale(0.8, 2, make_lambda_grid(n))) for n in (21, 201, 2001)]
        assert all(e[0] == 1.0 for e in ext)
        assert ext[0][1] < ext[1][1] < ext[2][1] and ext[2][1] > 1 - 1e-6

    def test_bounded_by_scalar_estimators(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=(1000, 8)), rng.normal(size=(1000, 8)) + 0.3
        c = estimate_curve(x, y, EstimatorConfig(method="ipr", k=3, split_ratio=1.0))
        a_inf, b_0 = extremes(c)
        ipr_p, ipr_r = extreme_scalar("ipr", x, y, k=3), extreme_scalar("ipr", y, x, k=3)
        assert a_inf <= ipr_p and b_0 <= ipr_r
        # other members of the family with zero error on one side can only do better
        assert ipr_p - a_inf < 0.05 and ipr_r - b_0 < 0.05


def test_summarize_flat():
    rep = summarize(analytic_curve_scale(0.5, 8, GRID), reference=ideal_curve(GRID))
    assert isinstance(rep, SummaryReport)
    flat = rep.to_flat("knn.")
    assert {"knn.f_b", "knn.pr_median_lambda", "knn.iou_vs_reference"} <= set(flat)
    assert 0 < flat["knn.iou_vs_reference"] < 1
