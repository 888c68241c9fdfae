"""Closed-form curve for N(0, I) against N(0, psi^2 I), with its Chernoff envelope."""
import numpy as np

from prcurves import make_lambda_grid
from prcurves.distributions import DistributionSpec
from prcurves.oracles import analytic_curve_scale, chernoff_bound, chernoff_coefficient, gt_curve_mc
from prcurves.summary import summarize

#%%
# The truncation-style pair: Q is a shrunk copy of P.
psi, d = 0.5, 8
grid = make_lambda_grid(201)
exact = analytic_curve_scale(psi, d, grid)
print(exact.to_csv().splitlines()[::40])

#%%
# A Monte-Carlo estimate from the likelihood-ratio classifier lands on top of it.
mc = gt_curve_mc(DistributionSpec.scaled(d, 1.0), DistributionSpec.scaled(d, psi), 100_000, grid, seed=0)
print("max |mc - exact| =", np.abs(mc.alphas - exact.alphas).max())

#%%
# The Chernoff coefficient gives an exponential envelope in d.
res = chernoff_coefficient(psi)
print(f"C = {res.coefficient:.4f}, argmin gamma = {res.argmin_gamma:.4f}")
for lam in (0.1, 1.0, 10.0):
    alpha = float(np.interp(lam, grid.lambdas, exact.alphas))
    print(f"lambda={lam:5.1f}  alpha~{alpha:.4f}  bound={chernoff_bound(psi, lam, d, res.argmin_gamma):.4f}")

#%%
rep = summarize(exact)
print(rep.to_flat())
