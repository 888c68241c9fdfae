"""How the k-NN vote risk approaches min(lambda p, 1 - p) as k grows."""
import numpy as np

from prcurves.consistency import hoeffding_envelope, mu_lambda

#%%
p = np.linspace(0, 1, 11)
lam = 1.0
print("p     " + "  ".join(f"{v:5.2f}" for v in p))
for k in (3, 11, 101, 1001):
    print(f"k={k:<4d}" + "  ".join(f"{v:5.3f}" for v in mu_lambda(p, k, lam)))
print("limit " + "  ".join(f"{v:5.3f}" for v in np.minimum(lam * p, 1 - p)))

#%%
# The gap is worst near p = 1 / (lambda + 1) and is controlled by the Hoeffding envelope elsewhere.
k = 101
gap = np.abs(mu_lambda(p, k, lam) - np.minimum(lam * p, 1 - p))
print(np.column_stack([p, gap, np.minimum(hoeffding_envelope(p, k, lam), 1.0)]).round(4))

#%%
# When k / (lambda + 1) is a whole number the tie count is dropped, and the risk dips below the limit.
print(mu_lambda(0.5, 10, 1.0), mu_lambda(0.5, 11, 1.0))
