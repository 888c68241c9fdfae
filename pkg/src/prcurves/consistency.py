"""Binomial risk function behind kNN consistency and its Monte-Carlo limit."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, expit
from scipy.stats import binom

from .distributions import DistributionSpec, log_density_ratio, make_rng


@dataclass(frozen=True)
class BinomialRiskPoint:
    p: float
    k: int
    lam: float
    mu: float
    limit: float
    gap: float
    bound: float


def _strict_bounds(k: int, lam: float) -> tuple[int, int]:
    """Integers j_lo, j_hi with {B < t} = {B <= j_lo} and {B > t} = {B > j_hi}, t = k / (lam + 1)."""
    t = k / (lam + 1.0)
    return math.ceil(t) - 1, math.floor(t)


def _tails_by_summation(j_lo: int, j_hi: int, k: int, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """P{B <= j_lo} and P{B > j_hi} by adding probability-mass terms.

    The terms come from scipy's binomial pmf, which is accurate to a few ulps
    even for k = 10^4; a gammaln-based log coefficient loses about 1e-12 there.
    """
    flat = np.atleast_1d(p).ravel()
    pmf = binom.pmf(np.arange(k + 1)[:, None], k, flat[None, :])
    below = pmf[: j_lo + 1].sum(axis=0) if j_lo >= 0 else np.zeros_like(flat)
    above = pmf[j_hi + 1:].sum(axis=0) if j_hi < k else np.zeros_like(flat)
    return np.minimum(below, 1.0).reshape(p.shape), np.minimum(above, 1.0).reshape(p.shape)


def mu_lambda(p, k: int, lam: float, method: str = "beta") -> np.ndarray:
    """lam p P{B < k/(lam+1)} + (1 - p) P{B > k/(lam+1)} with B ~ Binom(k, p).

    ``method="beta"`` uses the regularized incomplete beta,
    P{B <= j} = I_{1-p}(k - j, j + 1); ``method="sum"`` adds pmf terms.
    """
    if k < 1 or not lam > 0:
        raise ValueError("need k >= 1 and lambda > 0")
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p must lie in [0, 1]")
    j_lo, j_hi = _strict_bounds(k, lam)
    if method == "beta":
        below = betainc(k - j_lo, j_lo + 1, 1 - p) if j_lo >= 0 else np.zeros_like(p)
        above = betainc(j_hi + 1, k - j_hi, p) if j_hi < k else np.zeros_like(p)
    elif method == "sum":
        below, above = _tails_by_summation(j_lo, j_hi, k, p)
    else:
        raise ValueError("method must be 'beta' or 'sum'")
    return lam * p * below + (1 - p) * above


def hoeffding_envelope(p, k: int, lam: float) -> np.ndarray:
    """(lam + 1) exp(-2 k (1/(lam+1) - p)^2), a bound on |mu_lambda(p) - min(lam p, 1 - p)|."""
    p = np.asarray(p, dtype=float)
    return (lam + 1.0) * np.exp(-2.0 * k * (1.0 / (lam + 1.0) - p) ** 2)


def consistency_sweep(ps, ks, lams) -> list[BinomialRiskPoint]:
    rows = []
    ps = np.asarray(ps, dtype=float)
    for k in ks:
        for lam in lams:
            mu = mu_lambda(ps, int(k), float(lam))
            limit = np.minimum(lam * ps, 1 - ps)
            bound = hoeffding_envelope(ps, int(k), float(lam))
            for p, m, li, b in zip(ps, mu, limit, bound):
                rows.append(BinomialRiskPoint(float(p), int(k), float(lam), float(m), float(li), float(abs(m - li)), float(b)))
    return rows


def sweep_to_csv(rows: list[BinomialRiskPoint]) -> str:
    lines = ["p,k,lambda,mu,limit,gap,bound"]
    for r in rows:
        lines.append(f"{r.p:.17g},{r.k},{r.lam:.17g},{r.mu:.17g},{r.limit:.17g},{r.gap:.17g},{r.bound:.17g}")
    return "\n".join(lines) + "\n"


def asymptotic_knn_risk(p_spec: DistributionSpec, q_spec: DistributionSpec, k: int, lam: float,
                        n_mc: int, seed: int = 0, return_stderr: bool = False):
    """2 E[mu_lambda(eta(Z))] with Z ~ (P + Q)/2 and eta = dP/d(P+Q) = sigmoid(log dP/dQ)."""
    if n_mc < 1000:
        raise ValueError("n_mc must be at least 1000")
    rng = make_rng(seed, 201)
    from_p = rng.random(n_mc) < 0.5
    z = np.empty((n_mc, p_spec.d))
    n_p = int(from_p.sum())
    z[from_p] = p_spec.sample(n_p, make_rng(seed, 202))
    z[~from_p] = q_spec.sample(n_mc - n_p, make_rng(seed, 203))
    eta = expit(log_density_ratio(p_spec, q_spec, z))
    vals = 2.0 * mu_lambda(eta, k, lam)
    est = float(vals.mean())
    if return_stderr:
        return est, float(vals.std(ddof=1) / math.sqrt(n_mc))
    return est
