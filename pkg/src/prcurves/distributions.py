"""Analytic distribution descriptions: sampling and log-densities."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

VARIANTS = ("shifted_gaussian", "scaled_gaussian", "gmm")
_LOG_2PI = np.log(2 * np.pi)


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed on (seed, stream)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


@dataclass(frozen=True)
class DistributionSpec:
    """Isotropic Gaussian family member: N(mu, I), N(0, psi^2 I) or a GMM with identity covariances."""

    variant: str
    d: int
    mu: Optional[np.ndarray] = None
    psi: Optional[float] = None
    weights: Optional[np.ndarray] = None
    centers: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError("d must be a positive integer")
        object.__setattr__(self, "d", int(self.d))
        if self.variant == "shifted_gaussian":
            mu = np.zeros(self.d) if self.mu is None else np.broadcast_to(np.asarray(self.mu, float), (self.d,)).copy()
            mu.setflags(write=False)
            object.__setattr__(self, "mu", mu)
        elif self.variant == "scaled_gaussian":
            if self.psi is None or not self.psi > 0:
                raise ValueError("psi must be positive")
            object.__setattr__(self, "psi", float(self.psi))
        else:
            w = np.asarray(self.weights, dtype=float)
            c = np.asarray(self.centers, dtype=float)
            if c.ndim == 1:
                c = c[:, None] * np.ones(self.d)
            if w.ndim != 1 or c.shape != (w.size, self.d):
                raise ValueError("gmm needs one center of dimension d per weight")
            if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
                raise ValueError("gmm weights must be nonnegative and sum to 1")
            w.setflags(write=False)
            c.setflags(write=False)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "centers", c)

    @classmethod
    def shifted(cls, d: int, mu=0.0) -> "DistributionSpec":
        return cls("shifted_gaussian", d, mu=mu)

    @classmethod
    def scaled(cls, d: int, psi: float) -> "DistributionSpec":
        return cls("scaled_gaussian", d, psi=psi)

    @classmethod
    def gmm(cls, d: int, weights, centers) -> "DistributionSpec":
        return cls("gmm", d, weights=weights, centers=centers)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((int(n), self.d))
        if self.variant == "shifted_gaussian":
            return z + self.mu
        if self.variant == "scaled_gaussian":
            return self.psi * z
        comp = rng.choice(self.weights.size, size=int(n), p=self.weights)
        return z + self.centers[comp]

    def log_pdf(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        if z.shape[1] != self.d:
            raise ValueError(f"points have dimension {z.shape[1]}, spec has {self.d}")
        if self.variant == "shifted_gaussian":
            return -0.5 * np.sum((z - self.mu) ** 2, axis=1) - 0.5 * self.d * _LOG_2PI
        if self.variant == "scaled_gaussian":
            return (-0.5 * np.sum(z * z, axis=1) / self.psi**2
                    - self.d * np.log(self.psi) - 0.5 * self.d * _LOG_2PI)
        keep = self.weights > 0
        sq = ((z[:, None, :] - self.centers[keep][None]) ** 2).sum(-1)
        comp = np.log(self.weights[keep])[None] - 0.5 * sq
        return logsumexp(comp, axis=1) - 0.5 * self.d * _LOG_2PI

    def to_dict(self) -> dict:
        out = {"variant": self.variant, "d": self.d, "psi": None, "mu": None, "components": None}
        if self.variant == "shifted_gaussian":
            out["mu"] = self.mu.tolist()
        elif self.variant == "scaled_gaussian":
            out["psi"] = self.psi
        else:
            out["components"] = [{"weight": float(w), "center": c.tolist()}
                                 for w, c in zip(self.weights, self.centers)]
        return out

    @classmethod
    def from_dict(cls, cfg: dict) -> "DistributionSpec":
        """Inverse of :meth:`to_dict`; scalar ``mu``/``center`` entries broadcast to all coordinates."""
        variant, d = cfg["variant"], int(cfg["d"])
        if variant == "shifted_gaussian":
            return cls.shifted(d, cfg.get("mu") if cfg.get("mu") is not None else 0.0)
        if variant == "scaled_gaussian":
            return cls.scaled(d, cfg["psi"])
        comps = cfg["components"]
        centers = [np.broadcast_to(np.asarray(c["center"], float), (d,)) for c in comps]
        return cls.gmm(d, [c["weight"] for c in comps], np.stack(centers))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @property
    def spec_id(self) -> str:
        if self.variant == "shifted_gaussian":
            return f"shift(d={self.d},|mu|={np.linalg.norm(self.mu):.6g})"
        if self.variant == "scaled_gaussian":
            return f"scale(d={self.d},psi={self.psi:.6g})"
        return f"gmm(d={self.d},w={np.round(self.weights, 6).tolist()})"


def log_density_ratio(p_spec: DistributionSpec, q_spec: DistributionSpec, z) -> np.ndarray:
    """log(dP/dQ)(z) for every row of ``z``."""
    if p_spec.d != q_spec.d:
        raise ValueError("specs must share the same dimension")
    z = np.atleast_2d(np.asarray(z, dtype=float))
    if z.shape[1] != p_spec.d:
        raise ValueError("point dimension does not match the specs")
    if p_spec.variant == q_spec.variant == "shifted_gaussian":
        # exact cancellation of the quadratic term keeps this linear in z
        dm = p_spec.mu - q_spec.mu
        return z @ dm - 0.5 * (p_spec.mu @ p_spec.mu - q_spec.mu @ q_spec.mu)
    return p_spec.log_pdf(z) - q_spec.log_pdf(z)
