"""Curve, grid and sample containers shared by every other module."""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

KINDS = ("empirical", "analytic", "mc_ground_truth", "band")
# kinds whose monotonicity and clamp are guaranteed by construction
_STRICT_KINDS = ("empirical", "analytic")
_REL_TOL = 1e-12


@dataclass(frozen=True)
class LambdaGrid:
    """Trade-off levels obtained from angles uniformly spread over (0, pi/2)."""

    thetas: np.ndarray
    lambdas: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size < 3:
            raise ValueError("a lambda grid needs at least 3 points")
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
            raise ValueError("lambdas must be positive and finite")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("lambdas must be strictly increasing")
        lam.setflags(write=False)
        th = np.asarray(self.thetas, dtype=float)
        th.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "thetas", th)

    def __len__(self) -> int:
        return self.lambdas.size


def make_lambda_grid(n_points: int) -> LambdaGrid:
    """Midpoint grid: theta_i = (i + 0.5) * (pi/2) / n, lambda_i = tan(theta_i).

    The construction is symmetric under lambda -> 1/lambda and never reaches
    0 or infinity.
    """
    if int(n_points) != n_points or n_points < 3:
        raise ValueError(f"n_points must be an integer >= 3, got {n_points!r}")
    n_points = int(n_points)
    thetas = (np.arange(n_points) + 0.5) * (np.pi / 2) / n_points
    return LambdaGrid(thetas=thetas, lambdas=np.tan(thetas))


@dataclass(frozen=True)
class PrCurve:
    """Ordered (lambda, alpha, beta) triples of a precision-recall frontier.

    alpha is the precision, beta = alpha / lambda the recall. Validation runs
    on construction; ``band`` and ``mc_ground_truth`` curves are only checked
    for the beta * lambda = alpha identity since sampling noise (or a
    deviation offset) can break monotonicity.
    """

    lambdas: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray
    kind: str = "empirical"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}")
        lam, a, b = (np.array(v, dtype=float) for v in (self.lambdas, self.alphas, self.betas))
        if not (lam.ndim == a.ndim == b.ndim == 1) or not (lam.size == a.size == b.size):
            raise ValueError("lambdas, alphas and betas must be 1-d arrays of equal length")
        if lam.size == 0:
            raise ValueError("empty curve")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("lambdas must be strictly increasing")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("non-finite alpha or beta")
        if np.any(np.abs(b * lam - a) > _REL_TOL * np.maximum(np.abs(a), 1e-300)):
            raise ValueError("beta * lambda != alpha")
        if self.kind in _STRICT_KINDS:
            scale = _REL_TOL * np.maximum(np.abs(a[1:]), 1.0)
            if np.any(np.diff(a) < -scale):
                raise ValueError("alpha must be nondecreasing in lambda")
            if np.any(np.diff(b) > _REL_TOL * np.maximum(np.abs(b[:-1]), 1.0)):
                raise ValueError("beta must be nonincreasing in lambda")
            if np.any(a < -_REL_TOL) or np.any(a > np.minimum(lam, 1.0) + _REL_TOL):
                raise ValueError("alpha outside [0, min(lambda, 1)]")
        for v in (lam, a, b):
            v.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @classmethod
    def from_alphas(cls, lambdas, alphas, kind: str = "empirical") -> "PrCurve":
        lam = np.asarray(lambdas, dtype=float)
        a = np.asarray(alphas, dtype=float)
        return cls(lam, a, a / lam, kind)

    def __len__(self) -> int:
        return self.lambdas.size

    @property
    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.lambdas.tolist(), self.alphas.tolist(), self.betas.tolist()))

    def clamped(self) -> tuple[np.ndarray, np.ndarray]:
        """(beta, alpha) clipped to the unit square."""
        return np.clip(self.betas, 0.0, 1.0), np.clip(self.alphas, 0.0, 1.0)

    def to_csv(self, path: Union[str, Path, None] = None) -> str:
        """Serialize as ``lambda,alpha,beta`` rows with 17 significant digits."""
        buf = io.StringIO()
        buf.write("lambda,alpha,beta\n")
        for lam, a, b in zip(self.lambdas, self.alphas, self.betas):
            buf.write(f"{lam:.17g},{a:.17g},{b:.17g}\n")
        text = buf.getvalue()
        if path is not None:
            atomic_write_text(path, text)
        return text

    @classmethod
    def from_csv(cls, source: Union[str, Path], kind: str = "empirical") -> "PrCurve":
        """Read a curve written by :meth:`to_csv` (``source`` is a path or CSV text)."""
        if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
            text = Path(source).read_text()
        else:
            text = source
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["lambda", "alpha", "beta"]:
            raise ValueError("expected header 'lambda,alpha,beta'")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        if data.size == 0:
            raise ValueError("empty curve")
        return cls(data[:, 0], data[:, 1], data[:, 2], kind)


@dataclass(frozen=True)
class SampleSet:
    """n points in R^d plus where they came from."""

    data: np.ndarray
    seed: Optional[int] = None
    spec_id: Optional[str] = None

    def __post_init__(self):
        x = np.array(self.data, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError("sample data must be an n x d matrix with n, d >= 1")
        if not np.all(np.isfinite(x)):
            raise ValueError("sample data must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "data", x)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def subset(self, idx) -> "SampleSet":
        return SampleSet(self.data[np.asarray(idx)], self.seed, self.spec_id)

    def __len__(self) -> int:
        return self.n


def as_points(x) -> np.ndarray:
    """Return the n x d float matrix behind a SampleSet or array-like."""
    if isinstance(x, SampleSet):
        return x.data
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError("points must form an n x d matrix")
    return arr


@dataclass(frozen=True)
class SplitPool:
    train_x: SampleSet
    val_x: SampleSet
    train_y: SampleSet
    val_y: SampleSet
    split_ratio: float = 1.0
    split_applied: bool = False
    # indices into the parent sets, kept so disjointness can be checked
    idx: dict = field(default_factory=dict, compare=False, repr=False)


def split_pool(x, y, split_ratio: float, rng: np.random.Generator) -> SplitPool:
    """Shuffle each set with ``rng`` and keep the first ``split_ratio`` share for training.

    ``split_ratio == 1`` disables splitting: train and validation are the same sets.
    """
    if not 0 < split_ratio <= 1:
        raise ValueError("split_ratio must lie in (0, 1]")
    xs = x if isinstance(x, SampleSet) else SampleSet(x)
    ys = y if isinstance(y, SampleSet) else SampleSet(y)
    if split_ratio == 1:
        ix, iy = np.arange(xs.n), np.arange(ys.n)
        return SplitPool(xs, xs, ys, ys, 1.0, False, {"train_x": ix, "val_x": ix, "train_y": iy, "val_y": iy})
    idx = {}
    for name, s in (("x", xs), ("y", ys)):
        n_train = int(round(split_ratio * s.n))
        if n_train < 1 or n_train >= s.n:
            raise ValueError(f"split leaves an empty part for {s.n} samples")
        perm = rng.permutation(s.n)
        idx["train_" + name] = np.sort(perm[:n_train])
        idx["val_" + name] = np.sort(perm[n_train:])
    return SplitPool(
        xs.subset(idx["train_x"]), xs.subset(idx["val_x"]),
        ys.subset(idx["train_y"]), ys.subset(idx["val_y"]),
        float(split_ratio), True, idx,
    )


def curve_polyline(curve: PrCurve) -> tuple[np.ndarray, np.ndarray]:
    """Frontier in the (beta, alpha) square, sorted by beta and tied to both axes.

    The first point is extended horizontally to beta = 0; the last one drops
    vertically to alpha = 0 (the drop is not part of the returned polyline).
    """
    beta, alpha = curve.clamped()
    order = np.lexsort((-alpha, beta))
    beta, alpha = beta[order], alpha[order]
    return np.concatenate([[0.0], beta]), np.concatenate([[alpha[0]], alpha])


def curve_area(curve: PrCurve) -> float:
    """Area under the frontier inside the unit (beta, alpha) square."""
    if curve is None or len(curve) == 0:
        raise ValueError("empty curve")
    b, a = curve_polyline(curve)
    return float(np.clip(np.sum(0.5 * (a[1:] + a[:-1]) * np.diff(b)), 0.0, 1.0))


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(text)
    os.replace(tmp, path)
