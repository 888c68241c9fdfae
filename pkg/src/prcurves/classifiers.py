"""Nearest-neighbour classifier families whose ERM traces a PR curve.

Every family scores a query z with two normalized counts, ``a`` (evidence for
P, built from the X training sample) and ``b`` (evidence for Q, from Y), and
predicts 1 ("comes from P") when gamma * a >= b. Counts are reduced to the
ratio b / a once, so a whole gamma sweep is a sequence of comparisons.

Prediction rule for a scalar gamma:

* finite gamma >= 1: gamma * a >= b (loose)
* 0 < gamma < 1:     gamma * a > b (strict)
* gamma = +inf:      a > 0
* gamma = 0:         a > 0 and b = 0
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from .core import as_points

METHODS = ("ipr", "knn", "parzen", "coverage")
_CHUNK_ELEMS = 2_000_000


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # cdist sums (a_i - b_i)^2 coordinate by coordinate, so d(a, b) == d(b, a)
    # bit for bit and self distances are exactly 0
    return cdist(a, b, "sqeuclidean")


def _chunks(n_rows: int, n_cols: int):
    step = max(1, _CHUNK_ELEMS // max(n_cols, 1))
    for start in range(0, n_rows, step):
        yield start, min(n_rows, start + step)


def _kth_excluding(dist: np.ndarray, k: int, self_cols: Optional[np.ndarray]) -> np.ndarray:
    """k-th smallest entry per row, ignoring column ``self_cols[i]`` on row i."""
    if self_cols is not None:
        dist = dist.copy()
        dist[np.arange(dist.shape[0]), self_cols] = np.inf
    return np.partition(dist, k - 1, axis=1)[:, k - 1]


@dataclass(frozen=True)
class NeighborIndex:
    """Reference points with the squared distance to each point's k-th nearest other point."""

    points: np.ndarray
    k: int
    sq_radii: np.ndarray

    @property
    def radii(self) -> np.ndarray:
        return np.sqrt(self.sq_radii)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def build_neighbor_index(points, k: int, algorithm: str = "auto") -> NeighborIndex:
    """k-NN radii of a point set, the point itself excluded.

    ``algorithm`` is ``brute`` (chunked exact scan), ``kdtree`` or ``auto``
    (kd-tree for d <= 3, where it prunes well). Both paths return the same
    squared distances because the kd-tree candidates are re-measured with the
    brute-force kernel.
    """
    pts = as_points(points)
    n, d = pts.shape
    k = int(k)
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must lie in [1, n-1] = [1, {n - 1}], got {k}")
    if algorithm == "auto":
        algorithm = "kdtree" if d <= 3 else "brute"
    if algorithm == "brute":
        sq = np.empty(n)
        for s, e in _chunks(n, n):
            sq[s:e] = _kth_excluding(_sqdist(pts[s:e], pts), k, np.arange(s, e))
    elif algorithm == "kdtree":
        _, nbr = cKDTree(pts).query(pts, k=k + 1)
        nbr = np.asarray(nbr).reshape(n, k + 1)
        sq = np.empty(n)
        for i in range(n):
            cand = nbr[i][nbr[i] != i][:k]
            sq[i] = _sqdist(pts[i:i + 1], pts[cand]).max()
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return NeighborIndex(pts, k, sq)


@dataclass(frozen=True)
class ClassifierFamily:
    """A fitted one-parameter family f_gamma for one method."""

    method: str
    train_x: np.ndarray
    train_y: np.ndarray
    k: int
    index_x: Optional[NeighborIndex] = None
    index_y: Optional[NeighborIndex] = None
    rho_x: Optional[float] = None
    rho_y: Optional[float] = None

    @property
    def n_x(self) -> int:
        return self.train_x.shape[0]

    @property
    def n_y(self) -> int:
        return self.train_y.shape[0]

    @property
    def d(self) -> int:
        return self.train_x.shape[1]

    def counts(self, z, self_side: Optional[str] = None) -> tuple[np.ndarray, np.ndarray]:
        """Raw counts (a * n_x, b * n_y) for each query row.

        ``self_side`` ('x' or 'y') declares that the queries *are* the
        corresponding training sample, row for row; each query is then left
        out of its own neighbour search (but still sits inside its own ball).
        """
        return neighbor_counts([self], z, self_side)[self.method]

    def ratios(self, z, self_side: Optional[str] = None) -> tuple[np.ndarray, np.ndarray]:
        return count_ratios(*self.counts(z, self_side), self.n_x, self.n_y)

    def predict(self, gamma: float, z, self_side: Optional[str] = None) -> np.ndarray:
        ratio, void = self.ratios(z, self_side)
        return predict_from_ratios(ratio, void, gamma)


def make_family(method: str, train_x, train_y, k: int, parzen_k: Optional[int] = None) -> ClassifierFamily:
    """Fit the neighbour structures that ``method`` needs on the training samples."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    x, y = as_points(train_x), as_points(train_y)
    if x.shape[0] == 0 or y.shape[0] == 0:
        raise ValueError("training sets must be nonempty")
    if x.shape[1] != y.shape[1]:
        raise ValueError("training sets must share the same dimension")
    k = int(k)
    if k < 1:
        raise ValueError("k must be >= 1")
    if method == "ipr":
        return ClassifierFamily(method, x, y, k, build_neighbor_index(x, k), build_neighbor_index(y, k))
    if method == "parzen":
        pk = k if parzen_k is None else int(parzen_k)
        ix, iy = build_neighbor_index(x, pk), build_neighbor_index(y, pk)
        return ClassifierFamily(method, x, y, pk, rho_x=float(ix.radii.mean()), rho_y=float(iy.radii.mean()))
    if method == "coverage":
        if k > min(x.shape[0], y.shape[0]) - 1:
            raise ValueError(f"k={k} too large for training sets of sizes {x.shape[0]}, {y.shape[0]}")
        return ClassifierFamily(method, x, y, k)
    if k > x.shape[0] + y.shape[0] - 1:
        raise ValueError(f"k={k} too large for a pooled training set of {x.shape[0] + y.shape[0]}")
    return ClassifierFamily(method, x, y, k)


def neighbor_counts(families, z, self_side: Optional[str] = None) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Counts for several families fitted on the same training pair, from one distance pass."""
    families = list(families)
    f0 = families[0]
    x, y = f0.train_x, f0.train_y
    for f in families[1:]:
        if f.train_x is not x or f.train_y is not y:
            raise ValueError("families must share their training arrays")
    q = as_points(z)
    if q.shape[1] != f0.d:
        raise ValueError(f"query dimension {q.shape[1]} does not match training dimension {f0.d}")
    if self_side not in (None, "x", "y"):
        raise ValueError("self_side must be None, 'x' or 'y'")
    if self_side is not None and q.shape[0] != (x.shape[0] if self_side == "x" else y.shape[0]):
        raise ValueError("in-sample queries must be the training sample itself")
    n_q, n_x = q.shape[0], x.shape[0]
    out = {f.method: (np.empty(n_q, np.int64), np.empty(n_q, np.int64)) for f in families}
    for s, e in _chunks(n_q, n_x + y.shape[0]):
        dx, dy = _sqdist(q[s:e], x), _sqdist(q[s:e], y)
        rows = np.arange(s, e)
        self_x = rows if self_side == "x" else None
        self_y = rows if self_side == "y" else None
        for f in families:
            ca, cb = out[f.method]
            if f.method == "ipr":
                ca[s:e] = (dx <= f.index_x.sq_radii).sum(1)
                cb[s:e] = (dy <= f.index_y.sq_radii).sum(1)
            elif f.method == "parzen":
                ca[s:e] = (dx <= f.rho_x * f.rho_x).sum(1)
                cb[s:e] = (dy <= f.rho_y * f.rho_y).sum(1)
            elif f.method == "coverage":
                # x inside the kNN ball of z within Y, y inside the kNN ball of z within X
                ry = _kth_excluding(dy, f.k, self_y)
                rx = _kth_excluding(dx, f.k, self_x)
                ca[s:e] = (dx <= ry[:, None]).sum(1)
                cb[s:e] = (dy <= rx[:, None]).sum(1)
            else:
                self_u = None if self_side is None else (rows if self_side == "x" else rows + n_x)
                ru = _kth_excluding(np.hstack([dx, dy]), f.k, self_u)
                ca[s:e] = (dx <= ru[:, None]).sum(1)
                cb[s:e] = (dy <= ru[:, None]).sum(1)
    return out


def count_ratios(ca, cb, n_x: int, n_y: int) -> tuple[np.ndarray, np.ndarray]:
    """b / a from raw counts; +inf when only b is positive, ``void`` when both vanish."""
    ca = np.asarray(ca, dtype=np.int64)
    cb = np.asarray(cb, dtype=np.int64)
    void = (ca == 0) & (cb == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (cb * float(n_x)) / (ca * float(n_y))
    ratio = np.where(ca > 0, ratio, np.where(void, np.nan, np.inf))
    return ratio, void


def predict_from_ratios(ratio, void, gamma: float) -> np.ndarray:
    ratio = np.asarray(ratio, dtype=float)
    void = np.asarray(void, dtype=bool)
    if gamma < 0 or math.isnan(gamma):
        raise ValueError("gamma must be nonnegative")
    if gamma == math.inf:
        return np.isfinite(ratio) & ~void
    if gamma == 0:
        return (ratio == 0) & ~void
    if gamma >= 1:
        return (ratio <= gamma) | void
    return ratio < gamma


def evaluate(family: ClassifierFamily, gamma: float, z, self_side: Optional[str] = None):
    """f_gamma(z) as 0/1; a single point gives an int, a matrix an int array."""
    pts = np.asarray(z, dtype=float)
    single = pts.ndim == 1
    if single:
        if pts.size != family.d:
            raise ValueError(f"point has dimension {pts.size}, family expects {family.d}")
        pts = pts[None, :]
    out = family.predict(gamma, pts, self_side).astype(int)
    return int(out[0]) if single else out
