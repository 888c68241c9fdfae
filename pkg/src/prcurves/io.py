"""Point-matrix files: headerless CSV or a small raw binary format.

Binary layout: 8-byte magic ``PRCMAT01``, n and d as little-endian uint64,
then n * d little-endian float64 values in row-major order.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Union

import numpy as np

MAGIC = b"PRCMAT01"
_HEADER = np.dtype([("n", "<u8"), ("d", "<u8")])

PathLike = Union[str, Path]


def write_matrix_binary(path: PathLike, data) -> None:
    arr = np.ascontiguousarray(np.asarray(data, dtype="<f8"))
    if arr.ndim != 2:
        raise ValueError("expected an n x d matrix")
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(np.array([(arr.shape[0], arr.shape[1])], dtype=_HEADER).tobytes())
        fh.write(arr.tobytes())
    os.replace(tmp, path)


def read_matrix_binary(path: PathLike) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise ValueError(f"{path}: bad magic")
    header = np.frombuffer(raw, dtype=_HEADER, count=1, offset=8)[0]
    n, d = int(header["n"]), int(header["d"])
    body = raw[8 + _HEADER.itemsize:]
    if len(body) != 8 * n * d:
        raise ValueError(f"{path}: expected {n}x{d} values, found {len(body) // 8}")
    return np.frombuffer(body, dtype="<f8").reshape(n, d).astype(float)


def write_matrix_csv(path: PathLike, data) -> None:
    arr = np.atleast_2d(np.asarray(data, dtype=float))
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    np.savetxt(tmp, arr, delimiter=",", fmt="%.17g")
    os.replace(tmp, path)


def read_matrix_csv(path: PathLike) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", dtype=float, ndmin=2)
    if arr.size == 0:
        raise ValueError(f"{path}: no data")
    return arr


def read_matrix(path: PathLike) -> np.ndarray:
    """Load either format, sniffing the magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_matrix_binary(path)
    return read_matrix_csv(path)
