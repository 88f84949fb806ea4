"""Ridge regression on sparse feature vectors.

The intercept is the target mean and the weights solve the L2-penalized
least squares problem on the centered targets,

    (X^T X + alpha I) w = X^T (y - mean(y)),

by conjugate gradient.  Only y is centered; X is left as-is to preserve
sparsity, so the solution differs from implementations that also center
the design matrix (see fit_ridge).  Matrix products are formed as
X^T (X p) on the fly; X^T X is never materialized.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .features import SparseVector

__all__ = ["RidgeModel", "fit_ridge", "predict", "predict_many",
           "save_ridge", "load_ridge", "ridge_objective"]

_MAGIC = b"ridge-v1\n"


@dataclass(eq=False)
class RidgeModel:
    weights: np.ndarray
    intercept: float
    alpha: float

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")


def _stack(X: Sequence[SparseVector]) -> tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    """Flatten sparse rows into COO-style (row, col, value) arrays."""
    dim = X[0].dim
    rows = []
    for i, vec in enumerate(X):
        if vec.dim != dim:
            raise ValueError(f"row {i} has dim {vec.dim}, expected {dim}")
        rows.append(np.full(len(vec.indices), i, dtype=np.int64))
    row = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    col = np.concatenate([vec.indices for vec in X]).astype(np.int64)
    val = np.concatenate([vec.values for vec in X])
    return row, col, val, dim


def fit_ridge(
    X: Sequence[SparseVector],
    y: Sequence[float],
    alpha: float = 1.0,
    tol: float = 1e-8,
    max_iter: int = 1000,
) -> RidgeModel:
    """Fit weights by conjugate gradient on the normal equations.

    Iterations stop once the normal-equation residual norm drops to
    tol * ||X^T (y - mean(y))|| or max_iter is reached.  Note the
    centering convention: with X = [[1], [2], [3]], y = [1, 2, 3] and
    alpha = 1 the single weight is sum(x*(y - 2)) / (sum(x^2) + 1) = 2/15,
    because X itself is not centered.
    """
    if len(X) != len(y):
        raise ValueError(f"got {len(X)} rows but {len(y)} targets")
    if len(X) == 0:
        raise ValueError("need at least one training example")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")

    y_arr = np.asarray(y, dtype=np.float64)
    intercept = float(y_arr.mean())
    yc = y_arr - intercept
    row, col, val, dim = _stack(X)
    n = len(X)

    def matvec(p: np.ndarray) -> np.ndarray:
        # (X^T X + alpha I) p without forming X^T X
        xp = np.bincount(row, weights=val * p[col], minlength=n)
        return np.bincount(col, weights=val * xp[row], minlength=dim) + alpha * p

    b = np.bincount(col, weights=val * yc[row], minlength=dim)
    b_norm = np.linalg.norm(b)
    w = np.zeros(dim)
    if b_norm == 0.0:
        return RidgeModel(weights=w, intercept=intercept, alpha=alpha)

    r = b.copy()
    p = r.copy()
    rs = float(r @ r)
    threshold = tol * b_norm
    for _ in range(max_iter):
        if np.sqrt(rs) <= threshold:
            break
        ap = matvec(p)
        step = rs / float(p @ ap)
        w += step * p
        r -= step * ap
        rs_next = float(r @ r)
        p = r + (rs_next / rs) * p
        rs = rs_next
    return RidgeModel(weights=w, intercept=intercept, alpha=alpha)


def predict(model: RidgeModel, x: SparseVector) -> float:
    """Raw severity prediction; deliberately not clamped to [0, 1]."""
    if x.dim != len(model.weights):
        raise ValueError(
            f"vector dim {x.dim} does not match model dim {len(model.weights)}"
        )
    return float(model.weights[x.indices] @ x.values) + model.intercept


def predict_many(model: RidgeModel, xs: Sequence[SparseVector]) -> np.ndarray:
    return np.array([predict(model, x) for x in xs])


def ridge_objective(
    model: RidgeModel, X: Sequence[SparseVector], y: Sequence[float]
) -> float:
    """||X w - (y - mean(y))||^2 + alpha ||w||^2 at the model's weights."""
    y_arr = np.asarray(y, dtype=np.float64)
    yc = y_arr - model.intercept
    resid = predict_many(model, X) - model.intercept - yc
    return float(resid @ resid) + model.alpha * float(model.weights @ model.weights)


def save_ridge(model: RidgeModel, path: str | Path) -> None:
    """Binary ridge-v1 format: magic line, then alpha, intercept and the
    dense weights as little-endian float64 (bit-exact round trip)."""
    with Path(path).open("wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<d", model.alpha))
        fh.write(struct.pack("<d", model.intercept))
        fh.write(model.weights.astype("<f8").tobytes())


def load_ridge(path: str | Path) -> RidgeModel:
    raw = Path(path).read_bytes()
    if not raw.startswith(_MAGIC):
        raise ValueError(f"{path}: not a ridge-v1 model file")
    body = raw[len(_MAGIC):]
    if len(body) < 16 or len(body) % 8 != 0:
        raise ValueError(f"{path}: truncated ridge-v1 payload")
    alpha = struct.unpack("<d", body[:8])[0]
    intercept = struct.unpack("<d", body[8:16])[0]
    weights = np.frombuffer(body[16:], dtype="<f8").copy()
    return RidgeModel(weights=weights, intercept=intercept, alpha=alpha)
