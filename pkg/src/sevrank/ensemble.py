"""Blend severity scores from several models into one ranking.

A ScoreMatrix holds per-comment scores from k named sources (own models
or externally produced columns).  Because pairwise ranking accuracy is a
step function, weights are fitted by minimizing a smooth stand-in: the
mean logistic loss ln(1 + exp(-margin/tau)) over annotated pairs, where
the margin is the weighted score difference between the more- and
less-toxic side.  Columns are normalized first since raw model outputs
live on incomparable scales.  Reported quality always uses the exact
accuracy metric, never the surrogate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import PairJudgment
from .optim import LbfgsConfig, lbfgs_minimize

__all__ = [
    "NORMALIZATION_MODES",
    "ScoreMatrix",
    "EnsembleWeights",
    "normalize_scores",
    "surrogate_loss",
    "fit_weights",
    "blend",
    "load_score_matrix",
    "save_score_matrix",
    "load_weights",
    "save_weights",
]

NORMALIZATION_MODES = ("none", "minmax", "zscore", "rank")


@dataclass(eq=False)
class ScoreMatrix:
    """Comments x named score sources; all cells finite, ids/names unique."""

    comment_ids: list[str]
    model_names: list[str]
    values: np.ndarray  # shape (len(comment_ids), len(model_names))

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (len(self.comment_ids), len(self.model_names)):
            raise ValueError(
                f"values shape {self.values.shape} does not match "
                f"{len(self.comment_ids)} ids x {len(self.model_names)} models"
            )
        if len(set(self.comment_ids)) != len(self.comment_ids):
            raise ValueError("duplicate comment ids in score matrix")
        if len(set(self.model_names)) != len(self.model_names):
            raise ValueError("duplicate model names in score matrix")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("score matrix contains non-finite cells")


@dataclass(eq=False)
class EnsembleWeights:
    """Fitted per-model blend weights (unconstrained reals)."""

    model_names: list[str]
    weights: np.ndarray
    mode: str = "minmax"
    temperature: float = 0.1

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if len(self.weights) != len(self.model_names):
            raise ValueError("one weight per model required")
        if self.mode not in NORMALIZATION_MODES:
            raise ValueError(f"unknown normalization mode {self.mode!r}")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


def _average_ranks(column: np.ndarray) -> np.ndarray:
    """Zero-based ranks with ties sharing their average rank."""
    order = np.argsort(column, kind="stable")
    ranks = np.empty(len(column))
    sorted_vals = column[order]
    i = 0
    while i < len(column):
        j = i
        while j + 1 < len(column) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0
        i = j + 1
    return ranks


def normalize_scores(matrix: ScoreMatrix, mode: str) -> ScoreMatrix:
    """Per-column rescaling; degenerate columns have fixed fallbacks.

    minmax maps a constant column to all 0.5, zscore maps zero spread to
    all zeros, and rank divides tie-averaged zero-based ranks by N - 1
    (0.5 for a single row).
    """
    if mode not in NORMALIZATION_MODES:
        raise ValueError(f"unknown normalization mode {mode!r}")
    if mode == "none":
        values = matrix.values.copy()
    else:
        values = np.empty_like(matrix.values)
        n = len(matrix.comment_ids)
        for k in range(len(matrix.model_names)):
            col = matrix.values[:, k]
            if mode == "minmax":
                lo, hi = col.min(), col.max()
                values[:, k] = 0.5 if hi == lo else (col - lo) / (hi - lo)
            elif mode == "zscore":
                std = col.std()
                values[:, k] = 0.0 if std == 0.0 else (col - col.mean()) / std
            else:  # rank
                values[:, k] = (
                    0.5 if n == 1 else _average_ranks(col) / (n - 1)
                )
    return ScoreMatrix(
        comment_ids=list(matrix.comment_ids),
        model_names=list(matrix.model_names),
        values=values,
    )


def _pair_rows(
    matrix: ScoreMatrix, pairs: Sequence[PairJudgment]
) -> tuple[np.ndarray, np.ndarray]:
    row_of = {cid: i for i, cid in enumerate(matrix.comment_ids)}
    less = np.empty(len(pairs), dtype=np.int64)
    more = np.empty(len(pairs), dtype=np.int64)
    for i, pair in enumerate(pairs):
        for side, out in ((pair.less_toxic, less), (pair.more_toxic, more)):
            if side.id not in row_of:
                raise ValueError(f"id {side.id!r} not present in the score matrix")
            out[i] = row_of[side.id]
    return less, more


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _loss_from_diffs(
    weights: np.ndarray, diffs: np.ndarray, temperature: float
) -> tuple[float, np.ndarray]:
    z = -(diffs @ weights) / temperature
    # ln(1 + e^z) evaluated stably for large |z|
    loss = float(np.mean(np.maximum(z, 0.0) + np.log1p(np.exp(-np.abs(z)))))
    grad = -(diffs.T @ _sigmoid(z)) / (temperature * len(diffs))
    return loss, grad


def surrogate_loss(
    weights: Sequence[float],
    matrix: ScoreMatrix,
    pairs: Sequence[PairJudgment],
    temperature: float,
) -> tuple[float, np.ndarray]:
    """Mean logistic margin loss and its analytic gradient.

    For each pair the margin is w . (s_more - s_less); the loss is
    ln(1 + exp(-margin/temperature)) averaged over pairs, computed in a
    form stable for large |margin|/temperature.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    w = np.asarray(weights, dtype=np.float64)
    if len(w) != len(matrix.model_names):
        raise ValueError("one weight per model required")
    less, more = _pair_rows(matrix, pairs)
    diffs = matrix.values[more] - matrix.values[less]
    return _loss_from_diffs(w, diffs, temperature)


def fit_weights(
    matrix: ScoreMatrix,
    pairs: Sequence[PairJudgment],
    mode: str = "minmax",
    temperature: float = 0.1,
    lbfgs: LbfgsConfig = LbfgsConfig(),
) -> EnsembleWeights:
    """Fit blend weights on annotated pairs.

    Normalizes the matrix per mode, starts from uniform weights
    1/n_models, and minimizes the surrogate loss; the fitted loss never
    exceeds the loss at initialization.
    """
    if len(matrix.model_names) < 1:
        raise ValueError("need at least one model column")
    if len(pairs) < 1:
        raise ValueError("need at least one judgment pair")
    normalized = normalize_scores(matrix, mode)
    less, more = _pair_rows(normalized, pairs)
    diffs = normalized.values[more] - normalized.values[less]
    x0 = np.full(len(matrix.model_names), 1.0 / len(matrix.model_names))
    result = lbfgs_minimize(
        lambda w: _loss_from_diffs(w, diffs, temperature), x0, lbfgs
    )
    return EnsembleWeights(
        model_names=list(matrix.model_names),
        weights=result.x,
        mode=mode,
        temperature=temperature,
    )


def blend(
    matrix: ScoreMatrix, weights: EnsembleWeights
) -> list[tuple[str, float]]:
    """Weighted blend per comment, in matrix id order.

    The matrix is normalized with the mode stored in the weights before
    the weighted sum is taken.
    """
    if len(weights.weights) != len(matrix.model_names):
        raise ValueError(
            f"weight count {len(weights.weights)} does not match "
            f"{len(matrix.model_names)} model columns"
        )
    normalized = normalize_scores(matrix, weights.mode)
    blended = normalized.values @ weights.weights
    return list(zip(matrix.comment_ids, blended.tolist()))


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def save_score_matrix(matrix: ScoreMatrix, path: str | Path) -> None:
    """CSV with header comment_id,<model_1>,...,<model_k>."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["comment_id", *matrix.model_names])
        for cid, row in zip(matrix.comment_ids, matrix.values):
            writer.writerow([cid, *[repr(v) for v in row.tolist()]])


def load_score_matrix(path: str | Path) -> ScoreMatrix:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty score matrix file") from None
        if not header or header[0] != "comment_id":
            raise ValueError(f"{path}: first column must be comment_id")
        model_names = header[1:]
        if not model_names:
            raise ValueError(f"{path}: no model columns")
        ids = []
        rows = []
        for record, fields in enumerate(reader, start=2):
            if len(fields) != len(header):
                raise ValueError(
                    f"{path}: malformed CSV row {record}: expected "
                    f"{len(header)} fields, found {len(fields)}"
                )
            ids.append(fields[0])
            try:
                rows.append([float(v) for v in fields[1:]])
            except ValueError:
                raise ValueError(
                    f"{path}: non-numeric score at row {record}"
                ) from None
    return ScoreMatrix(
        comment_ids=ids,
        model_names=model_names,
        values=np.array(rows, dtype=np.float64).reshape(len(ids), len(model_names)),
    )


def save_weights(weights: EnsembleWeights, path: str | Path) -> None:
    """CSV model,weight with a leading #mode=...,temperature=... line."""
    lines = [f"#mode={weights.mode},temperature={weights.temperature!r}"]
    lines.append("model,weight")
    for name, w in zip(weights.model_names, weights.weights.tolist()):
        lines.append(f"{name},{w!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_weights(path: str | Path) -> EnsembleWeights:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#mode="):
        raise ValueError(f"{path}: missing #mode metadata line")
    meta = dict(part.split("=", 1) for part in lines[0][1:].split(","))
    if lines[1] != "model,weight":
        raise ValueError(f"{path}: missing model,weight header")
    names = []
    values = []
    for line in lines[2:]:
        if not line:
            continue
        name, value = line.split(",", 1)
        names.append(name)
        values.append(float(value))
    return EnsembleWeights(
        model_names=names,
        weights=np.array(values),
        mode=meta["mode"],
        temperature=float(meta["temperature"]),
    )
