"""Char-wb TF-IDF features: fit a vocabulary, map text to sparse vectors.

The vectorizer counts within-word character n-grams, weights raw counts by
smoothed inverse document frequency, and L2-normalizes each row.  Fitting
is fully deterministic: vocabulary selection breaks count ties
lexicographically and column indices follow lexicographic gram order, so
the model is independent of corpus order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .textproc import char_wb_ngrams

__all__ = [
    "SparseVector",
    "TfidfConfig",
    "TfidfModel",
    "fit_tfidf",
    "transform",
    "transform_many",
    "save_tfidf",
    "load_tfidf",
]


@dataclass(frozen=True, eq=False)
class SparseVector:
    """Sparse real vector: parallel index/value arrays plus dimensionality.

    Indices are strictly increasing and no stored value is zero.
    """

    indices: np.ndarray
    values: np.ndarray
    dim: int

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.values):
            raise ValueError("index/value length mismatch")
        if len(self.indices) > 0:
            if np.any(np.diff(self.indices) <= 0):
                raise ValueError("indices must be strictly increasing")
            if self.indices[0] < 0 or self.indices[-1] >= self.dim:
                raise ValueError("index out of range")
            if np.any(self.values == 0.0):
                raise ValueError("explicit zeros are not stored")

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        dense[self.indices] = self.values
        return dense


def sparse_vector(indices: Sequence[int], values: Sequence[float], dim: int) -> SparseVector:
    """Build a SparseVector from python sequences (copies into numpy)."""
    return SparseVector(
        indices=np.asarray(indices, dtype=np.int32),
        values=np.asarray(values, dtype=np.float64),
        dim=dim,
    )


@dataclass(frozen=True)
class TfidfConfig:
    n_min: int = 3
    n_max: int = 5
    max_features: int = 30000
    min_df: int = 1


@dataclass(eq=False)
class TfidfModel:
    """Fitted vectorizer: gram -> column index, per-column idf weights."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    config: TfidfConfig

    @property
    def dim(self) -> int:
        return len(self.vocabulary)


def fit_tfidf(corpus: Sequence[str], config: TfidfConfig = TfidfConfig()) -> TfidfModel:
    """Fit vocabulary and idf weights on preprocessed documents.

    Grams with document frequency below min_df are dropped; of the rest,
    the max_features grams with the highest total corpus count are kept
    (ties broken by lexicographic order, ascending).  Column indices are
    assigned in lexicographic gram order and
    idf(g) = ln((1 + N) / (1 + df(g))) + 1 with N the corpus size.
    """
    if len(corpus) == 0:
        raise ValueError("cannot fit tf-idf on an empty corpus")
    total_counts: Counter[str] = Counter()
    doc_freq: Counter[str] = Counter()
    for doc in corpus:
        grams = char_wb_ngrams(doc, config.n_min, config.n_max)
        counts = Counter(grams)
        total_counts.update(counts)
        doc_freq.update(counts.keys())

    candidates = [g for g in total_counts if doc_freq[g] >= config.min_df]
    candidates.sort(key=lambda g: (-total_counts[g], g))
    kept = sorted(candidates[: config.max_features])

    vocabulary = {gram: i for i, gram in enumerate(kept)}
    n_docs = len(corpus)
    idf = np.array(
        [np.log((1.0 + n_docs) / (1.0 + doc_freq[g])) + 1.0 for g in kept]
    )
    return TfidfModel(vocabulary=vocabulary, idf=idf, config=config)


def transform(model: TfidfModel, text: str) -> SparseVector:
    """Vectorize one preprocessed document.

    Raw in-vocabulary gram counts are scaled by idf and the result is
    L2-normalized; text with no in-vocabulary gram maps to the zero
    vector.
    """
    counts = Counter(
        char_wb_ngrams(text, model.config.n_min, model.config.n_max)
    )
    entries = sorted(
        (model.vocabulary[g], c) for g, c in counts.items() if g in model.vocabulary
    )
    if not entries:
        return SparseVector(
            indices=np.empty(0, dtype=np.int32),
            values=np.empty(0, dtype=np.float64),
            dim=model.dim,
        )
    indices = np.array([i for i, _ in entries], dtype=np.int32)
    values = np.array([c for _, c in entries], dtype=np.float64)
    values *= model.idf[indices]
    values /= np.linalg.norm(values)
    return SparseVector(indices=indices, values=values, dim=model.dim)


def transform_many(model: TfidfModel, texts: Sequence[str]) -> list[SparseVector]:
    return [transform(model, t) for t in texts]


def save_tfidf(model: TfidfModel, path: str | Path) -> None:
    """Write the model in the tfidf-v1 text format (bit-exact round trip).

    Layout: a `tfidf-v1` header line, one config line, then one
    gram<TAB>index<TAB>idf line per vocabulary entry.  Idf values are
    written with repr so reading them back is lossless.
    """
    cfg = model.config
    lines = [
        "tfidf-v1",
        f"config\tn_min={cfg.n_min}\tn_max={cfg.n_max}"
        f"\tmax_features={cfg.max_features}\tmin_df={cfg.min_df}",
    ]
    for gram, index in sorted(model.vocabulary.items(), key=lambda kv: kv[1]):
        lines.append(f"{gram}\t{index}\t{float(model.idf[index])!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_tfidf(path: str | Path) -> TfidfModel:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if not lines or lines[0] != "tfidf-v1":
        raise ValueError(f"{path}: not a tfidf-v1 model file")
    config_fields = lines[1].split("\t")
    if config_fields[0] != "config":
        raise ValueError(f"{path}: missing config line")
    params = dict(field.split("=", 1) for field in config_fields[1:])
    config = TfidfConfig(
        n_min=int(params["n_min"]),
        n_max=int(params["n_max"]),
        max_features=int(params["max_features"]),
        min_df=int(params["min_df"]),
    )
    vocabulary: dict[str, int] = {}
    idf_by_index: dict[int, float] = {}
    for line in lines[2:]:
        if not line:
            continue
        gram, index_str, idf_str = line.split("\t")
        index = int(index_str)
        vocabulary[gram] = index
        idf_by_index[index] = float(idf_str)
    idf = np.array([idf_by_index[i] for i in range(len(vocabulary))])
    return TfidfModel(vocabulary=vocabulary, idf=idf, config=config)
