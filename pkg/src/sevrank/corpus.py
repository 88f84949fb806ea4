"""Comment corpora, pairwise judgments, and label-to-severity transforms.

Heterogeneous toxicity datasets label comments in incompatible ways
(real-valued offensiveness, binary flag sets, coder counts, ordinal
levels).  Each loader here reads one layout and the transforms map every
labeling scheme onto a single severity scale in [0, 1], larger meaning
more toxic, so the datasets can train one regressor.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "Comment",
    "LabeledExample",
    "PairJudgment",
    "JtcLabels",
    "DavidsonCounts",
    "JTC_WEIGHTS",
    "JTC_WEIGHT_TOTAL",
    "load_comments",
    "load_pairs",
    "load_labeled",
    "save_labeled",
    "pairs_to_comments",
    "resolve_pairs_to_ids",
    "transform_ruddit",
    "transform_jtc",
    "transform_unintended",
    "transform_davidson",
    "transform_founta",
    "load_ruddit",
    "load_jtc",
    "load_unintended",
    "load_davidson",
    "load_founta",
]


@dataclass(frozen=True)
class Comment:
    """One comment; text is kept verbatim and may be empty."""

    id: str
    text: str


@dataclass(frozen=True)
class LabeledExample:
    """A comment with its severity score in [0, 1] and the dataset it came from."""

    comment: Comment
    score: float
    source: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(
                f"severity score {self.score!r} outside [0, 1] "
                f"for comment {self.comment.id!r}"
            )


@dataclass(frozen=True)
class PairJudgment:
    """An annotated pair: which of two comments a rater found more toxic.

    Identical texts on both sides are allowed (they occur in the task
    data); the two Comment objects are still distinct.
    """

    less_toxic: Comment
    more_toxic: Comment


@dataclass(frozen=True)
class JtcLabels:
    """The six binary toxicity flags of the Wikipedia comments dataset."""

    toxic: int
    severe_toxic: int
    obscene: int
    threat: int
    insult: int
    identity_hate: int

    def __post_init__(self) -> None:
        for name in (
            "toxic", "severe_toxic", "obscene",
            "threat", "insult", "identity_hate",
        ):
            if getattr(self, name) not in (0, 1):
                raise ValueError(f"flag {name} must be 0 or 1")


@dataclass(frozen=True)
class DavidsonCounts:
    """Per-tweet coder counts: hate speech / offensive / neither votes."""

    hate: int
    offensive: int
    neither: int

    def __post_init__(self) -> None:
        for name in ("hate", "offensive", "neither"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"count {name} must be a nonnegative integer")
        if self.hate + self.offensive + self.neither < 1:
            raise ValueError("at least one coder is required")


# Flag weights for the Wikipedia comments labels; the divisor is the
# largest attainable weighted sum, which pins scores to [0, 1].
JTC_WEIGHTS = {
    "severe_toxic": 12,
    "identity_hate": 9,
    "threat": 8,
    "insult": 6,
    "obscene": 5,
    "toxic": 4,
}
JTC_WEIGHT_TOTAL = sum(JTC_WEIGHTS.values())  # 44


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def transform_ruddit(raw: float) -> float:
    """Map an offensiveness score in [-1, 1] onto [0, 1] affinely."""
    if not -1.0 <= raw <= 1.0:
        raise ValueError(f"ruddit score {raw!r} outside [-1, 1]")
    return (raw + 1.0) / 2.0


def transform_jtc(labels: JtcLabels) -> float:
    """Weighted sum of the active flags, divided by the maximum sum (44)."""
    total = sum(
        weight * getattr(labels, name) for name, weight in JTC_WEIGHTS.items()
    )
    return total / JTC_WEIGHT_TOTAL


def transform_unintended(
    *,
    toxicity: float,
    severe_toxicity: float,
    obscene: float,
    threat: float,
    insult: float,
    identity_attack: float,
) -> float:
    """Same weighting as the binary-flag transform, on fractional attributes.

    identity_attack stands in for the identity-hate flag.  The datasets'
    sexually_explicit attribute has no weighted counterpart and is not an
    input here.
    """
    attrs = {
        "toxic": toxicity,
        "severe_toxic": severe_toxicity,
        "obscene": obscene,
        "threat": threat,
        "insult": insult,
        "identity_hate": identity_attack,
    }
    for name, value in attrs.items():
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"attribute {name} value {value!r} outside [0, 1]")
    total = sum(JTC_WEIGHTS[name] * value for name, value in attrs.items())
    return total / JTC_WEIGHT_TOTAL


def transform_davidson(counts: DavidsonCounts) -> float:
    """Coder-vote average with weights hate=3 / offensive=2 / neither=1.

    The raw average lands in [1, 3]; (raw - 1) / 2 rescales it onto [0, 1].
    """
    total = counts.hate + counts.offensive + counts.neither
    if total < 1:
        raise ValueError("zero coders")
    raw = (3 * counts.hate + 2 * counts.offensive + counts.neither) / total
    return (raw - 1.0) / 2.0


def transform_founta(label: int) -> float:
    """Ordinal label 0/1/2 (increasing toxicity) scaled to {0, 0.5, 1}."""
    if label not in (0, 1, 2):
        raise ValueError(f"founta label {label!r} not in {{0, 1, 2}}")
    return label / 2.0


# ---------------------------------------------------------------------------
# CSV loading
# ---------------------------------------------------------------------------
#
# All files are UTF-8, RFC-4180 quoted CSV (LF or CRLF).  Row numbers in
# diagnostics count CSV records, with the header as row 1, so the first
# data record is row 2; quoted fields may span physical lines without
# affecting the count.


def _read_rows(path: str | Path, required: Sequence[str]) -> tuple[dict[str, int], list[tuple[int, list[str]]]]:
    """Read a CSV, check required header columns, return (column index map, rows)."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a CSV header") from None
        columns = {name: i for i, name in enumerate(header)}
        for name in required:
            if name not in columns:
                raise ValueError(f"{path}: missing required column {name!r}")
        rows = []
        for record, fields in enumerate(reader, start=2):
            if len(fields) != len(header):
                raise ValueError(
                    f"{path}: malformed CSV row {record}: expected "
                    f"{len(header)} fields, found {len(fields)}"
                )
            rows.append((record, fields))
    return columns, rows


def _pick(columns: dict[str, int], *names: str) -> int | None:
    for name in names:
        if name in columns:
            return columns[name]
    return None


def load_comments(path: str | Path) -> list[Comment]:
    """Load a comments file (columns comment_id, text), order preserved.

    Text is taken verbatim, including embedded newlines inside quoted
    fields.  Duplicate ids abort with the offending row number.
    """
    columns, rows = _read_rows(path, ("comment_id", "text"))
    id_col, text_col = columns["comment_id"], columns["text"]
    seen: set[str] = set()
    comments = []
    for record, fields in rows:
        cid = fields[id_col]
        if cid in seen:
            raise ValueError(f"{path}: duplicate comment id {cid!r} at row {record}")
        seen.add(cid)
        comments.append(Comment(id=cid, text=fields[text_col]))
    return comments


def load_pairs(path: str | Path) -> list[PairJudgment]:
    """Load annotated pairs (columns less_toxic, more_toxic holding raw text).

    Synthetic ids p<row>_l / p<row>_m are assigned from the CSV row number
    (header is row 1), so reloading the same file reproduces them exactly.
    """
    columns, rows = _read_rows(path, ("less_toxic", "more_toxic"))
    less_col, more_col = columns["less_toxic"], columns["more_toxic"]
    pairs = []
    for record, fields in rows:
        pairs.append(
            PairJudgment(
                less_toxic=Comment(id=f"p{record}_l", text=fields[less_col]),
                more_toxic=Comment(id=f"p{record}_m", text=fields[more_col]),
            )
        )
    return pairs


def pairs_to_comments(pairs: Iterable[PairJudgment]) -> list[Comment]:
    """Flatten pairs into their side comments (less side first per pair)."""
    out = []
    for pair in pairs:
        out.append(pair.less_toxic)
        out.append(pair.more_toxic)
    return out


def resolve_pairs_to_ids(
    pairs: Iterable[PairJudgment], comments: Iterable[Comment]
) -> list[PairJudgment]:
    """Rewrite pair sides to reference comment ids matched by exact text.

    Duplicate texts resolve to the first occurrence in `comments`.  A pair
    side whose text has no match aborts with the pair's id.
    """
    by_text: dict[str, Comment] = {}
    for comment in comments:
        by_text.setdefault(comment.text, comment)
    resolved = []
    for pair in pairs:
        sides = []
        for side in (pair.less_toxic, pair.more_toxic):
            match = by_text.get(side.text)
            if match is None:
                raise ValueError(
                    f"no comment matches the text of pair side {side.id!r}"
                )
            sides.append(match)
        resolved.append(PairJudgment(less_toxic=sides[0], more_toxic=sides[1]))
    return resolved


def save_labeled(path: str | Path, examples: Iterable[LabeledExample]) -> None:
    """Write a labeled CSV (comment_id, text, score), score at 6 decimals."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["comment_id", "text", "score"])
        for ex in examples:
            writer.writerow([ex.comment.id, ex.comment.text, f"{ex.score:.6f}"])


def load_labeled(path: str | Path, source: str | None = None) -> list[LabeledExample]:
    """Read a labeled CSV back (columns comment_id, text, score)."""
    columns, rows = _read_rows(path, ("comment_id", "text", "score"))
    id_col, text_col = columns["comment_id"], columns["text"]
    score_col = columns["score"]
    name = source if source is not None else Path(path).stem
    out = []
    for record, fields in rows:
        try:
            score = float(fields[score_col])
        except ValueError:
            raise ValueError(
                f"{path}: non-numeric score at row {record}"
            ) from None
        out.append(
            LabeledExample(
                comment=Comment(id=fields[id_col], text=fields[text_col]),
                score=score,
                source=name,
            )
        )
    return out


def _int_field(path: str | Path, record: int, name: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ValueError(
            f"{path}: non-integer {name} value {value!r} at row {record}"
        ) from None


def _float_field(path: str | Path, record: int, name: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValueError(
            f"{path}: non-numeric {name} value {value!r} at row {record}"
        ) from None


def load_ruddit(path: str | Path) -> list[LabeledExample]:
    """Ruddit-style file: comment_id, text, score with score in [-1, 1]."""
    columns, rows = _read_rows(path, ("comment_id", "text", "score"))
    out = []
    for record, fields in rows:
        raw = _float_field(path, record, "score", fields[columns["score"]])
        out.append(
            LabeledExample(
                comment=Comment(fields[columns["comment_id"]], fields[columns["text"]]),
                score=transform_ruddit(raw),
                source="ruddit",
            )
        )
    return out


_JTC_FLAGS = ("toxic", "severe_toxic", "obscene", "threat", "insult", "identity_hate")


def load_jtc(path: str | Path) -> list[LabeledExample]:
    """Wikipedia comments file in its published layout.

    Required columns: id (or comment_id), comment_text (or text), and the
    six binary flags toxic, severe_toxic, obscene, threat, insult,
    identity_hate.
    """
    columns, rows = _read_rows(path, _JTC_FLAGS)
    id_col = _pick(columns, "id", "comment_id")
    text_col = _pick(columns, "comment_text", "text")
    if id_col is None or text_col is None:
        raise ValueError(f"{path}: missing id/comment_text columns")
    out = []
    for record, fields in rows:
        flags = {
            name: _int_field(path, record, name, fields[columns[name]])
            for name in _JTC_FLAGS
        }
        out.append(
            LabeledExample(
                comment=Comment(fields[id_col], fields[text_col]),
                score=transform_jtc(JtcLabels(**flags)),
                source="jtc",
            )
        )
    return out


def load_unintended(path: str | Path) -> list[LabeledExample]:
    """Fractional-attribute file in its published layout.

    Required columns: id (or comment_id), comment_text (or text), target
    (or toxicity), severe_toxicity, obscene, threat, insult,
    identity_attack.  Any sexually_explicit column is ignored.
    """
    required = ("severe_toxicity", "obscene", "threat", "insult", "identity_attack")
    columns, rows = _read_rows(path, required)
    id_col = _pick(columns, "id", "comment_id")
    text_col = _pick(columns, "comment_text", "text")
    tox_col = _pick(columns, "target", "toxicity")
    if id_col is None or text_col is None or tox_col is None:
        raise ValueError(f"{path}: missing id/comment_text/target columns")
    out = []
    for record, fields in rows:
        out.append(
            LabeledExample(
                comment=Comment(fields[id_col], fields[text_col]),
                score=transform_unintended(
                    toxicity=_float_field(path, record, "target", fields[tox_col]),
                    severe_toxicity=_float_field(
                        path, record, "severe_toxicity",
                        fields[columns["severe_toxicity"]],
                    ),
                    obscene=_float_field(
                        path, record, "obscene", fields[columns["obscene"]]
                    ),
                    threat=_float_field(
                        path, record, "threat", fields[columns["threat"]]
                    ),
                    insult=_float_field(
                        path, record, "insult", fields[columns["insult"]]
                    ),
                    identity_attack=_float_field(
                        path, record, "identity_attack",
                        fields[columns["identity_attack"]],
                    ),
                ),
                source="unintended",
            )
        )
    return out


def load_davidson(path: str | Path) -> list[LabeledExample]:
    """Coder-count file: columns hate_speech, offensive_language, neither,
    text (or tweet), and optionally comment_id/id (row number otherwise)."""
    required = ("hate_speech", "offensive_language", "neither")
    columns, rows = _read_rows(path, required)
    text_col = _pick(columns, "text", "tweet")
    if text_col is None:
        raise ValueError(f"{path}: missing text/tweet column")
    id_col = _pick(columns, "comment_id", "id")
    out = []
    for record, fields in rows:
        counts = DavidsonCounts(
            hate=_int_field(path, record, "hate_speech", fields[columns["hate_speech"]]),
            offensive=_int_field(
                path, record, "offensive_language",
                fields[columns["offensive_language"]],
            ),
            neither=_int_field(path, record, "neither", fields[columns["neither"]]),
        )
        cid = fields[id_col] if id_col is not None else str(record - 1)
        out.append(
            LabeledExample(
                comment=Comment(cid, fields[text_col]),
                score=transform_davidson(counts),
                source="davidson",
            )
        )
    return out


def load_founta(path: str | Path) -> list[LabeledExample]:
    """Ordinal-label file: columns comment_id (or id), text, label in {0,1,2}."""
    columns, rows = _read_rows(path, ("text", "label"))
    id_col = _pick(columns, "comment_id", "id")
    out = []
    for record, fields in rows:
        label = _int_field(path, record, "label", fields[columns["label"]])
        cid = fields[id_col] if id_col is not None else str(record - 1)
        out.append(
            LabeledExample(
                comment=Comment(cid, fields[columns["text"]]),
                score=transform_founta(label),
                source="founta",
            )
        )
    return out
