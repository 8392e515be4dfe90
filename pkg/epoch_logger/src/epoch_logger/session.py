"""Session object that owns the two JSONL files a training run produces.

The on-disk contract is shared with the analysis toolkit that consumes
these files: a dataset file with keys exactly {id, premise, hypothesis,
gold_label, split, distribution} and a predictions file with keys exactly
{sample_id, epoch, p_true}, both UTF-8 JSON lines in canonical form
(compact separators, fixed key order). Gold labels are collapsed to the
binary entailment/non_entailment scheme before anything is written, so
MNLI-style three-way labels work out of the box.

Epochs are atomic: log_epoch validates the full probability table before
touching the file, then appends every line and flushes. A crash between
epochs leaves a dense, loadable prefix.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

DEFAULT_LABEL_MAP = {
    "entailment": "entailment",
    "non_entailment": "non_entailment",
    "neutral": "non_entailment",
    "contradiction": "non_entailment",
}

_BINARY_LABELS = frozenset({"entailment", "non_entailment"})
_SPLITS = frozenset({"train", "eval"})
_DISTRIBUTIONS = frozenset({"in_distribution", "ood"})
_PROB_SUM_TOL = 1e-6


class LoggerError(ValueError):
    """Invalid dataset description or probability table."""


@dataclass(frozen=True)
class DatasetRow:
    """One sample as the training code sees it; gold_label may be any
    class name the label map knows how to collapse."""

    id: str
    premise: str
    hypothesis: str
    gold_label: str
    split: str = "train"
    distribution: str = "in_distribution"


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def _collapse(label: str, label_map: Mapping[str, str], sample_id: str) -> str:
    collapsed = label_map.get(label)
    if collapsed is None:
        raise LoggerError(f"sample {sample_id!r}: label {label!r} not in the label map")
    if collapsed not in _BINARY_LABELS:
        raise LoggerError(
            f"label map sends {label!r} to {collapsed!r}, not a binary label"
        )
    return collapsed


def _check_row(row: DatasetRow) -> None:
    if not row.id:
        raise LoggerError("sample id must be a non-empty string")
    for field in ("premise", "hypothesis"):
        if getattr(row, field).strip() == "":
            raise LoggerError(f"sample {row.id!r}: {field} is empty after trimming")
    if row.split not in _SPLITS:
        raise LoggerError(f"sample {row.id!r}: unknown split {row.split!r}")
    if row.distribution not in _DISTRIBUTIONS:
        raise LoggerError(f"sample {row.id!r}: unknown distribution {row.distribution!r}")
    if row.split == "train" and row.distribution != "in_distribution":
        raise LoggerError(f"sample {row.id!r}: train samples must be in_distribution")


class LoggerSession:
    """Open prediction log plus the metadata needed to extract p_true.

    Use begin_session() rather than constructing directly; the constructor
    assumes already-validated rows.
    """

    def __init__(
        self,
        rows: list[DatasetRow],
        collapsed: dict[str, str],
        predictions_path: Path,
        label_map: Mapping[str, str],
    ):
        self._rows = rows
        self._collapsed = collapsed
        self._label_map = dict(label_map)
        self._handle = predictions_path.open("a", encoding="utf-8")
        self._epoch = 0
        self._closed = False

    @property
    def epoch(self) -> int:
        return self._epoch

    @property
    def sample_ids(self) -> tuple[str, ...]:
        return tuple(row.id for row in self._rows)

    def log_epoch(self, table: Mapping[str, Mapping[str, float]]) -> int:
        """Append one prediction line per sample at the next epoch number.

        The table must cover every session sample exactly once; each entry
        maps class names to probabilities that are individually in [0, 1]
        and sum to 1 within 1e-6. p_true is the total probability of the
        classes that collapse to the sample's binary gold label.
        """
        if self._closed:
            raise LoggerError("session is closed")
        missing = [row.id for row in self._rows if row.id not in table]
        if missing:
            raise LoggerError(f"probability table is missing sample {missing[0]!r}")
        unknown = sorted(set(table) - set(self._collapsed))
        if unknown:
            raise LoggerError(f"probability table names unknown sample {unknown[0]!r}")
        epoch = self._epoch + 1
        lines = []
        for row in self._rows:
            probs = table[row.id]
            total = 0.0
            p_true = 0.0
            for cls, p in probs.items():
                if not isinstance(p, (int, float)) or isinstance(p, bool):
                    raise LoggerError(f"sample {row.id!r}: probability for {cls!r} is not a number")
                if not 0.0 <= p <= 1.0:
                    raise LoggerError(
                        f"sample {row.id!r}: probability {p!r} for {cls!r} outside [0, 1]"
                    )
                total += p
                if _collapse(cls, self._label_map, row.id) == self._collapsed[row.id]:
                    p_true += p
            if abs(total - 1.0) > _PROB_SUM_TOL:
                raise LoggerError(
                    f"sample {row.id!r}: class probabilities sum to {total!r}, not 1"
                )
            p_true = min(max(p_true, 0.0), 1.0)
            lines.append(_dump({"sample_id": row.id, "epoch": epoch, "p_true": p_true}))
        # the table validated in full; only now touch the file
        self._handle.write("\n".join(lines) + "\n")
        self._handle.flush()
        self._epoch = epoch
        return epoch

    def close(self) -> None:
        if not self._closed:
            self._handle.close()
            self._closed = True

    def __enter__(self) -> "LoggerSession":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def begin_session(
    rows: list[DatasetRow],
    dataset_path: str | Path,
    predictions_path: str | Path,
    label_map: Mapping[str, str] = DEFAULT_LABEL_MAP,
) -> LoggerSession:
    """Validate the dataset description, write it, and open the log.

    Validation happens before any write: a duplicate id or unmappable
    label leaves both paths untouched.
    """
    dataset_path = Path(dataset_path)
    predictions_path = Path(predictions_path)
    seen: set[str] = set()
    collapsed: dict[str, str] = {}
    for row in rows:
        _check_row(row)
        if row.id in seen:
            raise LoggerError(f"duplicate sample id {row.id!r}")
        seen.add(row.id)
        collapsed[row.id] = _collapse(row.gold_label, label_map, row.id)
    with dataset_path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(
                _dump(
                    {
                        "id": row.id,
                        "premise": row.premise,
                        "hypothesis": row.hypothesis,
                        "gold_label": collapsed[row.id],
                        "split": row.split,
                        "distribution": row.distribution,
                    }
                )
                + "\n"
            )
    predictions_path.write_text("", encoding="utf-8")
    return LoggerSession(list(rows), collapsed, predictions_path, label_map)
