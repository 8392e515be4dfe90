"""Canonical on-disk formats and corpus assembly.

Two JSONL contracts are defined here and shared with any log producer:

* dataset file: one object per line, keys exactly
  ``{"id","premise","hypothesis","gold_label","split","distribution"}``
* predictions file: one object per line, keys exactly
  ``{"sample_id","epoch","p_true"}``, epoch a JSON integer >= 1

Loading is strict (malformed lines raise, with line numbers); corpus-level
invariant checking is data, not failure, and lives in `validate_corpus`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable


class GoldLabel(str, Enum):
    ENTAILMENT = "entailment"
    NON_ENTAILMENT = "non_entailment"


class Split(str, Enum):
    TRAIN = "train"
    EVAL = "eval"


class Distribution(str, Enum):
    IN_DISTRIBUTION = "in_distribution"
    OOD = "ood"


DATASET_KEYS = ("id", "premise", "hypothesis", "gold_label", "split", "distribution")
PREDICTION_KEYS = ("sample_id", "epoch", "p_true")


class IngestError(Exception):
    """Raised on malformed or inconsistent input files."""

    def __init__(self, message: str, line_no: int | None = None, path: str | None = None):
        self.line_no = line_no
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}:"
        if line_no is not None:
            prefix += f"line {line_no}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Sample:
    id: str
    premise: str
    hypothesis: str
    gold_label: GoldLabel
    split: Split
    distribution: Distribution


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    epoch: int
    p_true: float


@dataclass
class Violation:
    sample_id: str
    rule: str
    message: str

    def __str__(self) -> str:
        return f"{self.sample_id}: {self.rule}: {self.message}"


@dataclass
class Corpus:
    """Immutable-by-convention join of a dataset and its prediction log.

    `trajectories` maps sample id to the dense probability prefix
    (index e-1 holds the epoch-e value). Samples keep file order.
    """

    samples: tuple[Sample, ...]
    trajectories: dict[str, tuple[float, ...]]
    max_epoch: int
    by_id: dict[str, Sample] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.by_id:
            self.by_id = {s.id: s for s in self.samples}

    def trajectory(self, sample_id: str) -> tuple[float, ...]:
        return self.trajectories.get(sample_id, ())


def _parse_enum(enum_cls, value, field_name: str, line_no: int, path: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in enum_cls)
        raise IngestError(
            f"unknown value {value!r} for field {field_name!r} (allowed: {allowed})",
            line_no,
            path,
        ) from None


def _parse_line(raw: str, line_no: int, path: str) -> dict:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise IngestError(f"invalid JSON ({exc.msg})", line_no, path) from None
    if not isinstance(obj, dict):
        raise IngestError("line is not a JSON object", line_no, path)
    return obj


def _require_keys(obj: dict, keys: tuple[str, ...], line_no: int, path: str) -> None:
    missing = [k for k in keys if k not in obj]
    extra = [k for k in obj if k not in keys]
    if missing:
        raise IngestError(f"missing field {missing[0]!r}", line_no, path)
    if extra:
        raise IngestError(f"unexpected field {extra[0]!r}", line_no, path)


def load_dataset(path: str | Path) -> list[Sample]:
    """Read a dataset JSONL file, preserving line order.

    Rejects duplicate ids, unknown enum values, empty text fields, and
    malformed lines, each with the offending line number.
    """
    path = Path(path)
    samples: list[Sample] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if raw.strip() == "":
                continue
            obj = _parse_line(raw, line_no, str(path))
            _require_keys(obj, DATASET_KEYS, line_no, str(path))
            sid = obj["id"]
            if not isinstance(sid, str) or sid == "":
                raise IngestError("field 'id' must be a non-empty string", line_no, str(path))
            if sid in seen:
                raise IngestError(f"duplicate id {sid!r}", line_no, str(path))
            seen.add(sid)
            for key in ("premise", "hypothesis"):
                text = obj[key]
                if not isinstance(text, str):
                    raise IngestError(f"field {key!r} must be a string", line_no, str(path))
                if text.strip() == "":
                    raise IngestError(f"field {key!r} is empty after trimming", line_no, str(path))
            samples.append(
                Sample(
                    id=sid,
                    premise=obj["premise"],
                    hypothesis=obj["hypothesis"],
                    gold_label=_parse_enum(GoldLabel, obj["gold_label"], "gold_label", line_no, str(path)),
                    split=_parse_enum(Split, obj["split"], "split", line_no, str(path)),
                    distribution=_parse_enum(
                        Distribution, obj["distribution"], "distribution", line_no, str(path)
                    ),
                )
            )
    return samples


ROLE_EXPECTATIONS = {
    "train": (Split.TRAIN, Distribution.IN_DISTRIBUTION),
    "eval_in_distribution": (Split.EVAL, Distribution.IN_DISTRIBUTION),
    "eval_ood": (Split.EVAL, Distribution.OOD),
}


def load_role_datasets(
    train: str | Path | None = None,
    eval_in: str | Path | None = None,
    eval_ood: str | Path | None = None,
) -> list[Sample]:
    """Load per-role dataset files and concatenate them.

    Each file must only contain samples whose split/distribution tags match
    its role; ids must be unique across all files.
    """
    parts: list[tuple[str, str | Path]] = []
    if train is not None:
        parts.append(("train", train))
    if eval_in is not None:
        parts.append(("eval_in_distribution", eval_in))
    if eval_ood is not None:
        parts.append(("eval_ood", eval_ood))
    if not parts:
        raise IngestError("no dataset file given")
    merged: list[Sample] = []
    seen: set[str] = set()
    for role, path in parts:
        want_split, want_dist = ROLE_EXPECTATIONS[role]
        for sample in load_dataset(path):
            if sample.split is not want_split or sample.distribution is not want_dist:
                raise IngestError(
                    f"sample {sample.id!r} has tags ({sample.split.value}, "
                    f"{sample.distribution.value}) but the {role} file requires "
                    f"({want_split.value}, {want_dist.value})",
                    path=str(path),
                )
            if sample.id in seen:
                raise IngestError(f"duplicate id {sample.id!r} across dataset files", path=str(path))
            seen.add(sample.id)
            merged.append(sample)
    return merged


def load_predictions(
    paths: str | Path | Iterable[str | Path],
    samples: list[Sample],
) -> tuple[dict[str, tuple[float, ...]], int]:
    """Read prediction JSONL file(s) into dense per-sample trajectories.

    Returns (trajectories, max_epoch). Every record must reference a known
    sample; (sample_id, epoch) pairs must be unique across all files; each
    sample's epochs must form a gap-free prefix 1..k. The result does not
    depend on line order.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    known = {s.id for s in samples}
    cells: dict[str, dict[int, float]] = {}
    for path in paths:
        path = Path(path)
        with path.open("r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                if raw.strip() == "":
                    continue
                obj = _parse_line(raw, line_no, str(path))
                _require_keys(obj, PREDICTION_KEYS, line_no, str(path))
                sid = obj["sample_id"]
                if not isinstance(sid, str):
                    raise IngestError("field 'sample_id' must be a string", line_no, str(path))
                if sid not in known:
                    raise IngestError(f"unresolved sample_id {sid!r}", line_no, str(path))
                epoch = obj["epoch"]
                if isinstance(epoch, bool) or not isinstance(epoch, int):
                    raise IngestError("field 'epoch' must be a JSON integer", line_no, str(path))
                if epoch < 1:
                    raise IngestError(f"epoch must be >= 1, got {epoch}", line_no, str(path))
                p = obj["p_true"]
                if isinstance(p, bool) or not isinstance(p, (int, float)):
                    raise IngestError("field 'p_true' must be a JSON number", line_no, str(path))
                p = float(p)
                if not 0.0 <= p <= 1.0:
                    raise IngestError(f"p_true {p!r} outside [0, 1]", line_no, str(path))
                per_sample = cells.setdefault(sid, {})
                if epoch in per_sample:
                    raise IngestError(
                        f"duplicate record for sample {sid!r} at epoch {epoch}", line_no, str(path)
                    )
                per_sample[epoch] = p
    trajectories: dict[str, tuple[float, ...]] = {}
    max_epoch = 0
    for sid in (s.id for s in samples):
        per_sample = cells.get(sid)
        if per_sample is None:
            continue
        top = max(per_sample)
        for e in range(1, top + 1):
            if e not in per_sample:
                raise IngestError(
                    f"trajectory gap for sample {sid!r}: epoch {top} present but epoch {e} missing"
                )
        trajectories[sid] = tuple(per_sample[e] for e in range(1, top + 1))
        max_epoch = max(max_epoch, top)
    return trajectories, max_epoch


def load_corpus(
    dataset: str | Path | None = None,
    train: str | Path | None = None,
    eval_in: str | Path | None = None,
    eval_ood: str | Path | None = None,
    predictions: str | Path | Iterable[str | Path] | None = None,
) -> Corpus:
    """Load a merged dataset file or per-role files, plus prediction log(s)."""
    if dataset is not None:
        if train is not None or eval_in is not None or eval_ood is not None:
            raise IngestError("give either a merged dataset file or role files, not both")
        samples = load_dataset(dataset)
    else:
        samples = load_role_datasets(train=train, eval_in=eval_in, eval_ood=eval_ood)
    if predictions is None:
        trajectories: dict[str, tuple[float, ...]] = {}
        max_epoch = 0
    else:
        trajectories, max_epoch = load_predictions(predictions, samples)
    return Corpus(samples=tuple(samples), trajectories=trajectories, max_epoch=max_epoch)


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """Check every type invariant; returns violations (empty list = valid).

    Never raises and never mutates; each violation names a sample id and a
    rule so reports stay actionable.
    """
    violations: list[Violation] = []
    seen: set[str] = set()
    for sample in corpus.samples:
        if sample.id in seen:
            violations.append(Violation(sample.id, "duplicate_id", "sample id occurs more than once"))
        seen.add(sample.id)
        if sample.premise.strip() == "":
            violations.append(Violation(sample.id, "empty_text", "premise is empty after trimming"))
        if sample.hypothesis.strip() == "":
            violations.append(Violation(sample.id, "empty_text", "hypothesis is empty after trimming"))
        if sample.split is Split.TRAIN and sample.distribution is not Distribution.IN_DISTRIBUTION:
            violations.append(
                Violation(
                    sample.id,
                    "train_distribution",
                    "train-split sample must be tagged in_distribution",
                )
            )
    for sid, traj in corpus.trajectories.items():
        if sid not in seen:
            violations.append(
                Violation(sid, "unresolved_reference", "trajectory references an unknown sample")
            )
        if len(traj) > corpus.max_epoch:
            violations.append(
                Violation(
                    sid,
                    "max_epoch",
                    f"trajectory has {len(traj)} epochs but corpus.max_epoch is {corpus.max_epoch}",
                )
            )
        for e, p in enumerate(traj, start=1):
            if not 0.0 <= p <= 1.0:
                violations.append(
                    Violation(sid, "p_true_range", f"p_true {p!r} at epoch {e} outside [0, 1]")
                )
    return violations


def _dump(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def write_dataset(samples: Iterable[Sample], path: str | Path) -> None:
    """Serialize samples in canonical form (fixed key order, compact JSON)."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(
                _dump(
                    {
                        "id": s.id,
                        "premise": s.premise,
                        "hypothesis": s.hypothesis,
                        "gold_label": s.gold_label.value,
                        "split": s.split.value,
                        "distribution": s.distribution.value,
                    }
                )
                + "\n"
            )


def write_predictions(corpus: Corpus, path: str | Path) -> None:
    """Serialize trajectories epoch-major, samples in dataset order."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for epoch in range(1, corpus.max_epoch + 1):
            for s in corpus.samples:
                traj = corpus.trajectories.get(s.id, ())
                if len(traj) >= epoch:
                    fh.write(
                        _dump({"sample_id": s.id, "epoch": epoch, "p_true": traj[epoch - 1]}) + "\n"
                    )
