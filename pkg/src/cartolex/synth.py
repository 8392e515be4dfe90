"""Synthetic corpora with planted statistics, plus the end-to-end oracle.

Sentence pairs are assembled from a synthetic vocabulary so each sample's
hypothesis-overlap fraction lands exactly on the grid {0, 0.25, 0.5, 0.75,
1.0} (a 4-word hypothesis sharing k words with a 6-word premise).
Probability trajectories are dyadic-grid affine functions of the overlap
fraction, so with zero noise the confidence/overlap relation is exactly
linear and the planted correlation is exactly +-1.

The oracle file is written by definitionally direct computations that are
independent of the pipeline code paths: two-pass mean/deviation sums for
trajectories, exact rational arithmetic (fractions.Fraction) for the
correlation moments, and planted counts for tags. Oracle regions assume
the default region thresholds.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .ingest import (
    Corpus,
    Distribution,
    GoldLabel,
    Sample,
    Split,
    write_dataset,
    write_predictions,
)

_M2_GRID_STEPS = 5  # k in 0..4 over a 4-word hypothesis
_PREMISE_WORDS = 4 + 2
_HYPOTHESIS_WORDS = 4
_GRID = 1024  # denominator for trajectory constants
_BASE_OFFSET = 3 / _GRID  # keeps prefix means off the default region thresholds
_RAMP_SPAN = 0.2

_DEFAULT_TAU_V = 0.25
_DEFAULT_TAU_MU = 0.5

STRATA = (
    ("train", Split.TRAIN, Distribution.IN_DISTRIBUTION),
    ("eval_in_distribution", Split.EVAL, Distribution.IN_DISTRIBUTION),
    ("eval_ood", Split.EVAL, Distribution.OOD),
)


@dataclass(frozen=True)
class SynthSpec:
    n_train: int = 0
    n_eval_in: int = 0
    n_eval_ood: int = 0
    epochs: int = 8
    seed: int = 0
    planted_slope: float = 0.5
    noise_scale: float = 0.0
    vocabulary_size: int = 50
    ood_slope: float | None = None

    def __post_init__(self) -> None:
        if min(self.n_train, self.n_eval_in, self.n_eval_ood) < 0:
            raise ValueError("sample counts must be >= 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.vocabulary_size < 2:
            raise ValueError("vocabulary_size must be >= 2")
        for name, slope in (("planted_slope", self.planted_slope), ("ood_slope", self.ood_slope)):
            if slope is not None and abs(slope) > 0.5:
                raise ValueError(f"{name} must be within [-0.5, 0.5] to keep probabilities in range")
        if not 0.0 <= self.noise_scale <= 0.5:
            raise ValueError("noise_scale must be within [0, 0.5]")


@dataclass(frozen=True)
class SynthPaths:
    dataset: Path
    predictions: Path
    oracle: Path


@dataclass
class VerifyReport:
    passed: bool
    checked: int
    failures: list[str]

    def first_divergence(self) -> str | None:
        return self.failures[0] if self.failures else None


def _slope_for(spec: SynthSpec, stratum: str) -> float:
    if stratum == "eval_ood" and spec.ood_slope is not None:
        return spec.ood_slope
    return spec.planted_slope


def _ramp_step(epochs: int) -> float:
    if epochs == 1:
        return 0.0
    return round(_RAMP_SPAN / (epochs - 1) * _GRID) / _GRID


def _trajectory(spec: SynthSpec, stratum: str, sample_id: str, m2: float) -> list[float]:
    """Deterministic per-sample trajectory, recomputable in isolation."""
    slope = _slope_for(spec, stratum)
    base = 0.25 + _BASE_OFFSET + max(0.0, -slope)
    step = _ramp_step(spec.epochs)
    rng = random.Random(f"{spec.seed}:{sample_id}:traj")
    values = []
    for e in range(spec.epochs):
        p = base + step * e + slope * m2
        if spec.noise_scale > 0.0:
            p += spec.noise_scale * rng.uniform(-1.0, 1.0)
            p = min(max(p, 0.0), 1.0)
        values.append(p)
    return values


def _build_samples(spec: SynthSpec) -> tuple[list[Sample], dict[str, dict]]:
    if spec.vocabulary_size < _PREMISE_WORDS + _HYPOTHESIS_WORDS:
        raise ValueError(
            f"invalid spec: vocabulary_size must be >= {_PREMISE_WORDS + _HYPOTHESIS_WORDS} "
            "to construct disjoint word sets"
        )
    vocab = [f"w{i:03d}" for i in range(spec.vocabulary_size)]
    samples: list[Sample] = []
    planted: dict[str, dict] = {}
    counts = {"train": spec.n_train, "eval_in_distribution": spec.n_eval_in, "eval_ood": spec.n_eval_ood}
    prefixes = {"train": "train", "eval_in_distribution": "in", "eval_ood": "ood"}
    for stratum, split, dist in STRATA:
        for idx in range(counts[stratum]):
            sid = f"{prefixes[stratum]}-{idx:05d}"
            label = GoldLabel.ENTAILMENT if idx % 2 == 0 else GoldLabel.NON_ENTAILMENT
            k = (idx // 2) % _M2_GRID_STEPS
            rng = random.Random(f"{spec.seed}:{sid}:words")
            premise_words = rng.sample(vocab, _PREMISE_WORDS)
            shared = rng.sample(premise_words, k)
            outside = [w for w in vocab if w not in premise_words]
            hypothesis_words = shared + rng.sample(outside, _HYPOTHESIS_WORDS - k)
            rng.shuffle(hypothesis_words)
            premise = " ".join(premise_words).capitalize() + "."
            hypothesis = " ".join(hypothesis_words).capitalize() + "."
            samples.append(
                Sample(
                    id=sid,
                    premise=premise,
                    hypothesis=hypothesis,
                    gold_label=label,
                    split=split,
                    distribution=dist,
                )
            )
            planted[sid] = {
                "stratum": stratum,
                "k": k,
                "m2": k / _HYPOTHESIS_WORDS,
                "m1": k / _PREMISE_WORDS,
                "label": label,
            }
    return samples, planted


def _batch_stats(prefix: list[float]) -> tuple[float, float]:
    """Two-pass mean and population standard deviation."""
    n = len(prefix)
    mean = sum(prefix) / n
    var = sum((p - mean) ** 2 for p in prefix) / n
    return mean, math.sqrt(var)


def _region(confidence: float, variability: float) -> str:
    if variability >= _DEFAULT_TAU_V:
        return "ambiguous"
    if confidence >= _DEFAULT_TAU_MU:
        return "easy_to_learn"
    return "hard_to_learn"


def _exact_pearson(xs: list[float], ys: list[float]) -> float | None:
    """Two-pass Pearson over exact rationals; float only at the final sqrt.

    Exact arithmetic makes the collinear case decidable: the coefficient is
    reported as exactly +-1 precisely when the squared co-moment equals the
    product of the squared deviations.
    """
    n = len(xs)
    if n < 2:
        return None
    fx = [Fraction(x) for x in xs]
    fy = [Fraction(y) for y in ys]
    mx = sum(fx) / n
    my = sum(fy) / n
    dx = [x - mx for x in fx]
    dy = [y - my for y in fy]
    c = sum(a * b for a, b in zip(dx, dy))
    vx = sum(a * a for a in dx)
    vy = sum(b * b for b in dy)
    if vx == 0 or vy == 0:
        return None
    if c * c == vx * vy:
        return 1.0 if c > 0 else -1.0
    rho = float(c) / math.sqrt(float(vx) * float(vy))
    return min(max(rho, -1.0), 1.0)


def generate(spec: SynthSpec, outdir: str | Path) -> SynthPaths:
    """Write dataset.jsonl, predictions.jsonl, and oracle.jsonl.

    Byte-identical for a fixed spec; empty counts produce empty-body files.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = SynthPaths(
        dataset=outdir / "dataset.jsonl",
        predictions=outdir / "predictions.jsonl",
        oracle=outdir / "oracle.jsonl",
    )
    samples, planted = _build_samples(spec)
    trajectories = {
        s.id: tuple(_trajectory(spec, planted[s.id]["stratum"], s.id, planted[s.id]["m2"]))
        for s in samples
    }
    corpus = Corpus(
        samples=tuple(samples),
        trajectories=trajectories,
        max_epoch=spec.epochs if samples else 0,
    )
    write_dataset(corpus.samples, paths.dataset)
    write_predictions(corpus, paths.predictions)

    def dump(obj: dict) -> str:
        return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))

    with paths.oracle.open("w", encoding="utf-8") as fh:
        for s in samples:
            traj = list(trajectories[s.id])
            for epoch in range(1, spec.epochs + 1):
                mean, std = _batch_stats(traj[:epoch])
                fh.write(
                    dump(
                        {
                            "kind": "trajectory",
                            "sample_id": s.id,
                            "epoch": epoch,
                            "confidence": mean,
                            "variability": std,
                            "region": _region(mean, std),
                        }
                    )
                    + "\n"
                )
        for s in samples:
            info = planted[s.id]
            tag = "none"
            if info["k"] == _HYPOTHESIS_WORDS:
                tag = "support" if info["label"] is GoldLabel.ENTAILMENT else "contradict"
            fh.write(
                dump(
                    {
                        "kind": "tag",
                        "sample_id": s.id,
                        "m1": info["m1"],
                        "m2": info["m2"],
                        "tag": tag,
                    }
                )
                + "\n"
            )
        if samples:
            prefix_means: dict[str, list[float]] = {}
            for s in samples:
                traj = list(trajectories[s.id])
                prefix_means[s.id] = [
                    _batch_stats(traj[:epoch])[0] for epoch in range(1, spec.epochs + 1)
                ]
            for measure in ("m1", "m2"):
                for stratum, _, _ in STRATA:
                    for class_filter in ("all", "entailment", "non_entailment"):
                        for epoch in range(1, spec.epochs + 1):
                            xs: list[float] = []
                            ys: list[float] = []
                            for s in samples:
                                info = planted[s.id]
                                if info["stratum"] != stratum:
                                    continue
                                if class_filter != "all" and info["label"].value != class_filter:
                                    continue
                                xs.append(info[measure])
                                ys.append(prefix_means[s.id][epoch - 1])
                            rho = _exact_pearson(xs, ys)
                            fh.write(
                                dump(
                                    {
                                        "kind": "correlation",
                                        "epoch": epoch,
                                        "stratum": stratum,
                                        "class_filter": class_filter,
                                        "measure": measure,
                                        "rho": rho,
                                        "n": len(xs),
                                    }
                                )
                                + "\n"
                            )
    return paths


def _read_csv(path: Path) -> list[dict[str, str]]:
    import csv

    with path.open("r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def verify(oracle_path: str | Path, output_dir: str | Path, atol: float = 1e-9) -> VerifyReport:
    """Compare pipeline CSV outputs against the oracle file.

    Statistics must agree within `atol`; tags, regions, and counts must
    match exactly. Coverage runs both ways: oracle rows missing from the
    output and output rows unknown to the oracle both fail.
    """
    oracle_path = Path(oracle_path)
    output_dir = Path(output_dir)
    failures: list[str] = []
    checked = 0

    oracle_traj: dict[tuple[str, int], dict] = {}
    oracle_tag: dict[str, dict] = {}
    oracle_corr: dict[tuple[int, str, str, str], dict] = {}
    with oracle_path.open("r", encoding="utf-8") as fh:
        for raw in fh:
            if raw.strip() == "":
                continue
            row = json.loads(raw)
            if row["kind"] == "trajectory":
                oracle_traj[(row["sample_id"], row["epoch"])] = row
            elif row["kind"] == "tag":
                oracle_tag[row["sample_id"]] = row
            elif row["kind"] == "correlation":
                oracle_corr[(row["epoch"], row["stratum"], row["class_filter"], row["measure"])] = row
            else:
                failures.append(f"oracle schema: unknown kind {row['kind']!r}")

    carto_path = output_dir / "cartography.csv"
    ann_path = output_dir / "annotations.csv"
    corr_path = output_dir / "correlations.csv"
    for path in (carto_path, ann_path, corr_path):
        if not path.exists():
            return VerifyReport(False, checked, [f"schema: missing output file {path.name}"])

    seen_traj: set[tuple[str, int]] = set()
    for row in _read_csv(carto_path):
        key = (row["sample_id"], int(row["epoch"]))
        seen_traj.add(key)
        expected = oracle_traj.get(key)
        if expected is None:
            failures.append(f"coverage: unexpected cartography row {key}")
            continue
        checked += 1
        for column in ("confidence", "variability"):
            if abs(float(row[column]) - expected[column]) > atol:
                failures.append(
                    f"trajectory: sample {key[0]} epoch {key[1]}: {column} "
                    f"{row[column]} vs oracle {expected[column]!r}"
                )
        if row["region"] != expected["region"]:
            failures.append(
                f"trajectory: sample {key[0]} epoch {key[1]}: region "
                f"{row['region']} vs oracle {expected['region']}"
            )
    for key in oracle_traj:
        if key not in seen_traj:
            failures.append(f"coverage: output missing cartography row for sample {key[0]} epoch {key[1]}")

    seen_tags: set[str] = set()
    for row in _read_csv(ann_path):
        sid = row["sample_id"]
        seen_tags.add(sid)
        expected = oracle_tag.get(sid)
        if expected is None:
            failures.append(f"coverage: unexpected annotation row {sid}")
            continue
        checked += 1
        for column in ("m1", "m2"):
            if abs(float(row[column]) - expected[column]) > atol:
                failures.append(
                    f"tag: sample {sid}: {column} {row[column]} vs oracle {expected[column]!r}"
                )
        if row["tag"] != expected["tag"]:
            failures.append(f"tag: sample {sid}: tag {row['tag']} vs oracle {expected['tag']}")
    for sid in oracle_tag:
        if sid not in seen_tags:
            failures.append(f"coverage: output missing annotation row for sample {sid}")

    pipeline_corr: dict[tuple[int, str, str, str], dict[str, str]] = {}
    for row in _read_csv(corr_path):
        key = (int(row["epoch"]), row["stratum"], row["class_filter"], row["measure"])
        pipeline_corr[key] = row
    pipeline_measures = {key[3] for key in pipeline_corr}
    for key, expected in oracle_corr.items():
        if key[3] not in pipeline_measures:
            continue
        row = pipeline_corr.pop(key, None)
        if row is None:
            failures.append(f"coverage: output missing correlation row {key}")
            continue
        checked += 1
        if int(row["n"]) != expected["n"]:
            failures.append(f"correlation {key}: n {row['n']} vs oracle {expected['n']}")
        rho_text = row["rho"]
        if expected["rho"] is None:
            if rho_text != "":
                failures.append(f"correlation {key}: rho {rho_text} but oracle is undefined")
        elif rho_text == "":
            failures.append(f"correlation {key}: rho undefined but oracle has {expected['rho']!r}")
        elif abs(float(rho_text) - expected["rho"]) > atol:
            failures.append(f"correlation {key}: rho {rho_text} vs oracle {expected['rho']!r}")
    for key in pipeline_corr:
        failures.append(f"coverage: unexpected correlation row {key}")

    return VerifyReport(passed=not failures, checked=checked, failures=failures)
