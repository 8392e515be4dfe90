"""Per-epoch correlation trends between overlap measures and confidence.

The coefficient is the Pearson product-moment correlation, computed with a
numerically stable single-pass accumulation of means and central
co-moments. An undefined correlation (fewer than two pairs, or zero
variance in either variable) is a first-class value, carried as None so
downstream rendering can break lines instead of plotting zeros.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

from .dynamics import CartographyPoint
from .heuristics import HeuristicAnnotation
from .ingest import Corpus, Distribution, GoldLabel, Split

# |rho| this close to 1 is below the accumulation's own resolution; snap so
# exactly collinear data reports exactly +-1 despite rounding.
_UNIT_SNAP = 1e-12


class Stratum(str, Enum):
    TRAIN = "train"
    EVAL_IN_DISTRIBUTION = "eval_in_distribution"
    EVAL_OOD = "eval_ood"


class ClassFilter(str, Enum):
    ALL = "all"
    ENTAILMENT = "entailment"
    NON_ENTAILMENT = "non_entailment"


class Measure(str, Enum):
    M1 = "m1"
    M2 = "m2"


@dataclass(frozen=True)
class CorrelationPoint:
    epoch: int
    stratum: Stratum
    class_filter: ClassFilter
    measure: Measure
    rho: float | None
    n: int


@dataclass(frozen=True)
class CorrelationSeries:
    stratum: Stratum
    class_filter: ClassFilter
    measure: Measure
    points: tuple[CorrelationPoint, ...]


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Single-pass Pearson coefficient; None when undefined.

    The co-moment update is symmetric in x and y, so pearson(x, y) equals
    pearson(y, x) bit for bit. The result is clamped to [-1, 1] against
    floating-point overshoot, and values within 1e-12 of +-1 are snapped to
    exactly +-1.
    """
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    n = 0
    mean_x = mean_y = 0.0
    m2x = m2y = 0.0
    comoment = 0.0
    for x, y in zip(xs, ys):
        n += 1
        dx = x - mean_x
        dy = y - mean_y
        comoment += dx * dy * ((n - 1) / n)
        mean_x += dx / n
        mean_y += dy / n
        m2x += dx * (x - mean_x)
        m2y += dy * (y - mean_y)
    if n < 2 or m2x <= 0.0 or m2y <= 0.0:
        return None
    rho = comoment / math.sqrt(m2x * m2y)
    rho = min(max(rho, -1.0), 1.0)
    if 1.0 - abs(rho) < _UNIT_SNAP:
        rho = math.copysign(1.0, rho)
    return rho


def _in_stratum(sample, stratum: Stratum) -> bool:
    if stratum is Stratum.TRAIN:
        return sample.split is Split.TRAIN
    if stratum is Stratum.EVAL_IN_DISTRIBUTION:
        return sample.split is Split.EVAL and sample.distribution is Distribution.IN_DISTRIBUTION
    return sample.split is Split.EVAL and sample.distribution is Distribution.OOD


def _in_class(sample, class_filter: ClassFilter) -> bool:
    if class_filter is ClassFilter.ALL:
        return True
    if class_filter is ClassFilter.ENTAILMENT:
        return sample.gold_label is GoldLabel.ENTAILMENT
    return sample.gold_label is GoldLabel.NON_ENTAILMENT


def correlation_at_epoch(
    corpus: Corpus,
    annotations: Mapping[str, HeuristicAnnotation],
    points_at_epoch: Sequence[CartographyPoint],
    stratum: Stratum,
    class_filter: ClassFilter,
    measure: Measure,
) -> CorrelationPoint:
    """Pair (measure value, confidence) over the selected samples.

    Only samples with both an annotation and statistics at this epoch
    contribute; an empty selection yields an undefined rho with n = 0.
    """
    epoch = points_at_epoch[0].epoch if points_at_epoch else 0
    xs: list[float] = []
    ys: list[float] = []
    for pt in points_at_epoch:
        sample = corpus.by_id[pt.sample_id]
        if not (_in_stratum(sample, stratum) and _in_class(sample, class_filter)):
            continue
        ann = annotations.get(pt.sample_id)
        if ann is None:
            continue
        xs.append(ann.m1 if measure is Measure.M1 else ann.m2)
        ys.append(pt.confidence)
    return CorrelationPoint(
        epoch=epoch,
        stratum=stratum,
        class_filter=class_filter,
        measure=measure,
        rho=pearson(xs, ys),
        n=len(xs),
    )


def all_series(
    corpus: Corpus,
    annotations: Mapping[str, HeuristicAnnotation],
    snapshots: Sequence[Sequence[CartographyPoint]],
    measures: Sequence[Measure] = (Measure.M2,),
) -> list[CorrelationSeries]:
    """One dense series per (stratum, class filter, measure)."""
    series: list[CorrelationSeries] = []
    for measure in measures:
        for stratum in Stratum:
            for class_filter in ClassFilter:
                points = []
                for epoch_index, epoch_points in enumerate(snapshots, start=1):
                    pt = correlation_at_epoch(
                        corpus, annotations, epoch_points, stratum, class_filter, measure
                    )
                    if pt.epoch == 0:
                        # empty snapshot carries no epoch; restore the index
                        pt = CorrelationPoint(
                            epoch=epoch_index,
                            stratum=stratum,
                            class_filter=class_filter,
                            measure=measure,
                            rho=pt.rho,
                            n=pt.n,
                        )
                    points.append(pt)
                series.append(
                    CorrelationSeries(
                        stratum=stratum,
                        class_filter=class_filter,
                        measure=measure,
                        points=tuple(points),
                    )
                )
    return series


CORRELATION_COLUMNS = ("epoch", "stratum", "class_filter", "measure", "rho", "n")


def write_correlations_csv(series: Sequence[CorrelationSeries], path: str | Path) -> None:
    """Long-form CSV; undefined rho becomes an empty cell."""
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CORRELATION_COLUMNS)
        for s in series:
            for pt in s.points:
                writer.writerow(
                    [
                        pt.epoch,
                        pt.stratum.value,
                        pt.class_filter.value,
                        pt.measure.value,
                        "" if pt.rho is None else f"{pt.rho:.9f}",
                        pt.n,
                    ]
                )
