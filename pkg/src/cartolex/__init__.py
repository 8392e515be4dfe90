"""Training-dynamics cartography and lexical-overlap analysis for NLI corpora."""

from .correlation import (
    ClassFilter,
    CorrelationPoint,
    CorrelationSeries,
    Measure,
    Stratum,
    all_series,
    correlation_at_epoch,
    pearson,
)
from .dynamics import (
    CartographyPoint,
    Region,
    RegionConfig,
    TrajectoryStats,
    all_snapshots,
    classify_region,
    snapshot_epoch,
    trajectory_stats,
    update_trajectory,
)
from .heuristics import (
    HeuristicAnnotation,
    HeuristicTag,
    TokenizationError,
    TokenSet,
    annotate_corpus,
    overlap_m1,
    overlap_m2,
    tag_heuristic,
    tokenize,
)
from .ingest import (
    Corpus,
    Distribution,
    GoldLabel,
    IngestError,
    PredictionRecord,
    Sample,
    Split,
    Violation,
    load_corpus,
    load_dataset,
    load_predictions,
    validate_corpus,
)
from .render import MapStyle, RenderError, render_map, render_trends
from .synth import SynthSpec, VerifyReport, generate, verify

__version__ = "0.1.0"

__all__ = [
    "CartographyPoint",
    "ClassFilter",
    "CorrelationPoint",
    "CorrelationSeries",
    "Corpus",
    "Distribution",
    "GoldLabel",
    "HeuristicAnnotation",
    "HeuristicTag",
    "IngestError",
    "MapStyle",
    "Measure",
    "PredictionRecord",
    "Region",
    "RegionConfig",
    "RenderError",
    "Sample",
    "Split",
    "Stratum",
    "SynthSpec",
    "TokenSet",
    "TokenizationError",
    "TrajectoryStats",
    "VerifyReport",
    "Violation",
    "all_series",
    "all_snapshots",
    "annotate_corpus",
    "classify_region",
    "correlation_at_epoch",
    "generate",
    "load_corpus",
    "load_dataset",
    "load_predictions",
    "overlap_m1",
    "overlap_m2",
    "pearson",
    "render_map",
    "render_trends",
    "snapshot_epoch",
    "tag_heuristic",
    "tokenize",
    "trajectory_stats",
    "update_trajectory",
    "validate_corpus",
    "verify",
]
