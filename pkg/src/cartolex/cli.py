"""Command-line pipeline: validate, per-stage outputs, full report, synth.

Exit codes categorize failures: 1 usage, 2 ingestion or validation,
3 computation, 4 output write. Flags map one-to-one onto RunConfig;
`--config FILE` supplies the same keys from JSON, with explicit flags
taking precedence and documented defaults filling the rest.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from .correlation import ClassFilter, Measure, Stratum, all_series, write_correlations_csv
from .dynamics import RegionConfig, all_snapshots, write_cartography_csv
from .heuristics import annotate_corpus, write_annotations_csv
from .ingest import Corpus, IngestError, Split, load_corpus, validate_corpus
from .render import MapStyle, RenderError, render_map, render_trends
from .synth import SynthSpec, generate, verify

EXIT_USAGE = 1
EXIT_INGEST = 2
EXIT_COMPUTE = 3
EXIT_WRITE = 4

_DEFAULT_EPOCHS_TO_MAP = (2, 8)


class CommandError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; remap to the usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    dataset: str | None
    train: str | None
    eval_in: str | None
    eval_ood: str | None
    predictions: tuple[str, ...]
    outdir: str | None
    tau_v: float
    tau_mu: float
    sample_fraction: float
    seed: int
    measures: tuple[str, ...]
    epochs_to_map: tuple[int, ...]


_CONFIG_KEYS = frozenset(
    {
        "dataset",
        "train",
        "eval_in",
        "eval_ood",
        "predictions",
        "outdir",
        "out",
        "tau_v",
        "tau_mu",
        "sample_fraction",
        "seed",
        "measures",
        "epochs_to_map",
    }
)


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            loaded = json.load(fh)
    except OSError as exc:
        raise CommandError(EXIT_USAGE, f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise CommandError(EXIT_USAGE, f"config file is not valid JSON: {exc}")
    if not isinstance(loaded, dict):
        raise CommandError(EXIT_USAGE, "config file must hold a JSON object")
    unknown = sorted(set(loaded) - _CONFIG_KEYS)
    if unknown:
        raise CommandError(EXIT_USAGE, f"unknown config keys: {', '.join(unknown)}")
    return loaded


def _resolve(args, config: dict, key: str, default):
    """CLI flag > config file > default; reports whether a caller set it."""
    value = getattr(args, key, None)
    if value is not None:
        return value, True
    if key in config and config[key] is not None:
        return config[key], True
    return default, False


def _parse_measures(text) -> tuple[str, ...]:
    if isinstance(text, (list, tuple)):
        names = [str(m) for m in text]
    else:
        names = [part.strip() for part in str(text).split(",") if part.strip()]
    valid = {m.value for m in Measure}
    for name in names:
        if name not in valid:
            raise CommandError(EXIT_USAGE, f"unknown measure {name!r} (choose from m1, m2)")
    if not names:
        raise CommandError(EXIT_USAGE, "at least one measure is required")
    # canonical order keeps outputs byte-stable regardless of flag order
    return tuple(m.value for m in Measure if m.value in set(names))


def _parse_epoch_list(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        raw = [str(e) for e in text]
    else:
        raw = [part.strip() for part in str(text).split(",") if part.strip()]
    try:
        epochs = tuple(int(part) for part in raw)
    except ValueError:
        raise CommandError(EXIT_USAGE, f"epochs-to-map must be integers, got {text!r}")
    if not epochs:
        raise CommandError(EXIT_USAGE, "epochs-to-map must name at least one epoch")
    return epochs


def _build_run_config(args, config: dict) -> tuple[RunConfig, bool]:
    dataset, _ = _resolve(args, config, "dataset", None)
    train, _ = _resolve(args, config, "train", None)
    eval_in, _ = _resolve(args, config, "eval_in", None)
    eval_ood, _ = _resolve(args, config, "eval_ood", None)
    predictions, _ = _resolve(args, config, "predictions", ())
    if isinstance(predictions, str):
        predictions = (predictions,)
    outdir, _ = _resolve(args, config, "outdir", None)
    tau_v, _ = _resolve(args, config, "tau_v", 0.25)
    tau_mu, _ = _resolve(args, config, "tau_mu", 0.5)
    sample_fraction, _ = _resolve(args, config, "sample_fraction", 1.0)
    seed, _ = _resolve(args, config, "seed", 0)
    measures, _ = _resolve(args, config, "measures", "m2")
    epochs_text, epochs_explicit = _resolve(args, config, "epochs_to_map", None)

    role_flags = (train, eval_in, eval_ood)
    if dataset is not None and any(r is not None for r in role_flags):
        raise CommandError(
            EXIT_USAGE, "--dataset is mutually exclusive with --train/--eval-in/--eval-ood"
        )
    if dataset is None and any(r is not None for r in role_flags) and not all(
        r is not None for r in role_flags
    ):
        raise CommandError(EXIT_USAGE, "role files require all of --train, --eval-in, --eval-ood")

    epochs_to_map = (
        _parse_epoch_list(epochs_text) if epochs_explicit else _DEFAULT_EPOCHS_TO_MAP
    )
    return (
        RunConfig(
            dataset=dataset,
            train=train,
            eval_in=eval_in,
            eval_ood=eval_ood,
            predictions=tuple(str(p) for p in predictions),
            outdir=outdir,
            tau_v=float(tau_v),
            tau_mu=float(tau_mu),
            sample_fraction=float(sample_fraction),
            seed=int(seed),
            measures=_parse_measures(measures),
            epochs_to_map=epochs_to_map,
        ),
        epochs_explicit,
    )


def _require_inputs(cfg: RunConfig, need_predictions: bool) -> None:
    if cfg.dataset is None and cfg.train is None:
        raise CommandError(
            EXIT_USAGE, "provide --dataset or all of --train/--eval-in/--eval-ood"
        )
    if need_predictions and not cfg.predictions:
        raise CommandError(EXIT_USAGE, "at least one --predictions file is required")


def _load(cfg: RunConfig, need_predictions: bool) -> Corpus:
    _require_inputs(cfg, need_predictions)
    try:
        return load_corpus(
            dataset=cfg.dataset,
            train=cfg.train,
            eval_in=cfg.eval_in,
            eval_ood=cfg.eval_ood,
            predictions=cfg.predictions or None,
        )
    except (IngestError, OSError) as exc:
        raise CommandError(EXIT_INGEST, str(exc))


def _region_config(cfg: RunConfig) -> RegionConfig:
    try:
        return RegionConfig(tau_v=cfg.tau_v, tau_mu=cfg.tau_mu)
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc))


def _map_epochs(cfg: RunConfig, explicit: bool, max_epoch: int) -> tuple[int, ...]:
    if explicit:
        bad = [e for e in cfg.epochs_to_map if not 1 <= e <= max_epoch]
        if bad:
            raise CommandError(
                EXIT_INGEST,
                f"epochs-to-map {bad} outside the available range 1..{max_epoch}",
            )
        return cfg.epochs_to_map
    usable = tuple(e for e in _DEFAULT_EPOCHS_TO_MAP if 1 <= e <= max_epoch)
    return usable if usable else (max_epoch,)


def _sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _outdir(cfg: RunConfig) -> Path:
    if cfg.outdir is None:
        raise CommandError(EXIT_USAGE, "--outdir is required")
    path = Path(cfg.outdir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CommandError(EXIT_WRITE, f"cannot create output directory: {exc}")
    return path


def _write_maps(
    corpus: Corpus,
    snapshots,
    cfg: RunConfig,
    epochs: tuple[int, ...],
    outdir: Path,
) -> list[Path]:
    style = MapStyle(sample_fraction=cfg.sample_fraction, seed=cfg.seed)
    written: list[Path] = []
    for epoch in epochs:
        points = snapshots[epoch - 1]
        for split in Split:
            subset = [pt for pt in points if pt.split is split]
            if not subset:
                continue
            out = outdir / f"map_{split.value}_epoch{epoch}.svg"
            try:
                render_map(subset, style, out, title=f"{split.value} cartography, epoch {epoch}")
            except RenderError as exc:
                raise CommandError(EXIT_COMPUTE, str(exc))
            except OSError as exc:
                raise CommandError(EXIT_WRITE, str(exc))
            written.append(out)
    return written


def _write_trends(series, cfg: RunConfig, outdir: Path) -> list[Path]:
    written: list[Path] = []
    for measure in cfg.measures:
        for class_filter in ClassFilter:
            group = [
                s
                for s in series
                if s.measure.value == measure and s.class_filter is class_filter
            ]
            if not any(pt.rho is not None for s in group for pt in s.points):
                continue
            out = outdir / f"trends_{measure}_{class_filter.value}.svg"
            try:
                render_trends(group, out, title=f"{measure} correlation, {class_filter.value}")
            except OSError as exc:
                raise CommandError(EXIT_WRITE, str(exc))
            written.append(out)
    return written


def cmd_validate(args) -> int:
    config = _load_config_file(args.config)
    cfg, _ = _build_run_config(args, config)
    corpus = _load(cfg, need_predictions=False)
    violations = validate_corpus(corpus)
    for v in violations:
        print(f"violation [{v.rule}] {v.sample_id}: {v.message}", file=sys.stderr)
    if violations:
        print(f"error: {len(violations)} violation(s) found", file=sys.stderr)
        return EXIT_INGEST
    print(
        f"ok: {len(corpus.samples)} samples, "
        f"{len(corpus.trajectories)} trajectories, max epoch {corpus.max_epoch}"
    )
    return 0


def cmd_dynamics(args) -> int:
    config = _load_config_file(args.config)
    cfg, _ = _build_run_config(args, config)
    if args.out is None:
        raise CommandError(EXIT_USAGE, "--out is required")
    corpus = _load(cfg, need_predictions=True)
    region_config = _region_config(cfg)
    try:
        annotations = annotate_corpus(corpus).by_id
        snapshots = all_snapshots(corpus, region_config, annotations)
    except ValueError as exc:
        raise CommandError(EXIT_COMPUTE, str(exc))
    try:
        write_cartography_csv(snapshots, args.out)
    except OSError as exc:
        raise CommandError(EXIT_WRITE, str(exc))
    print(f"wrote {args.out}")
    return 0


def cmd_heuristics(args) -> int:
    config = _load_config_file(args.config)
    cfg, _ = _build_run_config(args, config)
    if args.out is None:
        raise CommandError(EXIT_USAGE, "--out is required")
    corpus = _load(cfg, need_predictions=False)
    try:
        annotations = annotate_corpus(corpus)
    except ValueError as exc:
        raise CommandError(EXIT_COMPUTE, str(exc))
    for sid, reason in annotations.failures:
        print(f"note: {sid}: {reason}", file=sys.stderr)
    try:
        write_annotations_csv(annotations, corpus, args.out)
    except OSError as exc:
        raise CommandError(EXIT_WRITE, str(exc))
    print(f"wrote {args.out}")
    return 0


def cmd_correlate(args) -> int:
    config = _load_config_file(args.config)
    cfg, _ = _build_run_config(args, config)
    if args.out is None:
        raise CommandError(EXIT_USAGE, "--out is required")
    corpus = _load(cfg, need_predictions=True)
    region_config = _region_config(cfg)
    try:
        annotations = annotate_corpus(corpus).by_id
        snapshots = all_snapshots(corpus, region_config, annotations)
        series = all_series(
            corpus, annotations, snapshots, measures=tuple(Measure(m) for m in cfg.measures)
        )
    except ValueError as exc:
        raise CommandError(EXIT_COMPUTE, str(exc))
    try:
        write_correlations_csv(series, args.out)
    except OSError as exc:
        raise CommandError(EXIT_WRITE, str(exc))
    print(f"wrote {args.out}")
    return 0


def cmd_map(args) -> int:
    config = _load_config_file(args.config)
    cfg, epochs_explicit = _build_run_config(args, config)
    outdir = _outdir(cfg)
    corpus = _load(cfg, need_predictions=True)
    region_config = _region_config(cfg)
    epochs = _map_epochs(cfg, epochs_explicit, corpus.max_epoch)
    try:
        annotations = annotate_corpus(corpus).by_id
        snapshots = all_snapshots(corpus, region_config, annotations)
    except ValueError as exc:
        raise CommandError(EXIT_COMPUTE, str(exc))
    written = _write_maps(corpus, snapshots, cfg, epochs, outdir)
    for path in written:
        print(f"wrote {path}")
    return 0


def cmd_report(args) -> int:
    config = _load_config_file(args.config)
    cfg, epochs_explicit = _build_run_config(args, config)
    outdir = _outdir(cfg)
    corpus = _load(cfg, need_predictions=True)
    region_config = _region_config(cfg)
    epochs = _map_epochs(cfg, epochs_explicit, corpus.max_epoch) if corpus.max_epoch else ()

    try:
        annotations = annotate_corpus(corpus)
        snapshots = all_snapshots(corpus, region_config, annotations.by_id)
        series = all_series(
            corpus,
            annotations.by_id,
            snapshots,
            measures=tuple(Measure(m) for m in cfg.measures),
        )
    except ValueError as exc:
        raise CommandError(EXIT_COMPUTE, str(exc))

    outputs: list[Path] = []
    try:
        carto_path = outdir / "cartography.csv"
        write_cartography_csv(snapshots, carto_path)
        outputs.append(carto_path)
        ann_path = outdir / "annotations.csv"
        write_annotations_csv(annotations, corpus, ann_path)
        outputs.append(ann_path)
        corr_path = outdir / "correlations.csv"
        write_correlations_csv(series, corr_path)
        outputs.append(corr_path)
    except OSError as exc:
        raise CommandError(EXIT_WRITE, str(exc))
    outputs.extend(_write_maps(corpus, snapshots, cfg, epochs, outdir))
    outputs.extend(_write_trends(series, cfg, outdir))

    inputs = [p for p in (cfg.dataset, cfg.train, cfg.eval_in, cfg.eval_ood) if p]
    inputs.extend(cfg.predictions)
    if args.config:
        inputs.append(args.config)
    manifest = {
        "command": "report",
        "config": {
            **asdict(cfg),
            "predictions": list(cfg.predictions),
            "measures": list(cfg.measures),
            "epochs_to_map": list(epochs),
        },
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {p.name: _sha256(p) for p in outputs},
    }
    manifest_path = outdir / "manifest.json"
    try:
        manifest_path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise CommandError(EXIT_WRITE, str(exc))
    for path in [*outputs, manifest_path]:
        print(f"wrote {path}")
    return 0


def cmd_synth(args) -> int:
    if args.verify is not None:
        oracle_path, output_dir = args.verify
        try:
            report = verify(oracle_path, output_dir)
        except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
            raise CommandError(EXIT_INGEST, f"cannot verify: {exc}")
        for failure in report.failures:
            print(f"mismatch: {failure}", file=sys.stderr)
        if not report.passed:
            print(f"error: {len(report.failures)} mismatch(es)", file=sys.stderr)
            return EXIT_COMPUTE
        print(f"verified: {report.checked} values match the oracle")
        return 0
    if args.outdir is None:
        raise CommandError(EXIT_USAGE, "--outdir is required")
    try:
        spec = SynthSpec(
            n_train=args.n_train,
            n_eval_in=args.n_eval_in,
            n_eval_ood=args.n_eval_ood,
            epochs=args.epochs,
            seed=args.seed if args.seed is not None else 0,
            planted_slope=args.planted_slope,
            noise_scale=args.noise_scale,
            vocabulary_size=args.vocabulary_size,
            ood_slope=args.ood_slope,
        )
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc))
    try:
        paths = generate(spec, args.outdir)
    except ValueError as exc:
        raise CommandError(EXIT_USAGE, str(exc))
    except OSError as exc:
        raise CommandError(EXIT_WRITE, str(exc))
    for path in (paths.dataset, paths.predictions, paths.oracle):
        print(f"wrote {path}")
    return 0


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", help="merged dataset JSONL")
    parser.add_argument("--train", help="train-role dataset JSONL")
    parser.add_argument("--eval-in", dest="eval_in", help="in-distribution eval dataset JSONL")
    parser.add_argument("--eval-ood", dest="eval_ood", help="OOD eval dataset JSONL")
    parser.add_argument(
        "--predictions", action="append", help="prediction log JSONL (repeatable)"
    )
    parser.add_argument("--config", help="JSON file supplying any flag value")


def _add_region_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau-v", dest="tau_v", type=float, help="variability threshold")
    parser.add_argument("--tau-mu", dest="tau_mu", type=float, help="confidence threshold")


def build_parser() -> _Parser:
    parser = _Parser(prog="cartolex", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", metavar="subcommand", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("validate", help="check inputs against every invariant")
    _add_input_flags(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dynamics", help="write the cartography CSV")
    _add_input_flags(p)
    _add_region_flags(p)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("heuristics", help="write the overlap annotation CSV")
    _add_input_flags(p)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_heuristics)

    p = sub.add_parser("correlate", help="write the correlation CSV")
    _add_input_flags(p)
    _add_region_flags(p)
    p.add_argument("--measures", help="comma-separated subset of m1,m2 (default m2)")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("map", help="render cartography maps")
    _add_input_flags(p)
    _add_region_flags(p)
    p.add_argument("--outdir", help="output directory")
    p.add_argument("--epochs-to-map", dest="epochs_to_map", help="comma-separated epochs (default 2,8)")
    p.add_argument("--sample-fraction", dest="sample_fraction", type=float, help="fraction of points to draw")
    p.add_argument("--seed", type=int, help="subsampling seed")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("report", help="full pipeline: CSVs, SVGs, manifest")
    _add_input_flags(p)
    _add_region_flags(p)
    p.add_argument("--measures", help="comma-separated subset of m1,m2 (default m2)")
    p.add_argument("--outdir", help="output directory")
    p.add_argument("--epochs-to-map", dest="epochs_to_map", help="comma-separated epochs (default 2,8)")
    p.add_argument("--sample-fraction", dest="sample_fraction", type=float, help="fraction of points to draw")
    p.add_argument("--seed", type=int, help="subsampling seed")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate a planted corpus, or verify outputs")
    p.add_argument("--outdir", help="directory for dataset/predictions/oracle files")
    p.add_argument("--n-train", dest="n_train", type=int, default=0)
    p.add_argument("--n-eval-in", dest="n_eval_in", type=int, default=0)
    p.add_argument("--n-eval-ood", dest="n_eval_ood", type=int, default=0)
    p.add_argument("--epochs", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--planted-slope", dest="planted_slope", type=float, default=0.5)
    p.add_argument("--noise-scale", dest="noise_scale", type=float, default=0.0)
    p.add_argument("--vocabulary-size", dest="vocabulary_size", type=int, default=50)
    p.add_argument("--ood-slope", dest="ood_slope", type=float, default=None)
    p.add_argument(
        "--verify",
        nargs=2,
        metavar=("ORACLE", "OUTPUT_DIR"),
        help="compare pipeline outputs in OUTPUT_DIR against ORACLE instead of generating",
    )
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST


if __name__ == "__main__":
    sys.exit(main())
