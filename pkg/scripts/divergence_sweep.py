"""Sweep the planted OOD slope and watch the overlap/confidence
correlation split between strata at the final epoch.

With ood_slope below zero the generator ties high overlap to LOW final
confidence on OOD entailment samples while the in-distribution strata
keep the positive relationship, so the final-epoch gap
|rho_ood - rho_in_dist| traces how strongly the pattern was planted.

    python3 scripts/divergence_sweep.py
"""

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cartolex.correlation import ClassFilter, Measure, Stratum, correlation_at_epoch
from cartolex.dynamics import RegionConfig, all_snapshots
from cartolex.heuristics import annotate_corpus
from cartolex.ingest import load_corpus
from cartolex.synth import SynthSpec, generate


def final_epoch_rhos(spec, workdir):
    paths = generate(spec, workdir)
    corpus = load_corpus(dataset=paths.dataset, predictions=paths.predictions)
    annotations = annotate_corpus(corpus).by_id
    final = all_snapshots(corpus, RegionConfig())[-1]
    rhos = {}
    for stratum in (Stratum.TRAIN, Stratum.EVAL_IN_DISTRIBUTION, Stratum.EVAL_OOD):
        pt = correlation_at_epoch(
            corpus, annotations, final, stratum, ClassFilter.ENTAILMENT, Measure.M2
        )
        rhos[stratum] = pt.rho
    return rhos


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=300, help="samples per stratum")
    ap.add_argument("--epochs", type=int, default=8)
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--noise-scale", type=float, default=0.0)
    ap.add_argument(
        "--ood-slopes", type=float, nargs="+",
        default=[0.5, 0.25, 0.0, -0.25, -0.5],
    )
    args = ap.parse_args()

    print(f"{'ood_slope':>9}  {'rho_train':>9}  {'rho_in':>9}  {'rho_ood':>9}  {'gap':>6}")
    for ood_slope in args.ood_slopes:
        spec = SynthSpec(
            n_train=args.n,
            n_eval_in=args.n,
            n_eval_ood=args.n,
            epochs=args.epochs,
            seed=args.seed,
            noise_scale=args.noise_scale,
            planted_slope=0.5,
            ood_slope=ood_slope,
        )
        with tempfile.TemporaryDirectory() as tmp:
            rhos = final_epoch_rhos(spec, Path(tmp))
        fmt = lambda r: "  (undef)" if r is None else f"{r:9.4f}"
        in_dist = rhos[Stratum.EVAL_IN_DISTRIBUTION]
        ood = rhos[Stratum.EVAL_OOD]
        gap = abs(ood - in_dist) if None not in (in_dist, ood) else float("nan")
        print(
            f"{ood_slope:9.2f}  {fmt(rhos[Stratum.TRAIN])}  {fmt(in_dist)}"
            f"  {fmt(ood)}  {gap:6.3f}"
        )


if __name__ == "__main__":
    main()
