"""End-to-end demo: make a synthetic corpus, run the full report, check
every computed number against the oracle the generator wrote down.

Each CLI invocation is printed before it runs, so the transcript doubles
as usage documentation.

    python3 scripts/run_demo.py demo_out/
"""

import argparse
import subprocess
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from cartolex.synth import SynthSpec, generate, verify


def sh(*args):
    cmd = [sys.executable, "-m", "cartolex", *[str(a) for a in args]]
    print("$", " ".join(cmd[2:]))
    result = subprocess.run(cmd, capture_output=True, text=True)
    if result.stdout:
        print(result.stdout, end="")
    if result.returncode != 0:
        print(result.stderr, end="", file=sys.stderr)
        sys.exit(result.returncode)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir", type=Path, nargs="?", default=Path("demo_out"))
    ap.add_argument("--n-train", type=int, default=400)
    ap.add_argument("--n-eval", type=int, default=100)
    ap.add_argument("--epochs", type=int, default=6)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--noise-scale", type=float, default=0.0)
    args = ap.parse_args()

    datadir = args.outdir / "data"
    reportdir = args.outdir / "report"
    datadir.mkdir(parents=True, exist_ok=True)

    spec = SynthSpec(
        n_train=args.n_train,
        n_eval_in=args.n_eval,
        n_eval_ood=args.n_eval,
        epochs=args.epochs,
        seed=args.seed,
        noise_scale=args.noise_scale,
    )
    paths = generate(spec, datadir)
    print(f"generated {paths.dataset} and {paths.predictions}")

    sh("validate", "--dataset", paths.dataset, "--predictions", paths.predictions)
    sh(
        "report",
        "--dataset", paths.dataset,
        "--predictions", paths.predictions,
        "--outdir", reportdir,
        "--measures", "m1,m2",
        "--epochs-to-map", f"2,{args.epochs}" if args.epochs > 2 else str(args.epochs),
    )

    report = verify(paths.oracle, reportdir)
    if report.passed:
        print(f"verified: {report.checked} values match the oracle")
    else:
        print(f"verify FAILED at: {report.first_divergence()}", file=sys.stderr)
        sys.exit(3)

    print(f"\nreport files in {reportdir}:")
    for path in sorted(reportdir.iterdir()):
        print(f"  {path.name}  ({path.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
