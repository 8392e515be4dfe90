"""Round-trip acceptance for the logger: files written by a toy training
run must be accepted, without edits, by the analysis CLI.

The CLI is driven as a subprocess on purpose; the logger's only contract
with the analysis side is the pair of JSONL files.
"""

import contextlib
import csv
import json
import subprocess
import sys

import pytest

from epoch_logger import begin_session, run_epochs

from logger_fixtures import ToyClassifier, toy_rows


@contextlib.contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "cartolex", *[str(a) for a in args]],
        capture_output=True, text=True,
    )


@pytest.fixture(scope="module")
def logged_run(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("toyrun")
    rows = toy_rows(20)
    session = begin_session(rows, outdir / "dataset.jsonl", outdir / "predictions.jsonl")
    run_epochs(session, ToyClassifier(rows).predict, 3)
    session.close()
    return outdir


def test_logger_round_trip(logged_run):
    with criterion(
        "logger round-trip: 20-sample 3-epoch toy run passes validate and report"
    ):
        result = run_cli(
            "validate",
            "--dataset", logged_run / "dataset.jsonl",
            "--predictions", logged_run / "predictions.jsonl",
        )
        assert result.returncode == 0, result.stderr
        assert "violation" not in result.stderr
        assert result.stdout.strip() == "ok: 20 samples, 20 trajectories, max epoch 3"

        report_dir = logged_run / "report"
        result = run_cli(
            "report",
            "--dataset", logged_run / "dataset.jsonl",
            "--predictions", logged_run / "predictions.jsonl",
            "--outdir", report_dir,
        )
        assert result.returncode == 0, result.stderr

        with (report_dir / "cartography.csv").open(newline="") as fh:
            carto = list(csv.DictReader(fh))
        # one snapshot per sample per epoch
        assert len(carto) == 20 * 3
        assert len({r["sample_id"] for r in carto}) == 20
        assert {r["epoch"] for r in carto} == {"1", "2", "3"}
        assert all(0.0 <= float(r["confidence"]) <= 1.0 for r in carto)

        with (report_dir / "annotations.csv").open(newline="") as fh:
            annotated = list(csv.DictReader(fh))
        assert sorted(r["sample_id"] for r in annotated) == sorted(
            r["id"] for r in (
                json.loads(line)
                for line in (logged_run / "dataset.jsonl").read_text().splitlines()
            )
        )

        assert (report_dir / "correlations.csv").exists()
        manifest = json.loads((report_dir / "manifest.json").read_text())
        assert set(manifest["outputs"]) >= {
            "cartography.csv", "annotations.csv", "correlations.csv",
        }


def test_logged_files_load_with_dense_epochs(logged_run):
    records = [
        json.loads(line)
        for line in (logged_run / "predictions.jsonl").read_text().splitlines()
    ]
    per_sample = {}
    for r in records:
        per_sample.setdefault(r["sample_id"], []).append(r["epoch"])
    assert len(per_sample) == 20
    assert all(sorted(epochs) == [1, 2, 3] for epochs in per_sample.values())
    assert all(0.0 <= r["p_true"] <= 1.0 for r in records)
