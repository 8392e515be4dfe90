"""Reference fine-tuning loop wired to epoch_logger.

Fine-tunes a RoBERTa sequence classifier on a premise/hypothesis dataset
and logs per-epoch p_true for every sample. Requires torch and
transformers; the importable parts of the package never do, so this
script lives outside it and is not exercised by the test suite.

Input: a JSON file holding a list of objects with keys premise,
hypothesis, gold_label (entailment / neutral / contradiction /
non_entailment), and optionally split and distribution.

Usage:
    python3 finetune_reference.py data.json outdir/ --epochs 6
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

try:
    import torch
    from torch.utils.data import DataLoader
    from transformers import (
        AutoModelForSequenceClassification,
        AutoTokenizer,
    )
except ImportError as exc:
    sys.exit(f"this script needs torch and transformers installed: {exc}")

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from epoch_logger import DatasetRow, begin_session

CLASSES = ("entailment", "neutral", "contradiction")


def load_rows(path: Path) -> list[DatasetRow]:
    raw = json.loads(path.read_text(encoding="utf-8"))
    rows = []
    for i, obj in enumerate(raw):
        rows.append(
            DatasetRow(
                id=obj.get("id", f"sample-{i:05d}"),
                premise=obj["premise"],
                hypothesis=obj["hypothesis"],
                gold_label=obj["gold_label"],
                split=obj.get("split", "train"),
                distribution=obj.get("distribution", "in_distribution"),
            )
        )
    return rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("data", type=Path)
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--model", default="roberta-base")
    ap.add_argument("--epochs", type=int, default=6)
    ap.add_argument("--batch-size", type=int, default=20)
    ap.add_argument("--learning-rate", type=float, default=1.1e-5)
    ap.add_argument("--max-length", type=int, default=128)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    torch.manual_seed(args.seed)
    device = "cuda" if torch.cuda.is_available() else "cpu"

    rows = load_rows(args.data)
    args.outdir.mkdir(parents=True, exist_ok=True)
    session = begin_session(
        rows,
        args.outdir / "dataset.jsonl",
        args.outdir / "predictions.jsonl",
    )

    tokenizer = AutoTokenizer.from_pretrained(args.model)
    model = AutoModelForSequenceClassification.from_pretrained(
        args.model, num_labels=len(CLASSES)
    ).to(device)
    optimizer = torch.optim.AdamW(model.parameters(), lr=args.learning_rate)

    label_index = {c: i for i, c in enumerate(CLASSES)}
    # binary non_entailment gold trains as neutral; p_true still collapses
    # over both non-entailed classes at logging time
    label_index["non_entailment"] = label_index["neutral"]

    def encode(batch: list[DatasetRow]) -> dict:
        enc = tokenizer(
            [r.premise for r in batch],
            [r.hypothesis for r in batch],
            truncation=True,
            max_length=args.max_length,
            padding=True,
            return_tensors="pt",
        )
        enc["labels"] = torch.tensor([label_index[r.gold_label] for r in batch])
        return {k: v.to(device) for k, v in enc.items()}

    train_rows = [r for r in rows if r.split == "train"]
    loader = DataLoader(
        train_rows, batch_size=args.batch_size, shuffle=True, collate_fn=list
    )

    @torch.no_grad()
    def predict(ids: tuple[str, ...]) -> dict[str, dict[str, float]]:
        model.eval()
        by_id = {r.id: r for r in rows}
        table = {}
        ordered = [by_id[i] for i in ids]
        for start in range(0, len(ordered), args.batch_size):
            batch = ordered[start : start + args.batch_size]
            enc = encode(batch)
            enc.pop("labels")
            probs = torch.softmax(model(**enc).logits, dim=-1).cpu()
            for row, p in zip(batch, probs):
                table[row.id] = {c: float(p[i]) for i, c in enumerate(CLASSES)}
        model.train()
        return table

    for _ in range(args.epochs):
        model.train()
        for batch in loader:
            optimizer.zero_grad()
            loss = model(**encode(batch)).loss
            loss.backward()
            optimizer.step()
        epoch = session.log_epoch(predict(session.sample_ids))
        print(f"epoch {epoch} logged ({len(rows)} samples)")

    session.close()
    print(f"wrote {args.outdir / 'dataset.jsonl'} and {args.outdir / 'predictions.jsonl'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
