"""Shared builders for the logger tests: a small mixed corpus and a
deterministic toy classifier that needs no ML stack."""

import math
import random

from epoch_logger import DatasetRow

THREE_WAY = ("entailment", "neutral", "contradiction")


def toy_rows(n=20):
    """n samples across train / eval in-dist / eval ood with cycling
    3-way gold labels; texts vary so overlap-based features differ."""
    fillers = ["cats", "sleep", "on", "warm", "rugs", "dogs", "chase", "red", "balls"]
    rows = []
    for i in range(n):
        if i < n * 3 // 5:
            split, dist, prefix = "train", "in_distribution", "tr"
        elif i < n * 4 // 5:
            split, dist, prefix = "eval", "in_distribution", "ev"
        else:
            split, dist, prefix = "eval", "ood", "od"
        words = [fillers[(i + j) % len(fillers)] for j in range(5)]
        rows.append(
            DatasetRow(
                id=f"{prefix}-{i:03d}",
                premise=" ".join(words).capitalize() + ".",
                hypothesis=" ".join(words[: 2 + i % 3]).capitalize() + ".",
                gold_label=THREE_WAY[i % 3],
                split=split,
                distribution=dist,
            )
        )
    return rows


class ToyClassifier:
    """Fake 3-way classifier that gradually 'learns' its gold labels.

    Probabilities come from a seeded hash of (sample, epoch), tilted
    toward the gold class by an amount that grows each epoch, then
    normalized. Same seed, same tables, every run.
    """

    def __init__(self, rows, seed=7):
        self._gold = {r.id: r.gold_label for r in rows}
        self._seed = seed
        self._epoch = 0

    def predict(self, ids):
        self._epoch += 1
        table = {}
        for sid in ids:
            rng = random.Random(f"{self._seed}:{sid}:{self._epoch}")
            scores = {cls: rng.uniform(0.1, 1.0) for cls in THREE_WAY}
            scores[self._gold[sid]] += 0.6 * self._epoch
            z = sum(math.exp(s) for s in scores.values())
            table[sid] = {cls: math.exp(s) / z for cls, s in scores.items()}
        return table
