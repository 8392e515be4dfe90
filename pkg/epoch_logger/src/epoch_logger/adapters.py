"""Glue between a training loop and a LoggerSession.

The only assumption is that the loop can produce, once per epoch, class
probabilities for every session sample. Anything shaped like
`predict(ids) -> {id: {class: prob}}` plugs in directly.
"""

from __future__ import annotations

from typing import Callable, Mapping

from .session import LoggerSession

PredictFn = Callable[[tuple[str, ...]], Mapping[str, Mapping[str, float]]]


class EpochCallback:
    """Call after each epoch; pulls a fresh probability table and logs it.

    Designed to be handed to trainer hook APIs that expect a zero-argument
    callable, e.g. `on_epoch_end=EpochCallback(session, predict)`.
    """

    def __init__(self, session: LoggerSession, predict: PredictFn):
        self._session = session
        self._predict = predict

    def __call__(self) -> int:
        table = self._predict(self._session.sample_ids)
        return self._session.log_epoch(table)


def run_epochs(session: LoggerSession, predict: PredictFn, epochs: int) -> int:
    """Log `epochs` consecutive epochs from a static predictor; returns the
    final epoch number. Useful for replaying stored checkpoints."""
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    callback = EpochCallback(session, predict)
    for _ in range(epochs):
        last = callback()
    return last
