"""Write training-dynamics logs in the JSONL formats the analysis CLI reads."""

from .adapters import EpochCallback, PredictFn, run_epochs
from .session import (
    DEFAULT_LABEL_MAP,
    DatasetRow,
    LoggerError,
    LoggerSession,
    begin_session,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_LABEL_MAP",
    "DatasetRow",
    "EpochCallback",
    "LoggerError",
    "LoggerSession",
    "PredictFn",
    "begin_session",
    "run_epochs",
]
