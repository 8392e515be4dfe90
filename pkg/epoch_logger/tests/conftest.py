import pytest

from epoch_logger import begin_session

from logger_fixtures import toy_rows


@pytest.fixture
def rows():
    return toy_rows(20)


@pytest.fixture
def session(rows, tmp_path):
    s = begin_session(rows, tmp_path / "dataset.jsonl", tmp_path / "predictions.jsonl")
    yield s
    s.close()
