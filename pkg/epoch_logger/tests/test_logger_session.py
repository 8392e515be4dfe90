import json

import pytest

from epoch_logger import DatasetRow, LoggerError, begin_session


def read_lines(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def simple_rows():
    return [
        DatasetRow("a", "The judge was paid by the actor.", "The actor paid the judge.",
                   "entailment"),
        DatasetRow("b", "Dogs bark loudly.", "Cats meow.", "neutral",
                   split="eval", distribution="in_distribution"),
        DatasetRow("c", "Rain fell all day.", "Rain fell.", "contradiction",
                   split="eval", distribution="ood"),
    ]


def uniform_table(ids):
    third = 1.0 / 3.0
    return {
        sid: {"entailment": third, "neutral": third, "contradiction": third}
        for sid in ids
    }


class TestBeginSession:
    def test_three_samples_three_lines(self, tmp_path):
        s = begin_session(simple_rows(), tmp_path / "d.jsonl", tmp_path / "p.jsonl")
        s.close()
        lines = (tmp_path / "d.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(lines) == 3

    def test_canonical_line_format(self, tmp_path):
        s = begin_session(simple_rows(), tmp_path / "d.jsonl", tmp_path / "p.jsonl")
        s.close()
        first = (tmp_path / "d.jsonl").read_text(encoding="utf-8").splitlines()[0]
        assert first == (
            '{"id":"a","premise":"The judge was paid by the actor.",'
            '"hypothesis":"The actor paid the judge.",'
            '"gold_label":"entailment","split":"train",'
            '"distribution":"in_distribution"}'
        )

    def test_predictions_file_starts_empty(self, tmp_path):
        s = begin_session(simple_rows(), tmp_path / "d.jsonl", tmp_path / "p.jsonl")
        s.close()
        assert (tmp_path / "p.jsonl").read_text(encoding="utf-8") == ""

    def test_three_way_labels_collapse_in_written_file(self, tmp_path):
        s = begin_session(simple_rows(), tmp_path / "d.jsonl", tmp_path / "p.jsonl")
        s.close()
        golds = [r["gold_label"] for r in read_lines(tmp_path / "d.jsonl")]
        assert golds == ["entailment", "non_entailment", "non_entailment"]

    def test_binary_labels_pass_through(self, tmp_path):
        rows = [DatasetRow("a", "P.", "H.", "non_entailment")]
        s = begin_session(rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl")
        s.close()
        assert read_lines(tmp_path / "d.jsonl")[0]["gold_label"] == "non_entailment"

    def test_duplicate_id_errors_before_any_write(self, tmp_path):
        rows = simple_rows() + [DatasetRow("a", "Again.", "Again.", "entailment")]
        with pytest.raises(LoggerError, match="duplicate sample id 'a'"):
            begin_session(rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl")
        assert not (tmp_path / "d.jsonl").exists()
        assert not (tmp_path / "p.jsonl").exists()

    def test_unmappable_label_errors_before_any_write(self, tmp_path):
        rows = [DatasetRow("a", "P.", "H.", "maybe")]
        with pytest.raises(LoggerError, match="'maybe' not in the label map"):
            begin_session(rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl")
        assert not (tmp_path / "d.jsonl").exists()

    def test_custom_label_map(self, tmp_path):
        rows = [DatasetRow("a", "P.", "H.", "yes"), DatasetRow("b", "P.", "H.", "no")]
        s = begin_session(
            rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl",
            label_map={"yes": "entailment", "no": "non_entailment"},
        )
        s.close()
        golds = [r["gold_label"] for r in read_lines(tmp_path / "d.jsonl")]
        assert golds == ["entailment", "non_entailment"]

    def test_label_map_to_non_binary_target_rejected(self, tmp_path):
        rows = [DatasetRow("a", "P.", "H.", "yes")]
        with pytest.raises(LoggerError, match="not a binary label"):
            begin_session(rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl",
                          label_map={"yes": "affirmed"})

    def test_empty_premise_rejected(self, tmp_path):
        rows = [DatasetRow("a", "   ", "H.", "entailment")]
        with pytest.raises(LoggerError, match="premise is empty"):
            begin_session(rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl")

    def test_train_ood_rejected(self, tmp_path):
        rows = [DatasetRow("a", "P.", "H.", "entailment", distribution="ood")]
        with pytest.raises(LoggerError, match="must be in_distribution"):
            begin_session(rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl")

    def test_unknown_split_rejected(self, tmp_path):
        rows = [DatasetRow("a", "P.", "H.", "entailment", split="test")]
        with pytest.raises(LoggerError, match="unknown split"):
            begin_session(rows, tmp_path / "d.jsonl", tmp_path / "p.jsonl")


class TestLogEpoch:
    def make(self, tmp_path):
        return begin_session(simple_rows(), tmp_path / "d.jsonl", tmp_path / "p.jsonl")

    def test_first_call_writes_epoch_one(self, tmp_path):
        s = self.make(tmp_path)
        s.log_epoch(uniform_table(s.sample_ids))
        s.close()
        records = read_lines(tmp_path / "p.jsonl")
        assert [r["epoch"] for r in records] == [1, 1, 1]
        assert [r["sample_id"] for r in records] == ["a", "b", "c"]

    def test_two_calls_write_epochs_one_then_two(self, tmp_path):
        s = self.make(tmp_path)
        s.log_epoch(uniform_table(s.sample_ids))
        s.log_epoch(uniform_table(s.sample_ids))
        s.close()
        epochs = [r["epoch"] for r in read_lines(tmp_path / "p.jsonl")]
        assert epochs == [1, 1, 1, 2, 2, 2]

    def test_epoch_counter_strictly_increases(self, tmp_path):
        s = self.make(tmp_path)
        seen = [s.log_epoch(uniform_table(s.sample_ids)) for _ in range(4)]
        s.close()
        assert seen == [1, 2, 3, 4]

    def test_p_true_is_collapsed_gold_mass(self, tmp_path):
        s = self.make(tmp_path)
        table = {
            "a": {"entailment": 0.7, "neutral": 0.2, "contradiction": 0.1},
            "b": {"entailment": 0.2, "neutral": 0.3, "contradiction": 0.5},
            "c": {"entailment": 0.1, "neutral": 0.4, "contradiction": 0.5},
        }
        s.log_epoch(table)
        s.close()
        p = {r["sample_id"]: r["p_true"] for r in read_lines(tmp_path / "p.jsonl")}
        assert p["a"] == pytest.approx(0.7)
        # b and c are non_entailment: neutral and contradiction mass pools
        assert p["b"] == pytest.approx(0.8)
        assert p["c"] == pytest.approx(0.9)

    def test_missing_id_errors_naming_it_and_writes_nothing(self, tmp_path):
        s = self.make(tmp_path)
        s.log_epoch(uniform_table(s.sample_ids))
        before = (tmp_path / "p.jsonl").read_bytes()
        partial = uniform_table(("a", "c"))
        with pytest.raises(LoggerError, match="missing sample 'b'"):
            s.log_epoch(partial)
        s.close()
        assert (tmp_path / "p.jsonl").read_bytes() == before
        assert s.epoch == 1

    def test_unknown_id_errors_and_writes_nothing(self, tmp_path):
        s = self.make(tmp_path)
        table = uniform_table(s.sample_ids + ("ghost",))
        with pytest.raises(LoggerError, match="unknown sample 'ghost'"):
            s.log_epoch(table)
        s.close()
        assert (tmp_path / "p.jsonl").read_text(encoding="utf-8") == ""

    def test_probability_out_of_range_errors_and_writes_nothing(self, tmp_path):
        s = self.make(tmp_path)
        table = uniform_table(s.sample_ids)
        table["b"] = {"entailment": 1.2, "neutral": -0.1, "contradiction": -0.1}
        with pytest.raises(LoggerError, match="outside \\[0, 1\\]"):
            s.log_epoch(table)
        s.close()
        assert (tmp_path / "p.jsonl").read_text(encoding="utf-8") == ""

    def test_bad_probability_sum_rejected(self, tmp_path):
        s = self.make(tmp_path)
        table = uniform_table(s.sample_ids)
        table["c"] = {"entailment": 0.5, "neutral": 0.4, "contradiction": 0.4}
        with pytest.raises(LoggerError, match="sum to"):
            s.log_epoch(table)
        s.close()

    def test_sum_tolerance_absorbs_float_noise(self, tmp_path):
        s = self.make(tmp_path)
        third = 1.0 / 3.0
        table = {
            sid: {"entailment": third, "neutral": third, "contradiction": third + 5e-7}
            for sid in s.sample_ids
        }
        assert s.log_epoch(table) == 1
        s.close()

    def test_unknown_class_rejected(self, tmp_path):
        s = self.make(tmp_path)
        table = {sid: {"entailment": 0.5, "maybe": 0.5} for sid in s.sample_ids}
        with pytest.raises(LoggerError, match="'maybe' not in the label map"):
            s.log_epoch(table)
        s.close()

    def test_closed_session_rejects_logging(self, tmp_path):
        s = self.make(tmp_path)
        s.close()
        with pytest.raises(LoggerError, match="closed"):
            s.log_epoch(uniform_table(("a", "b", "c")))

    def test_context_manager_closes(self, tmp_path):
        with self.make(tmp_path) as s:
            s.log_epoch(uniform_table(s.sample_ids))
        with pytest.raises(LoggerError, match="closed"):
            s.log_epoch(uniform_table(("a", "b", "c")))
