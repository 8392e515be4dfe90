import math

import pytest
from hypothesis import given, settings, strategies as st

from cartolex.dynamics import (
    CARTOGRAPHY_COLUMNS,
    Region,
    RegionConfig,
    all_snapshots,
    classify_region,
    snapshot_epoch,
    trajectory_stats,
    update_trajectory,
    write_cartography_csv,
)
from cartolex.heuristics import annotate_corpus

from corpus_fixtures import batch_mean_std, make_corpus, make_sample

probabilities = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
trajectories = st.lists(probabilities, min_size=1, max_size=40)


class TestUpdateTrajectory:
    def test_single_epoch(self):
        stats = update_trajectory(None, 0.7, sample_id="a")
        assert (stats.epoch, stats.confidence, stats.variability) == (1, 0.7, 0.0)

    def test_two_epochs_frozen(self):
        # mean of [0.2, 0.8] is 0.5; population std is 0.3 exactly
        stats = trajectory_stats("a", [0.2, 0.8])
        assert stats.confidence == pytest.approx(0.5, abs=1e-12)
        assert stats.variability == pytest.approx(0.3, abs=1e-12)

    def test_three_epochs_frozen(self):
        # two-pass oracle value for [0.5, 0.7, 0.9], frozen:
        # mean 0.7, sqrt(((0.2)^2 + 0 + (0.2)^2) / 3)
        stats = trajectory_stats("a", [0.5, 0.7, 0.9])
        assert stats.confidence == pytest.approx(0.7, abs=1e-12)
        assert stats.variability == pytest.approx(0.16329931618554522, abs=1e-12)

    def test_requires_sample_id_at_start(self):
        with pytest.raises(ValueError, match="sample_id"):
            update_trajectory(None, 0.5)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            update_trajectory(None, 1.2, sample_id="a")

    @given(trajectories)
    def test_matches_two_pass_oracle_at_every_prefix(self, values):
        stats = None
        for e, p in enumerate(values, start=1):
            stats = update_trajectory(stats, p, sample_id="a")
            mean, std = batch_mean_std(values[:e])
            assert stats.epoch == e
            assert abs(stats.confidence - mean) < 1e-9
            assert abs(stats.variability - std) < 1e-9

    @given(trajectories)
    def test_bounds(self, values):
        stats = trajectory_stats("a", values)
        assert 0.0 <= stats.confidence <= 1.0
        assert 0.0 <= stats.variability <= 0.5

    @given(probabilities, st.integers(min_value=1, max_value=30))
    def test_constant_trajectory_has_zero_variability(self, p, length):
        stats = trajectory_stats("a", [p] * length)
        assert stats.variability == 0.0
        assert stats.confidence == pytest.approx(p, abs=1e-12)


class TestRegions:
    def test_defaults(self):
        config = RegionConfig()
        assert (config.tau_v, config.tau_mu) == (0.25, 0.5)

    def test_partition_cases(self):
        config = RegionConfig()
        assert classify_region(0.9, 0.05, config) is Region.EASY_TO_LEARN
        assert classify_region(0.1, 0.05, config) is Region.HARD_TO_LEARN
        assert classify_region(0.9, 0.4, config) is Region.AMBIGUOUS

    def test_ambiguity_decided_first(self):
        # a high-confidence high-variability point is ambiguous, not easy
        config = RegionConfig()
        assert classify_region(0.99, 0.25, config) is Region.AMBIGUOUS
        assert classify_region(0.5, 0.25, config) is Region.AMBIGUOUS

    def test_threshold_edges(self):
        config = RegionConfig()
        assert classify_region(0.5, 0.2499999, config) is Region.EASY_TO_LEARN
        assert classify_region(0.4999999, 0.2, config) is Region.HARD_TO_LEARN

    def test_invalid_thresholds(self):
        with pytest.raises(ValueError):
            RegionConfig(tau_v=0.0)
        with pytest.raises(ValueError):
            RegionConfig(tau_mu=1.0)

    @given(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        st.floats(min_value=0.0, max_value=0.5, allow_nan=False),
    )
    def test_every_point_gets_exactly_one_region(self, confidence, variability):
        region = classify_region(confidence, variability, RegionConfig())
        assert region in (Region.EASY_TO_LEARN, Region.HARD_TO_LEARN, Region.AMBIGUOUS)


class TestSnapshots:
    def test_snapshot_carries_sample_metadata(self, tiny_corpus):
        annotations = annotate_corpus(tiny_corpus).by_id
        points = snapshot_epoch(tiny_corpus, 3, RegionConfig(), annotations)
        by_id = {pt.sample_id: pt for pt in points}
        assert by_id["s1"].heuristic_tag == "support"
        assert by_id["s3"].heuristic_tag == "contradict"
        assert by_id["s2"].heuristic_tag == "none"
        assert by_id["s3"].confidence == pytest.approx(0.4, abs=1e-12)
        assert by_id["s3"].variability == 0.0

    def test_epoch_out_of_range(self, tiny_corpus):
        with pytest.raises(ValueError, match="epoch"):
            snapshot_epoch(tiny_corpus, 4, RegionConfig())

    def test_all_snapshots_equal_individual_snapshots(self, tiny_corpus):
        config = RegionConfig()
        annotations = annotate_corpus(tiny_corpus).by_id
        swept = all_snapshots(tiny_corpus, config, annotations)
        for epoch in range(1, tiny_corpus.max_epoch + 1):
            assert swept[epoch - 1] == snapshot_epoch(tiny_corpus, epoch, config, annotations)

    @settings(max_examples=25)
    @given(st.lists(trajectories, min_size=1, max_size=5))
    def test_sweep_is_bit_identical_to_prefix_folds(self, trajs):
        length = min(len(t) for t in trajs)
        samples = [make_sample(f"s{i}") for i in range(len(trajs))]
        corpus = make_corpus(samples, {f"s{i}": t[:length] for i, t in enumerate(trajs)})
        config = RegionConfig()
        swept = all_snapshots(corpus, config)
        for epoch in range(1, length + 1):
            assert swept[epoch - 1] == snapshot_epoch(corpus, epoch, config)

    def test_missing_annotation_falls_back_to_none(self, tiny_corpus):
        points = snapshot_epoch(tiny_corpus, 1, RegionConfig(), annotations={})
        assert {pt.heuristic_tag for pt in points} == {"none"}


class TestCartographyCsv:
    def test_header_and_formatting(self, tmp_path, tiny_corpus):
        annotations = annotate_corpus(tiny_corpus).by_id
        snapshots = all_snapshots(tiny_corpus, RegionConfig(), annotations)
        out = tmp_path / "carto.csv"
        write_cartography_csv(snapshots, out)
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(CARTOGRAPHY_COLUMNS)
        # one row per sample per epoch, epoch-major
        assert len(lines) == 1 + 3 * 3
        first = lines[1].split(",")
        assert first[0] == "s1"
        assert first[4] == "0.500000000"
