"""Tests for summary statistics, lag embedding and the chronological split"""

import numpy as np
import pytest

from config.presets import PUBLISHED_SPLIT_STATS
from models.data_models import SupervisedDataset, TimeSeries
from models.errors import ConfigurationError, InsufficientDataError
from processors.dataset_builder import chrono_split, lag_embed, split_statistics, summary_stats
from processors.series_loader import load_csv
from utils.synthetic import gen_synthetic


def test_fixture_reproduces_published_statistics(fixture_path):
    stats = split_statistics(load_csv(fixture_path), lag=10, ratio=0.70)

    assert {name: row.count for name, row in stats.items()} == {"all": 245, "train": 171, "test": 74}
    everything = stats["all"]
    assert everything.max == 73141
    assert everything.min == 70
    assert everything.median == 3131
    assert abs(everything.mean - 9427) <= 0.5
    assert abs(everything.std - 13249.01) <= 0.01
    for name in ("train", "test"):
        assert stats[name].max == PUBLISHED_SPLIT_STATS[name]["max"]
        assert stats[name].min == PUBLISHED_SPLIT_STATS[name]["min"]
        assert abs(stats[name].mean - PUBLISHED_SPLIT_STATS[name]["mean"]) <= 0.5


def test_summary_of_constant_values():
    stats = summary_stats([5, 5, 5])
    assert stats.max == stats.min == stats.mean == stats.median == 5
    assert stats.std == 0


def test_summary_uses_sample_std_and_midpoint_median():
    stats = summary_stats([1, 2, 3, 4])
    assert stats.mean == 2.5
    assert stats.median == 2.5
    assert stats.std == pytest.approx(1.2909944487358056, abs=1e-12)


def test_summary_matches_brute_force():
    rng = np.random.default_rng(0)
    for _ in range(100):
        values = rng.normal(size=rng.integers(1, 40)) * 100
        ordered = sorted(values)
        n = len(ordered)
        median = ordered[n // 2] if n % 2 else (ordered[n // 2 - 1] + ordered[n // 2]) / 2
        mean = sum(values) / n
        std = (sum((v - mean) ** 2 for v in values) / (n - 1)) ** 0.5 if n > 1 else 0.0

        stats = summary_stats(values)
        assert stats.median == pytest.approx(median, abs=1e-9)
        assert stats.mean == pytest.approx(mean, abs=1e-9)
        assert stats.std == pytest.approx(std, abs=1e-9)


def test_summary_rejects_empty_input():
    with pytest.raises(InsufficientDataError):
        summary_stats([])


def test_lag_embed_orders_most_recent_first():
    data = lag_embed(TimeSeries("2000-01", [1, 2, 3]), lag=1)
    np.testing.assert_array_equal(data.features, [[1], [2]])
    np.testing.assert_array_equal(data.targets, [2, 3])

    data = lag_embed(TimeSeries("2000-01", [1, 2, 3, 4]), lag=2)
    np.testing.assert_array_equal(data.features, [[2, 1], [3, 2]])
    np.testing.assert_array_equal(data.timestamps, [2, 3])


def test_lag_embed_row_count_identity(fixture_path):
    series = load_csv(fixture_path)
    for lag in range(1, 11):
        assert lag_embed(series, lag).n_rows + lag == len(series)
    assert lag_embed(series, 10).features.shape == (245, 10)


def test_lag_embed_minimal_and_invalid():
    series = gen_synthetic(30)
    assert lag_embed(series.head(11), 10).n_rows == 1
    with pytest.raises(InsufficientDataError):
        lag_embed(series.head(10), 10)
    with pytest.raises(ConfigurationError):
        lag_embed(series, 0)


def _dataset(n_rows):
    return SupervisedDataset(
        features=np.arange(n_rows, dtype=float).reshape(-1, 1),
        targets=np.arange(n_rows, dtype=float) + 1,
        lag=1,
        timestamps=np.arange(1, n_rows + 1),
    )


def test_chrono_split_sizes():
    assert len(chrono_split(_dataset(245), 0.70).train) == 171
    full = chrono_split(_dataset(10), 1.0)
    assert (len(full.train), len(full.test)) == (10, 0)


def test_chrono_split_preserves_order():
    data = _dataset(10)
    split = chrono_split(data, 0.5)
    assert (len(split.train), len(split.test)) == (5, 5)
    assert split.train.timestamps.max() < split.test.timestamps.min()
    np.testing.assert_array_equal(
        np.concatenate([split.train.targets, split.test.targets]), data.targets
    )


def test_chrono_split_rejects_bad_ratio():
    with pytest.raises(ConfigurationError):
        chrono_split(_dataset(10), 0.0)
    with pytest.raises(ConfigurationError):
        chrono_split(_dataset(10), 1.5)
