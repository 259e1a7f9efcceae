"""Tests for RRMSE, R² and the Diebold-Mariano test"""

import numpy as np
import pandas as pd
import pytest
from scipy import stats

from models.data_models import REPORT_COLUMNS, ForecastResult
from models.errors import (
    ConfigurationError,
    DegenerateVarianceError,
    ForecastError,
    InsufficientDataError,
    MisalignedResultsError,
)
from processors.evaluator import build_report, dm_test, r_squared, rrmse


def _dm_from_scratch(e1, e2, h):
    n = len(e1)
    d = [e1[i] ** 2 - e2[i] ** 2 for i in range(n)]
    mean = sum(d) / n
    gamma = []
    for k in range(h):
        total = 0.0
        for i in range(k, n):
            total += (d[i] - mean) * (d[i - k] - mean)
        gamma.append(total / n)
    variance = gamma[0] + 2 * sum(gamma[1:])
    statistic = mean / (variance / n) ** 0.5
    return statistic, 2 * (1 - stats.norm.cdf(abs(statistic)))


def _result(name, observed, forecast, horizon=1, offset=0):
    timestamps = np.arange(offset, offset + len(observed))
    return ForecastResult(
        name=name,
        horizon=horizon,
        start=pd.Period("2000-01", freq="M"),
        timestamps=timestamps,
        recomposed=np.asarray(forecast, dtype=float),
        components={},
        observed=np.asarray(observed, dtype=float),
    )


def test_rrmse_hand_example():
    assert rrmse([2.0, 2.0], [3.0, 1.0]) == pytest.approx(0.5)
    assert rrmse([5.0, 7.0, 9.0], [5.0, 7.0, 9.0]) == 0.0


def test_rrmse_is_scale_invariant():
    rng = np.random.default_rng(0)
    y = rng.uniform(10, 20, size=30)
    y_hat = y + rng.normal(size=30)
    assert rrmse(7.5 * y, 7.5 * y_hat) == pytest.approx(rrmse(y, y_hat), rel=1e-12)


def test_rrmse_zero_mean_is_rejected():
    with pytest.raises(ForecastError):
        rrmse([1.0, -1.0], [0.0, 0.0])


def test_r_squared_reference_points():
    y = np.array([1.0, 4.0, 2.0, 8.0])
    assert r_squared(y, y) == 1.0
    assert r_squared(y, np.full(4, y.mean())) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(ForecastError):
        r_squared([3.0, 3.0, 3.0], [1.0, 2.0, 3.0])


def test_metrics_match_direct_formulas():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        n = int(rng.integers(2, 40))
        y = rng.uniform(1, 100, size=n)
        y_hat = y + rng.normal(scale=10, size=n)
        expected_rrmse = np.sqrt(np.mean((y - y_hat) ** 2)) / np.mean(y)
        expected_r2 = 1 - np.sum((y - y_hat) ** 2) / np.sum((y - np.mean(y)) ** 2)
        assert rrmse(y, y_hat) == pytest.approx(expected_rrmse, abs=1e-12)
        assert r_squared(y, y_hat) == pytest.approx(expected_r2, abs=1e-12)


def test_metric_lengths_must_match():
    with pytest.raises(ForecastError):
        rrmse([1.0, 2.0], [1.0])


def test_dm_identical_errors_have_degenerate_variance():
    errors = np.random.default_rng(2).normal(size=30)
    with pytest.raises(DegenerateVarianceError):
        dm_test(errors, errors)


def test_dm_matches_scratch_computation():
    rng = np.random.default_rng(3)
    for horizon in (1, 2):
        e1 = rng.normal(size=74)
        e2 = rng.normal(scale=1.2, size=74)
        statistic, p_value = _dm_from_scratch(e1, e2, horizon)
        result = dm_test(e1, e2, horizon)
        assert result.statistic == pytest.approx(statistic, abs=1e-9)
        assert result.p_value == pytest.approx(p_value, abs=1e-9)
        assert result.horizon == horizon
        assert result.loss == "squared"


def test_dm_is_antisymmetric():
    rng = np.random.default_rng(4)
    e1, e2 = rng.normal(size=50), rng.normal(size=50)
    forward, backward = dm_test(e1, e2, 2), dm_test(e2, e1, 2)
    assert forward.statistic == pytest.approx(-backward.statistic, rel=1e-12)
    assert forward.p_value == pytest.approx(backward.p_value, rel=1e-12)


def test_dm_sign_favours_the_smaller_errors():
    rng = np.random.default_rng(5)
    small = rng.normal(scale=0.5, size=80)
    large = rng.normal(scale=3.0, size=80)
    result = dm_test(small, large)
    assert result.statistic < 0
    assert result.p_value < 0.01


def test_dm_needs_ten_pairs_and_positive_horizon():
    with pytest.raises(InsufficientDataError):
        dm_test(np.ones(9), np.zeros(9))
    with pytest.raises(ConfigurationError):
        dm_test(np.arange(12.0), np.zeros(12), horizon=0)


def test_dm_small_sample_correction():
    rng = np.random.default_rng(6)
    e1, e2 = rng.normal(size=40), rng.normal(scale=1.3, size=40)
    plain = dm_test(e1, e2, 2)
    corrected = dm_test(e1, e2, 2, harvey_correction=True)
    factor = np.sqrt((40 + 1 - 4 + 2 / 40) / 40)
    assert corrected.statistic == pytest.approx(plain.statistic * factor, rel=1e-12)
    assert corrected.p_value == pytest.approx(2 * stats.t.sf(abs(corrected.statistic), df=39), rel=1e-12)
    assert corrected.harvey_correction


@pytest.mark.slow
def test_dm_size_under_the_null():
    rng = np.random.default_rng(7)
    rejections = 0
    draws = 2000
    for _ in range(draws):
        result = dm_test(rng.normal(size=200), rng.normal(size=200))
        rejections += result.p_value < 0.05
    assert 0.03 <= rejections / draws <= 0.07


def test_report_with_a_single_model_has_no_dm():
    report = build_report([("only", _result("only", [1, 2, 3, 4], [1, 2, 3, 5]))], "only")
    assert report.row("only").dm is None
    frame = report.to_frame()
    assert list(frame.columns) == list(REPORT_COLUMNS)
    assert np.isnan(frame.loc[0, "dm_vs_baseline"])


def test_report_runs_dm_against_the_baseline_only():
    rng = np.random.default_rng(8)
    observed = rng.uniform(50, 100, size=30)
    results = [
        ("base", _result("base", observed, observed + rng.normal(size=30))),
        ("other", _result("other", observed, observed + rng.normal(scale=2, size=30))),
        ("third", _result("third", observed, observed + rng.normal(scale=3, size=30))),
    ]
    report = build_report(results, "base", references={"other": {"rrmse": 0.1}})
    assert report.row("base").dm is None
    assert [row.name for row in report.dm_rows] == ["other", "third"]
    expected = dm_test(results[0][1].errors, results[1][1].errors)
    assert report.row("other").dm.statistic == expected.statistic
    frame = report.to_frame().set_index("model")
    assert frame.loc["other", "paper_rrmse"] == 0.1
    assert np.isnan(frame.loc["third", "paper_rrmse"])


def test_report_rejects_misaligned_results():
    observed = np.arange(1.0, 21.0)
    shifted = [("a", _result("a", observed, observed + 1)), ("b", _result("b", observed, observed, offset=1))]
    with pytest.raises(MisalignedResultsError):
        build_report(shifted, "a")
    other_horizon = [("a", _result("a", observed, observed + 1)), ("b", _result("b", observed, observed, horizon=2))]
    with pytest.raises(MisalignedResultsError):
        build_report(other_horizon, "a")


def test_report_baseline_must_be_present():
    observed = np.arange(1.0, 21.0)
    with pytest.raises(ConfigurationError):
        build_report([("a", _result("a", observed, observed))], "missing")
