"""Tests for loess and the STL decomposition"""

from dataclasses import replace

import numpy as np
import pytest

from models.data_models import LoessConfig, StlConfig, TimeSeries
from models.errors import (
    ConfigurationError,
    DegenerateSystemError,
    DimensionMismatchError,
    InsufficientDataError,
)
from processors.decomposer import bisquare_weights, recompose, stl_decompose
from processors.loess import loess_smooth, tricube
from processors.series_loader import load_csv
from utils.synthetic import gen_synthetic

NO_ROBUSTNESS = StlConfig.for_period(12, outer_iterations=0)


def _weighted_line_at(x, y, w, x0):
    """Normal equations of weighted least squares for a + b*(x - x0)"""
    xc = x - x0
    normal = np.array([[w.sum(), w @ xc], [w @ xc, w @ (xc * xc)]])
    rhs = np.array([w @ y, w @ (xc * y)])
    return np.linalg.solve(normal, rhs)[0]


def test_tricube_endpoints():
    assert tricube(np.array([0.0]), 2.0)[0] == 1.0
    assert tricube(np.array([2.0]), 2.0)[0] == 0.0
    assert tricube(np.array([1.0]), 2.0)[0] == pytest.approx(0.669921875)


def test_loess_reproduces_a_line():
    x = np.arange(15, dtype=float)
    y = 2 * x + 1
    for span in (3, 7, 15):
        fitted = loess_smooth(x, y, LoessConfig(span, degree=1))
        np.testing.assert_allclose(fitted, y, atol=1e-10)


def test_loess_matches_normal_equations_for_a_parabola():
    x = np.arange(7, dtype=float)
    y = x ** 2
    fitted = loess_smooth(x, y, LoessConfig(5, degree=1), eval_points=np.array([3.0]))

    window = np.arange(1, 6)
    weights = tricube(np.abs(x[window] - 3.0), 2.0)
    assert fitted[0] == pytest.approx(_weighted_line_at(x[window], y[window], weights, 3.0), abs=1e-12)


def test_full_width_loess_is_weighted_least_squares():
    rng = np.random.default_rng(5)
    x = np.arange(9, dtype=float)
    y = rng.normal(size=9)
    robustness = rng.uniform(0.2, 1.0, size=9)
    fitted = loess_smooth(x, y, LoessConfig(9, degree=1, weights=robustness), eval_points=np.array([4.0]))

    weights = tricube(np.abs(x - 4.0), 4.0) * robustness
    assert fitted[0] == pytest.approx(_weighted_line_at(x, y, weights, 4.0), abs=1e-12)


def test_loess_errors():
    x = np.arange(5, dtype=float)
    with pytest.raises(InsufficientDataError):
        loess_smooth(x, x, LoessConfig(7))
    with pytest.raises(ConfigurationError):
        loess_smooth(x[::-1], x, LoessConfig(3))
    with pytest.raises(DegenerateSystemError):
        loess_smooth(x, x, LoessConfig(3, weights=np.zeros(5)))
    with pytest.raises(ConfigurationError):
        LoessConfig(4)


def test_bisquare_weights():
    np.testing.assert_array_equal(bisquare_weights(np.zeros(4)), np.ones(4))
    weights = bisquare_weights(np.array([1.0, -1.0, 1.0, 100.0]))
    np.testing.assert_allclose(weights[:3], (1 - 1 / 36) ** 2)
    assert weights[3] == 0.0


def test_constant_series():
    c = 250.0
    parts = stl_decompose(TimeSeries("2000-01", np.full(60, c)))
    tolerance = 1e-8 * c + 1e-8
    np.testing.assert_allclose(parts.trend.values, c, atol=tolerance)
    np.testing.assert_allclose(parts.seasonal.values, 0.0, atol=tolerance)
    np.testing.assert_allclose(parts.remainder.values, 0.0, atol=tolerance)


def test_pure_seasonal_pattern_is_recovered():
    series = gen_synthetic(120, seasonal_amplitude=3.0)
    parts = stl_decompose(series.with_values(series.values + 7.0))
    np.testing.assert_allclose(parts.seasonal.values, series.values, atol=1e-8)
    np.testing.assert_allclose(parts.trend.values, 7.0, atol=1e-8)


def test_trend_plus_season_leaves_small_remainder():
    series = gen_synthetic(240, trend_slope=0.1, seasonal_amplitude=1.0)
    parts = stl_decompose(series)
    interior = slice(12, -12)
    rms_remainder = np.sqrt(np.mean(parts.remainder.values[interior] ** 2))
    rms_seasonal = np.sqrt(np.mean(parts.seasonal.values[interior] ** 2))
    assert rms_remainder < 0.05 * rms_seasonal


def test_additivity_on_fixture_and_random_series(fixture_path):
    series = [load_csv(fixture_path)]
    rng = np.random.default_rng(1)
    for seed in range(50):
        synthetic = gen_synthetic(
            int(rng.integers(25, 150)),
            trend_slope=float(rng.normal()),
            seasonal_amplitude=float(rng.uniform(0, 5)),
            noise_std=float(rng.uniform(0, 2)),
            seed=seed,
        )
        series.append(synthetic)
    for y in series:
        parts = stl_decompose(y)
        gap = np.max(np.abs(y.values - (parts.seasonal.values + parts.trend.values + parts.remainder.values)))
        assert gap < 1e-9 * np.max(np.abs(y.values))


def test_components_share_the_source_calendar(seasonal_series):
    parts = stl_decompose(seasonal_series)
    for name in ("seasonal", "trend", "remainder"):
        component = parts.component(name)
        assert len(component) == len(seasonal_series)
        assert component.start == seasonal_series.start
    assert list(parts.to_frame().columns) == ["observed", "seasonal", "trend", "remainder"]


def test_shift_equivariance(seasonal_series):
    shifted = seasonal_series.with_values(seasonal_series.values + 1000.0)
    base = stl_decompose(seasonal_series, NO_ROBUSTNESS)
    moved = stl_decompose(shifted, NO_ROBUSTNESS)
    np.testing.assert_allclose(moved.trend.values, base.trend.values + 1000.0, atol=1e-8)
    np.testing.assert_allclose(moved.seasonal.values, base.seasonal.values, atol=1e-8)
    np.testing.assert_allclose(moved.remainder.values, base.remainder.values, atol=1e-8)


def test_scale_equivariance(seasonal_series):
    scaled = seasonal_series.with_values(seasonal_series.values * 3.5)
    base = stl_decompose(seasonal_series, NO_ROBUSTNESS)
    stretched = stl_decompose(scaled, NO_ROBUSTNESS)
    for name in ("seasonal", "trend", "remainder"):
        np.testing.assert_allclose(
            stretched.component(name).values, 3.5 * base.component(name).values, atol=1e-8
        )


def test_non_periodic_seasonal_span(seasonal_series):
    config = StlConfig.for_period(12, seasonal_span=7)
    parts = stl_decompose(seasonal_series, config)
    assert parts.config.trend_span == 23
    np.testing.assert_allclose(recompose(parts).values, seasonal_series.values, atol=1e-12)


@pytest.mark.parametrize("seasonal_span", [None, 7, 11])
def test_seasonal_cycles_have_zero_mean(seasonal_span):
    series = gen_synthetic(240, trend_slope=0.08, seasonal_amplitude=2.5, noise_std=0.8, seed=11)
    config = StlConfig.for_period(12, seasonal_span=seasonal_span, outer_iterations=0)
    parts = stl_decompose(series, config)
    cycle_means = parts.seasonal.values.reshape(20, 12).mean(axis=1)
    assert np.max(np.abs(cycle_means)) <= 1e-6 * np.std(series.values)
    np.testing.assert_allclose(recompose(parts).values, series.values, atol=1e-10)


def test_partial_last_cycle_keeps_additivity(seasonal_series):
    trimmed = seasonal_series.head(115)
    parts = stl_decompose(trimmed, StlConfig.for_period(12, seasonal_span=7, outer_iterations=0))
    cycle_means = parts.seasonal.values[:108].reshape(9, 12).mean(axis=1)
    assert np.max(np.abs(cycle_means)) <= 1e-6 * np.std(trimmed.values)
    np.testing.assert_allclose(recompose(parts).values, trimmed.values, atol=1e-10)


def test_too_short_series():
    with pytest.raises(InsufficientDataError):
        stl_decompose(TimeSeries("2000-01", np.arange(23, dtype=float)))


def test_invalid_spans():
    with pytest.raises(ConfigurationError):
        StlConfig(trend_span=11)
    with pytest.raises(ConfigurationError):
        StlConfig(seasonal_span=8)


def test_recompose_identity(fixture_path):
    series = load_csv(fixture_path)
    total = recompose(stl_decompose(series))
    np.testing.assert_allclose(total.values, series.values, rtol=0, atol=1e-12 * series.values.max())


def test_recompose_zero_components_returns_remainder(seasonal_series):
    parts = stl_decompose(seasonal_series)
    zeros = seasonal_series.with_values(np.zeros(len(seasonal_series)))
    only_remainder = replace(parts, seasonal=zeros, trend=zeros, remainder=seasonal_series)
    np.testing.assert_array_equal(recompose(only_remainder).values, seasonal_series.values)


def test_recompose_rejects_misaligned_components(seasonal_series):
    parts = stl_decompose(seasonal_series)
    with pytest.raises(DimensionMismatchError):
        recompose(replace(parts, trend=parts.trend.head(10)))
