"""
STL Decomposer
Seasonal-trend decomposition based on loess, and its inverse
"""

import logging
from typing import Optional

import numpy as np

from models.data_models import DecomposedSeries, LoessConfig, StlConfig, TimeSeries
from models.errors import DimensionMismatchError, ForecastError, InsufficientDataError
from processors.loess import loess_smooth

logger = logging.getLogger(__name__)


def _fit_span(span: int, length: int) -> int:
    """Largest odd span not exceeding the data length"""
    if span <= length:
        return span
    return length if length % 2 == 1 else length - 1


def _moving_average(values: np.ndarray, width: int) -> np.ndarray:
    return np.convolve(values, np.ones(width) / width, mode="valid")


def bisquare_weights(remainder: np.ndarray) -> np.ndarray:
    """Robustness weights (1 - (r/h)^2)^2 with h = 6 * median|r|"""
    magnitude = np.abs(remainder)
    h = 6.0 * np.median(magnitude)
    if h <= 0:
        return np.ones_like(remainder)
    u = magnitude / h
    return np.where(u < 1.0, (1.0 - u ** 2) ** 2, 0.0)


def _cycle_subseries(detrended: np.ndarray, weights: np.ndarray, config: StlConfig) -> np.ndarray:
    """
    Smooths each cycle-subseries and extends it by one cycle at both ends

    Returns an array of length n + 2*period aligned so that index i + period
    corresponds to observation i.
    """
    n, period = len(detrended), config.period
    extended = np.empty(n + 2 * period)
    for phase in range(period):
        positions = np.arange(phase, n, period)
        subseries = detrended[positions]
        sub_weights = weights[positions]
        m = len(subseries)
        span = None if config.is_periodic else _fit_span(config.seasonal_span, m)
        if span is None or span < 3:
            total = sub_weights.sum()
            level = (sub_weights @ subseries) / total if total > 0 else subseries.mean()
            smoothed = np.full(m + 2, level)
        else:
            smoothed = loess_smooth(
                np.arange(m, dtype=float),
                subseries,
                LoessConfig(span, degree=1, weights=sub_weights),
                np.arange(-1, m + 1, dtype=float),
            )
        extended[phase + np.arange(m + 2) * period] = smoothed
    return extended


def _inner_loop(
    y: np.ndarray,
    trend: np.ndarray,
    weights: np.ndarray,
    config: StlConfig,
) -> tuple:
    n, period = len(y), config.period
    time = np.arange(n, dtype=float)

    cycle = _cycle_subseries(y - trend, weights, config)
    low_pass = _moving_average(_moving_average(_moving_average(cycle, period), period), 3)
    low_pass = loess_smooth(time, low_pass, LoessConfig(_fit_span(config.lowpass_span, n), degree=1))
    seasonal = cycle[period:period + n] - low_pass

    trend = loess_smooth(
        time,
        y - seasonal,
        LoessConfig(_fit_span(config.trend_span, n), degree=1, weights=weights),
    )
    return seasonal, trend


def _centre_cycles(seasonal: np.ndarray, trend: np.ndarray, period: int) -> tuple:
    """
    Moves the mean of every full cycle from the seasonal component into the
    trend; months past the last full cycle take that cycle's offset
    """
    cycles = len(seasonal) // period
    offsets = seasonal[:cycles * period].reshape(cycles, period).mean(axis=1)
    shift = np.repeat(offsets, period)
    shift = np.concatenate([shift, np.full(len(seasonal) - len(shift), offsets[-1])])
    return seasonal - shift, trend + shift


def stl_decompose(series: TimeSeries, config: Optional[StlConfig] = None) -> DecomposedSeries:
    """
    Splits a series into seasonal, trend and remainder

    Runs the inner loop `inner_iterations` times with unit weights, then
    repeats it `outer_iterations` times with bisquare robustness weights
    computed from the current remainder. Each full cycle of the seasonal
    component is then re-centred on zero, its offset moving into the trend.
    The remainder is y - S - T.

    Raises:
        InsufficientDataError: fewer than two full cycles
    """
    config = config or StlConfig.for_period(series.period)
    y = series.values
    n = len(y)
    if n < 2 * config.period:
        raise InsufficientDataError(
            f"STL needs at least {2 * config.period} observations, got {n}"
        )
    logger.debug(f"STL: n={n}, {config}")

    seasonal = np.zeros(n)
    trend = np.zeros(n)
    weights = np.ones(n)
    for outer_pass in range(config.outer_iterations + 1):
        for _ in range(config.inner_iterations):
            seasonal, trend = _inner_loop(y, trend, weights, config)
        if outer_pass < config.outer_iterations:
            weights = bisquare_weights(y - seasonal - trend)

    seasonal, trend = _centre_cycles(seasonal, trend, config.period)
    remainder = y - seasonal - trend
    gap = np.max(np.abs(y - (seasonal + trend + remainder)))
    if gap > 1e-9 * max(1.0, np.max(np.abs(y))):
        raise ForecastError(f"decomposition is not additive (max gap {gap:g})", stage="decompose")

    return DecomposedSeries(
        seasonal=series.with_values(seasonal, name="seasonal"),
        trend=series.with_values(trend, name="trend"),
        remainder=series.with_values(remainder, name="remainder"),
        config=config,
        observed=series,
    )


def recompose(parts: DecomposedSeries) -> TimeSeries:
    """Pointwise seasonal + trend + remainder"""
    seasonal, trend, remainder = parts.seasonal, parts.trend, parts.remainder
    if not len(seasonal) == len(trend) == len(remainder):
        raise DimensionMismatchError(
            f"component lengths differ: {len(seasonal)}, {len(trend)}, {len(remainder)}"
        )
    if not seasonal.start == trend.start == remainder.start:
        raise DimensionMismatchError("components start in different months")
    total = seasonal.values + trend.values + remainder.values
    name = parts.observed.name if parts.observed is not None else "recomposed"
    return seasonal.with_values(total, name=name)
