"""
Synthetic series generators for fixtures and property checks
"""

import numpy as np

from models.data_models import TimeSeries
from models.errors import ConfigurationError, InsufficientDataError


def gen_synthetic(
    n: int,
    period: int = 12,
    trend_slope: float = 0.0,
    seasonal_amplitude: float = 1.0,
    noise_std: float = 0.0,
    seed: int = 0,
    start: str = "2000-01",
) -> TimeSeries:
    """
    y(t) = trend_slope*t + seasonal_amplitude*sin(2*pi*t/period) + N(0, noise_std)

    Deterministic for a fixed seed; t starts at 0.
    """
    if n <= 0 or period <= 0:
        raise ConfigurationError(f"n and period must be positive, got n={n}, period={period}")
    if n <= 2 * period:
        raise InsufficientDataError(f"n must exceed two periods ({2 * period}), got {n}")
    if noise_std < 0:
        raise ConfigurationError(f"noise_std must be >= 0, got {noise_std}")
    t = np.arange(n, dtype=float)
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, noise_std, n) if noise_std > 0 else np.zeros(n)
    values = trend_slope * t + seasonal_amplitude * np.sin(2 * np.pi * t / period) + noise
    return TimeSeries(start, values, period, name="synthetic")


def gen_autoregressive(
    n: int,
    phi: float,
    intercept: float = 0.0,
    noise_std: float = 1.0,
    seed: int = 0,
    initial: float = 1.0,
    period: int = 12,
    start: str = "2000-01",
) -> TimeSeries:
    """AR(1): y(t) = intercept + phi*y(t-1) + N(0, noise_std)"""
    if n <= 0:
        raise ConfigurationError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    shocks = rng.normal(0.0, noise_std, n) if noise_std > 0 else np.zeros(n)
    values = np.empty(n)
    values[0] = initial
    for t in range(1, n):
        values[t] = intercept + phi * values[t - 1] + shocks[t]
    return TimeSeries(start, values, period, name="autoregressive")
