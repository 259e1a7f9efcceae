"""
Loess
Locally weighted least squares with tricube distance weights
"""

from typing import Optional

import numpy as np

from models.data_models import LoessConfig
from models.errors import (
    ConfigurationError,
    DegenerateSystemError,
    DimensionMismatchError,
    InsufficientDataError,
)


def tricube(distance: np.ndarray, max_distance: float) -> np.ndarray:
    """(1 - (d/d_max)^3)^3, zero at and beyond d_max"""
    u = np.clip(np.asarray(distance, dtype=float) / max_distance, 0.0, 1.0)
    return (1.0 - u ** 3) ** 3


def _local_fit(xc: np.ndarray, y: np.ndarray, w: np.ndarray, degree: int) -> float:
    """Value at xc = 0 of the weighted fit; local linear falls back to constant when singular"""
    s0 = np.sum(w)
    t0 = np.sum(w * y)
    if degree == 0:
        return t0 / s0
    s1 = np.sum(w * xc)
    s2 = np.sum(w * xc * xc)
    t1 = np.sum(w * xc * y)
    det = s0 * s2 - s1 * s1
    if s2 <= 0 or det <= 1e-12 * s0 * s2:
        return t0 / s0
    return (s2 * t0 - s1 * t1) / det


def loess_smooth(
    x: np.ndarray,
    y: np.ndarray,
    config: LoessConfig,
    eval_points: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Loess fit evaluated at arbitrary ordinates

    Each evaluation uses the `span` nearest points (ties: lower index first),
    tricube weights scaled by the farthest of them, times the robustness
    weights when given. Windows truncate at the data ends.

    Args:
        x: strictly increasing ordinates
        y: values at x
        config: span, degree and optional robustness weights
        eval_points: where to evaluate (defaults to x)

    Returns:
        Fitted values at eval_points

    Raises:
        InsufficientDataError: span exceeds the number of points
        DegenerateSystemError: every weight in a window is zero
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    eval_points = x if eval_points is None else np.atleast_1d(np.asarray(eval_points, dtype=float))
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionMismatchError(f"x {x.shape} and y {y.shape} must be equal-length vectors")
    if config.span > len(x):
        raise InsufficientDataError(f"loess span {config.span} exceeds data length {len(x)}")
    if np.any(np.diff(x) <= 0):
        raise ConfigurationError("loess ordinates must be strictly increasing")

    robustness = np.ones_like(y) if config.weights is None else config.weights
    if robustness.shape != y.shape:
        raise DimensionMismatchError(
            f"robustness weights {robustness.shape} do not match data {y.shape}"
        )

    fitted = np.empty(len(eval_points))
    for i, x0 in enumerate(eval_points):
        distance = np.abs(x - x0)
        window = np.sort(np.argsort(distance, kind="stable")[: config.span])
        d_max = distance[window].max()
        weights = tricube(distance[window], d_max) if d_max > 0 else np.ones(len(window))
        weights = weights * robustness[window]
        if not np.any(weights > 0):
            raise DegenerateSystemError(f"all loess weights are zero around x={x0}")
        fitted[i] = _local_fit(x[window] - x0, y[window], weights, config.degree)
    return fitted
