"""
Data models for the fire-spot forecaster
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from models.errors import ConfigurationError, DimensionMismatchError, InsufficientDataError


def frozen_array(values, ndim: int = 1) -> np.ndarray:
    """Copies values into a read-only float array of the given rank"""
    array = np.array(values, dtype=float)
    if array.ndim != ndim:
        raise DimensionMismatchError(f"expected a {ndim}-D array, got shape {array.shape}")
    array.setflags(write=False)
    return array


def as_month(value) -> pd.Period:
    """Normalizes '1998-06', (1998, 6) or a Period into a monthly Period"""
    if isinstance(value, tuple):
        year, month = value
        return pd.Period(year=int(year), month=int(month), freq="M")
    return pd.Period(value, freq="M")


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Gap-free monthly series; observation i falls on start + i months"""
    start: pd.Period
    values: np.ndarray
    period: int = 12
    name: str = "fire_spots"

    def __post_init__(self):
        object.__setattr__(self, "start", as_month(self.start))
        object.__setattr__(self, "values", frozen_array(self.values))
        if len(self.values) < 1:
            raise InsufficientDataError("time series needs at least one observation")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("time series contains missing or non-finite values")
        if self.period < 2:
            raise ConfigurationError(f"period must be >= 2, got {self.period}")

    def __len__(self) -> int:
        return len(self.values)

    def month_at(self, position: int) -> pd.Period:
        return self.start + int(position)

    @property
    def months(self) -> pd.PeriodIndex:
        return pd.period_range(self.start, periods=len(self), freq="M")

    def with_values(self, values, name: Optional[str] = None) -> "TimeSeries":
        """Same calendar, new values"""
        return TimeSeries(self.start, values, self.period, name or self.name)

    def head(self, length: int) -> "TimeSeries":
        return self.with_values(self.values[:length])


@dataclass(frozen=True)
class SummaryStats:
    """Table-1 style statistical indicators"""
    count: int
    max: float
    min: float
    mean: float
    median: float
    std: float


@dataclass(frozen=True, eq=False)
class SupervisedDataset:
    """
    Lag-embedded rows: features[i] = [y(t-1), ..., y(t-lag)] for target y(t)

    timestamps hold t as a month offset from `start`.
    """
    features: np.ndarray
    targets: np.ndarray
    lag: int
    timestamps: np.ndarray
    start: pd.Period = field(default_factory=lambda: pd.Period("2000-01", freq="M"))

    def __post_init__(self):
        object.__setattr__(self, "features", frozen_array(self.features, ndim=2))
        object.__setattr__(self, "targets", frozen_array(self.targets))
        timestamps = np.array(self.timestamps, dtype=int)
        timestamps.setflags(write=False)
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "start", as_month(self.start))
        n_rows = len(self.targets)
        if self.features.shape[0] != n_rows or len(self.timestamps) != n_rows:
            raise DimensionMismatchError(
                f"features {self.features.shape}, targets {n_rows} and "
                f"timestamps {len(self.timestamps)} disagree"
            )
        if self.lag < 1:
            raise ConfigurationError(f"lag must be >= 1, got {self.lag}")

    def __len__(self) -> int:
        return len(self.targets)

    @property
    def n_rows(self) -> int:
        return len(self.targets)

    @property
    def months(self) -> pd.PeriodIndex:
        return pd.PeriodIndex([self.start + int(t) for t in self.timestamps], freq="M")

    def subset(self, rows) -> "SupervisedDataset":
        rows = np.asarray(rows, dtype=int)
        return SupervisedDataset(
            features=self.features[rows].reshape(len(rows), self.features.shape[1]),
            targets=self.targets[rows],
            lag=self.lag,
            timestamps=self.timestamps[rows],
            start=self.start,
        )


@dataclass(frozen=True)
class ChronoSplit:
    """Chronological train/test split of a supervised dataset"""
    train: SupervisedDataset
    test: SupervisedDataset
    ratio: float


@dataclass(frozen=True, eq=False)
class LoessConfig:
    """Loess window: span in points, local degree, optional robustness weights"""
    span: int
    degree: int = 1
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.span < 3 or self.span % 2 == 0:
            raise ConfigurationError(f"loess span must be an odd integer >= 3, got {self.span}")
        if self.degree not in (0, 1):
            raise ConfigurationError(f"loess degree must be 0 or 1, got {self.degree}")
        if self.weights is not None:
            object.__setattr__(self, "weights", frozen_array(self.weights))


def smallest_odd_at_least(value: float) -> int:
    result = int(math.ceil(value))
    return result if result % 2 == 1 else result + 1


@dataclass(frozen=True)
class StlConfig:
    """
    STL parameters

    seasonal_span=None selects periodic mode: every cycle-subseries is
    smoothed to its (weighted) mean.
    """
    period: int = 12
    seasonal_span: Optional[int] = None
    trend_span: int = 19
    lowpass_span: int = 13
    inner_iterations: int = 2
    outer_iterations: int = 1

    def __post_init__(self):
        if self.period < 2:
            raise ConfigurationError(f"period must be >= 2, got {self.period}")
        spans = {"trend_span": self.trend_span, "lowpass_span": self.lowpass_span}
        if self.seasonal_span is not None:
            spans["seasonal_span"] = self.seasonal_span
        for key, span in spans.items():
            if span < 3 or span % 2 == 0:
                raise ConfigurationError(f"{key} must be an odd integer >= 3, got {span}")
        if self.trend_span < self.period:
            raise ConfigurationError(
                f"trend_span ({self.trend_span}) must be >= period ({self.period})"
            )
        if self.inner_iterations < 0 or self.outer_iterations < 0:
            raise ConfigurationError("iteration counts must be nonnegative")

    @classmethod
    def for_period(
        cls,
        period: int = 12,
        seasonal_span: Optional[int] = None,
        inner_iterations: int = 2,
        outer_iterations: int = 1,
    ) -> "StlConfig":
        """Standard STL defaults for trend and low-pass spans"""
        if seasonal_span is not None and seasonal_span < 3:
            raise ConfigurationError(f"seasonal_span must be >= 3, got {seasonal_span}")
        damping = 0.0 if seasonal_span is None else 1.5 / seasonal_span
        trend_span = smallest_odd_at_least(1.5 * period / (1.0 - damping))
        return cls(
            period=period,
            seasonal_span=seasonal_span,
            trend_span=trend_span,
            lowpass_span=smallest_odd_at_least(period),
            inner_iterations=inner_iterations,
            outer_iterations=outer_iterations,
        )

    @property
    def is_periodic(self) -> bool:
        return self.seasonal_span is None


@dataclass(frozen=True)
class DecomposedSeries:
    """Seasonal, trend and remainder components of one series"""
    seasonal: TimeSeries
    trend: TimeSeries
    remainder: TimeSeries
    config: Optional[StlConfig] = None
    observed: Optional[TimeSeries] = None

    def component(self, name: str) -> TimeSeries:
        return getattr(self, name)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {
                "seasonal": self.seasonal.values,
                "trend": self.trend.values,
                "remainder": self.remainder.values,
            },
            index=self.seasonal.months,
        )
        if self.observed is not None:
            frame.insert(0, "observed", self.observed.values)
        frame.index.name = "month"
        return frame


@dataclass(frozen=True)
class TimeSliceConfig:
    """Rolling-origin validation windows"""
    initial_window: int = 120
    horizon: int = 1
    growing: bool = True
    step: int = 1

    def __post_init__(self):
        if self.initial_window < 1 or self.horizon < 1 or self.step < 1:
            raise ConfigurationError(
                "initial_window, horizon and step must all be >= 1, got "
                f"{self.initial_window}, {self.horizon}, {self.step}"
            )


@dataclass(frozen=True, eq=False)
class ForecastResult:
    """Recomposed forecasts plus the per-component breakdown"""
    name: str
    horizon: int
    start: pd.Period
    timestamps: np.ndarray
    recomposed: np.ndarray
    components: Dict[str, np.ndarray]
    observed: np.ndarray
    test_start: Optional[int] = None

    @property
    def months(self) -> pd.PeriodIndex:
        return pd.PeriodIndex([self.start + int(t) for t in self.timestamps], freq="M")

    @property
    def errors(self) -> np.ndarray:
        return self.observed - self.recomposed

    def __len__(self) -> int:
        return len(self.timestamps)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(
            {"observed": self.observed, "forecast": self.recomposed},
            index=self.months,
        )
        for component, values in self.components.items():
            frame[component] = values
        if self.test_start is not None:
            frame["split"] = np.where(self.timestamps >= self.test_start, "test", "train")
        frame.index.name = "month"
        return frame


@dataclass(frozen=True)
class MetricPair:
    rrmse: float
    r_squared: float


@dataclass(frozen=True)
class DmResult:
    """Diebold-Mariano outcome; negative statistic favours the first model"""
    statistic: float
    p_value: float
    horizon: int
    loss: str = "squared"
    harvey_correction: bool = False


@dataclass(frozen=True)
class ModelScore:
    """One report row"""
    name: str
    horizon: int
    metrics: MetricPair
    dm: Optional[DmResult] = None
    dm_error: Optional[str] = None
    reference: Dict[str, float] = field(default_factory=dict)


REPORT_COLUMNS = (
    "model", "horizon", "rrmse", "r2", "dm_vs_baseline", "p_value",
    "paper_rrmse", "paper_r2", "paper_dm", "paper_p_value",
)


@dataclass(frozen=True)
class EvaluationReport:
    """Metrics for a set of models on one horizon, DM against a baseline"""
    horizon: int
    baseline_name: str
    rows: Tuple[ModelScore, ...]

    def row(self, name: str) -> ModelScore:
        for score in self.rows:
            if score.name == name:
                return score
        raise KeyError(name)

    @property
    def dm_rows(self) -> Tuple[ModelScore, ...]:
        return tuple(score for score in self.rows if score.name != self.baseline_name)

    def to_frame(self) -> pd.DataFrame:
        records = []
        for score in self.rows:
            records.append({
                "model": score.name,
                "horizon": score.horizon,
                "rrmse": score.metrics.rrmse,
                "r2": score.metrics.r_squared,
                "dm_vs_baseline": score.dm.statistic if score.dm else np.nan,
                "p_value": score.dm.p_value if score.dm else np.nan,
                "paper_rrmse": score.reference.get("rrmse", np.nan),
                "paper_r2": score.reference.get("r2", np.nan),
                "paper_dm": score.reference.get("dm", np.nan),
                "paper_p_value": score.reference.get("p_value", np.nan),
            })
        return pd.DataFrame.from_records(records, columns=list(REPORT_COLUMNS))
