"""
Dataset Builder
Summary statistics, lag embedding and chronological splitting
"""

import logging
import math
from typing import Dict, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from models.data_models import ChronoSplit, SummaryStats, SupervisedDataset, TimeSeries
from models.errors import ConfigurationError, InsufficientDataError

logger = logging.getLogger(__name__)


def summary_stats(series: Union[TimeSeries, Sequence[float], np.ndarray]) -> SummaryStats:
    """
    Max, min, mean, median and sample std (n-1)

    A single observation has std 0.
    """
    values = series.values if isinstance(series, TimeSeries) else np.asarray(series, dtype=float)
    if values.size == 0:
        raise InsufficientDataError("summary statistics need at least one value")
    std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return SummaryStats(
        count=int(values.size),
        max=float(np.max(values)),
        min=float(np.min(values)),
        mean=float(np.mean(values)),
        median=float(np.median(values)),
        std=std,
    )


def lag_embed(series: TimeSeries, lag: int) -> SupervisedDataset:
    """
    Turns a series into supervised rows, most recent lag first

    Args:
        series: source series of length n
        lag: number of previous observations per row

    Returns:
        Dataset with n - lag rows; row i targets y(lag + i)
    """
    if lag < 1:
        raise ConfigurationError(f"lag must be >= 1, got {lag}")
    if lag >= len(series):
        raise InsufficientDataError(
            f"lag {lag} needs a series longer than {lag} observations, got {len(series)}"
        )
    values = series.values
    windows = sliding_window_view(values, lag)[: len(values) - lag]
    return SupervisedDataset(
        features=windows[:, ::-1],
        targets=values[lag:],
        lag=lag,
        timestamps=np.arange(lag, len(values)),
        start=series.start,
    )


def train_size(n_rows: int, ratio: float) -> int:
    """floor(ratio * n_rows), robust to binary rounding of the ratio"""
    return int(math.floor(ratio * n_rows + 1e-9))


def chrono_split(data: SupervisedDataset, ratio: float) -> ChronoSplit:
    """
    Splits rows in time order, no shuffling

    Raises:
        ConfigurationError: ratio outside (0, 1]
        InsufficientDataError: empty dataset
    """
    if not 0 < ratio <= 1:
        raise ConfigurationError(f"split ratio must lie in (0, 1], got {ratio}")
    if data.n_rows == 0:
        raise InsufficientDataError("cannot split an empty dataset")
    cut = train_size(data.n_rows, ratio)
    rows = np.arange(data.n_rows)
    split = ChronoSplit(train=data.subset(rows[:cut]), test=data.subset(rows[cut:]), ratio=ratio)
    logger.debug(f"Разбиение: {len(split.train)} обучающих / {len(split.test)} тестовых строк")
    return split


def split_statistics(series: TimeSeries, lag: int, ratio: float) -> Dict[str, SummaryStats]:
    """Statistics of the lag-embedded targets for the all / train / test sets"""
    split = chrono_split(lag_embed(series, lag), ratio)
    stats = {
        "all": summary_stats(np.concatenate([split.train.targets, split.test.targets])),
        "train": summary_stats(split.train.targets),
    }
    if len(split.test) > 0:
        stats["test"] = summary_stats(split.test.targets)
    return stats
