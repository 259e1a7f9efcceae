"""
Evaluator
Forecast accuracy metrics and the Diebold-Mariano comparison test
"""

import logging
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from models.data_models import DmResult, EvaluationReport, ForecastResult, MetricPair, ModelScore
from models.errors import (
    ConfigurationError,
    DegenerateVarianceError,
    DimensionMismatchError,
    ForecastError,
    InsufficientDataError,
    MisalignedResultsError,
)

logger = logging.getLogger(__name__)

DM_MIN_LENGTH = 10


def _paired(observed, predicted, min_length: int = 1) -> Tuple[np.ndarray, np.ndarray]:
    y = np.asarray(observed, dtype=float)
    y_hat = np.asarray(predicted, dtype=float)
    if y.ndim != 1 or y.shape != y_hat.shape:
        raise DimensionMismatchError(f"observed {y.shape} and predicted {y_hat.shape} differ")
    if len(y) < min_length:
        raise InsufficientDataError(f"need at least {min_length} values, got {len(y)}")
    return y, y_hat


def rrmse(observed, predicted) -> float:
    """sqrt(mean squared error) / mean(observed)"""
    y, y_hat = _paired(observed, predicted)
    mean = float(np.mean(y))
    if mean == 0:
        raise ForecastError("RRMSE is undefined for zero-mean observations", stage="evaluate")
    return float(np.sqrt(np.mean((y - y_hat) ** 2)) / mean)


def r_squared(observed, predicted) -> float:
    """1 - RSS/TSS, TSS about the mean of the observed window"""
    y, y_hat = _paired(observed, predicted, min_length=2)
    tss = float(np.sum((y - y.mean()) ** 2))
    if tss == 0:
        raise ForecastError("R² is undefined for constant observations", stage="evaluate")
    return 1.0 - float(np.sum((y - y_hat) ** 2)) / tss


def metric_pair(observed, predicted) -> MetricPair:
    return MetricPair(rrmse=rrmse(observed, predicted), r_squared=r_squared(observed, predicted))


def dm_test(errors_a, errors_b, horizon: int = 1, harvey_correction: bool = False) -> DmResult:
    """
    Diebold-Mariano test with squared-error loss

    d_t = e_a,t^2 - e_b,t^2; statistic = mean(d) / sqrt(V/n) with
    V = gamma_0 + 2 * sum_{k=1}^{h-1} gamma_k (autocovariances with 1/n);
    two-sided p-value from the standard normal. harvey_correction applies the
    Harvey-Leybourne-Newbold factor and Student-t(n-1) p-values.

    Raises:
        DegenerateVarianceError: long-run variance is not positive
    """
    a, b = _paired(errors_a, errors_b, min_length=DM_MIN_LENGTH)
    if horizon < 1:
        raise ConfigurationError(f"horizon must be >= 1, got {horizon}")
    n = len(a)
    differential = a ** 2 - b ** 2
    mean = float(np.mean(differential))
    centered = differential - mean
    autocovariances = [float(centered[k:] @ centered[:n - k]) / n for k in range(min(horizon, n))]
    variance = autocovariances[0] + 2.0 * sum(autocovariances[1:])
    if variance <= 1e-12 * float(np.mean(differential ** 2)):
        raise DegenerateVarianceError(
            f"long-run variance of the loss differential is not positive ({variance:g})"
        )

    statistic = mean / np.sqrt(variance / n)
    if harvey_correction:
        statistic *= np.sqrt((n + 1 - 2 * horizon + horizon * (horizon - 1) / n) / n)
        p_value = 2.0 * stats.t.sf(abs(statistic), df=n - 1)
    else:
        p_value = 2.0 * stats.norm.sf(abs(statistic))
    return DmResult(
        statistic=float(statistic),
        p_value=float(p_value),
        horizon=horizon,
        harvey_correction=harvey_correction,
    )


def build_report(
    results: Sequence[Tuple[str, ForecastResult]],
    baseline_name: str,
    harvey_correction: bool = False,
    references: Optional[Mapping[str, Mapping[str, float]]] = None,
) -> EvaluationReport:
    """
    Metrics per model plus DM of the baseline against every other model

    Raises:
        MisalignedResultsError: results disagree on months, observations or horizon
    """
    if not results:
        raise InsufficientDataError("report needs at least one forecast result")
    names = [name for name, _ in results]
    if baseline_name not in names:
        raise ConfigurationError(f"baseline '{baseline_name}' is not among {names}")

    reference_result = results[0][1]
    for name, result in results[1:]:
        aligned = (
            result.horizon == reference_result.horizon
            and np.array_equal(result.timestamps, reference_result.timestamps)
            and np.array_equal(result.observed, reference_result.observed)
        )
        if not aligned:
            raise MisalignedResultsError(
                f"'{name}' is not aligned with '{results[0][0]}' (months, observations or horizon)"
            )

    horizon = reference_result.horizon
    baseline = dict(results)[baseline_name]
    references = references or {}
    rows = []
    for name, result in results:
        metrics = metric_pair(result.observed, result.recomposed)
        dm, dm_error = None, None
        if name != baseline_name:
            try:
                dm = dm_test(baseline.errors, result.errors, horizon, harvey_correction)
            except DegenerateVarianceError as e:
                dm_error = str(e)
                logger.warning(f"DM {baseline_name} vs {name}: {e}")
        rows.append(ModelScore(
            name=name,
            horizon=horizon,
            metrics=metrics,
            dm=dm,
            dm_error=dm_error,
            reference=dict(references.get(name, {})),
        ))
    return EvaluationReport(horizon=horizon, baseline_name=baseline_name, rows=tuple(rows))
