"""
Comparison
Fits the ensemble of a horizon against its homogeneous STL and
nondecomposed counterparts, and sweeps the lag of one pipeline
"""

import logging
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from config.presets import COMPARISON_KINDS, HORIZON_ENSEMBLES, KIND_DISPLAY, PUBLISHED_SCORES, pipeline_preset
from models.data_models import EvaluationReport, ForecastResult, TimeSeries, TimeSliceConfig
from models.errors import ForecastError, PipelineStageError
from models.learner_specs import EnsembleAssignment, PipelineVariant
from processors.ensemble import evaluate_variant, fit_pipeline, forecast_recursive
from processors.evaluator import build_report

logger = logging.getLogger(__name__)


def comparison_variants(
    horizon: int,
    assignment: Optional[EnsembleAssignment] = None,
    **variant_fields,
) -> List[PipelineVariant]:
    """
    Ensemble first, then STL-<kind> for each compared kind, then the
    nondecomposed <kind> pipelines
    """
    ensemble_name, _ = HORIZON_ENSEMBLES[horizon]
    ensemble = pipeline_preset(ensemble_name, **variant_fields)
    if assignment is not None:
        ensemble = ensemble.model_copy(update={"assignment": assignment})
    kinds = COMPARISON_KINDS[horizon]
    variants = [ensemble]
    variants += [pipeline_preset(KIND_DISPLAY[kind][0], **variant_fields) for kind in kinds]
    variants += [pipeline_preset(KIND_DISPLAY[kind][1], **variant_fields) for kind in kinds]
    return variants


def _fit_and_forecast(variant: PipelineVariant, series: TimeSeries, split_ratio: float, horizon: int) -> ForecastResult:
    try:
        pipeline = fit_pipeline(variant, series, split_ratio)
    except ForecastError as e:
        raise PipelineStageError(e.stage, variant.name, e) from e
    except (ValueError, np.linalg.LinAlgError) as e:
        raise PipelineStageError("fit", variant.name, e) from e
    try:
        return forecast_recursive(pipeline, horizon)
    except ForecastError as e:
        raise PipelineStageError(e.stage, variant.name, e) from e
    except (ValueError, np.linalg.LinAlgError) as e:
        raise PipelineStageError("forecast", variant.name, e) from e


def comparison_forecasts(
    series: TimeSeries,
    horizon: int,
    split_ratio: float = 0.7,
    assignment: Optional[EnsembleAssignment] = None,
    **variant_fields,
) -> List[Tuple[str, ForecastResult]]:
    results = []
    for variant in comparison_variants(horizon, assignment, **variant_fields):
        results.append((variant.name, _fit_and_forecast(variant, series, split_ratio, horizon)))
    return results


def run_comparison(
    series: TimeSeries,
    horizon: int,
    split_ratio: float = 0.7,
    harvey_correction: bool = False,
    assignment: Optional[EnsembleAssignment] = None,
    **variant_fields,
) -> EvaluationReport:
    """
    Test-set report for one horizon: the heterogeneous ensemble, three
    homogeneous STL pipelines and three nondecomposed pipelines, with DM
    tests of the ensemble against each

    Raises:
        PipelineStageError: a pipeline failed; names the stage and the model
    """
    logger.info(f"=== Comparison h={horizon} ===")
    results = comparison_forecasts(series, horizon, split_ratio, assignment, **variant_fields)
    baseline_name = results[0][0]
    return build_report(
        results,
        baseline_name=baseline_name,
        harvey_correction=harvey_correction,
        references=PUBLISHED_SCORES.get(horizon, {}),
    )


def lag_sweep(
    variant: PipelineVariant,
    series: TimeSeries,
    lags: Iterable[int] = range(1, 11),
    split_ratio: float = 0.7,
    horizon: int = 1,
    selection: str = "validation",
    slice_config: Optional[TimeSliceConfig] = None,
) -> pd.DataFrame:
    """RRMSE of a pipeline for each lag; a failing lag is recorded, not raised"""
    logger.info(f"=== Lag sweep: {variant.name} ===")
    records: List[Dict[str, object]] = []
    for lag in lags:
        candidate = variant.model_copy(update={"lag": int(lag)})
        try:
            score, error = evaluate_variant(
                candidate, series, split_ratio, horizon, selection, slice_config
            ), ""
        except (ForecastError, ValueError, np.linalg.LinAlgError) as e:
            score, error = float("nan"), f"{type(e).__name__}: {e}"
            logger.warning(f"Лаг {lag}: {error}")
        records.append({"lag": int(lag), "rrmse": score, "error": error})
        logger.debug(f"Лаг {lag}: RRMSE {score}")
    return pd.DataFrame.from_records(records, columns=["lag", "rrmse", "error"])
