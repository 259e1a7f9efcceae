"""
Grid Search
Scores every seasonal/trend/remainder learner assignment and ranks them
"""

import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from config.presets import learner_preset
from models.data_models import TimeSeries, TimeSliceConfig
from models.errors import ConfigurationError, ForecastError
from models.learner_specs import COMPONENTS, EnsembleAssignment, LearnerSpec, PipelineVariant
from processors.ensemble import EvaluationPlan, build_plan, component_forecasts, recompose_forecasts
from processors.evaluator import rrmse

logger = logging.getLogger(__name__)

Candidate = Union[str, LearnerSpec]


@dataclass(frozen=True)
class GridSearchEntry:
    rank: int
    assignment: EnsembleAssignment
    score: float
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def candidate_specs(candidates: Mapping[str, Sequence[Candidate]]) -> Dict[str, List[LearnerSpec]]:
    """
    Resolves per-component candidates; a bare kind name loads that
    component's preset hyperparameters

    Raises:
        ConfigurationError: a component without candidates
    """
    resolved = {}
    for component in COMPONENTS:
        entries = list(candidates.get(component, ()))
        if not entries:
            raise ConfigurationError(f"grid search needs at least one learner for '{component}'")
        resolved[component] = [
            learner_preset(entry, component) if isinstance(entry, str) else entry
            for entry in entries
        ]
    return resolved


def _forecast_task(plan: EvaluationPlan, component: str, spec: LearnerSpec) -> Tuple[Optional[np.ndarray], Optional[str]]:
    try:
        return component_forecasts(plan, component, spec), None
    except (ForecastError, ValueError, np.linalg.LinAlgError) as e:
        return None, f"{component} {spec.label()}: {type(e).__name__}: {e}"


def grid_search(
    candidates: Mapping[str, Sequence[Candidate]],
    series: TimeSeries,
    horizon: int = 1,
    selection: str = "validation",
    template: Optional[PipelineVariant] = None,
    split_ratio: float = 0.7,
    slice_config: Optional[TimeSliceConfig] = None,
    jobs: int = 1,
) -> List[GridSearchEntry]:
    """
    Evaluates the cross-product of component candidates

    Every (component, learner) pair is fit and forecast once; an assignment's
    score is the RRMSE of the summed component forecasts. A failing pair marks
    every assignment using it as failed (score inf) without stopping the search.

    Args:
        candidates: {component: [kind name or LearnerSpec, ...]}
        series: observed series
        horizon: 1 or 2
        selection: 'validation' (time slices over training rows) or 'test'
        template: lag, PCA and STL settings shared by all assignments
        split_ratio: training share of the lag-embedded rows
        slice_config: time-slice settings for validation selection
        jobs: worker processes (-1 for all cores)

    Returns:
        Entries ranked by score, then kind order, then candidate order
    """
    specs = candidate_specs(candidates)
    first = EnsembleAssignment(**{c: specs[c][0] for c in COMPONENTS}, horizon=horizon)
    template = (template or PipelineVariant(name="grid-search", assignment=first)).model_copy(
        update={"mode": "decomposed", "assignment": first}
    )
    used = list(template.component_specs())
    total = int(np.prod([len(specs[c]) for c in COMPONENTS]))
    logger.info("=== Grid Search ===")
    logger.info(f"Назначений: {total}, горизонт {horizon}, отбор: {selection}")

    plan = build_plan(template, series, split_ratio, horizon, selection, slice_config)
    tasks = [(component, index) for component in used for index in range(len(specs[component]))]
    outputs = Parallel(n_jobs=jobs)(
        delayed(_forecast_task)(plan, component, specs[component][index])
        for component, index in tasks
    )
    forecasts = dict(zip(tasks, outputs))

    scored = []
    for indices in product(*(range(len(specs[c])) for c in COMPONENTS)):
        chosen = dict(zip(COMPONENTS, indices))
        assignment = EnsembleAssignment(
            **{c: specs[c][chosen[c]] for c in COMPONENTS}, horizon=horizon
        )
        errors = [forecasts[(c, chosen[c])][1] for c in used if forecasts[(c, chosen[c])][1]]
        score, error = float("inf"), (errors[0] if errors else None)
        if error is None:
            try:
                total_forecast = recompose_forecasts({c: forecasts[(c, chosen[c])][0] for c in used})
                score = rrmse(plan.observed, total_forecast)
            except ForecastError as e:
                error = f"{type(e).__name__}: {e}"
            if not np.isfinite(score):
                score, error = float("inf"), error or "non-finite forecast"
        key = (score, tuple(kind.order for kind in assignment.kinds()), indices)
        scored.append((key, assignment, score, error))

    scored.sort(key=lambda item: item[0])
    entries = [
        GridSearchEntry(rank=position + 1, assignment=assignment, score=score, error=error)
        for position, (_, assignment, score, error) in enumerate(scored)
    ]
    failed = sum(not entry.ok for entry in entries)
    if failed:
        logger.warning(f"Назначений с ошибкой: {failed} из {len(entries)}")
    logger.info(f"Лучшее назначение: {entries[0].assignment.label()} (RRMSE {entries[0].score:.4f})")
    return entries


def entries_to_frame(entries: Sequence[GridSearchEntry]) -> pd.DataFrame:
    """Ranked table with one column per component learner"""
    records = []
    for entry in entries:
        record = {"rank": entry.rank}
        for component, spec in entry.assignment.specs().items():
            record[component] = spec.label()
        record.update({
            "horizon": entry.assignment.horizon,
            "rrmse": entry.score,
            "status": "ok" if entry.ok else "failed",
            "error": entry.error or "",
        })
        records.append(record)
    columns = ["rank", *COMPONENTS, "horizon", "rrmse", "status", "error"]
    return pd.DataFrame.from_records(records, columns=columns)
