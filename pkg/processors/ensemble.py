"""
Ensemble
Decomposition-ensemble pipelines: per-component training, recursive
h-step forecasting and recomposition by summation
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from models.data_models import (
    DecomposedSeries,
    ForecastResult,
    StlConfig,
    SupervisedDataset,
    TimeSeries,
    TimeSliceConfig,
    as_month,
)
from models.errors import ConfigurationError, InsufficientDataError
from models.learner_specs import COMPONENTS, LEVEL, LearnerSpec, PipelineVariant
from processors.dataset_builder import lag_embed, train_size
from processors.decomposer import stl_decompose
from processors.evaluator import rrmse
from processors.learners import fit_arrays
from processors.preprocessor import FeaturePipeline, fit_feature_pipeline, time_slices

logger = logging.getLogger(__name__)

SELECTION_MODES = ("validation", "test")


@dataclass(frozen=True, eq=False)
class FixedHistory:
    """Lags read from one series computed once over the whole record"""
    series: TimeSeries

    def __len__(self) -> int:
        return len(self.series)

    def first_origin(self, lag: int) -> int:
        return lag

    def lag_rows(self, origins: np.ndarray, lag: int) -> np.ndarray:
        """Row i holds the values at origins[i]-1, ..., origins[i]-lag"""
        return self.series.values[origins[:, None] - 1 - np.arange(lag)]


@dataclass(frozen=True, eq=False)
class ExpandingDecomposition:
    """
    STL of every observed prefix y[0..o-1], computed on demand and cached by
    the origin o
    """
    series: TimeSeries
    config: StlConfig
    cache: Dict[int, DecomposedSeries] = field(default_factory=dict, repr=False)

    @property
    def min_origin(self) -> int:
        return 2 * self.config.period

    def at(self, origin: int) -> DecomposedSeries:
        if origin not in self.cache:
            self.cache[origin] = stl_decompose(self.series.head(origin), self.config)
        return self.cache[origin]

    def warm(self, origins: Iterable[int]) -> None:
        """Decomposes every decomposable origin up front so copies sent to workers carry them"""
        for origin in sorted({int(origin) for origin in origins if origin >= self.min_origin}):
            self.at(origin)


@dataclass(frozen=True, eq=False)
class ExpandingHistory:
    """Component lags as known at each forecast origin, never reading y(o) or later"""
    decompositions: ExpandingDecomposition
    name: str

    def __len__(self) -> int:
        return len(self.decompositions.series)

    def first_origin(self, lag: int) -> int:
        return max(lag, self.decompositions.min_origin)

    def lag_rows(self, origins: np.ndarray, lag: int) -> np.ndarray:
        offsets = np.arange(lag)
        rows = np.empty((len(origins), lag))
        for index, origin in enumerate(origins):
            values = self.decompositions.at(int(origin)).component(self.name).values
            rows[index] = values[origin - 1 - offsets]
        return rows


LagHistory = Union[FixedHistory, ExpandingHistory]


@dataclass(frozen=True, eq=False)
class ComponentData:
    """Training rows of one component and the history its forecasts read lags from"""
    name: str
    train: SupervisedDataset
    history: LagHistory


@dataclass(frozen=True, eq=False)
class ComponentModel:
    name: str
    spec: LearnerSpec
    features: FeaturePipeline
    model: object
    history: LagHistory
    train_rows: int

    def predict_rows(self, rows: np.ndarray) -> np.ndarray:
        return self.model.predict(self.features.transform(rows))


@dataclass(frozen=True, eq=False)
class FittedPipeline:
    """Fitted component models of one pipeline variant"""
    variant: PipelineVariant
    series: TimeSeries
    components: Dict[str, ComponentModel]
    decomposition: Optional[DecomposedSeries]
    train_rows: int
    split_ratio: float

    @property
    def lag(self) -> int:
        return self.variant.lag

    @property
    def test_start(self) -> int:
        """Series position of the first test target"""
        return self.variant.lag + self.train_rows

    @property
    def first_origin(self) -> int:
        """Earliest origin every component can read a full lag window at"""
        return max(component.history.first_origin(self.lag) for component in self.components.values())

    def with_history(self, series: TimeSeries) -> "FittedPipeline":
        """Same fitted models reading their lags from another series of equal length"""
        if len(series) != len(self.series):
            raise InsufficientDataError(
                f"replacement history has {len(series)} observations, expected {len(self.series)}"
            )
        histories, decomposition, _ = _component_histories(self.variant, series)
        components = {
            name: replace(model, history=histories[name])
            for name, model in self.components.items()
        }
        return replace(self, series=series, components=components, decomposition=decomposition)

    def summary(self) -> pd.DataFrame:
        records = []
        for name, component in self.components.items():
            pca = component.features.pca
            records.append({
                "component": name,
                "learner": component.spec.label(),
                "train_rows": component.train_rows,
                "pca_components": pca.n_components if pca is not None else np.nan,
                "pca_cumulative_ratio": pca.cumulative_ratio if pca is not None else np.nan,
            })
        return pd.DataFrame.from_records(records)

    def variance_table(self) -> pd.DataFrame:
        """Explained-variance ratio of every principal direction per component"""
        records = []
        for name, component in self.components.items():
            pca = component.features.pca
            if pca is None:
                continue
            cumulative = np.cumsum(pca.all_ratios)
            for index, ratio in enumerate(pca.all_ratios):
                records.append({
                    "component": name,
                    "direction": index + 1,
                    "ratio": ratio,
                    "cumulative": cumulative[index],
                    "kept": index < pca.n_components,
                })
        return pd.DataFrame.from_records(
            records, columns=["component", "direction", "ratio", "cumulative", "kept"]
        )


def _check_ratio(split_ratio: float) -> None:
    if not 0 < split_ratio <= 1:
        raise ConfigurationError(f"split ratio must lie in (0, 1], got {split_ratio}")


def _component_histories(
    variant: PipelineVariant,
    series: TimeSeries,
) -> Tuple[Dict[str, LagHistory], Optional[DecomposedSeries], Optional[ExpandingDecomposition]]:
    """
    Forecast histories per component

    Returns:
        (histories, full-series decomposition or None, per-origin
        decompositions when train_only_decomposition is set)
    """
    if not variant.is_decomposed:
        return {LEVEL: FixedHistory(series)}, None, None
    config = variant.stl_config(series.period)
    decomposition = stl_decompose(series, config)
    names = variant.component_specs()
    if variant.train_only_decomposition:
        expanding = ExpandingDecomposition(series, config)
        return {name: ExpandingHistory(expanding, name) for name in names}, decomposition, expanding
    return {name: FixedHistory(decomposition.component(name)) for name in names}, decomposition, None


def _training_sources(
    histories: Mapping[str, LagHistory],
    expanding: Optional[ExpandingDecomposition],
    end: int,
) -> Dict[str, TimeSeries]:
    """Component series the training rows are embedded from"""
    if expanding is None:
        return {name: history.series for name, history in histories.items()}
    prefix_parts = expanding.at(end)
    return {name: prefix_parts.component(name) for name in histories}


def _training_rows(variant: PipelineVariant, series: TimeSeries, split_ratio: float) -> int:
    _check_ratio(split_ratio)
    rows = len(series) - variant.lag
    if rows < 1:
        raise InsufficientDataError(
            f"lag {variant.lag} leaves no rows in a series of {len(series)} observations"
        )
    return train_size(rows, split_ratio)


def prepare_components(
    variant: PipelineVariant,
    series: TimeSeries,
    split_ratio: float = 0.7,
) -> Tuple[Dict[str, ComponentData], Optional[DecomposedSeries], int]:
    """
    Component training sets and forecast histories

    By default both come from the full-series STL, so forecast lags near the
    origin carry two-sided loess information from later months. With
    train_only_decomposition the learners see the STL of the training prefix
    and each forecast origin o reads its lags from the STL of y[0..o-1].

    Returns:
        (component data, full-series decomposition or None, training rows)
    """
    train_rows = _training_rows(variant, series, split_ratio)
    histories, decomposition, expanding = _component_histories(variant, series)
    sources = _training_sources(histories, expanding, variant.lag + train_rows)

    data = {}
    for name in variant.component_specs():
        embedded = lag_embed(sources[name], variant.lag)
        data[name] = ComponentData(name, embedded.subset(np.arange(train_rows)), histories[name])
    return data, decomposition, train_rows


def fit_component(data: ComponentData, spec: LearnerSpec, pca_threshold: Optional[float]) -> ComponentModel:
    """Standardizer and PCA on training rows, then the learner on the projected rows"""
    features = fit_feature_pipeline(data.train.features, pca_threshold)
    model = fit_arrays(spec, features.transform(data.train.features), data.train.targets)
    return ComponentModel(
        name=data.name,
        spec=spec,
        features=features,
        model=model,
        history=data.history,
        train_rows=data.train.n_rows,
    )


def fit_pipeline(variant: PipelineVariant, series: TimeSeries, split_ratio: float = 0.7) -> FittedPipeline:
    """
    Fits every component model of a pipeline variant

    Decomposed: STL, then per component lag embedding, standardization, PCA
    and the assigned learner. Nondecomposed: the same chain on the raw series.
    """
    logger.info(f"=== Fit pipeline: {variant.name} ===")
    data, decomposition, train_rows = prepare_components(variant, series, split_ratio)
    components = {}
    for name, spec in variant.component_specs().items():
        components[name] = fit_component(data[name], spec, variant.pca_threshold)
        pca = components[name].features.pca
        logger.info(
            f"Компонента {name}: {spec.label()}, строк {train_rows}, "
            f"PCA {pca.n_components if pca else '-'} компонент"
        )
    return FittedPipeline(
        variant=variant,
        series=series,
        components=components,
        decomposition=decomposition,
        train_rows=train_rows,
        split_ratio=split_ratio,
    )


def _check_horizon(horizon: int) -> None:
    if horizon not in (1, 2):
        raise ConfigurationError(f"horizon must be 1 or 2, got {horizon}")


def forecast_component(component: ComponentModel, targets: np.ndarray, horizon: int, lag: int) -> np.ndarray:
    """
    Recursive forecasts of one component at the given series positions

    For target t and horizon h the origin is o = t-h+1: the model first
    predicts o from the lags known there, and each later step shifts the
    previous prediction into the most recent lag slot while the older slots
    keep the values known at o.
    """
    _check_horizon(horizon)
    history = component.history
    targets = np.asarray(targets, dtype=int)
    origins = targets - (horizon - 1)
    first = history.first_origin(lag)
    if len(targets) and (origins.min() < first or targets.max() >= len(history)):
        raise InsufficientDataError(
            f"targets {targets.min()}..{targets.max()} outside the forecastable range "
            f"{first + horizon - 1}..{len(history) - 1}"
        )
    window = history.lag_rows(origins, lag)
    for _ in range(horizon):
        predicted = component.predict_rows(window)
        window = np.column_stack([predicted, window[:, :-1]])
    return predicted


def recompose_forecasts(forecasts: Mapping[str, np.ndarray]) -> np.ndarray:
    """Sums component forecasts in seasonal, trend, remainder order"""
    order = [name for name in COMPONENTS if name in forecasts]
    order += [name for name in forecasts if name not in COMPONENTS]
    total = None
    for name in order:
        total = forecasts[name] if total is None else total + forecasts[name]
    return total


def resolve_eval_range(
    series: TimeSeries,
    lag: int,
    horizon: int,
    test_start: int,
    eval_range: Union[None, str, Tuple] = None,
    first_origin: Optional[int] = None,
) -> np.ndarray:
    """
    Series positions to forecast

    eval_range: None or 'test' (test period), 'all' (every month with enough
    lag history) or an inclusive (first, last) pair of months or positions.
    first_origin: earliest forecast origin the histories allow (defaults to lag)
    """
    first_valid = (lag if first_origin is None else first_origin) + horizon - 1
    if eval_range is None or eval_range == "test":
        first, last = max(test_start, first_valid), len(series) - 1
    elif eval_range == "all":
        first, last = first_valid, len(series) - 1
    else:
        bounds = []
        for bound in eval_range:
            if isinstance(bound, (int, np.integer)):
                bounds.append(int(bound))
            else:
                bounds.append((as_month(bound) - series.start).n)
        first, last = bounds
    if first < first_valid or last >= len(series) or first > last:
        raise InsufficientDataError(
            f"forecast range {first}..{last} outside available history "
            f"{first_valid}..{len(series) - 1}"
        )
    return np.arange(first, last + 1)


def forecast_recursive(
    pipeline: FittedPipeline,
    horizon: int = 1,
    eval_range: Union[None, str, Tuple] = None,
) -> ForecastResult:
    """h-step forecasts per component, recomposed by summation"""
    _check_horizon(horizon)
    targets = resolve_eval_range(
        pipeline.series, pipeline.lag, horizon, pipeline.test_start, eval_range, pipeline.first_origin
    )
    components = {
        name: forecast_component(component, targets, horizon, pipeline.lag)
        for name, component in pipeline.components.items()
    }
    logger.debug(f"Прогноз {pipeline.variant.name}, h={horizon}: {len(targets)} месяцев")
    return ForecastResult(
        name=pipeline.variant.name,
        horizon=horizon,
        start=pipeline.series.start,
        timestamps=targets,
        recomposed=recompose_forecasts(components),
        components=components,
        observed=pipeline.series.values[targets],
        test_start=pipeline.test_start,
    )


@dataclass(frozen=True, eq=False)
class EvaluationFold:
    data: Dict[str, ComponentData]
    targets: np.ndarray


@dataclass(frozen=True, eq=False)
class EvaluationPlan:
    """Folds a pipeline is fit and scored on; observed concatenates every fold's targets"""
    folds: Tuple[EvaluationFold, ...]
    observed: np.ndarray
    horizon: int
    lag: int
    pca_threshold: Optional[float]
    selection: str


def _warm_histories(data: Mapping[str, ComponentData], origins: np.ndarray) -> None:
    for component in data.values():
        if isinstance(component.history, ExpandingHistory):
            component.history.decompositions.warm(origins)
            return


def build_plan(
    variant: PipelineVariant,
    series: TimeSeries,
    split_ratio: float = 0.7,
    horizon: int = 1,
    selection: str = "validation",
    slice_config: Optional[TimeSliceConfig] = None,
) -> EvaluationPlan:
    """
    'test': one fold, fit on the training rows and scored on the test rows.
    'validation': time slices over the training rows only; the series is cut
    at the end of the training period before decomposition, so no test value
    is ever read.
    """
    _check_horizon(horizon)
    if selection not in SELECTION_MODES:
        raise ConfigurationError(f"selection must be one of {SELECTION_MODES}, got '{selection}'")

    if selection == "test":
        data, _, train_rows = prepare_components(variant, series, split_ratio)
        targets = np.arange(variant.lag + train_rows, len(series))
        if len(targets) == 0:
            raise InsufficientDataError("test selection needs a non-empty test period")
        _warm_histories(data, targets - horizon + 1)
        folds = (EvaluationFold(data, targets),)
        observed = series.values[targets]
    else:
        train_rows = _training_rows(variant, series, split_ratio)
        prefix = series.head(variant.lag + train_rows)
        histories, _, expanding = _component_histories(variant, prefix)
        sources = _training_sources(histories, expanding, len(prefix))
        embedded = {
            name: lag_embed(sources[name], variant.lag) for name in variant.component_specs()
        }
        config = slice_config or TimeSliceConfig(horizon=horizon)
        folds = []
        for train_index, validation_index in time_slices(train_rows, config):
            data = {
                name: ComponentData(name, rows.subset(train_index), histories[name])
                for name, rows in embedded.items()
            }
            timestamps = next(iter(embedded.values())).timestamps
            folds.append(EvaluationFold(data, timestamps[validation_index]))
        folds = tuple(folds)
        if folds:
            _warm_histories(folds[0].data, np.concatenate([fold.targets for fold in folds]) - horizon + 1)
        observed = np.concatenate([prefix.values[fold.targets] for fold in folds])

    return EvaluationPlan(
        folds=tuple(folds),
        observed=observed,
        horizon=horizon,
        lag=variant.lag,
        pca_threshold=variant.pca_threshold,
        selection=selection,
    )


def component_forecasts(plan: EvaluationPlan, name: str, spec: LearnerSpec) -> np.ndarray:
    """Forecasts of one component under one learner, concatenated over the plan's folds"""
    parts = []
    for fold in plan.folds:
        component = fit_component(fold.data[name], spec, plan.pca_threshold)
        parts.append(forecast_component(component, fold.targets, plan.horizon, plan.lag))
    return np.concatenate(parts)


def evaluate_variant(
    variant: PipelineVariant,
    series: TimeSeries,
    split_ratio: float = 0.7,
    horizon: int = 1,
    selection: str = "validation",
    slice_config: Optional[TimeSliceConfig] = None,
) -> float:
    """RRMSE of a pipeline variant under a selection mode"""
    plan = build_plan(variant, series, split_ratio, horizon, selection, slice_config)
    forecasts = {
        name: component_forecasts(plan, name, spec)
        for name, spec in variant.component_specs().items()
    }
    return rrmse(plan.observed, recompose_forecasts(forecasts))


def forecast_overlay(
    pipeline: FittedPipeline,
    horizons: Sequence[int] = (1, 2),
) -> Dict[int, ForecastResult]:
    """Forecasts over every month with enough lag history, per horizon"""
    return {horizon: forecast_recursive(pipeline, horizon, "all") for horizon in horizons}
