"""Tests for the learner-assignment grid search"""

import numpy as np
import pytest

from config.presets import expand_grid, pipeline_preset
from models.data_models import TimeSliceConfig
from models.errors import ConfigurationError
from models.learner_specs import COMPONENTS, KnnSpec, LearnerKind
from processors.dataset_builder import train_size
from processors.ensemble import evaluate_variant, fit_pipeline, forecast_recursive
from processors.evaluator import rrmse
from processors.grid_search import candidate_specs, entries_to_frame, grid_search
from processors.series_loader import load_csv
from utils.synthetic import gen_synthetic

SLICES = TimeSliceConfig(initial_window=60, horizon=1, step=4)


def _poison_test_period(series, lag, ratio=0.7):
    first_test = lag + train_size(len(series) - lag, ratio)
    values = np.array(series.values)
    values[first_test:] = 1e9
    return series.with_values(values)


def test_single_candidate_gives_one_entry(seasonal_series):
    entries = grid_search({c: ["KNN"] for c in COMPONENTS}, seasonal_series, selection="test")
    assert len(entries) == 1
    assert entries[0].rank == 1
    assert entries[0].assignment.label() == "KNN/KNN/KNN"


def test_homogeneous_assignment_scores_like_the_direct_pipeline(seasonal_series):
    for kind in ("KNN", "GLMBOOST"):
        variant = pipeline_preset(f"stl-{kind}")
        entries = grid_search(
            {c: [kind] for c in COMPONENTS}, seasonal_series, selection="test", template=variant
        )
        direct = forecast_recursive(fit_pipeline(variant, seasonal_series), 1)
        assert entries[0].score == pytest.approx(rrmse(direct.observed, direct.recomposed), rel=1e-12)


def test_validation_selection_never_reads_test_targets(seasonal_series):
    candidates = {c: ["KNN", "GLMBOOST"] for c in COMPONENTS}
    poisoned = _poison_test_period(seasonal_series, lag=10)
    for horizon in (1, 2):
        slices = TimeSliceConfig(initial_window=60, horizon=horizon, step=4)
        base = grid_search(candidates, seasonal_series, horizon=horizon, slice_config=slices)
        moved = grid_search(candidates, poisoned, horizon=horizon, slice_config=slices)
        assert [e.score for e in moved] == [e.score for e in base]
        assert [e.assignment for e in moved] == [e.assignment for e in base]
        assert all(np.isfinite(e.score) for e in base)


def test_test_selection_does_read_test_targets(seasonal_series):
    candidates = {c: ["KNN"] for c in COMPONENTS}
    poisoned = _poison_test_period(seasonal_series, lag=10)
    base = grid_search(candidates, seasonal_series, selection="test")
    moved = grid_search(candidates, poisoned, selection="test")
    assert moved[0].score != base[0].score


def test_failed_candidate_is_recorded(seasonal_series):
    candidates = {"seasonal": [KnnSpec(k=500), "KNN"], "trend": ["KNN"], "remainder": ["KNN"]}
    entries = grid_search(candidates, seasonal_series, selection="validation", slice_config=SLICES)
    assert len(entries) == 2
    assert entries[0].ok and np.isfinite(entries[0].score)
    assert not entries[1].ok
    assert entries[1].score == float("inf")
    assert "InsufficientDataError" in entries[1].error

    frame = entries_to_frame(entries)
    assert list(frame.columns) == ["rank", "seasonal", "trend", "remainder", "horizon", "rrmse", "status", "error"]
    assert list(frame["status"]) == ["ok", "failed"]


def test_identical_candidates_tie_and_keep_candidate_order(seasonal_series):
    # two identical specs under different positions share a score
    candidates = {"seasonal": ["KNN", "KNN"], "trend": ["KNN"], "remainder": ["KNN"]}
    entries = grid_search(candidates, seasonal_series, selection="test")
    assert entries[0].score == entries[1].score
    assert [e.rank for e in entries] == [1, 2]


@pytest.mark.slow
def test_all_kinds_give_216_ranked_assignments():
    series = gen_synthetic(96, trend_slope=0.05, seasonal_amplitude=2.0, noise_std=0.3, seed=5)
    series = series.with_values(series.values + 20.0)
    kinds = [kind.value for kind in LearnerKind]
    entries = grid_search({c: kinds for c in COMPONENTS}, series, selection="test", jobs=2)

    assert len(entries) == 216
    assert [e.rank for e in entries] == list(range(1, 217))
    scores = [e.score for e in entries]
    assert scores == sorted(scores)
    assert len({e.assignment.label() for e in entries}) == 216


def test_hyperparameter_grid_expands_candidates(seasonal_series):
    seasonal = expand_grid("KNN", "seasonal", {"k": [3, 5, 7]})
    assert [spec.k for spec in seasonal] == [3, 5, 7]
    entries = grid_search(
        {"seasonal": seasonal, "trend": ["KNN"], "remainder": ["KNN"]}, seasonal_series, selection="test"
    )
    assert len(entries) == 3
    assert sorted(entries[i].assignment.seasonal.k for i in range(3)) == [3, 5, 7]


def test_components_need_candidates():
    with pytest.raises(ConfigurationError):
        candidate_specs({"seasonal": ["KNN"], "trend": [], "remainder": ["KNN"]})


def test_train_only_decomposition_scores_like_the_direct_pipeline(seasonal_series):
    variant = pipeline_preset("stl-knn", train_only_decomposition=True)
    entries = grid_search({c: ["KNN"] for c in COMPONENTS}, seasonal_series, selection="test", template=variant)
    direct = forecast_recursive(fit_pipeline(variant, seasonal_series), 1)
    assert entries[0].score == pytest.approx(rrmse(direct.observed, direct.recomposed), rel=1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("selection", ["test", "validation"])
def test_winner_beats_every_homogeneous_stl_pipeline(fixture_path, selection):
    series = load_csv(fixture_path)
    kinds = ["KNN", "MARS", "SVR", "GLMBOOST"]
    entries = grid_search({c: kinds for c in COMPONENTS}, series, selection=selection)
    winner = entries[0]
    assert winner.ok
    for kind in kinds:
        homogeneous = evaluate_variant(pipeline_preset(f"stl-{kind}"), series, selection=selection)
        assert winner.score <= homogeneous * (1 + 1e-12)
