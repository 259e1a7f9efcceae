"""Tests for the pipeline configuration file and CLI overrides"""

from pathlib import Path

import pytest

from config.presets import learner_preset
from config.settings import load_run_config
from models.errors import ConfigurationError
from models.learner_specs import KnnSpec, SvrSpec


def _write(tmp_path, text):
    path = tmp_path / "pipeline.env"
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_reproduce_the_reference_pipeline():
    config = load_run_config()
    assert (config.lag, config.split_ratio, config.pca_threshold, config.horizon) == (10, 0.7, 0.95, 1)
    assert config.pipeline_variant().name == "STL-Ensemble-1"
    assert config.pipeline_variant(horizon=2).name == "STL-Ensemble-2"


def test_file_values_and_overrides(tmp_path):
    path = _write(tmp_path, "LAG=12\nSPLIT_RATIO=0.8\nPRESET=stl-svr\nOUTPUT_DIR=results\n")
    config = load_run_config(path, overrides={"lag": 6, "seed": None})
    assert config.lag == 6
    assert config.split_ratio == 0.8
    assert config.output_dir == Path("results")
    variant = config.pipeline_variant()
    assert variant.name == "STL-SVR"
    assert variant.lag == 6


def test_component_learners_build_an_ensemble(tmp_path):
    path = _write(
        tmp_path,
        "SEASONAL_KIND=svr\n"
        "TREND_KIND=KNN\n"
        "TREND_K=3\n"
        "REMAINDER_KIND=glmboost\n"
        "REMAINDER_PRESET=paper-trend\n",
    )
    variant = load_run_config(path).pipeline_variant()
    specs = variant.component_specs()
    assert specs["seasonal"] == learner_preset("SVR", "seasonal")
    assert specs["trend"] == KnnSpec(k=3)
    assert specs["remainder"] == learner_preset("GLMBOOST", "trend")
    assert variant.name == "STL-SVR/KNN/GLMBOOST"


def test_single_learner_is_nondecomposed(tmp_path):
    path = _write(tmp_path, "LEARNER_KIND=SVR\n")
    variant = load_run_config(path).pipeline_variant()
    assert not variant.is_decomposed
    assert variant.name == "SVR"
    assert isinstance(variant.learner, SvrSpec)


def test_partial_ensemble_is_rejected(tmp_path):
    path = _write(tmp_path, "SEASONAL_KIND=SVR\nTREND_KIND=KNN\n")
    with pytest.raises(ConfigurationError):
        load_run_config(path).pipeline_variant()


@pytest.mark.parametrize(
    "text",
    [
        "COLOUR=blue\n",
        "LAG=zero\n",
        "SPLIT_RATIO=1.5\n",
        "HORIZON=3\n",
        "SEASONAL_KIND=ARIMA\n",
        "SELECTION=holdout\n",
    ],
)
def test_invalid_files_raise_configuration_errors(tmp_path, text):
    with pytest.raises(ConfigurationError):
        load_run_config(_write(tmp_path, text))


def test_missing_file(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config(tmp_path / "absent.env")


def test_slice_config_follows_the_horizon():
    config = load_run_config(overrides={"slice_initial_window": 60, "slice_step": 3})
    slices = config.slice_config(horizon=2)
    assert (slices.initial_window, slices.horizon, slices.step) == (60, 2, 3)


def test_only_an_unconfigured_run_follows_the_horizon(tmp_path):
    assert load_run_config().follows_horizon
    assert not load_run_config(overrides={"preset": "svr"}).follows_horizon
    assert not load_run_config(_write(tmp_path, "LEARNER_KIND=KNN\n")).follows_horizon
