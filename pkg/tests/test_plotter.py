"""Tests for figures and console previews"""

import numpy as np

from config.presets import PUBLISHED_SPLIT_STATS, pipeline_preset
from processors.dataset_builder import split_statistics
from processors.ensemble import fit_pipeline, forecast_overlay
from processors.plotter import plot_forecasts
from processors.preview import PreviewGenerator, significant


def test_forecast_figure_is_reproducible(tmp_path, seasonal_series):
    pipeline = fit_pipeline(pipeline_preset("stl-knn"), seasonal_series)
    results = forecast_overlay(pipeline)
    first = plot_forecasts(seasonal_series, results, tmp_path / "first.svg").read_bytes()
    second = plot_forecasts(seasonal_series, results, tmp_path / "second.svg").read_bytes()
    assert b"<svg" in first
    assert first == second


def test_significant_digits():
    assert significant(None) == "-"
    assert significant(float("nan")) == "-"
    assert significant(42) == "42"
    assert significant(0.123456) == "0.1235"
    assert significant(np.float64(9427.2694)) == "9427"


def test_summary_preview_lists_every_set(seasonal_series):
    text = PreviewGenerator().summary_preview(split_statistics(seasonal_series, 10, 0.7), PUBLISHED_SPLIT_STATS)
    for name in ("all", "train", "test"):
        assert name in text
