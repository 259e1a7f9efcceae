"""Shared fixtures"""

from pathlib import Path

import numpy as np
import pytest

from models.data_models import SupervisedDataset, TimeSeries
from utils.synthetic import gen_synthetic

ROOT = Path(__file__).resolve().parent.parent
FIXTURE_CSV = ROOT / "data" / "amazon_fire_spots.csv"


@pytest.fixture
def fixture_path() -> Path:
    return FIXTURE_CSV


@pytest.fixture
def seasonal_series() -> TimeSeries:
    """Trend + seasonality + noise, strictly positive"""
    base = gen_synthetic(120, trend_slope=0.05, seasonal_amplitude=2.0, noise_std=0.2, seed=3)
    return base.with_values(base.values + 10.0)


@pytest.fixture
def random_dataset() -> SupervisedDataset:
    rng = np.random.default_rng(11)
    features = rng.normal(size=(60, 4))
    targets = features @ np.array([1.5, -2.0, 0.5, 0.0]) + rng.normal(scale=0.1, size=60)
    return SupervisedDataset(features, targets, lag=4, timestamps=np.arange(4, 64))
