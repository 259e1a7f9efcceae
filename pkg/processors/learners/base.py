"""
Learner contract
Input checks and the immutable fitted-model base shared by every learner
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from models.errors import ConfigurationError, DimensionMismatchError, InsufficientDataError
from models.learner_specs import LearnerSpec


def check_training(features, targets, min_rows: int = 2) -> Tuple[np.ndarray, np.ndarray]:
    """
    Validates a training matrix and target vector

    Raises:
        DimensionMismatchError: shapes disagree
        InsufficientDataError: fewer than min_rows rows
        ConfigurationError: non-finite values
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(targets, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise DimensionMismatchError(
            f"training features {X.shape} and targets {y.shape} do not align"
        )
    if X.shape[0] < min_rows:
        raise InsufficientDataError(f"need at least {min_rows} training rows, got {X.shape[0]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ConfigurationError("training data contains non-finite values")
    return X, y


def check_features(features, n_features: int) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != n_features:
        raise DimensionMismatchError(
            f"model was trained on {n_features} features, got shape {X.shape}"
        )
    return X


def target_scale(y: np.ndarray) -> Tuple[float, float]:
    """Mean and sample std used to standardize targets; a constant target gets std 1"""
    mean = float(np.mean(y))
    std = float(np.std(y, ddof=1)) if len(y) > 1 else 0.0
    return mean, (std if std > 0 else 1.0)


@dataclass(frozen=True, eq=False)
class FittedModel(ABC):
    """Trained learner; predict is a pure function of the model and its input"""
    spec: LearnerSpec
    n_features: int

    def predict(self, features) -> np.ndarray:
        return self._predict(check_features(features, self.n_features))

    @abstractmethod
    def _predict(self, X: np.ndarray) -> np.ndarray:
        ...
