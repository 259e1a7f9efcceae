"""
GLMBoost
Componentwise linear least-squares boosting with shrinkage
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from models.data_models import frozen_array
from models.errors import DegenerateSystemError, ForecastError
from models.learner_specs import GlmBoostSpec
from processors.learners.base import FittedModel, check_training


def _best_component(residuals: np.ndarray, features: np.ndarray) -> Tuple[int, float]:
    """Feature with the largest RSS reduction and its least-squares coefficient"""
    norms = np.sum(features * features, axis=0)
    if not np.any(norms > 0):
        raise DegenerateSystemError("boosting needs at least one non-zero feature column")
    products = residuals @ features
    safe = np.where(norms > 0, norms, 1.0)
    reductions = np.where(norms > 0, products ** 2 / safe, -np.inf)
    index = int(np.argmax(reductions))
    return index, float(products[index] / safe[index])


def boost_step(coefficients, residuals, features, step_length: float) -> np.ndarray:
    """
    One boosting iteration

    Fits a simple least-squares coefficient per (centered) feature against the
    residuals, picks the one with the largest RSS reduction (lowest index on
    ties) and adds step_length times it.
    """
    features = np.asarray(features, dtype=float)
    updated = np.array(coefficients, dtype=float)
    index, beta = _best_component(np.asarray(residuals, dtype=float), features)
    updated[index] += step_length * beta
    return updated


@dataclass(frozen=True, eq=False)
class GlmBoostModel(FittedModel):
    coefficients: np.ndarray
    intercept: float
    loss_path: Tuple[float, ...]  # training MSE before the first and after every step

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coefficients + self.intercept


def fit_glmboost(spec: GlmBoostSpec, features, targets) -> GlmBoostModel:
    X, y = check_training(features, targets)
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    centered_X = X - x_mean
    centered_y = y - y_mean

    coefficients = np.zeros(X.shape[1])
    residuals = centered_y.copy()
    losses = [float(np.mean(residuals ** 2))]
    for step in range(spec.iterations):
        coefficients = boost_step(coefficients, residuals, centered_X, spec.step_length)
        residuals = centered_y - centered_X @ coefficients
        loss = float(np.mean(residuals ** 2))
        if loss > losses[-1] + 1e-12 * losses[0]:
            raise ForecastError(
                f"boosting loss increased at step {step + 1}: {losses[-1]:.6g} -> {loss:.6g}",
                stage="fit",
            )
        losses.append(loss)

    return GlmBoostModel(
        spec=spec,
        n_features=X.shape[1],
        coefficients=frozen_array(coefficients),
        intercept=y_mean - float(x_mean @ coefficients),
        loss_path=tuple(losses),
    )
