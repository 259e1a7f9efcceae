"""
SVR
Epsilon-insensitive support vector regression with a radial kernel
(libsvm SMO solver through scikit-learn)
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.svm import SVR

from models.data_models import frozen_array
from models.errors import ConfigurationError, DimensionMismatchError, SolverConvergenceError
from models.learner_specs import SvrSpec
from processors.learners.base import FittedModel, check_training, target_scale

logger = logging.getLogger(__name__)

SOLVER_TOLERANCE = 1e-4


def rbf_kernel(x, x_other, sigma: float) -> float:
    """exp(-sigma * ||x - x'||^2); sigma multiplies the squared distance directly"""
    if sigma <= 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    a = np.asarray(x, dtype=float)
    b = np.asarray(x_other, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"kernel arguments differ in shape: {a.shape} vs {b.shape}")
    return float(np.exp(-sigma * np.sum((a - b) ** 2)))


@dataclass(frozen=True, eq=False)
class SvrModel(FittedModel):
    """
    Dual solution on standardized targets

    dual_coef[i] is alpha_i - alpha_i* of support vector support[i];
    prediction is y_mean + y_std * (sum_i dual_coef[i] K(sv_i, x) + intercept).
    """
    support: np.ndarray
    support_vectors: np.ndarray
    dual_coef: np.ndarray
    intercept: float
    y_mean: float
    y_std: float

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Standardized-scale output"""
        squared = (
            np.sum(X ** 2, axis=1)[:, None]
            + np.sum(self.support_vectors ** 2, axis=1)[None, :]
            - 2.0 * X @ self.support_vectors.T
        )
        kernel = np.exp(-self.spec.sigma * np.maximum(squared, 0.0))
        return kernel @ self.dual_coef + self.intercept

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return self.y_mean + self.y_std * self.decision(X)


def fit_svr(spec: SvrSpec, features, targets) -> SvrModel:
    """
    Raises:
        SolverConvergenceError: solver stopped at max_iter before reaching tolerance
    """
    X, y = check_training(features, targets)
    y_mean, y_std = target_scale(y)
    estimator = SVR(
        kernel="rbf",
        gamma=spec.sigma,
        C=spec.cost,
        epsilon=spec.epsilon,
        tol=SOLVER_TOLERANCE,
        max_iter=spec.max_iter,
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        estimator.fit(X, (y - y_mean) / y_std)
    if any(issubclass(w.category, ConvergenceWarning) for w in caught):
        raise SolverConvergenceError(
            f"SVR solver did not converge within {spec.max_iter} iterations "
            f"(sigma={spec.sigma}, cost={spec.cost})"
        )

    support = np.asarray(estimator.support_, dtype=int)
    support.setflags(write=False)
    logger.debug(f"SVR: {len(support)} опорных векторов из {len(y)}")
    return SvrModel(
        spec=spec,
        n_features=X.shape[1],
        support=support,
        support_vectors=frozen_array(X[support].reshape(len(support), X.shape[1]), ndim=2),
        dual_coef=frozen_array(estimator.dual_coef_.ravel()),
        intercept=float(estimator.intercept_[0]),
        y_mean=y_mean,
        y_std=y_std,
    )
