"""
Preprocessor
Feature standardization, PCA with a cumulative-variance threshold and
time-slice (rolling-origin) validation splits
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from models.data_models import TimeSliceConfig, frozen_array
from models.errors import ConfigurationError, DimensionMismatchError, InsufficientDataError

logger = logging.getLogger(__name__)


def _as_matrix(features, n_columns: Optional[int] = None) -> np.ndarray:
    matrix = np.asarray(features, dtype=float)
    if matrix.ndim != 2:
        raise DimensionMismatchError(f"expected a feature matrix, got shape {matrix.shape}")
    if n_columns is not None and matrix.shape[1] != n_columns:
        raise DimensionMismatchError(
            f"feature matrix has {matrix.shape[1]} columns, model expects {n_columns}"
        )
    return matrix


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-column means and sample stds learned from training rows"""
    means: np.ndarray
    stds: np.ndarray

    def apply(self, features) -> np.ndarray:
        matrix = _as_matrix(features, len(self.means))
        return (matrix - self.means) / self.stds

    def inverse(self, scaled) -> np.ndarray:
        matrix = _as_matrix(scaled, len(self.means))
        return matrix * self.stds + self.means


def fit_standardizer(train_features) -> Standardizer:
    """
    z = (x - mean) / std per column, std with n-1

    Constant columns get std 1, so their training values map to 0.

    Raises:
        InsufficientDataError: fewer than two rows
    """
    matrix = _as_matrix(train_features)
    if matrix.shape[0] < 2:
        raise InsufficientDataError(
            f"standardizer needs at least 2 training rows, got {matrix.shape[0]}"
        )
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0, ddof=1)
    stds = np.where(np.ptp(matrix, axis=0) == 0, 1.0, stds)
    return Standardizer(means=frozen_array(means), stds=frozen_array(stds))


@dataclass(frozen=True, eq=False)
class PcaModel:
    """
    Kept principal directions

    components are the orthonormal loadings (n_features x k); all_ratios holds
    the explained-variance ratio of every nonzero direction, kept or not.
    """
    components: np.ndarray
    explained_variance_ratio: np.ndarray
    threshold: float
    mean: np.ndarray
    all_ratios: np.ndarray

    @property
    def n_components(self) -> int:
        return self.components.shape[1]

    @property
    def n_features(self) -> int:
        return self.components.shape[0]

    @property
    def cumulative_ratio(self) -> float:
        return float(np.sum(self.explained_variance_ratio))

    def transform(self, features) -> np.ndarray:
        return transform_pca(self, features)

    def inverse_transform(self, scores) -> np.ndarray:
        scores = _as_matrix(scores, self.n_components)
        return scores @ self.components.T + self.mean


def fit_pca(train_features, threshold: float = 0.95) -> PcaModel:
    """
    Eigendecomposition of the sample covariance

    Keeps the smallest k whose cumulative explained-variance ratio reaches
    the threshold. Directions with (numerically) zero variance are dropped.
    Each loading vector is signed so its largest-magnitude entry is positive.

    Args:
        train_features: standardized training matrix
        threshold: target cumulative ratio in (0, 1]

    Raises:
        ConfigurationError: threshold outside (0, 1]
        InsufficientDataError: fewer than two rows
    """
    if not 0 < threshold <= 1:
        raise ConfigurationError(f"PCA threshold must lie in (0, 1], got {threshold}")
    matrix = _as_matrix(train_features)
    n_rows, n_features = matrix.shape
    if n_rows < 2:
        raise InsufficientDataError(f"PCA needs at least 2 rows, got {n_rows}")

    mean = matrix.mean(axis=0)
    covariance = np.atleast_2d(np.cov(matrix, rowvar=False))
    eigenvalues, eigenvectors = np.linalg.eigh(covariance)
    order = np.argsort(eigenvalues, kind="stable")[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]

    top = eigenvalues[0] if len(eigenvalues) else 0.0
    if top <= 0:
        # every feature constant: keep one direction so downstream shapes stay valid
        logger.warning("PCA: все признаки постоянны, оставлено одно направление")
        eigenvalues = np.array([1.0])
        eigenvectors = np.eye(n_features)[:, :1]
    else:
        keep = eigenvalues > top * 1e-12
        eigenvalues = eigenvalues[keep]
        eigenvectors = eigenvectors[:, keep]

    ratios = eigenvalues / eigenvalues.sum()
    cumulative = np.cumsum(ratios)
    k = min(int(np.searchsorted(cumulative, threshold - 1e-12, side="left")) + 1, len(ratios))

    loadings = eigenvectors[:, :k].copy()
    pivots = np.argmax(np.abs(loadings), axis=0)
    signs = np.where(loadings[pivots, np.arange(k)] < 0, -1.0, 1.0)
    loadings *= signs

    logger.debug(
        f"PCA: {n_features} признаков -> {k} компонент "
        f"(накопленная доля {cumulative[k - 1]:.4f}, порог {threshold})"
    )
    return PcaModel(
        components=frozen_array(loadings, ndim=2),
        explained_variance_ratio=frozen_array(ratios[:k]),
        threshold=threshold,
        mean=frozen_array(mean),
        all_ratios=frozen_array(ratios),
    )


def transform_pca(model: PcaModel, features) -> np.ndarray:
    """Scores of features on the kept components"""
    matrix = _as_matrix(features, model.n_features)
    return (matrix - model.mean) @ model.components


@dataclass(frozen=True, eq=False)
class FeaturePipeline:
    """Standardize then project; either step may be absent"""
    standardizer: Optional[Standardizer] = None
    pca: Optional[PcaModel] = None

    def transform(self, features) -> np.ndarray:
        matrix = _as_matrix(features)
        if self.standardizer is not None:
            matrix = self.standardizer.apply(matrix)
        if self.pca is not None:
            matrix = self.pca.transform(matrix)
        return matrix

    @property
    def n_outputs(self) -> Optional[int]:
        return self.pca.n_components if self.pca is not None else None


def fit_feature_pipeline(train_features, pca_threshold: Optional[float] = 0.95) -> FeaturePipeline:
    """Fits the standardizer and, unless pca_threshold is None, PCA on training rows only"""
    standardizer = fit_standardizer(train_features)
    pca = None
    if pca_threshold is not None:
        pca = fit_pca(standardizer.apply(train_features), pca_threshold)
    return FeaturePipeline(standardizer=standardizer, pca=pca)


def time_slices(n_rows: int, config: TimeSliceConfig) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Rolling-origin splits

    Slice j trains on rows [0, initial + j*step) (growing) or on the fixed-width
    window ending there, and validates on the following `horizon` rows.

    Raises:
        InsufficientDataError: initial_window + horizon > n_rows
    """
    if config.initial_window + config.horizon > n_rows:
        raise InsufficientDataError(
            f"time slices need initial_window + horizon <= rows "
            f"({config.initial_window} + {config.horizon} > {n_rows})"
        )
    slices = []
    end = config.initial_window
    while end + config.horizon <= n_rows:
        begin = 0 if config.growing else end - config.initial_window
        slices.append((np.arange(begin, end), np.arange(end, end + config.horizon)))
        end += config.step
    logger.debug(f"Временные срезы: {len(slices)} (строк {n_rows}, {config})")
    return slices
