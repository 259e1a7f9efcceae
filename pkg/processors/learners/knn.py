"""
k-nearest neighbours regression (uniform weights, Euclidean distance)
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from models.data_models import frozen_array
from models.errors import InsufficientDataError
from models.learner_specs import KnnSpec
from processors.learners.base import FittedModel, check_training


def nearest_rows(queries: np.ndarray, store: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k nearest stored rows per query; equal distances keep the lower index"""
    distances = cdist(queries, store, metric="sqeuclidean")
    return np.argsort(distances, axis=1, kind="stable")[:, :k]


@dataclass(frozen=True, eq=False)
class KnnModel(FittedModel):
    features: np.ndarray
    targets: np.ndarray

    def _predict(self, X: np.ndarray) -> np.ndarray:
        nearest = nearest_rows(X, self.features, self.spec.k)
        return self.targets[nearest].mean(axis=1)


def fit_knn(spec: KnnSpec, features, targets) -> KnnModel:
    X, y = check_training(features, targets, min_rows=1)
    if len(y) < spec.k:
        raise InsufficientDataError(f"k-NN with k={spec.k} needs at least {spec.k} rows, got {len(y)}")
    return KnnModel(
        spec=spec,
        n_features=X.shape[1],
        features=frozen_array(X, ndim=2),
        targets=frozen_array(y),
    )
