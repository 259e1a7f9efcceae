"""
Learners package - six regressors behind one fit/predict contract
"""

from typing import Callable, Dict

import numpy as np

from models.data_models import SupervisedDataset
from models.learner_specs import LearnerKind, LearnerSpec
from processors.learners.base import FittedModel
from processors.learners.cubist import fit_cubist
from processors.learners.glmboost import boost_step, fit_glmboost
from processors.learners.knn import fit_knn
from processors.learners.mars import fit_mars, hinge_basis
from processors.learners.mlp import fit_mlp
from processors.learners.svr import fit_svr, rbf_kernel

_FITTERS: Dict[LearnerKind, Callable[..., FittedModel]] = {
    LearnerKind.KNN: fit_knn,
    LearnerKind.MARS: fit_mars,
    LearnerKind.SVR: fit_svr,
    LearnerKind.GLMBOOST: fit_glmboost,
    LearnerKind.CUBIST: fit_cubist,
    LearnerKind.MLP: fit_mlp,
}


def fit_arrays(spec: LearnerSpec, features, targets) -> FittedModel:
    """Fits the learner named by spec.kind on a raw feature matrix"""
    return _FITTERS[spec.learner_kind](spec, features, targets)


def fit(spec: LearnerSpec, train: SupervisedDataset) -> FittedModel:
    return fit_arrays(spec, train.features, train.targets)


def predict(model: FittedModel, features) -> np.ndarray:
    return model.predict(features)


__all__ = [
    "FittedModel",
    "boost_step",
    "fit",
    "fit_arrays",
    "hinge_basis",
    "predict",
    "rbf_kernel",
]
