"""
MLP
Single hidden layer, logistic activation, linear output, trained by
full-batch gradient descent on standardized inputs and targets
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import expit

from models.data_models import frozen_array
from models.learner_specs import MlpSpec
from processors.learners.base import FittedModel, check_training, target_scale

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MlpWeights:
    hidden: np.ndarray        # n_features x hidden_units
    hidden_bias: np.ndarray   # hidden_units
    output: np.ndarray        # hidden_units
    output_bias: float

    def pack(self) -> np.ndarray:
        return np.concatenate([self.hidden.ravel(), self.hidden_bias, self.output, [self.output_bias]])

    @classmethod
    def unpack(cls, vector: np.ndarray, n_features: int, hidden_units: int) -> "MlpWeights":
        split = n_features * hidden_units
        return cls(
            hidden=vector[:split].reshape(n_features, hidden_units),
            hidden_bias=vector[split:split + hidden_units],
            output=vector[split + hidden_units:split + 2 * hidden_units],
            output_bias=float(vector[-1]),
        )

    @classmethod
    def initial(cls, n_features: int, hidden_units: int, seed: int) -> "MlpWeights":
        """Uniform in [-0.5, 0.5]"""
        rng = np.random.default_rng(seed)
        size = n_features * hidden_units + 2 * hidden_units + 1
        return cls.unpack(rng.uniform(-0.5, 0.5, size), n_features, hidden_units)


def forward(weights: MlpWeights, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(hidden activations, outputs)"""
    activations = expit(X @ weights.hidden + weights.hidden_bias)
    return activations, activations @ weights.output + weights.output_bias


def loss_and_gradient(weights: MlpWeights, X: np.ndarray, y: np.ndarray) -> Tuple[float, MlpWeights]:
    """Half mean squared error and its analytic gradient"""
    activations, outputs = forward(weights, X)
    n_rows = len(y)
    error = outputs - y
    loss = 0.5 * float(np.mean(error ** 2))

    d_output = error / n_rows
    d_hidden = np.outer(d_output, weights.output) * activations * (1.0 - activations)
    gradient = MlpWeights(
        hidden=X.T @ d_hidden,
        hidden_bias=d_hidden.sum(axis=0),
        output=activations.T @ d_output,
        output_bias=float(d_output.sum()),
    )
    return loss, gradient


@dataclass(frozen=True, eq=False)
class MlpModel(FittedModel):
    weights: MlpWeights
    x_mean: np.ndarray
    x_std: np.ndarray
    y_mean: float
    y_std: float
    final_loss: float = float("nan")

    def _predict(self, X: np.ndarray) -> np.ndarray:
        _, outputs = forward(self.weights, (X - self.x_mean) / self.x_std)
        return self.y_mean + self.y_std * outputs


def fit_mlp(spec: MlpSpec, features, targets) -> MlpModel:
    X, y = check_training(features, targets)
    x_mean = X.mean(axis=0)
    x_std = X.std(axis=0, ddof=1)
    x_std = np.where(x_std > 0, x_std, 1.0)
    y_mean, y_std = target_scale(y)
    Z = (X - x_mean) / x_std
    t = (y - y_mean) / y_std

    n_features = X.shape[1]
    weights = MlpWeights.initial(n_features, spec.hidden_units, spec.seed)
    vector = weights.pack()
    loss = float("nan")
    for _ in range(spec.epochs):
        loss, gradient = loss_and_gradient(weights, Z, t)
        vector = vector - spec.learning_rate * gradient.pack()
        weights = MlpWeights.unpack(vector, n_features, spec.hidden_units)
    logger.debug(f"MLP: {spec.hidden_units} нейронов, {spec.epochs} эпох, loss {loss:.6g}")

    return MlpModel(
        spec=spec,
        n_features=n_features,
        weights=weights,
        x_mean=frozen_array(x_mean),
        x_std=frozen_array(x_std),
        y_mean=y_mean,
        y_std=y_std,
        final_loss=loss,
    )
