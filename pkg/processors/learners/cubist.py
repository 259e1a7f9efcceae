"""
Cubist-style rule learner

A simplification of Quinlan's Cubist: a variance-reduction regression tree
whose root-to-leaf paths become rules, each carrying a linear model fit on
its cases over the variables its conditions mention. Committees are grown on
residual-adjusted targets and averaged; an optional instance correction
adds the mean residual of the nearest training cases.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from sklearn.tree import DecisionTreeRegressor

from models.data_models import frozen_array
from models.learner_specs import CubistSpec
from processors.learners.base import FittedModel, check_training
from processors.learners.knn import nearest_rows

logger = logging.getLogger(__name__)

MAX_RULE_DEPTH = 3
MIN_CASES_PER_RULE = 10

# (feature, is_upper_bound, threshold): x <= threshold when is_upper_bound, else x > threshold
Condition = Tuple[int, bool, float]


@dataclass(frozen=True, eq=False)
class Rule:
    conditions: Tuple[Condition, ...]
    variables: Tuple[int, ...]
    intercept: float
    coefficients: np.ndarray
    cases: int

    def covers(self, X: np.ndarray) -> np.ndarray:
        mask = np.ones(X.shape[0], dtype=bool)
        for feature, upper, threshold in self.conditions:
            mask &= (X[:, feature] <= threshold) if upper else (X[:, feature] > threshold)
        return mask

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        return self.intercept + X[:, list(self.variables)] @ self.coefficients

    def describe(self) -> str:
        conditions = " and ".join(
            f"x{feature} {'<=' if upper else '>'} {threshold:.4g}"
            for feature, upper, threshold in self.conditions
        ) or "true"
        model = " ".join(
            f"{c:+.4g}*x{v}" for c, v in zip(self.coefficients, self.variables)
        )
        return f"if {conditions} then {self.intercept:.4g} {model} [{self.cases} cases]"


def _linear_model(X: np.ndarray, y: np.ndarray, variables: Tuple[int, ...]) -> Tuple[float, np.ndarray]:
    design = np.column_stack([np.ones(len(y)), X[:, list(variables)]])
    solution = np.linalg.lstsq(design, y, rcond=None)[0]
    return float(solution[0]), solution[1:]


def _tree_paths(tree) -> List[Tuple[int, Tuple[Condition, ...]]]:
    """(leaf node, conditions) for every root-to-leaf path, left branch first"""
    structure = tree.tree_
    paths = []
    stack = [(0, ())]
    while stack:
        node, conditions = stack.pop()
        left, right = structure.children_left[node], structure.children_right[node]
        if left == right:
            paths.append((node, conditions))
            continue
        feature = int(structure.feature[node])
        threshold = float(structure.threshold[node])
        stack.append((right, conditions + ((feature, False, threshold),)))
        stack.append((left, conditions + ((feature, True, threshold),)))
    return paths


def _grow_rules(X: np.ndarray, y: np.ndarray) -> Tuple[Rule, ...]:
    tree = DecisionTreeRegressor(
        criterion="squared_error",
        max_depth=MAX_RULE_DEPTH,
        min_samples_leaf=MIN_CASES_PER_RULE,
        random_state=0,
    ).fit(X, y)
    leaves = tree.apply(X)
    rules = []
    for leaf, conditions in _tree_paths(tree):
        rows = leaves == leaf
        variables = tuple(sorted({feature for feature, _, _ in conditions}))
        if not variables:
            variables = tuple(range(X.shape[1]))
        intercept, coefficients = _linear_model(X[rows], y[rows], variables)
        rules.append(Rule(conditions, variables, intercept, frozen_array(coefficients), int(rows.sum())))
    return tuple(rules)


def _apply_rules(rules: Tuple[Rule, ...], X: np.ndarray) -> np.ndarray:
    """Rules partition the feature space; every row matches exactly one"""
    prediction = np.empty(X.shape[0])
    for rule in rules:
        mask = rule.covers(X)
        if np.any(mask):
            prediction[mask] = rule.evaluate(X[mask])
    return prediction


@dataclass(frozen=True, eq=False)
class CubistModel(FittedModel):
    committees: Tuple[Tuple[Rule, ...], ...]
    train_features: np.ndarray
    train_residuals: np.ndarray  # target minus committee prediction per training case

    def rule_prediction(self, X: np.ndarray) -> np.ndarray:
        return np.mean([_apply_rules(rules, X) for rules in self.committees], axis=0)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        prediction = self.rule_prediction(X)
        if self.spec.instances == 0:
            return prediction
        neighbours = nearest_rows(X, self.train_features, self.spec.instances)
        return prediction + self.train_residuals[neighbours].mean(axis=1)


def fit_cubist(spec: CubistSpec, features, targets) -> CubistModel:
    """
    Member m > 1 is trained on 2y - p_{m-1}, where p_{m-1} is the previous
    member's prediction, so it leans against its predecessor's errors
    """
    X, y = check_training(features, targets, min_rows=max(2, spec.instances))
    committees = []
    adjusted = y
    for member in range(spec.committees):
        rules = _grow_rules(X, adjusted)
        committees.append(rules)
        adjusted = 2.0 * y - _apply_rules(rules, X)
        logger.debug(f"CUBIST: комитет {member + 1}, правил {len(rules)}")

    committees = tuple(committees)
    fitted = np.mean([_apply_rules(rules, X) for rules in committees], axis=0)
    return CubistModel(
        spec=spec,
        n_features=X.shape[1],
        committees=committees,
        train_features=frozen_array(X, ndim=2),
        train_residuals=frozen_array(y - fitted),
    )
