"""
MARS
Multivariate adaptive regression splines: greedy forward selection of
reflected hinge pairs, then backward pruning by generalized cross-validation
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from models.data_models import frozen_array
from models.errors import ConfigurationError
from models.learner_specs import MarsSpec
from processors.learners.base import FittedModel, check_training

logger = logging.getLogger(__name__)

# (feature, knot, sign); sign +1 is max(0, x - knot), -1 is max(0, knot - x)
Hinge = Tuple[int, float, int]
# product of hinges; the empty product is the intercept
Term = Tuple[Hinge, ...]

_RELATIVE_TOLERANCE = 1e-10


def hinge_basis(x, knot: float, direction: str = "+"):
    """max(0, x - knot) for '+', max(0, knot - x) for '-'"""
    if direction not in ("+", "-"):
        raise ConfigurationError(f"hinge direction must be '+' or '-', got {direction!r}")
    sign = 1.0 if direction == "+" else -1.0
    value = np.maximum(0.0, sign * (np.asarray(x, dtype=float) - knot))
    return float(value) if np.ndim(value) == 0 else value


def _hinge_column(X: np.ndarray, hinge: Hinge) -> np.ndarray:
    feature, knot, sign = hinge
    return hinge_basis(X[:, feature], knot, "+" if sign > 0 else "-")


def basis_matrix(terms, X: np.ndarray) -> np.ndarray:
    """Design matrix with one column per term"""
    columns = []
    for term in terms:
        column = np.ones(X.shape[0])
        for hinge in term:
            column = column * _hinge_column(X, hinge)
        columns.append(column)
    return np.column_stack(columns)


def gcv(rss: float, n_rows: int, n_terms: int, penalty: float) -> float:
    """RSS/n / (1 - C(M)/n)^2 with C(M) = M + penalty * (M - 1) / 2"""
    effective = n_terms + penalty * (n_terms - 1) / 2.0
    if effective >= n_rows:
        return float("inf")
    return (rss / n_rows) / (1.0 - effective / n_rows) ** 2


def _orthogonalize(q: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Removes the span of q's orthonormal columns, twice for stability"""
    for _ in range(2):
        columns = columns - q @ (q.T @ columns)
    return columns


def _candidate_gains(q, residual, plus, minus, single: bool):
    """
    RSS reduction of adding each knot's hinge pair (or best single hinge)

    plus and minus are n x K candidate columns. Returns (gain, use_plus,
    use_minus) per knot.
    """
    scale_plus = np.sum(plus * plus, axis=0)
    scale_minus = np.sum(minus * minus, axis=0)
    plus = _orthogonalize(q, plus)
    minus = _orthogonalize(q, minus)
    g11 = np.sum(plus * plus, axis=0)
    g22 = np.sum(minus * minus, axis=0)
    g12 = np.sum(plus * minus, axis=0)
    b1 = residual @ plus
    b2 = residual @ minus

    ok_plus = g11 > _RELATIVE_TOLERANCE * np.maximum(scale_plus, 1e-300)
    ok_minus = g22 > _RELATIVE_TOLERANCE * np.maximum(scale_minus, 1e-300)
    gain_plus = np.where(ok_plus, b1 ** 2 / np.where(ok_plus, g11, 1.0), 0.0)
    gain_minus = np.where(ok_minus, b2 ** 2 / np.where(ok_minus, g22, 1.0), 0.0)

    pick_plus = gain_plus >= gain_minus
    single_gain = np.where(pick_plus, gain_plus, gain_minus)
    if single:
        return single_gain, pick_plus & ok_plus, ~pick_plus & ok_minus

    det = g11 * g22 - g12 ** 2
    ok_pair = ok_plus & ok_minus & (det > _RELATIVE_TOLERANCE * g11 * g22)
    safe_det = np.where(ok_pair, det, 1.0)
    pair_gain = (g22 * b1 ** 2 - 2.0 * g12 * b1 * b2 + g11 * b2 ** 2) / safe_det
    gain = np.where(ok_pair, pair_gain, single_gain)
    use_plus = np.where(ok_pair, True, pick_plus & ok_plus)
    use_minus = np.where(ok_pair, True, ~pick_plus & ok_minus)
    return gain, use_plus, use_minus


def _forward_pass(X: np.ndarray, y: np.ndarray, spec: MarsSpec):
    """Adds hinge pairs while slots remain and some candidate lowers the RSS"""
    n_rows, n_features = X.shape
    terms: List[Term] = [()]
    q = np.ones((n_rows, 1)) / np.sqrt(n_rows)
    residual = y - q @ (q.T @ y)
    history = [float(residual @ residual)]
    knots = [np.unique(X[:, feature]) for feature in range(n_features)]
    floor = 1e-12 * max(history[0], 1e-300)

    while len(terms) < spec.max_terms and q.shape[1] < n_rows:
        single = spec.max_terms - len(terms) == 1
        best: Optional[Tuple[float, int, int, float, bool, bool]] = None
        parent_columns = basis_matrix(terms, X)
        for parent_index, parent in enumerate(terms):
            if len(parent) >= spec.degree:
                continue
            used = {hinge[0] for hinge in parent}
            parent_column = parent_columns[:, parent_index:parent_index + 1]
            for feature in range(n_features):
                if feature in used:
                    continue
                values = X[:, feature:feature + 1]
                plus = parent_column * np.maximum(0.0, values - knots[feature])
                minus = parent_column * np.maximum(0.0, knots[feature] - values)
                gain, use_plus, use_minus = _candidate_gains(q, residual, plus, minus, single)
                j = int(np.argmax(gain))
                if best is None or gain[j] > best[0]:
                    best = (float(gain[j]), parent_index, feature, float(knots[feature][j]),
                            bool(use_plus[j]), bool(use_minus[j]))
        if best is None or best[0] <= floor:
            break

        _, parent_index, feature, knot, use_plus, use_minus = best
        parent = terms[parent_index]
        new_terms = []
        if use_plus:
            new_terms.append(parent + ((feature, knot, 1),))
        if use_minus:
            new_terms.append(parent + ((feature, knot, -1),))
        for term in new_terms:
            column = _orthogonalize(q, basis_matrix([term], X))
            norm = np.linalg.norm(column)
            if norm <= 0:
                continue
            q = np.column_stack([q, column / norm])
            terms.append(term)
        residual = y - q @ (q.T @ y)
        history.append(float(residual @ residual))
        logger.debug(f"MARS forward: {len(terms)} термов, RSS {history[-1]:.6g}")

    return terms, history


def _least_squares(B: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, float]:
    coefficients = np.linalg.lstsq(B, y, rcond=None)[0]
    residual = y - B @ coefficients
    return coefficients, float(residual @ residual)


def _backward_pass(terms: List[Term], X: np.ndarray, y: np.ndarray, penalty: float):
    """Drops one non-intercept term at a time; returns the subset with the lowest GCV"""
    n_rows = len(y)
    B = basis_matrix(terms, X)
    active = list(range(len(terms)))
    _, rss = _least_squares(B, y)
    full_gcv = gcv(rss, n_rows, len(active), penalty)
    best_active, best_gcv = list(active), full_gcv

    while len(active) > 1:
        trial = None
        for position in range(1, len(active)):
            candidate = active[:position] + active[position + 1:]
            _, candidate_rss = _least_squares(B[:, candidate], y)
            if trial is None or candidate_rss < trial[0]:
                trial = (candidate_rss, candidate)
        rss, active = trial
        score = gcv(rss, n_rows, len(active), penalty)
        if score < best_gcv:
            best_active, best_gcv = list(active), score

    return best_active, best_gcv, full_gcv


@dataclass(frozen=True, eq=False)
class MarsModel(FittedModel):
    terms: Tuple[Term, ...]
    coefficients: np.ndarray
    forward_terms: Tuple[Term, ...]
    forward_rss: Tuple[float, ...]
    gcv: float
    full_gcv: float

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return basis_matrix(self.terms, X) @ self.coefficients

    def describe(self) -> List[str]:
        rendered = []
        for coefficient, term in zip(self.coefficients, self.terms):
            factors = " * ".join(
                f"h(x{feature} - {knot:.4g})" if sign > 0 else f"h({knot:.4g} - x{feature})"
                for feature, knot, sign in term
            )
            rendered.append(f"{coefficient:+.6g}" + (f" * {factors}" if factors else ""))
        return rendered


def fit_mars(spec: MarsSpec, features, targets) -> MarsModel:
    """
    Forward stepwise hinge selection up to max_terms (intercept included),
    knots at every observed feature value, then GCV backward pruning
    """
    X, y = check_training(features, targets)
    forward_terms, history = _forward_pass(X, y, spec)
    active, best_gcv, full_gcv = _backward_pass(forward_terms, X, y, spec.penalty)
    terms = tuple(forward_terms[i] for i in active)
    coefficients, _ = _least_squares(basis_matrix(terms, X), y)
    logger.debug(
        f"MARS: {len(forward_terms)} -> {len(terms)} термов, GCV {full_gcv:.6g} -> {best_gcv:.6g}"
    )
    return MarsModel(
        spec=spec,
        n_features=X.shape[1],
        terms=terms,
        coefficients=frozen_array(coefficients),
        forward_terms=tuple(forward_terms),
        forward_rss=tuple(history),
        gcv=best_gcv,
        full_gcv=full_gcv,
    )
