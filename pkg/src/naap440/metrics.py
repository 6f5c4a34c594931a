"""Evaluation metrics: MAE, monotonicity violations, score and acceleration.

A pair of test architectures is violated when the predicted ordering opposes
the true ordering.  Ties count half: a pair where exactly one of the two
orderings is a tie contributes 0.5, a pair tied on both sides contributes
nothing.  The score normalizes violations away: 1 - violations / C(n, 2), so
1.0 is a perfect ranking and 0.5 is the constant-predictor level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "mae",
    "count_violations",
    "monotonicity_score",
    "acceleration",
    "EvalReport",
    "evaluate",
    "naive_reference",
]


def _check_pair(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.ndim != 1 or y_true.shape != y_pred.shape:
        raise ValueError(
            f"expected two equal-length 1-d arrays, got {y_true.shape} and {y_pred.shape}"
        )
    if not (np.isfinite(y_true).all() and np.isfinite(y_pred).all()):
        raise ValueError("metrics require finite values")
    return y_true, y_pred


def mae(y_true, y_pred) -> float:
    """Mean absolute error."""
    y_true, y_pred = _check_pair(y_true, y_pred)
    if y_true.size == 0:
        raise ValueError("mae of an empty set is undefined")
    return float(np.abs(y_true - y_pred).mean())


def count_violations(y_true, y_pred) -> float:
    """Monotonicity violations over all unordered pairs.

    Strictly opposite orderings count 1, a tie on exactly one side counts 0.5,
    a tie on both sides counts 0.  Returns a float because of the halves.
    """
    y_true, y_pred = _check_pair(y_true, y_pred)
    n = y_true.size
    if n < 2:
        raise ValueError("violations need at least two points")
    i, j = np.triu_indices(n, k=1)
    dt = np.sign(y_true[j] - y_true[i])
    dp = np.sign(y_pred[j] - y_pred[i])
    opposite = (dt * dp) < 0
    one_tied = (dt == 0) ^ (dp == 0)
    return float(opposite.sum() + 0.5 * one_tied.sum())


def monotonicity_score(y_true, y_pred) -> float:
    """1 - violations / C(n, 2)."""
    y_true, y_pred = _check_pair(y_true, y_pred)
    return 1.0 - count_violations(y_true, y_pred) / math.comb(y_true.size, 2)


def acceleration(num_epochs_used: int, total_epochs: int = 90) -> float:
    """Fraction of the per-architecture training budget a predictor avoids.

    Scheme-only prediction (0 epochs observed) accelerates by 1.0; watching
    the first 9 of 90 epochs accelerates by 0.9.
    """
    if total_epochs <= 0:
        raise ValueError(f"total_epochs must be positive, got {total_epochs}")
    if not 0 <= num_epochs_used <= total_epochs:
        raise ValueError(
            f"num_epochs_used must lie in [0, {total_epochs}], got {num_epochs_used}"
        )
    return 1.0 - num_epochs_used / total_epochs


@dataclass(frozen=True)
class EvalReport:
    """All evaluation numbers for one prediction vector.

    ``true_ties`` records whether the true targets contained any tie, since
    that changes how the half-violation rule contributes to the count.
    """

    mae: float
    violations: float
    monotonicity_score: float
    n: int
    acceleration: float
    num_pairs: int
    true_ties: bool

    def __post_init__(self):
        # score and violations must describe the same ranking
        assert abs(self.monotonicity_score - (1.0 - self.violations / self.num_pairs)) < 1e-12
        assert 0.0 <= self.acceleration <= 1.0


def evaluate(y_true, y_pred, accel: float = 1.0) -> EvalReport:
    """Bundle MAE, violations and score for one test set.

    ``accel`` is the acceleration fraction of the feature set that produced
    ``y_pred`` (see :func:`acceleration`); it is carried through for reporting.
    """
    y_true, y_pred = _check_pair(y_true, y_pred)
    n = y_true.size
    if n < 2:
        raise ValueError("evaluation needs at least two test points")
    violations = count_violations(y_true, y_pred)
    pairs = math.comb(n, 2)
    return EvalReport(
        mae=mae(y_true, y_pred),
        violations=violations,
        monotonicity_score=1.0 - violations / pairs,
        n=n,
        acceleration=accel,
        num_pairs=pairs,
        true_ties=bool(np.unique(y_true).size < n),
    )


def naive_reference(train_targets, test_targets) -> EvalReport:
    """Reference predictor: the training-set mean for every test point.

    With distinct test targets this lands exactly at score 0.5 (every pair is
    half-violated), which anchors the score scale.
    """
    train_targets = np.asarray(train_targets, dtype=float)
    if train_targets.size == 0:
        raise ValueError("naive reference needs training targets")
    test_targets = np.asarray(test_targets, dtype=float)
    prediction = np.full(test_targets.shape, train_targets.mean())
    return evaluate(test_targets, prediction, accel=1.0)
