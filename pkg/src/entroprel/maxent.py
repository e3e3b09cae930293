"""Closed-form maximum-entropy failure probabilities and their constraints.

Maximising the Shannon entropy of the failure probabilities subject to the
network failure-probability and expected-loss constraints gives, per cell::

    pF[i, j] = exp(-1 - p[i, j] * (lambda1 + lambda2 * UL[i]))

Nothing here clamps: an entry of 1 or more simply marks an invalid pair of
multipliers, which :func:`check_validity` reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ShapeError
from .model import FailureMatrix, MultiplierPair, Scenario

__all__ = [
    "MultiplierPair",
    "ValidityReport",
    "failure_probability",
    "failure_matrix",
    "shannon_entropy",
    "constraint_f1",
    "constraint_f2",
    "check_validity",
]


def failure_probability(p_ij, multipliers: MultiplierPair, unit_loss):
    """Failure probability of one cell (broadcasts over arrays)."""
    slope = multipliers.lambda1 + multipliers.lambda2 * np.asarray(unit_loss, dtype=float)
    out = np.exp(-1.0 - np.asarray(p_ij, dtype=float) * slope)
    return float(out) if out.ndim == 0 else out


def failure_matrix(scenario: Scenario, multipliers: MultiplierPair) -> FailureMatrix:
    slope = multipliers.lambda1 + multipliers.lambda2 * scenario.unit_losses
    entries = np.exp(-1.0 - scenario.p * slope[:, None])
    return FailureMatrix(entries, multipliers)


def _entries(matrix) -> np.ndarray:
    if isinstance(matrix, FailureMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def shannon_entropy(matrix) -> float:
    """Entropy ``-sum pF ln pF`` in nats over all cells."""
    q = _entries(matrix)
    if np.any(q <= 0):
        raise DomainError("entropy needs strictly positive entries")
    return float(-np.sum(q * np.log(q)))


def _check_shapes(scenario: Scenario, q: np.ndarray):
    expected = (scenario.n_components, scenario.n_levels)
    if q.shape != expected:
        raise ShapeError(f"failure matrix has shape {q.shape}, scenario needs {expected}")


def constraint_f1(scenario: Scenario, matrix) -> float:
    """Achieved linearised network failure probability ``sum p * pF``."""
    q = _entries(matrix)
    _check_shapes(scenario, q)
    return float(np.sum(scenario.p * q))


def constraint_f2(scenario: Scenario, matrix) -> float:
    """Achieved expected loss ``sum UL * p * pF``."""
    q = _entries(matrix)
    _check_shapes(scenario, q)
    return float(np.sum(scenario.unit_losses[:, None] * scenario.p * q))


@dataclass(frozen=True)
class ValidityReport:
    """Sign and range conditions a multiplier pair must meet.

    ``case2_holds_per_component[i]`` is ``lambda1 + lambda2 * UL[i] < 0``,
    the regime where failure probability grows with stress probability.
    """

    case2_holds_per_component: tuple[bool, ...]
    exponent_bound_holds: bool
    lambda2_positive: bool
    lambda1_negative: bool
    lambda1_below_max_loss: bool
    overall_valid: bool

    @property
    def increasing_in_stress(self) -> bool:
        return all(self.case2_holds_per_component)

    def bullets(self) -> dict[str, bool]:
        """The four case-study checks, in reporting order."""
        return {
            "exponent_bound": self.exponent_bound_holds,
            "signs": self.lambda2_positive and self.lambda1_negative,
            "lambda1_below_max_loss": self.lambda1_below_max_loss,
            "increasing_in_stress": self.increasing_in_stress,
        }

    def to_dict(self) -> dict:
        return {
            "case2_holds_per_component": list(self.case2_holds_per_component),
            "exponent_bound_holds": self.exponent_bound_holds,
            "lambda2_positive": self.lambda2_positive,
            "lambda1_negative": self.lambda1_negative,
            "lambda1_below_max_loss": self.lambda1_below_max_loss,
            "increasing_in_stress": self.increasing_in_stress,
            "overall_valid": self.overall_valid,
        }


def check_validity(scenario: Scenario, multipliers: MultiplierPair) -> ValidityReport:
    l1, l2 = multipliers.lambda1, multipliers.lambda2
    ul = scenario.unit_losses
    slope = l1 + l2 * ul
    case2 = tuple(bool(s < 0) for s in slope)
    exponent_ok = bool(np.all(scenario.p * slope[:, None] > -1.0))
    l2_pos = l2 > 0
    l1_neg = l1 < 0
    below = bool(l1 < -l2 * float(np.max(ul)))
    overall = all(case2) and exponent_ok and l2_pos and l1_neg
    return ValidityReport(case2, exponent_ok, l2_pos, l1_neg, below, overall)
