"""Component and series-system reliability derived from a failure matrix.

The network is a series system: it fails when any single component fails.
Stress level stands in for time, so a reliability "curve" is indexed by
stress level rather than hours.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ProbabilityOverflowError, ShapeError
from .maxent import constraint_f1, shannon_entropy
from .model import FailureMatrix, Scenario

_OVERFLOW_TOL = 1e-9


def _entries(matrix) -> np.ndarray:
    if isinstance(matrix, FailureMatrix):
        return matrix.entries
    return np.asarray(matrix, dtype=float)


def _weighted(scenario: Scenario, matrix) -> np.ndarray:
    q = _entries(matrix)
    if q.shape != (scenario.n_components, scenario.n_levels):
        raise ShapeError(f"failure matrix has shape {q.shape}, scenario needs "
                         f"{(scenario.n_components, scenario.n_levels)}")
    return scenario.p * q


def component_failure_probabilities(scenario: Scenario, matrix) -> np.ndarray:
    """Stress-weighted failure probability ``sum_j p_ij pF_ij`` per component.

    Raises :class:`ProbabilityOverflowError` if any component exceeds 1.
    """
    totals = _weighted(scenario, matrix).sum(axis=1)
    over = np.flatnonzero(totals > 1.0 + _OVERFLOW_TOL)
    if over.size:
        i = int(over[0])
        raise ProbabilityOverflowError(
            f"component {scenario.components[i].name!r} has failure probability {totals[i]:.9g} > 1",
            field=f"components[{i}]",
        )
    return np.minimum(totals, 1.0)


def component_failure_probability(scenario: Scenario, matrix, i: int) -> float:
    if not 0 <= i < scenario.n_components:
        raise IndexError(f"component index {i} out of range")
    return float(component_failure_probabilities(scenario, matrix)[i])


def network_failure_exact(scenario: Scenario, matrix) -> float:
    """Series-system failure probability ``1 - prod(1 - F_i)``."""
    return float(1.0 - np.prod(1.0 - component_failure_probabilities(scenario, matrix)))


def network_failure_linear(scenario: Scenario, matrix) -> float:
    """First-order approximation ``sum F_i``; an upper bound, not a probability."""
    return constraint_f1(scenario, _entries(matrix))


def reliability_per_stress_level(matrix) -> np.ndarray:
    """System reliability at each level: ``R_j = prod_i (1 - pF_ij)``."""
    return np.prod(1.0 - _entries(matrix), axis=0)


def weighted_reliability_per_stress_level(scenario: Scenario, matrix) -> np.ndarray:
    """Diagnostic variant ``prod_i (1 - p_ij pF_ij)``.

    Kept for comparison only; it stays far from zero at the top level and so
    does not describe the collapse the unweighted curve shows.
    """
    return np.prod(1.0 - _weighted(scenario, matrix), axis=0)


@dataclass(frozen=True)
class WeakestComponent:
    index: int
    name: str
    max_level_value: float
    row_sums: tuple[float, ...]
    exceeds_one: tuple[bool, ...]


def identify_weakest_component(scenario: Scenario, matrix) -> WeakestComponent:
    """Component most likely to fail at the highest stress level.

    Ties on the top-level value fall back to the larger row sum of ``pF``,
    then to the lower index.
    """
    q = _entries(matrix)
    top = q[:, -1]
    sums = q.sum(axis=1)
    # lexsort keys: last is primary; negate for descending
    order = np.lexsort((np.arange(q.shape[0]), -sums, -top))
    i = int(order[0])
    return WeakestComponent(
        index=i,
        name=scenario.components[i].name,
        max_level_value=float(top[i]),
        row_sums=tuple(float(s) for s in sums),
        exceeds_one=tuple(bool(s > 1.0) for s in sums),
    )


@dataclass(frozen=True)
class ReliabilityCurve:
    per_level: tuple[float, ...]
    per_component_failure: tuple[float, ...]
    weakest_component: int
    network_failure_exact: float
    network_failure_linear: float
    entropy_nats: float


def reliability_curve(scenario: Scenario, matrix) -> ReliabilityCurve:
    per_component = component_failure_probabilities(scenario, matrix)
    return ReliabilityCurve(
        per_level=tuple(float(r) for r in reliability_per_stress_level(matrix)),
        per_component_failure=tuple(float(f) for f in per_component),
        weakest_component=identify_weakest_component(scenario, matrix).index,
        network_failure_exact=float(1.0 - np.prod(1.0 - per_component)),
        network_failure_linear=network_failure_linear(scenario, matrix),
        entropy_nats=shannon_entropy(matrix),
    )


@dataclass(frozen=True)
class EntropyReliabilityPoint:
    entropy_nats: float
    reliability: tuple[float, ...]
    network_failure_exact: float


def entropy_reliability_report(scenario: Scenario, matrices) -> list[EntropyReliabilityPoint]:
    """Pair each matrix's entropy with its reliability curve.

    The pairing is reported as-is; no monotone relationship is imposed.
    """
    matrices = list(matrices)
    if not matrices:
        raise ValueError("at least one failure matrix is required")
    return [
        EntropyReliabilityPoint(
            entropy_nats=shannon_entropy(m),
            reliability=tuple(float(r) for r in reliability_per_stress_level(m)),
            network_failure_exact=network_failure_exact(scenario, m),
        )
        for m in matrices
    ]
