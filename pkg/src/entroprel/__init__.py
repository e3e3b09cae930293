"""Maximum-entropy failure probabilities and series-system reliability.

Typical use::

    from entroprel import load_scenario, estimate_multipliers, failure_matrix

    doc = load_scenario("case_study.json")
    run = estimate_multipliers(doc.scenario, doc.options)
    table = failure_matrix(doc.scenario, run.final_multipliers)
"""

from .charging import (
    ChargingSession,
    derive_stress_levels,
    energy_needed,
    expected_charging_time,
)
from .estimator import MaxEntFailureEstimator
from .exceptions import (
    DegenerateScenarioError,
    DivisionDomainError,
    DomainError,
    EntroprelError,
    ParseError,
    ProbabilityOverflowError,
    RangeError,
    RowSumError,
    ShapeError,
)
from .io import emit_failure_table, load_scenario, parse_scenario
from .maxent import (
    ValidityReport,
    check_validity,
    constraint_f1,
    constraint_f2,
    failure_matrix,
    failure_probability,
    shannon_entropy,
)
from .model import Component, FailureMatrix, MultiplierPair, Scenario, StressMatrix, validate_scenario
from .optimizer import (
    ConvergenceReason,
    OptimizerOptions,
    OptimizerRun,
    bfgs_update,
    estimate_multipliers,
    gradient_fd,
    objective,
)
from .reliability import (
    ReliabilityCurve,
    component_failure_probability,
    entropy_reliability_report,
    identify_weakest_component,
    network_failure_exact,
    network_failure_linear,
    reliability_curve,
    reliability_per_stress_level,
)
from .validation import GridSpec, grid_search, refine_search

__version__ = "0.1.0"
