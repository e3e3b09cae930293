"""Exception hierarchy for entroprel.

Every error raised on bad input derives from :class:`EntroprelError`, so
callers (and the CLI) can catch a single type. Validation errors carry an
optional ``field`` path such as ``"stress_matrix[2]"``.
"""


class EntroprelError(Exception):
    """Base class for all package errors."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class ScenarioError(EntroprelError, ValueError):
    """Raised when a scenario violates its invariants."""


class RowSumError(ScenarioError):
    """A stress row does not sum to 1 within the accepted tolerance."""


class ShapeError(ScenarioError):
    """Array shapes disagree (or a required dimension is empty)."""


class RangeError(ScenarioError):
    """A scalar or probability lies outside its admissible range."""


class ParseError(EntroprelError, ValueError):
    """A scenario document could not be parsed."""


class DivisionDomainError(EntroprelError, ZeroDivisionError):
    """Charging power times efficiency is zero."""


class DomainError(EntroprelError, ValueError):
    """A value lies outside the mathematical domain of an operation."""


class ProbabilityOverflowError(EntroprelError, ValueError):
    """A stress-weighted component failure probability exceeds 1."""


class DegenerateScenarioError(EntroprelError, ValueError):
    """The objective does not depend on the multipliers."""


class NonMonotoneStressWarning(UserWarning):
    """Stress probabilities of a component decrease with the stress level."""
