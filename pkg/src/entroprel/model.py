"""Problem-instance types shared across the package.

Stress levels are indexed ``0 .. m-1``. Level ``j`` means ``j`` units of
additional charging time beyond the first detectable unit, so a case study
with five levels has columns 0 through 4.

A stress matrix is stored component-major: row ``i`` holds the distribution
``p_i0 .. p_i(m-1)`` of component ``i`` over the stress levels.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from collections.abc import Mapping, Sequence

import numpy as np

from .exceptions import (
    NonMonotoneStressWarning,
    RangeError,
    RowSumError,
    ShapeError,
)

#: Rows deviating from 1 by less than this are silently renormalised.
ROW_SUM_TOLERANCE = 1e-6
#: Tolerance used for the row-sum invariant of an accepted matrix.
ROW_SUM_INVARIANT_TOL = 1e-9


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Component:
    """A network component and its fixed per-failure loss."""

    name: str
    unit_loss: float


@dataclass(frozen=True)
class StressMatrix:
    """Per-component probability of causing ``j`` units of extra time."""

    rows: tuple[tuple[float, ...], ...]

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def m(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def values(self) -> np.ndarray:
        return _readonly(self.rows)


@dataclass(frozen=True)
class Scenario:
    """A complete problem instance: roster, stress matrix and network targets.

    ``network_failure_probability`` (PF) and ``expected_loss`` (L) are the
    *targets* of the two constraints. The values actually achieved by a set
    of multipliers are computed separately and need not equal them.
    """

    components: tuple[Component, ...]
    stress: StressMatrix
    network_failure_probability: float
    expected_loss: float

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def n_levels(self) -> int:
        return self.stress.m

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.components]

    @property
    def unit_losses(self) -> np.ndarray:
        return _readonly([c.unit_loss for c in self.components])

    @property
    def p(self) -> np.ndarray:
        """Stress matrix as a read-only ``(n, m)`` array."""
        return self.stress.values


@dataclass(frozen=True)
class MultiplierPair:
    """Lagrange multipliers for the PF (``lambda1``) and L (``lambda2``) constraints."""

    lambda1: float
    lambda2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.lambda1, self.lambda2], dtype=float)

    @classmethod
    def from_array(cls, x) -> "MultiplierPair":
        return cls(float(x[0]), float(x[1]))


@dataclass(frozen=True, eq=False)
class FailureMatrix:
    """Grid of failure probabilities ``p^F[i, j]`` (components x levels).

    Entries are stored unclamped; ``multipliers`` records the pair that
    produced them, or ``None`` for hand-built matrices.
    """

    entries: np.ndarray
    multipliers: MultiplierPair | None = field(default=None)

    def __post_init__(self):
        arr = _readonly(self.entries)
        if arr.ndim != 2:
            raise ShapeError(f"failure matrix must be 2-D, got {arr.ndim}-D")
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def __eq__(self, other):
        if not isinstance(other, FailureMatrix):
            return NotImplemented
        return (
            self.multipliers == other.multipliers
            and self.entries.shape == other.entries.shape
            and bool(np.array_equal(self.entries, other.entries))
        )

    __hash__ = None


def _as_float(value, field_name) -> float:
    if isinstance(value, bool):
        raise RangeError(f"expected a number, got {value!r}", field=field_name)
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise RangeError(f"expected a number, got {value!r}", field=field_name) from None
    if not math.isfinite(out):
        raise RangeError(f"must be finite, got {out}", field=field_name)
    return out


def _validate_components(raw_components) -> tuple[Component, ...]:
    if not isinstance(raw_components, Sequence) or isinstance(raw_components, (str, bytes)):
        raise ShapeError("must be a list of components", field="components")
    if len(raw_components) == 0:
        raise ShapeError("at least one component is required", field="components")

    components = []
    seen = set()
    for k, raw in enumerate(raw_components):
        path = f"components[{k}]"
        if isinstance(raw, Component):
            name, unit_loss = raw.name, raw.unit_loss
        elif isinstance(raw, Mapping):
            if "name" not in raw or "unit_loss" not in raw:
                raise ShapeError("needs 'name' and 'unit_loss'", field=path)
            name, unit_loss = raw["name"], raw["unit_loss"]
        else:
            raise ShapeError(f"unsupported component entry {raw!r}", field=path)

        if not isinstance(name, str) or not name.strip():
            raise RangeError("name must be a non-empty string", field=f"{path}.name")
        if name in seen:
            raise RangeError(f"duplicate component name {name!r}", field=f"{path}.name")
        seen.add(name)

        unit_loss = _as_float(unit_loss, f"{path}.unit_loss")
        if unit_loss < 1:
            raise RangeError(f"unit loss must be >= 1, got {unit_loss}", field=f"{path}.unit_loss")
        components.append(Component(name, unit_loss))
    return tuple(components)


def _validate_stress(raw_rows, n_components) -> StressMatrix:
    if isinstance(raw_rows, StressMatrix):
        raw_rows = raw_rows.rows
    elif isinstance(raw_rows, np.ndarray):
        raw_rows = raw_rows.tolist()
    if not isinstance(raw_rows, Sequence) or isinstance(raw_rows, (str, bytes)):
        raise ShapeError("must be a list of rows", field="stress_matrix")
    if len(raw_rows) != n_components:
        raise ShapeError(
            f"has {len(raw_rows)} rows but there are {n_components} components",
            field="stress_matrix",
        )

    width = None
    rows = []
    for i, raw in enumerate(raw_rows):
        path = f"stress_matrix[{i}]"
        if isinstance(raw, np.ndarray):
            raw = raw.tolist()
        if not isinstance(raw, Sequence) or isinstance(raw, (str, bytes)) or len(raw) == 0:
            raise ShapeError("must be a non-empty list of probabilities", field=path)
        if width is None:
            width = len(raw)
        elif len(raw) != width:
            raise ShapeError(f"has {len(raw)} levels, expected {width}", field=path)

        row = [_as_float(v, f"{path}[{j}]") for j, v in enumerate(raw)]
        for j, v in enumerate(row):
            if not 0.0 <= v <= 1.0:
                raise RangeError(f"probability {v} outside [0, 1]", field=f"{path}[{j}]")

        total = math.fsum(row)
        if abs(total - 1.0) > ROW_SUM_TOLERANCE:
            raise RowSumError(f"row sums to {total:.9g}, expected 1", field=path)
        if abs(total - 1.0) > 1e-12:
            row = [v / total for v in row]
        rows.append(tuple(row))

        if any(b < a for a, b in zip(row, row[1:])):
            warnings.warn(
                f"{path}: stress probabilities are not non-decreasing in the level",
                NonMonotoneStressWarning,
                stacklevel=3,
            )
    return StressMatrix(tuple(rows))


def validate_scenario(raw) -> Scenario:
    """Build a :class:`Scenario` from raw data, enforcing every invariant.

    ``raw`` is either a mapping with the keys ``components``,
    ``stress_matrix``, ``pf_target`` and ``loss_target`` (the JSON document
    layout) or an existing :class:`Scenario`, which is re-checked and
    returned unchanged when valid.

    Rows within ``1e-6`` of summing to 1 are renormalised; larger deviations
    raise :class:`RowSumError`.
    """
    if isinstance(raw, Scenario):
        raw = {
            "components": raw.components,
            "stress_matrix": raw.stress,
            "pf_target": raw.network_failure_probability,
            "loss_target": raw.expected_loss,
        }
    if not isinstance(raw, Mapping):
        raise ShapeError(f"scenario must be a mapping, got {type(raw).__name__}")

    for key in ("components", "stress_matrix", "pf_target", "loss_target"):
        if key not in raw:
            raise ShapeError("missing required field", field=key)

    components = _validate_components(raw["components"])
    stress = _validate_stress(raw["stress_matrix"], len(components))

    pf = _as_float(raw["pf_target"], "pf_target")
    if not 0.0 < pf < 1.0:
        raise RangeError(f"must lie strictly in (0, 1), got {pf}", field="pf_target")
    loss = _as_float(raw["loss_target"], "loss_target")
    if loss <= 0:
        raise RangeError(f"must be positive, got {loss}", field="loss_target")

    return Scenario(components, stress, pf, loss)
