"""Brute-force grid search used to certify optimizer results.

The scan evaluates the same objective as the optimizer on a regular
lattice, in row-major order with ``lambda1`` as the outer axis. Ties go to
the first point scanned, so results do not depend on how the evaluation
is chunked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import RangeError
from .model import MultiplierPair, Scenario
from .optimizer import OptimizerOptions, objective_terms_batch

_CHUNK = 4096


@dataclass(frozen=True)
class GridSpec:
    lambda1_range: tuple[float, float]
    lambda2_range: tuple[float, float]
    steps_per_axis: int

    def __post_init__(self):
        if self.steps_per_axis < 2:
            raise RangeError("needs at least 2 steps", field="steps_per_axis")
        for name in ("lambda1_range", "lambda2_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise RangeError(f"reversed interval ({lo}, {hi})", field=name)

    @property
    def spacing(self) -> tuple[float, float]:
        k = self.steps_per_axis - 1
        return (
            (self.lambda1_range[1] - self.lambda1_range[0]) / k,
            (self.lambda2_range[1] - self.lambda2_range[0]) / k,
        )

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (
            np.linspace(*self.lambda1_range, self.steps_per_axis),
            np.linspace(*self.lambda2_range, self.steps_per_axis),
        )

    def check_within(self, options: OptimizerOptions):
        lo, hi = options.lower, options.upper
        for k, name in enumerate(("lambda1_range", "lambda2_range")):
            a, b = getattr(self, name)
            if a < lo[k] or b > hi[k]:
                raise RangeError(f"[{a}, {b}] leaves the bounds [{lo[k]}, {hi[k]}]", field=name)


@dataclass(frozen=True)
class GridResult:
    multipliers: MultiplierPair
    objective: float
    grid: GridSpec
    evaluations: int


def default_grid(scenario: Scenario, options: OptimizerOptions | None = None, steps: int = 400,
                 lambda2_max: float = 5.0) -> GridSpec:
    """Physics-informed box ``[-3 max(UL) lambda2_max, hi1] x [lo2, lambda2_max]``.

    Finite bounds in ``options`` win over the envelope.
    """
    options = options or OptimizerOptions()
    lo, hi = options.lower, options.upper
    l1_lo = max(lo[0], -3.0 * float(np.max(scenario.unit_losses)) * lambda2_max)
    l2_hi = min(hi[1], lambda2_max)
    return GridSpec((l1_lo, hi[0]), (lo[1], l2_hi), steps)


def grid_search(scenario: Scenario, options: OptimizerOptions | None = None,
                grid: GridSpec | None = None) -> GridResult:
    """Evaluate the objective on every lattice point and return the best."""
    options = options or OptimizerOptions()
    grid = grid or default_grid(scenario, options)
    grid.check_within(options)

    l1_axis, l2_axis = grid.axes()
    l1, l2 = np.meshgrid(l1_axis, l2_axis, indexing="ij")
    l1, l2 = l1.ravel(), l2.ravel()

    best_value, best_index = np.inf, 0
    for start in range(0, l1.size, _CHUNK):
        values = objective_terms_batch(l1[start:start + _CHUNK], l2[start:start + _CHUNK], scenario, options)[0]
        values = np.where(np.isnan(values), np.inf, values)
        k = int(np.argmin(values))
        if values[k] < best_value:
            best_value, best_index = float(values[k]), start + k

    return GridResult(
        MultiplierPair(float(l1[best_index]), float(l2[best_index])),
        best_value,
        grid,
        l1.size,
    )


def refine_search(scenario: Scenario, options: OptimizerOptions | None, around: MultiplierPair,
                  radius: float, steps: int = 21) -> GridResult:
    """Grid search on ``around +/- radius`` clipped to the multiplier bounds."""
    if not radius > 0:
        raise RangeError("must be positive", field="radius")
    options = options or OptimizerOptions()
    lo, hi = options.lower, options.upper
    center = around.as_array()
    box_lo = np.maximum(center - radius, lo)
    box_hi = np.minimum(center + radius, hi)
    grid = GridSpec((float(box_lo[0]), float(box_hi[0])), (float(box_lo[1]), float(box_hi[1])), steps)
    return grid_search(scenario, options, grid)


def _on_edge(result: GridResult, options: OptimizerOptions) -> bool:
    """True if the best point sits on a box edge that is not a variable bound."""
    x = result.multipliers.as_array()
    lo = np.array([result.grid.lambda1_range[0], result.grid.lambda2_range[0]])
    hi = np.array([result.grid.lambda1_range[1], result.grid.lambda2_range[1]])
    at_lo = (x == lo) & (lo > options.lower)
    at_hi = (x == hi) & (hi < options.upper)
    return bool(np.any(at_lo | at_hi))


def refine_until(scenario: Scenario, options: OptimizerOptions | None, start: GridResult,
                 target_spacing: float = 1e-6, steps: int = 21, max_rounds: int = 200) -> list[GridResult]:
    """Nested refinement around ``start`` until both lattice spacings are small.

    Each round searches a box of two current spacings around the incumbent,
    so the incumbent is always re-evaluated and the best objective never
    increases. When the winner lands on the edge of the box the next round
    re-centres at the same size instead of shrinking, which lets the search
    walk along narrow valleys. Returns every round, starting with ``start``.
    """
    options = options or OptimizerOptions()
    rounds = [start]
    current = start
    radius = 2.0 * max(start.grid.spacing)
    for _ in range(max_rounds):
        if max(current.grid.spacing) <= target_spacing:
            break
        nxt = refine_search(scenario, options, current.multipliers, radius, steps)
        if nxt.objective > current.objective:
            nxt = GridResult(current.multipliers, current.objective, nxt.grid, nxt.evaluations)
        elif not _on_edge(nxt, options):
            radius = 2.0 * max(nxt.grid.spacing)
        rounds.append(nxt)
        current = nxt
    return rounds
