"""Bounded quasi-Newton estimation of the two Lagrange multipliers.

The multipliers minimise a penalised least-squares objective::

    f = (F1 - PF)^2 + (F2 - L)^2
        + constraint_penalty * sum_i max(0, lambda1 + lambda2*UL_i + margin)^2
        + bound_penalty * sum_ij [max(0, floor - pF_ij)^2 + max(0, pF_ij - ceiling)^2]

Box bounds on the multipliers are enforced directly by projection; the
physical and probability constraints only through the penalties.

With two parameters the limited-memory aspect of L-BFGS-B buys nothing, so
the solver keeps the full 2x2 inverse Hessian and updates it with the
classic BFGS formula. Steps come from a projected backtracking (Armijo)
line search, and every iterate stays inside the box.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import DegenerateScenarioError, RangeError
from .model import MultiplierPair, Scenario

logger = logging.getLogger(__name__)

#: Stand-in magnitude for infinite bounds in projection arithmetic.
INFINITE_BOUND = 1e12


class ConvergenceReason(str, enum.Enum):
    FUNCTION_TOLERANCE = "FunctionTolerance"
    MAX_ITERATIONS = "MaxIterations"
    GRADIENT_VANISHED = "GradientVanished"


def _finite_bound(value, default):
    if value is None:
        return default
    value = float(value)
    return max(-INFINITE_BOUND, min(INFINITE_BOUND, value))


@dataclass(frozen=True)
class OptimizerOptions:
    """Solver configuration.

    ``constraint_margin`` turns the strict condition
    ``lambda1 + lambda2*UL_i < 0`` into the hinge
    ``max(0, lambda1 + lambda2*UL_i + margin)``. With a zero margin the
    penalised optimum sits marginally on the wrong side of the constraint.
    """

    lambda1_bounds: tuple[float, float] = (-math.inf, -0.5)
    lambda2_bounds: tuple[float, float] = (0.1, math.inf)
    constraint_penalty: float = 1e6
    bound_penalty: float = 1e4
    constraint_margin: float = 1e-3
    pf_floor: float = 1e-9
    pf_ceiling: float = 0.99
    fd_epsilon: float = 1e-7
    function_tolerance: float = 1e-3
    gradient_tolerance: float = 1e-10
    max_iterations: int = 100
    armijo_c: float = 1e-4
    max_backtracks: int = 30
    curvature_floor: float = 1e-12
    active_width: float = 1e-2
    initial_guess: MultiplierPair | None = None

    def __post_init__(self):
        if not self.pf_floor < self.pf_ceiling:
            raise RangeError("pf_floor must be below pf_ceiling", field="pf_floor")
        for name in ("lambda1_bounds", "lambda2_bounds"):
            lo, hi = getattr(self, name)
            lo = -math.inf if lo is None else lo
            hi = math.inf if hi is None else hi
            if not lo < hi:
                raise RangeError(f"empty interval ({lo}, {hi})", field=name)
            object.__setattr__(self, name, (float(lo), float(hi)))
        for name in ("constraint_penalty", "bound_penalty", "fd_epsilon", "function_tolerance"):
            if not getattr(self, name) > 0:
                raise RangeError("must be positive", field=name)
        if self.constraint_margin < 0:
            raise RangeError("must be non-negative", field="constraint_margin")
        if self.max_iterations < 1:
            raise RangeError("must be at least 1", field="max_iterations")

    @property
    def lower(self) -> np.ndarray:
        return np.array([
            _finite_bound(self.lambda1_bounds[0], -INFINITE_BOUND),
            _finite_bound(self.lambda2_bounds[0], -INFINITE_BOUND),
        ])

    @property
    def upper(self) -> np.ndarray:
        return np.array([
            _finite_bound(self.lambda1_bounds[1], INFINITE_BOUND),
            _finite_bound(self.lambda2_bounds[1], INFINITE_BOUND),
        ])

    def project(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lower, self.upper)

    def with_(self, **changes) -> "OptimizerOptions":
        return replace(self, **changes)


@dataclass(frozen=True)
class ObjectiveTerms:
    value: float
    f1: float
    f2: float
    constraint_penalty: float
    bound_penalty: float

    @property
    def penalty_total(self) -> float:
        return self.constraint_penalty + self.bound_penalty


def objective_terms_batch(lambda1, lambda2, scenario: Scenario, options: OptimizerOptions):
    """Vectorised objective pieces for arrays of multipliers.

    Returns ``(value, f1, f2, constraint_penalty, bound_penalty)`` arrays,
    each broadcast to the common shape of ``lambda1`` and ``lambda2``.
    """
    l1 = np.asarray(lambda1, dtype=float)[..., None]
    l2 = np.asarray(lambda2, dtype=float)[..., None]
    ul = scenario.unit_losses
    p = scenario.p

    # far-out trial steps overflow to inf, which the line search rejects
    with np.errstate(over="ignore", invalid="ignore"):
        slope = l1 + l2 * ul  # (..., n)
        pf = np.exp(-1.0 - p * slope[..., None])  # (..., n, m)
        weighted = p * pf
        f1 = weighted.sum(axis=(-2, -1))
        f2 = (ul[:, None] * weighted).sum(axis=(-2, -1))

        hinge = np.maximum(0.0, slope + options.constraint_margin)
        c_pen = options.constraint_penalty * np.sum(hinge**2, axis=-1)
        below = np.maximum(0.0, options.pf_floor - pf)
        above = np.maximum(0.0, pf - options.pf_ceiling)
        b_pen = options.bound_penalty * np.sum(below**2 + above**2, axis=(-2, -1))

        value = (f1 - scenario.network_failure_probability) ** 2 + (f2 - scenario.expected_loss) ** 2 + c_pen + b_pen
    return value, f1, f2, c_pen, b_pen


def objective_terms(multipliers: MultiplierPair, scenario: Scenario, options: OptimizerOptions) -> ObjectiveTerms:
    parts = objective_terms_batch(multipliers.lambda1, multipliers.lambda2, scenario, options)
    return ObjectiveTerms(*(float(v) for v in parts))


def objective(multipliers: MultiplierPair, scenario: Scenario, options: OptimizerOptions | None = None) -> float:
    """Penalised least-squares objective at ``multipliers``."""
    options = options or OptimizerOptions()
    return objective_terms(multipliers, scenario, options).value


def fd_steps(x, fd_epsilon: float) -> np.ndarray:
    """Per-coordinate step ``fd_epsilon * max(1, |x_k|)``."""
    return fd_epsilon * np.maximum(1.0, np.abs(np.asarray(x, dtype=float)))


def forward_difference(func, x, fd_epsilon: float = 1e-7, f0=None) -> np.ndarray:
    """Forward-difference gradient of a scalar function of a vector."""
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, fd_epsilon)
    f0 = func(x) if f0 is None else f0
    grad = np.empty_like(x)
    for k in range(x.size):
        xk = x.copy()
        xk[k] += h[k]
        grad[k] = (func(xk) - f0) / h[k]
    return grad


def central_difference(func, x, fd_epsilon: float = 1e-7) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    h = fd_steps(x, fd_epsilon)
    grad = np.empty_like(x)
    for k in range(x.size):
        xp, xm = x.copy(), x.copy()
        xp[k] += h[k]
        xm[k] -= h[k]
        grad[k] = (func(xp) - func(xm)) / (2 * h[k])
    return grad


def _scalar_objective(scenario, options):
    def f(x):
        return float(objective_terms_batch(x[0], x[1], scenario, options)[0])

    return f


def gradient_fd(scenario: Scenario, multipliers: MultiplierPair, options: OptimizerOptions | None = None,
                func=None) -> np.ndarray:
    """Forward-difference gradient of the objective in (lambda1, lambda2).

    ``func`` replaces the objective with any callable of a 2-vector, which
    is handy for checking the differencing against analytic gradients.
    """
    options = options or OptimizerOptions()
    func = func or _scalar_objective(scenario, options)
    return forward_difference(func, multipliers.as_array(), options.fd_epsilon)


def bfgs_update(h_inv, s, y, curvature_floor: float = 1e-12) -> np.ndarray:
    """BFGS update of an inverse-Hessian approximation.

    Returns ``h_inv`` unchanged when the curvature ``y.s`` is not above
    ``curvature_floor``, which keeps the approximation positive definite.
    """
    h_inv = np.asarray(h_inv, dtype=float)
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    ys = float(y @ s)
    if ys <= curvature_floor:
        return h_inv.copy()
    rho = 1.0 / ys
    eye = np.eye(s.size)
    left = eye - rho * np.outer(s, y)
    right = eye - rho * np.outer(y, s)
    return left @ h_inv @ right + rho * np.outer(s, s)


@dataclass(frozen=True)
class OptimizerRun:
    final_multipliers: MultiplierPair
    final_objective: float
    target_residuals: tuple[float, float]
    penalty_total: float
    constraint_penalty: float
    bound_penalty: float
    iterations: int
    convergence_reason: ConvergenceReason
    objective_trace: tuple[float, ...]
    iterates: tuple[tuple[float, float], ...] = field(repr=False)
    line_search_failures: int = 0

    @property
    def converged(self) -> bool:
        return self.convergence_reason is not ConvergenceReason.MAX_ITERATIONS


def physics_informed_guess(scenario: Scenario) -> MultiplierPair:
    """Starting point ``(-1.5 * max UL, 1.0)``."""
    return MultiplierPair(-1.5 * float(np.max(scenario.unit_losses)), 1.0)


def _active_mask(x, g, lower, upper, active_width):
    """Coordinates near a bound whose gradient pushes them out of the box.

    The width shrinks with the projected-gradient step so that the test
    tightens near a solution.
    """
    width = np.minimum(active_width, np.abs(x - np.clip(x - g, lower, upper)))
    width = np.maximum(width, 1e-12 * np.maximum(1.0, np.abs(x)))
    at_lower = (x - lower <= width) & (g > 0)
    at_upper = (upper - x <= width) & (g < 0)
    return at_lower, at_upper


def _search_direction(h_inv, g, active, snap):
    """Quasi-Newton direction with pinned coordinates moved by ``snap``.

    Free coordinates solve ``B_ff d_f = -(g_f + B_fa snap_a)`` where ``B``
    is the current Hessian approximation, so that moving the pinned ones
    onto their bound is compensated along the coupled free direction.
    """
    if not np.any(active):
        return -(h_inv @ g)
    d = np.where(active, snap, 0.0)
    free = ~active
    if np.any(free):
        b = np.linalg.inv(h_inv)
        rhs = g[free] + b[np.ix_(free, active)] @ snap[active]
        d[free] = -np.linalg.solve(b[np.ix_(free, free)], rhs)
    return d


def _line_search(func, x, f, g, d, options):
    """Projected backtracking. Returns ``(x_new, f_new)`` or ``None``."""
    alpha = 1.0
    for _ in range(options.max_backtracks + 1):
        x_new = options.project(x + alpha * d)
        step = x_new - x
        if not np.any(step):
            return None
        f_new = func(x_new)
        if f_new <= f + options.armijo_c * float(g @ step) and f_new <= f:
            return x_new, f_new
        alpha *= 0.5
    return None


def estimate_multipliers(scenario: Scenario, options: OptimizerOptions | None = None) -> OptimizerRun:
    """Minimise the objective over the multiplier box.

    Each iteration takes a forward-difference gradient and forms the
    quasi-Newton direction ``-H g``. Coordinates pressing against a nearby
    bound are pinned onto it and the free coordinate takes the matching
    reduced step. A backtracking search along the direction, projected onto
    the box, picks the step, and ``H`` is then updated by BFGS.
    The loop stops when the objective changes by less than
    ``function_tolerance``, when the projected gradient vanishes, or after
    ``max_iterations``. If no step along either the quasi-Newton or the
    steepest-descent direction lowers the objective, the iterate is kept and
    the zero change counts toward the function tolerance.
    """
    options = options or OptimizerOptions()
    p = scenario.p
    if not np.any(p > 0):
        raise DegenerateScenarioError("all stress probabilities are zero; the objective ignores the multipliers")

    func = _scalar_objective(scenario, options)
    lower, upper = options.lower, options.upper

    start = options.initial_guess or physics_informed_guess(scenario)
    x = options.project(start.as_array())
    f = func(x)
    g = forward_difference(func, x, options.fd_epsilon, f0=f)
    h_inv = np.eye(2)

    trace = [f]
    iterates = [(float(x[0]), float(x[1]))]
    reason = ConvergenceReason.MAX_ITERATIONS
    failures = 0
    iterations = 0

    for k in range(1, options.max_iterations + 1):
        at_lower, at_upper = _active_mask(x, g, lower, upper, options.active_width)
        active = at_lower | at_upper
        pg = np.where(active, 0.0, g)
        if np.linalg.norm(pg) < options.gradient_tolerance:
            reason = ConvergenceReason.GRADIENT_VANISHED
            break

        snap = np.where(at_lower, lower - x, 0.0) + np.where(at_upper, upper - x, 0.0)
        d = _search_direction(h_inv, g, active, snap)
        if float(g @ d) >= 0:
            h_inv = np.eye(2)
            d = snap - pg
        pg = pg - snap
        found = _line_search(func, x, f, g, d, options)
        if found is None and not np.array_equal(d, -pg):
            h_inv = np.eye(2)
            found = _line_search(func, x, f, g, -pg, options)

        iterations = k
        if found is None:
            failures += 1
            logger.debug("iteration %d: no decrease along any direction", k)
            trace.append(f)
            iterates.append((float(x[0]), float(x[1])))
            reason = ConvergenceReason.FUNCTION_TOLERANCE
            break

        x_new, f_new = found
        g_new = forward_difference(func, x_new, options.fd_epsilon, f0=f_new)
        h_inv = bfgs_update(h_inv, x_new - x, g_new - g, options.curvature_floor)

        f_prev = f
        x, f, g = x_new, f_new, g_new
        trace.append(f)
        iterates.append((float(x[0]), float(x[1])))
        logger.debug("iteration %d: f=%.12g lambda=(%.8g, %.8g)", k, f, x[0], x[1])

        if abs(f_prev - f) < options.function_tolerance:
            reason = ConvergenceReason.FUNCTION_TOLERANCE
            break

    final = MultiplierPair.from_array(x)
    terms = objective_terms(final, scenario, options)
    logger.info("stopped after %d iterations (%s), objective %.9g", iterations, reason.value, terms.value)
    return OptimizerRun(
        final_multipliers=final,
        final_objective=terms.value,
        target_residuals=(terms.f1 - scenario.network_failure_probability, terms.f2 - scenario.expected_loss),
        penalty_total=terms.penalty_total,
        constraint_penalty=terms.constraint_penalty,
        bound_penalty=terms.bound_penalty,
        iterations=iterations,
        convergence_reason=reason,
        objective_trace=tuple(trace),
        iterates=tuple(iterates),
        line_search_failures=failures,
    )
