import numpy as np
import pytest

from entroprel.exceptions import RangeError
from entroprel.model import MultiplierPair
from entroprel.optimizer import OptimizerOptions, objective
from entroprel.validation import GridResult, GridSpec, default_grid, grid_search, refine_search, refine_until

from conftest import CONSTRUCTED_LAMBDA


def test_gridspec_rejects_single_step():
    with pytest.raises(RangeError):
        GridSpec((-2, -1), (0.1, 1), 1)


def test_gridspec_rejects_reversed_range():
    with pytest.raises(RangeError):
        GridSpec((-1, -2), (0.1, 1), 5)


def test_gridspec_spacing_and_axes():
    g = GridSpec((-3.0, -1.0), (0.1, 0.5), 5)
    assert g.spacing == pytest.approx((0.5, 0.1))
    l1, l2 = g.axes()
    assert l1[0] == -3.0 and l1[-1] == -1.0
    assert l2.size == 5


def test_two_by_two_grid_matches_hand_scan(case_study):
    opts = OptimizerOptions()
    grid = GridSpec((-10.0, -5.0), (0.2, 0.4), 2)
    res = grid_search(case_study, opts, grid)
    corners = [MultiplierPair(a, b) for a in (-10.0, -5.0) for b in (0.2, 0.4)]
    values = [objective(c, case_study, opts) for c in corners]
    assert res.multipliers == corners[int(np.argmin(values))]
    assert res.objective == pytest.approx(min(values), rel=1e-12)
    assert res.evaluations == 4


def test_grid_outside_bounds_rejected(case_study):
    with pytest.raises(RangeError):
        grid_search(case_study, OptimizerOptions(), GridSpec((-3.0, 0.0), (0.2, 0.4), 3))


def test_ties_go_to_first_scanned(constructed):
    # identical options and a degenerate grid: every lattice point on one column ties
    grid = GridSpec((-1.0, -1.0), (0.15, 0.15), 3)
    res = grid_search(constructed, OptimizerOptions(), grid)
    assert res.multipliers == MultiplierPair(-1.0, 0.15)


def test_default_grid_envelope(case_study):
    g = default_grid(case_study, steps=10)
    assert g.lambda1_range == (-3 * 18 * 5.0, -0.5)
    assert g.lambda2_range == (0.1, 5.0)
    bounded = default_grid(case_study, OptimizerOptions(lambda1_bounds=(-20, -1), lambda2_bounds=(0.1, 2)))
    assert bounded.lambda1_range == (-20.0, -1.0)
    assert bounded.lambda2_range == (0.1, 2.0)


def test_constructed_optimum_within_one_spacing(constructed):
    grid = GridSpec((-3.0, -0.5), (0.1, 1.0), 201)
    res = grid_search(constructed, OptimizerOptions(), grid)
    d1, d2 = grid.spacing
    assert abs(res.multipliers.lambda1 - CONSTRUCTED_LAMBDA.lambda1) <= d1 + 1e-12
    assert abs(res.multipliers.lambda2 - CONSTRUCTED_LAMBDA.lambda2) <= d2 + 1e-12


def test_refine_search_clips_to_bounds(case_study):
    res = refine_search(case_study, OptimizerOptions(), MultiplierPair(-0.6, 0.15), radius=1.0, steps=5)
    assert res.grid.lambda1_range[1] == -0.5
    assert res.grid.lambda2_range[0] == 0.1


def test_refine_search_tiny_radius_returns_centre_neighbourhood(case_study):
    centre = MultiplierPair(-7.0, 0.4)
    res = refine_search(case_study, OptimizerOptions(), centre, radius=1e-9, steps=3)
    assert abs(res.multipliers.lambda1 - centre.lambda1) <= 2e-9
    assert abs(res.multipliers.lambda2 - centre.lambda2) <= 2e-9


def test_refine_search_radius_near_zero(case_study):
    centre = MultiplierPair(-7.0, 0.4)
    res = refine_search(case_study, OptimizerOptions(), centre, radius=1e-12, steps=5)
    assert res.multipliers.lambda1 == pytest.approx(centre.lambda1, abs=1e-11)
    assert res.multipliers.lambda2 == pytest.approx(centre.lambda2, abs=1e-11)


def test_grid_search_is_pure(case_study):
    grid = GridSpec((-30.0, -0.5), (0.1, 2.0), 60)
    assert grid_search(case_study, None, grid) == grid_search(case_study, None, grid)


def test_refine_search_rejects_nonpositive_radius(case_study):
    with pytest.raises(RangeError):
        refine_search(case_study, None, MultiplierPair(-7.0, 0.4), radius=0.0)


def test_refine_until_monotone_and_fine(constructed):
    start = grid_search(constructed, OptimizerOptions(), GridSpec((-3.0, -0.5), (0.1, 1.0), 51))
    rounds = refine_until(constructed, OptimizerOptions(), start, target_spacing=1e-6)
    objs = [r.objective for r in rounds]
    assert all(b <= a for a, b in zip(objs, objs[1:]))
    assert max(rounds[-1].grid.spacing) <= 1e-6
    # the valley is nearly flat along its axis, so lambda is only pinned loosely
    assert rounds[-1].objective <= 1e-6
    assert rounds[-1].multipliers.lambda1 == pytest.approx(CONSTRUCTED_LAMBDA.lambda1, abs=1e-2)
    assert rounds[-1].multipliers.lambda2 == pytest.approx(CONSTRUCTED_LAMBDA.lambda2, abs=1e-2)


def test_refine_three_rounds_monotone(case_study):
    start = grid_search(case_study, OptimizerOptions(), GridSpec((-30.0, -0.5), (0.1, 2.0), 40))
    rounds = refine_until(case_study, OptimizerOptions(), start, max_rounds=3)
    assert len(rounds) == 4
    objs = [r.objective for r in rounds]
    assert all(b <= a for a, b in zip(objs, objs[1:]))
    assert objs[-1] < objs[0]


def test_refine_until_keeps_incumbent(case_study):
    fake = GridResult(MultiplierPair(-7.0, 0.4), -1.0, GridSpec((-8.0, -6.0), (0.3, 0.5), 3), 9)
    rounds = refine_until(case_study, OptimizerOptions(), fake, max_rounds=2)
    assert rounds[-1].objective == -1.0
    assert rounds[-1].multipliers == fake.multipliers
