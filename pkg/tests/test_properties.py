import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from entroprel.io import dump_scenario, parse_scenario
from entroprel.maxent import check_validity, failure_matrix, failure_probability
from entroprel.model import FailureMatrix, MultiplierPair
from entroprel.optimizer import OptimizerOptions, central_difference, fd_steps, forward_difference, objective
from entroprel.reliability import network_failure_exact, network_failure_linear

from conftest import make_scenario

# random rows are rarely non-decreasing; the warning is expected here
pytestmark = pytest.mark.filterwarnings("ignore::entroprel.exceptions.NonMonotoneStressWarning")

PROPERTY_SETTINGS = settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
UNIT_ROUNDOFF = np.finfo(float).eps


@st.composite
def scenarios(draw, max_components=4, max_levels=6):
    n = draw(st.integers(1, max_components))
    m = draw(st.integers(1, max_levels))
    weights = draw(st.lists(st.lists(st.floats(0.01, 1.0), min_size=m, max_size=m), min_size=n, max_size=n))
    p = [[w / sum(row) for w in row] for row in weights]
    ul = draw(st.lists(st.floats(1.0, 20.0), min_size=n, max_size=n))
    pf = draw(st.floats(0.01, 0.99))
    loss = draw(st.floats(0.1, 50.0))
    return make_scenario(p, ul, pf=pf, loss=loss)


@st.composite
def valid_points(draw):
    """A scenario together with multipliers that pass every validity check."""
    sc = draw(scenarios())
    top = float(np.max(sc.unit_losses))
    l2 = draw(st.floats(0.1, 2.0))
    # lambda1 + lambda2 * max UL in [-5 - 2 top l2, -1e-3]
    gap = draw(st.floats(1e-3, 5.0 + 2.0 * top * l2))
    pair = MultiplierPair(-l2 * top - gap, l2)
    assume(pair.lambda1 <= -0.5)
    assume(check_validity(sc, pair).overall_valid)
    return sc, pair


@PROPERTY_SETTINGS
@given(
    p=st.lists(st.floats(0.0, 1.0), min_size=2, max_size=2, unique=True),
    slope=st.floats(-50.0, -1e-3),
    ul=st.floats(1.0, 20.0),
)
def test_case2_monotone_in_stress(p, slope, ul):
    lo, hi = sorted(p)
    assume(hi - lo >= 1e-3)
    l2 = 0.5
    pair = MultiplierPair(slope - l2 * ul, l2)
    assert failure_probability(lo, pair, ul) < failure_probability(hi, pair, ul)


@PROPERTY_SETTINGS
@given(
    p=st.floats(0.01, 1.0),
    l1=st.floats(-50.0, -0.5),
    l2=st.floats(0.1, 2.0),
    uls=st.lists(st.floats(1.0, 20.0), min_size=2, max_size=2, unique=True),
)
def test_unit_loss_damping(p, l1, l2, uls):
    small, large = sorted(uls)
    assume(large - small >= 1e-2)
    pair = MultiplierPair(l1, l2)
    assert p * failure_probability(p, pair, large) < p * failure_probability(p, pair, small)


@PROPERTY_SETTINGS
@given(sc=scenarios(), data=st.data())
def test_union_bound(sc, data):
    q = data.draw(st.lists(st.lists(st.floats(0.0, 1.0), min_size=sc.n_levels, max_size=sc.n_levels),
                           min_size=sc.n_components, max_size=sc.n_components))
    fm = FailureMatrix(q)
    assert network_failure_linear(sc, fm) >= network_failure_exact(sc, fm) - 1e-12


@PROPERTY_SETTINGS
@given(point=valid_points())
def test_entries_in_range_when_valid(point):
    sc, pair = point
    q = failure_matrix(sc, pair).entries
    assert np.all(q >= math.exp(-1.0))
    assert np.all(q < 1.0)


def _second_difference(f, x, k, step):
    e = np.zeros(2)
    e[k] = step
    return (f(x + e) - 2.0 * f(x) + f(x - e)) / step**2


@PROPERTY_SETTINGS
@given(point=valid_points())
def test_forward_central_agreement(point):
    # forward minus central is h/2 f'' plus rounding of order u|f|/h
    sc, pair = point
    opts = OptimizerOptions()

    def f(v):
        return objective(MultiplierPair(float(v[0]), float(v[1])), sc, opts)

    x = pair.as_array()
    h = fd_steps(x, opts.fd_epsilon)
    fwd = forward_difference(f, x, opts.fd_epsilon)
    ctr = central_difference(f, x, opts.fd_epsilon)
    f0 = abs(f(x))
    for k in range(2):
        curvature = abs(_second_difference(f, x, k, 1e-4 * max(1.0, abs(x[k]))))
        scale = h[k] * max(1.0, curvature) + 2.0 * UNIT_ROUNDOFF * max(1.0, f0) / h[k]
        assert abs(fwd[k] - ctr[k]) <= 10.0 * scale


@PROPERTY_SETTINGS
@given(sc=scenarios())
def test_scenario_json_round_trip(sc):
    text = dump_scenario(sc)
    again = parse_scenario(text).scenario
    assert again == sc
    assert dump_scenario(again) == text
