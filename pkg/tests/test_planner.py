import numpy as np
import pytest
from oracles import plan_lp_oracle, simplex_max

from vetl.core import ConfigError, ResourceProvision
from vetl.planner import compute_budget, solve_knob_plan, solve_multi_stream_plan, upper_hull


def prov(cores=4, credits=0.0, **kw):
    return ResourceProvision(cores, 1e8, credits, 1e7, 1e7, **kw)


def test_budget_examples():
    assert compute_budget(prov(4), 100.0) == 400.0
    assert compute_budget(prov(4, 18.0), 100.0) == pytest.approx(410.0)
    assert compute_budget(prov(8), 100.0) == 2 * compute_budget(prov(4), 100.0)
    with pytest.raises(ConfigError):
        compute_budget(prov(), 0.0)


def test_single_category_single_config():
    plan = solve_knob_plan([1.0], [[0.3]], [5.0], 1e9)
    assert plan.alpha.tolist() == [[1.0]]


def test_unlimited_budget_takes_best_config():
    q = np.array([[0.1, 0.5, 0.4], [0.2, 0.3, 0.9]])
    plan = solve_knob_plan([0.5, 0.5], q, [1.0, 2.0, 3.0], 1e12)
    assert plan.alpha.tolist() == [[0, 1, 0], [0, 0, 1]]


def test_cheapest_plan_at_minimum_budget():
    q = np.array([[0.1, 0.5], [0.2, 0.9]])
    plan = solve_knob_plan([0.3, 0.7], q, [1.0, 3.0], 1.0)
    assert plan.alpha.tolist() == [[1, 0], [1, 0]]


def test_plan_matches_simplex_and_spends_budget():
    q = np.array([[0.2, 0.6, 0.7], [0.5, 0.55, 0.9]])
    r = np.array([0.4, 0.6])
    costs = np.array([1.0, 2.0, 4.0])
    plan = solve_knob_plan(r, q, costs, 2.5)
    ref, _ = plan_lp_oracle(r, q, costs, 2.5)
    assert plan.objective == pytest.approx(ref, rel=1e-12)
    assert plan.budget_used == pytest.approx(2.5)


def test_shape_and_histogram_validation():
    with pytest.raises(ConfigError):
        solve_knob_plan([0.5, 0.5], [[0.1, 0.2]], [1, 2], 10)
    with pytest.raises(ConfigError):
        solve_knob_plan([0.7, 0.7], [[0.1], [0.2]], [1], 10)
    with pytest.raises(ConfigError):
        solve_knob_plan([1.0], [[0.1]], [0.0], 10)


def test_upper_hull_skips_dominated_and_concave_points():
    costs = np.array([1.0, 2.0, 3.0, 4.0])
    q = np.array([0.0, 0.1, 0.9, 0.8])
    assert upper_hull(costs, q) == [0, 2]


def test_multi_stream_one_stream_reduces():
    q = np.array([[0.2, 0.6], [0.5, 0.9]])
    single = solve_knob_plan([0.4, 0.6], q, [1.0, 3.0], 2.0)
    (multi,) = solve_multi_stream_plan([[0.4, 0.6]], [q], [[1.0, 3.0]], 2.0)
    assert np.array_equal(single.alpha, multi.alpha)


def test_multi_stream_symmetry():
    q = np.array([[0.2, 0.6], [0.5, 0.9]])
    single = solve_knob_plan([0.4, 0.6], q, [1.0, 3.0], 2.0)
    a, b = solve_multi_stream_plan([[0.4, 0.6]] * 2, [q, q], [[1.0, 3.0]] * 2, 4.0)
    assert np.allclose(a.alpha, single.alpha) and np.allclose(b.alpha, single.alpha)


def test_multi_stream_priority_matches_joint_lp():
    qa = np.array([[0.1, 0.9], [0.1, 0.9]])
    qb = np.array([[0.1, 0.2], [0.1, 0.2]])
    r = [0.5, 0.5]
    costs = [1.0, 2.0]
    a, b = solve_multi_stream_plan([r, r], [qa, qb], [costs, costs], 3.0)
    assert np.allclose(a.alpha[:, 1], 1.0)
    assert np.allclose(b.alpha[:, 1], 0.0)
    # joint LP over 8 variables: value per stream is r . (alpha . q)
    obj = np.concatenate([(np.array(r)[:, None] * qa).ravel(), (np.array(r)[:, None] * qb).ravel()])
    a_ub = [np.tile(np.outer(r, costs).ravel(), 2)]
    a_eq = []
    for g in range(4):
        row = np.zeros(8)
        row[2 * g : 2 * g + 2] = 1
        a_eq.append(row)
    ref, _ = simplex_max(obj, a_ub, [3.0], a_eq, np.ones(4))
    assert a.objective + b.objective == pytest.approx(ref)


def test_zero_forecast_category_gets_cheapest():
    q = np.array([[0.1, 0.9], [0.1, 0.9]])
    plan = solve_knob_plan([1.0, 0.0], q, [1.0, 2.0], 10.0)
    assert plan.alpha[1].tolist() == [1.0, 0.0]
