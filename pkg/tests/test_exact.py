import random

import pytest

from intervaltp import IntervalTpInstance, Scenario, evaluate, exact_worst, grid_oracle_worst
from intervaltp.exact import BudgetExceeded, InstanceTooLarge, NoFeasibleScenario, scenario_count

from conftest import small_instance


def test_one_by_one(one_by_one):
    r = exact_worst(one_by_one)
    assert r.worst_value == 14
    assert r.worst_scenario.supply == (7,) and r.worst_scenario.demand == (7,)
    assert grid_oracle_worst(one_by_one) == 14


def test_toy_interior_maximiser(toy):
    r = exact_worst(toy)
    assert r.worst_value == 24
    assert r.worst_scenario.supply == (2, 4) and r.worst_scenario.demand == (6,)
    assert r.path == "enumeration"
    assert grid_oracle_worst(toy) == 24


def test_shortcut_matches_enumeration():
    inst = IntervalTpInstance.from_bounds([[1]], [[2]], [8], [10], [3], [7])
    fast = exact_worst(inst)
    slow = exact_worst(inst, shortcut=False)
    assert fast.path == "shortcut"
    assert fast.worst_value == slow.worst_value == 14 == grid_oracle_worst(inst)


def test_point_intervals():
    inst = IntervalTpInstance.from_bounds([[3, 1], [2, 4]], [[3, 1], [2, 4]], [5, 6], [5, 6], [4, 7], [4, 7])
    single = evaluate(Scenario(inst.worst_cost, (5, 6), (4, 7))).objective
    assert exact_worst(inst).worst_value == single == grid_oracle_worst(inst)


def test_counters_cover_every_pattern():
    rng = random.Random(1)
    for _ in range(30):
        inst = small_instance(rng, rng.randint(1, 3), rng.randint(1, 3))
        r = exact_worst(inst, shortcut=False)
        total = r.scenarios_examined + r.scenarios_skipped_infeasible + r.scenarios_skipped_unbalanced
        assert total == scenario_count(inst)


def test_random_2x2_against_grid():
    rng = random.Random(22)
    for _ in range(60):
        inst = small_instance(rng, 2, 2)
        assert exact_worst(inst).worst_value == grid_oracle_worst(inst)


def test_cap():
    inst = IntervalTpInstance.from_bounds(
        [[1] * 15] * 15, [[2] * 15] * 15, [1] * 15, [3] * 15, [1] * 15, [3] * 15)
    with pytest.raises(InstanceTooLarge):
        exact_worst(inst)


def test_no_feasible_scenario():
    inst = IntervalTpInstance.from_bounds([[1]], [[2]], [1], [1], [2], [3])
    with pytest.raises(NoFeasibleScenario):
        exact_worst(inst)


def test_grid_budget(toy):
    with pytest.raises(BudgetExceeded):
        grid_oracle_worst(toy, budget=5)
