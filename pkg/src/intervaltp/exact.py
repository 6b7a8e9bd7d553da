"""Exact worst finite optimal value by enumerating balanced quasi-extreme scenarios."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

from .encoding import Config
from .instance import Feasibility, IntervalTpInstance, Number, Scenario, classify_feasibility
from .transport import evaluate

DEFAULT_CAP = 24
WARN_SIZE = 20
DEFAULT_BUDGET = 10**7


class InstanceTooLarge(ValueError):
    pass


class BudgetExceeded(ValueError):
    pass


class NoFeasibleScenario(ValueError):
    pass


@dataclass(frozen=True)
class ExactResult:
    worst_value: Number
    worst_scenario: Scenario
    worst_config: Optional[Config]
    scenarios_examined: int = 0
    scenarios_skipped_infeasible: int = 0
    scenarios_skipped_unbalanced: int = 0
    # "enumeration", "shortcut", or "enumeration+unbalanced" (see exact_worst)
    path: str = "enumeration"


def _gray_flips(length):
    """Yield the coordinate toggled at each step of a reflected Gray code."""
    for r in range(1, 1 << length):
        yield (r & -r).bit_length() - 1


def _enumerate(instance, skip_unbalanced):
    m, size = instance.m, instance.size
    lo, hi = instance.bounds_lo, instance.bounds_hi
    best = None
    examined = skipped_infeasible = skipped_unbalanced = 0
    for k in range(size):
        others = [i for i in range(size) if i != k]
        values = list(lo)
        signs = [-1] * size
        signs[k] = 0
        supply = sum(values[:m]) - (values[k] if k < m else 0)
        demand = sum(values[m:]) - (values[k] if k >= m else 0)
        flips = _gray_flips(len(others))
        while True:
            if k < m:
                # free supply: the amount still needed to cover demand
                free = demand - supply
                if free > hi[k]:
                    skipped_infeasible += 1
                    candidate = None
                elif lo[k] > free:
                    if skip_unbalanced:
                        skipped_unbalanced += 1
                        candidate = None
                    else:
                        candidate = lo[k]
                else:
                    candidate = free
            else:
                free = supply - demand
                if free < lo[k]:
                    skipped_infeasible += 1
                    candidate = None
                elif hi[k] < free:
                    if skip_unbalanced:
                        skipped_unbalanced += 1
                        candidate = None
                    else:
                        candidate = hi[k]
                else:
                    candidate = free
            if candidate is not None:
                examined += 1
                point = list(values)
                point[k] = candidate
                scenario = Scenario(instance.worst_cost, point[:m], point[m:])
                value = evaluate(scenario).objective
                if best is None or value > best[0]:
                    best = (value, scenario, tuple(signs))
            try:
                b = next(flips)
            except StopIteration:
                break
            i = others[b]
            old = values[i]
            values[i] = hi[i] if signs[i] < 0 else lo[i]
            signs[i] = -signs[i]
            if i < m:
                supply += values[i] - old
            else:
                demand += values[i] - old
    return best, examined, skipped_infeasible, skipped_unbalanced


def exact_worst(
    instance: IntervalTpInstance,
    *,
    cap: int = DEFAULT_CAP,
    shortcut: bool = True,
) -> ExactResult:
    """Worst finite optimal value over all scenarios of ``instance``.

    Every free position k (supplies, then demands) is combined with every
    bound pattern of the remaining coordinates, visited in Gray-code order.
    Patterns where no free value restores feasibility, or where the free
    value cannot reach balance, are skipped; the rest are solved with the
    balancing free value.

    When all scenarios are feasible and ``shortcut`` is set, the answer is the
    single scenario with upper costs, lower supplies and upper demands. With
    the shortcut off and no balanced pattern at all (total lower supply
    exceeds total upper demand), the enumeration is repeated with unbalanced
    patterns evaluated at their clamped free value instead of skipped.
    """
    kind = classify_feasibility(instance)
    if kind is Feasibility.NO_FEASIBLE_SCENARIO:
        raise NoFeasibleScenario("instance has no feasible scenario")
    if shortcut and kind is Feasibility.ALL_SCENARIOS_FEASIBLE:
        scenario = Scenario(instance.worst_cost, instance.supply_lo, instance.demand_hi)
        config = tuple([-1] * (instance.m - 1) + [0] + [1] * instance.n)
        return ExactResult(evaluate(scenario).objective, scenario, config, path="shortcut")
    if instance.size > cap:
        raise InstanceTooLarge(
            f"m+n = {instance.size} exceeds the enumeration cap {cap} "
            f"({instance.size * 2 ** (instance.size - 1)} scenarios)"
        )
    best, examined, s_inf, s_unb = _enumerate(instance, skip_unbalanced=True)
    path = "enumeration"
    if best is None:
        best, examined, s_inf, s_unb = _enumerate(instance, skip_unbalanced=False)
        path = "enumeration+unbalanced"
    value, scenario, config = best
    return ExactResult(value, scenario, config, examined, s_inf, s_unb, path)


def scenario_count(instance: IntervalTpInstance) -> int:
    return instance.size * 2 ** (instance.size - 1)


def grid_oracle_worst(instance: IntervalTpInstance, budget: int = DEFAULT_BUDGET) -> Number:
    """Brute-force maximum of f(C̄, s, d) over every integer point with Σs ≥ Σd.

    Needs integer bounds; the number of grid points is capped by ``budget``.
    """
    if not instance.is_integer():
        raise ValueError("grid oracle needs integer interval bounds")
    ranges = [range(int(iv.lo), int(iv.hi) + 1) for iv in (*instance.supply, *instance.demand)]
    points = math.prod(len(r) for r in ranges)
    if points > budget:
        raise BudgetExceeded(f"{points} grid points exceed the budget {budget}")
    m = instance.m
    best = None
    for supply in itertools.product(*ranges[:m]):
        total = sum(supply)
        for demand in itertools.product(*ranges[m:]):
            if sum(demand) > total:
                continue
            value = evaluate(Scenario(instance.worst_cost, supply, demand)).objective
            if best is None or value > best:
                best = value
    if best is None:
        raise NoFeasibleScenario("instance has no feasible scenario")
    return best
