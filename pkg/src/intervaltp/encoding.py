"""Configurations over {-1, 0, +1} and their quasi-extreme scenarios.

A configuration is a tuple of length m + n (supplies first, then demands)
with exactly one zero. Entries -1 / +1 put the corresponding supply or demand
at its lower / upper bound; the zero marks the free value, which is computed
to balance total supply and demand and clamped to its interval.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .instance import IntervalTpInstance, Number, Scenario
from .transport import evaluate

Config = tuple[int, ...]

_SYMBOLS = {-1: "-", 0: "0", 1: "+"}
_VALUES = {"-": -1, "0": 0, "+": 1}


class RepairFailed(RuntimeError):
    pass


def config_to_str(config: Sequence[int]) -> str:
    return "".join(_SYMBOLS[a] for a in config)


def config_from_str(text: str) -> Config:
    try:
        return tuple(_VALUES[ch] for ch in text.strip())
    except KeyError as exc:
        raise ValueError(f"bad configuration symbol {exc.args[0]!r} in {text!r}") from None


def free_index(config: Sequence[int]) -> int:
    return config.index(0)


def check_config(instance: IntervalTpInstance, config: Sequence[int]) -> None:
    if len(config) != instance.size:
        raise ValueError(f"configuration has length {len(config)}, expected {instance.size}")
    if any(a not in (-1, 0, 1) for a in config):
        raise ValueError("configuration entries must be -1, 0 or +1")
    if sum(1 for a in config if a == 0) != 1:
        raise ValueError("configuration must contain exactly one zero")


def _free_value(instance, values, k):
    """Clamped balancing value for coordinate ``k`` given the others in ``values``.

    Returns (value, feasible, clamped). ``values[k]`` is ignored.
    """
    m = instance.m
    lo, hi = instance.bounds_lo[k], instance.bounds_hi[k]
    supply = sum(values[:m])
    demand = sum(values[m:])
    if k < m:
        need = demand - (supply - values[k])
        x = max(lo, min(need, hi))
        return x, need <= hi, x != need
    surplus = supply - (demand - values[k])
    x = min(hi, max(surplus, lo))
    return x, surplus >= lo, x != surplus


def decode_values(instance: IntervalTpInstance, config: Sequence[int]):
    """Fast path of :func:`decode`: (supply+demand values, feasible, clamped)."""
    lo, hi = instance.bounds_lo, instance.bounds_hi
    values = [hi[i] if a > 0 else lo[i] for i, a in enumerate(config)]
    k = config.index(0)
    values[k], feasible, clamped = _free_value(instance, values, k)
    return values, feasible, clamped


@dataclass(frozen=True)
class DecodedScenario:
    scenario: Scenario
    free_index: int
    balanced: bool
    feasible: bool
    clamped: bool


def decode(instance: IntervalTpInstance, config: Sequence[int]) -> DecodedScenario:
    values, feasible, clamped = decode_values(instance, config)
    m = instance.m
    scenario = Scenario(instance.worst_cost, values[:m], values[m:])
    return DecodedScenario(
        scenario=scenario,
        free_index=config.index(0),
        balanced=not clamped,
        feasible=feasible,
        clamped=clamped,
    )


def is_balanced(instance: IntervalTpInstance, config: Sequence[int]) -> bool:
    return not decode_values(instance, config)[2]


def repair(instance: IntervalTpInstance, config: Sequence[int]) -> Config:
    """Make an infeasible configuration feasible without moving its free index.

    Supplies at the lower bound are raised one at a time (ascending index),
    then demands at the upper bound are lowered, until the decode is feasible.
    """
    if decode_values(instance, config)[1]:
        raise ValueError("repair() requires a configuration that decodes infeasible")
    m = instance.m
    a = list(config)
    order = [i for i in range(m) if a[i] == -1] + [j for j in range(m, len(a)) if a[j] == 1]
    for i in order:
        a[i] = -a[i]
        if decode_values(instance, a)[1]:
            return tuple(a)
    raise RepairFailed("no feasible scenario reachable; total upper supply is below total lower demand")


def balance(
    instance: IntervalTpInstance, config: Sequence[int], order: Optional[Iterable[int]] = None
) -> Optional[Config]:
    """Nearest balanced configuration reached by walking bound flips.

    The clamped free coordinate is pinned at the bound it was clamped to; then
    coordinates are flipped in ``order`` (ascending by default) in the
    direction that closes the supply/demand gap. The coordinate whose full flip
    would overshoot becomes the new free value. Returns ``None`` when no
    balanced configuration exists along the walk.
    """
    values, feasible, clamped = decode_values(instance, config)
    if not clamped:
        return tuple(config)
    m = instance.m
    lo, hi = instance.bounds_lo, instance.bounds_hi
    a = list(config)
    k = a.index(0)
    # clamped at the upper bound: infeasible supply or surplus demand
    a[k] = 1 if (k < m) != feasible else -1
    gap = sum(values[:m]) - sum(values[m:])  # < 0 deficit, > 0 surplus
    deficit = gap < 0
    if order is None:
        order = range(len(a))
    for i in order:
        if i == k:
            continue
        if deficit:
            movable = (i < m and a[i] == -1) or (i >= m and a[i] == 1)
        else:
            movable = (i < m and a[i] == 1) or (i >= m and a[i] == -1)
        width = hi[i] - lo[i]
        if not movable or width == 0:
            continue
        if width >= abs(gap):
            a[i] = 0
            return tuple(a)
        a[i] = -a[i]
        gap += width if deficit else -width
    return None


def random_config(instance: IntervalTpInstance, rng: random.Random) -> Config:
    """Uniform free index, uniform ±1 elsewhere."""
    size = instance.size
    k = rng.randrange(size)
    return tuple(0 if i == k else rng.choice((-1, 1)) for i in range(size))


def random_feasible_config(instance: IntervalTpInstance, rng: random.Random) -> Config:
    a = random_config(instance, rng)
    if not decode_values(instance, a)[1]:
        a = repair(instance, a)
    return a


def random_balanced_config(instance: IntervalTpInstance, rng: random.Random) -> Config:
    """Random configuration pushed to a balanced one along a random flip order.

    Falls back to a feasible (unbalanced) configuration when the instance has
    no balanced quasi-extreme scenario at all.
    """
    a = random_config(instance, rng)
    order = list(range(instance.size))
    rng.shuffle(order)
    b = balance(instance, a, order)
    if b is not None:
        return b
    return a if decode_values(instance, a)[1] else repair(instance, a)


class FitnessCache:
    """Memoised fitness for one instance and one run.

    ``lp_count`` counts transportation LPs actually solved; identical
    supply/demand vectors reached from different configurations share a solve.
    """

    def __init__(self, instance: IntervalTpInstance):
        self.instance = instance
        self.values: dict[Config, Number] = {}
        self._scenario_values: dict[tuple, Number] = {}
        self.lp_count = 0
        self.calls = 0

    def __call__(self, config: Sequence[int]) -> Number:
        self.calls += 1
        key = tuple(config)
        value = self.values.get(key)
        if value is None:
            value = self._compute(key)
            self.values[key] = value
        return value

    def _compute(self, config):
        instance = self.instance
        values, feasible, _ = decode_values(instance, config)
        if not feasible:
            values, feasible, _ = decode_values(instance, repair(instance, config))
        key = tuple(values)
        value = self._scenario_values.get(key)
        if value is None:
            m = instance.m
            result = evaluate(Scenario(instance.worst_cost, values[:m], values[m:]))
            self.lp_count += 1
            value = self._scenario_values[key] = result.objective
        return value


def fitness(instance: IntervalTpInstance, config: Sequence[int], cache: Optional[FitnessCache] = None) -> Number:
    if cache is None:
        cache = FitnessCache(instance)
    elif cache.instance is not instance:
        raise ValueError("fitness cache belongs to a different instance")
    return cache(config)


def neighborhood(instance: IntervalTpInstance, config: Sequence[int]) -> list[Config]:
    """Neighbours of a balanced feasible configuration, one per index i != k.

    Each neighbour flips a_i; if the free value then clamps, i becomes the
    free index and the old free position takes a bound instead (the cost-
    increasing bound first: lower for a supply, upper for a demand). Swaps
    with no balanced outcome are omitted.
    """
    m = instance.m
    k = config.index(0)
    first_k = -1 if k < m else 1
    out = []
    for i in range(len(config)):
        if i == k:
            continue
        a = list(config)
        a[i] = -a[i]
        if not decode_values(instance, a)[2]:
            out.append(tuple(a))
            continue
        a[i] = 0
        for v in (first_k, -first_k):
            a[k] = v
            if not decode_values(instance, a)[2]:
                out.append(tuple(a))
                break
    return out
