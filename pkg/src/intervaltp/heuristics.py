"""Local search, genetic and memetic heuristics for the worst finite optimal value.

All stochastic choices of one run come from a single ``random.Random``
stream, consumed in a fixed order:

1. initial configurations (or the local-search start),
2. memetic only: one local-search coin per initial member, then its shuffles,
3. per generation: selection draws, then for each consecutive pair the
   crossover coin, the crossover coins and (memetic) the local-search coin,
   then one mutation coin per member followed by the mutation's own draws.
"""

from __future__ import annotations

import random
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .encoding import (
    Config,
    FitnessCache,
    balance,
    config_to_str,
    decode_values,
    neighborhood,
    random_balanced_config,
    random_feasible_config,
    repair,
)
from .instance import IntervalTpInstance, Number, dump_number

SELECTIONS = ("fps1", "fps2", "fps3", "tournament")


@dataclass
class GaParams:
    pop_size: int = 30
    stall_limit: int = 20
    prob_crossover: float = 1.0
    prob_mutation_balanced: float = 0.1
    prob_mutation_unbalanced: float = 0.7
    prob_local_search: float = 0.7
    ls_iteration_cap: Optional[int] = None  # None = unlimited
    selection: str = "tournament"
    tournament_size: int = 3
    fps3_ratio: float = 4
    elite_count: int = 0
    seed: int = 0
    time_limit: Optional[float] = None
    max_generations: Optional[int] = None

    def __post_init__(self):
        if self.pop_size < 1:
            raise ValueError("pop_size must be positive")
        if self.stall_limit < 1:
            raise ValueError("stall_limit must be positive")
        for name in ("prob_crossover", "prob_mutation_balanced", "prob_mutation_unbalanced", "prob_local_search"):
            p = getattr(self, name)
            if not 0 <= p <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")
        if self.ls_iteration_cap is not None and self.ls_iteration_cap < 1:
            raise ValueError("ls_iteration_cap must be positive or None")
        if self.selection not in SELECTIONS:
            raise ValueError(f"selection must be one of {SELECTIONS}")
        if not 1 <= self.tournament_size <= self.pop_size:
            raise ValueError("tournament_size must lie in [1, pop_size]")
        if self.fps3_ratio <= 1:
            raise ValueError("fps3_ratio must exceed 1")
        if not 0 <= self.elite_count <= self.pop_size:
            raise ValueError("elite_count must lie in [0, pop_size]")


@dataclass
class RunReport:
    algorithm: str
    params: dict
    seed: Optional[int]
    best_value: Number
    best_config: Config
    best_supply: tuple = ()
    best_demand: tuple = ()
    lp_count: int = 0
    fitness_calls: int = 0
    iterations: int = 0
    generations: int = 0
    wall_time: float = 0.0
    value_trace: list = field(default_factory=list)  # (seconds, best so far)
    stopped_by: str = "converged"
    start_config: Optional[Config] = None
    status: str = "ok"

    TIMING_FIELDS = ("wall_time",)

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "algorithm": self.algorithm,
            "params": self.params,
            "seed": self.seed,
            "status": self.status,
            "best_value": dump_number(self.best_value),
            "best_config": config_to_str(self.best_config),
            "best_supply": [dump_number(v) for v in self.best_supply],
            "best_demand": [dump_number(v) for v in self.best_demand],
            "lp_count": self.lp_count,
            "fitness_calls": self.fitness_calls,
            "iterations": self.iterations,
            "generations": self.generations,
            "stopped_by": self.stopped_by,
            "start_config": config_to_str(self.start_config) if self.start_config else None,
        }
        if timing:
            out["wall_time"] = self.wall_time
            out["value_trace"] = [[t, dump_number(v)] for t, v in self.value_trace]
        else:
            out["value_trace"] = [dump_number(v) for _, v in self.value_trace]
        return out


class _Clock:
    def __init__(self, limit):
        self.t0 = time.perf_counter()
        self.limit = limit

    def elapsed(self):
        return time.perf_counter() - self.t0

    def expired(self):
        return self.limit is not None and self.elapsed() >= self.limit


def _finish(instance, algorithm, params, seed, value, config, cache, clock, trace, **extra):
    values, feasible, _ = decode_values(instance, config)
    if not feasible:
        config = repair(instance, config)
        values = decode_values(instance, config)[0]
    m = instance.m
    return RunReport(
        algorithm=algorithm,
        params=params,
        seed=seed,
        best_value=value,
        best_config=tuple(config),
        best_supply=tuple(values[:m]),
        best_demand=tuple(values[m:]),
        lp_count=cache.lp_count,
        fitness_calls=cache.calls,
        wall_time=clock.elapsed(),
        value_trace=trace,
        **extra,
    )


# --- local search -------------------------------------------------------------


def _local_search(instance, start, fit, rng, policy, cap=None, clock=None, on_improve=None):
    """Core hill climber. Returns (config, value, iterations, stopped_by).

    An iteration is one pass over the neighbourhood; the last pass is the one
    that finds no improvement.
    """
    a = tuple(start)
    fa = fit(a)
    iterations = 0
    while True:
        if cap is not None and iterations >= cap:
            return a, fa, iterations, "iteration-cap"
        if clock is not None and clock.expired():
            return a, fa, iterations, "time-limit"
        iterations += 1
        nbrs = neighborhood(instance, a)
        move = None
        if policy == "first":
            rng.shuffle(nbrs)
            for b in nbrs:
                fb = fit(b)
                if fb > fa:
                    move = (b, fb)
                    break
        else:
            best = None
            for b in nbrs:
                fb = fit(b)
                if best is None or fb > best[1]:
                    best = (b, fb)
            if best is not None and best[1] > fa:
                move = best
        if move is None:
            return a, fa, iterations, "converged"
        assert move[1] > fa
        a, fa = move
        if on_improve is not None:
            on_improve(fa)


def _local_search_run(instance, start, policy, cap, seed, time_limit):
    rng = random.Random(seed)
    clock = _Clock(time_limit)
    drawn = start is None
    if drawn:
        start = random_balanced_config(instance, rng)
    start = tuple(start)
    cache = FitnessCache(instance)
    if decode_values(instance, start)[2]:
        if not drawn:
            raise ValueError(f"local search needs a balanced feasible start, got {config_to_str(start)}")
        # the instance has no balanced quasi-extreme scenario; nothing to climb
        config, value, iterations, stopped = start, cache(start), 0, "no-balanced-start"
        trace = [(clock.elapsed(), value)]
    else:
        trace = [(clock.elapsed(), cache(start))]
        config, value, iterations, stopped = _local_search(
            instance, start, cache, rng, policy, cap, clock,
            on_improve=lambda v: trace.append((clock.elapsed(), v)),
        )
    params = {"policy": policy, "ls_iteration_cap": cap, "time_limit": time_limit}
    return _finish(
        instance, f"ls-{policy}", params, seed, value, config, cache, clock, trace,
        iterations=iterations, stopped_by=stopped, start_config=start,
    )


def local_search_first(instance, start=None, cap=None, *, seed=0, time_limit=None) -> RunReport:
    """First-improvement hill climbing over the bound-flip neighbourhood.

    Each pass visits the neighbours in a fresh random order and moves to the
    first one with a strictly higher optimal value. Without ``start`` a random
    balanced configuration is drawn from the seeded stream.
    """
    return _local_search_run(instance, start, "first", cap, seed, time_limit)


def local_search_best(instance, start=None, cap=None, *, seed=0, time_limit=None) -> RunReport:
    """Best-improvement variant; ties between neighbours go to the lowest index."""
    return _local_search_run(instance, start, "best", cap, seed, time_limit)


# --- selection ---------------------------------------------------------------


def selection_probabilities(fitnesses: Sequence[Number], strategy: str, fps3_ratio: Number = 4) -> list[Fraction]:
    """Exact selection probabilities for the fitness-proportionate strategies.

    Degenerate inputs (zero total weight, or all fitnesses equal for the
    shifted variants) fall back to the uniform distribution.
    """
    size = len(fitnesses)
    if size == 0:
        raise ValueError("empty population")
    f = [Fraction(x) for x in fitnesses]
    uniform = [Fraction(1, size)] * size
    if strategy == "fps1":
        if any(x < 0 for x in f):
            raise ValueError("fps1 needs non-negative fitness")
        weights = f
    elif strategy == "fps2":
        low = min(f)
        weights = [x - low for x in f]
    elif strategy == "fps3":
        low, high = min(f), max(f)
        ratio = Fraction(fps3_ratio)
        # (high - g) / (low - g) = ratio
        g = (ratio * low - high) / (ratio - 1)
        weights = [x - g for x in f] if high != low else [Fraction(0)] * size
    else:
        raise ValueError(f"no probabilities for strategy {strategy!r}")
    total = sum(weights)
    if total == 0:
        return uniform
    return [w / total for w in weights]


def select(
    fitnesses: Sequence[Number],
    strategy: str,
    rng: random.Random,
    count: Optional[int] = None,
    *,
    elite_count: int = 0,
    fps3_ratio: Number = 4,
    tournament_size: int = 3,
) -> list[int]:
    """Indices of ``count`` members chosen with replacement.

    The ``elite_count`` fittest members (lowest index first on ties) are
    taken first; the rest are drawn by ``strategy``.
    """
    size = len(fitnesses)
    if count is None:
        count = size
    ranked = sorted(range(size), key=lambda i: (-fitnesses[i], i))
    chosen = ranked[: min(elite_count, count)]
    remaining = count - len(chosen)
    if remaining <= 0:
        return chosen
    if strategy == "tournament":
        for _ in range(remaining):
            draws = [rng.randrange(size) for _ in range(tournament_size)]
            winner = draws[0]
            for i in draws[1:]:
                if fitnesses[i] > fitnesses[winner]:
                    winner = i
            chosen.append(winner)
    else:
        probs = selection_probabilities(fitnesses, strategy, fps3_ratio)
        chosen.extend(rng.choices(range(size), weights=[float(p) for p in probs], k=remaining))
    return chosen


# --- variation operators -----------------------------------------------------


def mutate(instance: IntervalTpInstance, config: Sequence[int], rng: random.Random) -> Config:
    """Mutation that maps balanced configurations to balanced ones.

    Unbalanced input: flip one random non-free coordinate. Balanced input:
    pin the free position at a bound and free another coordinate that
    restores balance; if no bound choice admits that, keep the free position
    and flip one coordinate whose flip the free value can absorb.
    """
    a = list(config)
    k = a.index(0)
    others = [i for i in range(len(a)) if i != k]
    if decode_values(instance, a)[2]:
        i = rng.choice(others)
        a[i] = -a[i]
        return tuple(a)

    options = {}
    for v in (-1, 1):
        suitable = []
        for i in others:
            b = list(a)
            b[k] = v
            b[i] = 0
            if not decode_values(instance, b)[2]:
                suitable.append(i)
        if suitable:
            options[v] = suitable
    if options:
        v = rng.choice(sorted(options))
        i = rng.choice(options[v])
        a[k] = v
        a[i] = 0
        return tuple(a)

    flips = []
    for i in others:
        b = list(a)
        b[i] = -b[i]
        if not decode_values(instance, b)[2]:
            flips.append(i)
    if flips:
        i = rng.choice(flips)
        a[i] = -a[i]
    return tuple(a)


def crossover(config_a: Sequence[int], config_b: Sequence[int], rng: random.Random) -> Config:
    """Uniform crossover that inherits the free position from one parent."""
    if len(config_a) != len(config_b):
        raise ValueError(f"parents differ in length: {len(config_a)} vs {len(config_b)}")
    k = config_a.index(0)
    l = config_b.index(0)
    z = [0] * len(config_a)
    if rng.random() < 0.5:
        if l != k:
            z[l] = config_a[l]
    else:
        if l != k:
            z[k] = config_b[k]
    for i in range(len(z)):
        if i == k or i == l:
            continue
        z[i] = config_a[i] if rng.random() < 0.5 else config_b[i]
    return tuple(z)


# --- genetic / memetic -------------------------------------------------------


def _evolve(instance, params: GaParams, memetic: bool) -> RunReport:
    rng = random.Random(params.seed)
    clock = _Clock(params.time_limit)
    cache = FitnessCache(instance)
    trace = []
    ls_iterations = 0

    def learn(a):
        nonlocal ls_iterations
        start = balance(instance, a)
        if start is None:
            return a
        b, _, its, _ = _local_search(instance, start, cache, rng, "first", params.ls_iteration_cap, clock)
        ls_iterations += its
        return b

    population = [random_feasible_config(instance, rng) for _ in range(params.pop_size)]
    # no coins are drawn when learning is off, so prob_local_search=0 replays the GA
    learning = memetic and params.prob_local_search > 0
    if learning:
        population = [learn(a) if rng.random() < params.prob_local_search else a for a in population]

    best_value = None
    best_config = None
    stall = 0
    generations = 0
    stopped = "converged"
    while True:
        generations += 1
        fits = [cache(a) for a in population]
        improved = False
        for a, fa in zip(population, fits):
            if best_value is None or fa > best_value:
                best_value, best_config = fa, a
                improved = True
        if improved:
            trace.append((clock.elapsed(), best_value))
            stall = 0
        else:
            stall += 1
        if stall >= params.stall_limit:
            break
        if clock.expired():
            stopped = "time-limit"
            break
        if params.max_generations is not None and generations >= params.max_generations:
            stopped = "generation-cap"
            break

        picks = select(
            fits, params.selection, rng, params.pop_size,
            elite_count=params.elite_count,
            fps3_ratio=params.fps3_ratio,
            tournament_size=params.tournament_size,
        )
        offspring = [population[i] for i in picks]
        for p in range(len(picks) // 2):
            if rng.random() < params.prob_crossover:
                child = crossover(offspring[2 * p], offspring[2 * p + 1], rng)
                if learning and rng.random() < params.prob_local_search:
                    child = learn(child)
                offspring.append(child)
        for idx, a in enumerate(offspring):
            balanced = not decode_values(instance, a)[2]
            p = params.prob_mutation_balanced if balanced else params.prob_mutation_unbalanced
            if rng.random() < p:
                offspring[idx] = mutate(instance, a, rng)
        population = offspring

    report_params = asdict(params)
    return _finish(
        instance, "ma" if memetic else "ga", report_params, params.seed, best_value, best_config,
        cache, clock, trace, generations=generations, iterations=ls_iterations, stopped_by=stopped,
    )


def genetic(instance: IntervalTpInstance, params: Optional[GaParams] = None) -> RunReport:
    """Genetic algorithm over configurations.

    Stops after ``stall_limit`` consecutive generations without a new
    incumbent. Crossover children are appended to the selected population,
    so a generation holds up to 1.5 * pop_size members.
    """
    return _evolve(instance, params or GaParams(), memetic=False)


def memetic(instance: IntervalTpInstance, params: Optional[GaParams] = None) -> RunReport:
    """Genetic algorithm whose initial members and crossover children are
    improved by first-improvement local search with probability
    ``prob_local_search``."""
    return _evolve(instance, params or GaParams(), memetic=True)
