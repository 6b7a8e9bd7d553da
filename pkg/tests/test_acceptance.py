"""Acceptance criteria, one marker label per criterion.

The run summary prints one PASS/FAIL/SKIP line per criterion. Criteria 4 and 5
need the ten 20x20 benchmark instances of Xie et al.; point INTERVALTP_XIE_DIR
at a directory holding them (canonical JSON or flat CSV, sorted by the
number in the file name) to enable them.
"""

import os
import random
import re
import statistics
import time
from pathlib import Path

import pytest

from intervaltp import (
    GaParams,
    Scenario,
    crossover,
    evaluate,
    evaluate_oracle,
    exact_worst,
    genetic,
    grid_oracle_worst,
    local_search_best,
    local_search_first,
    memetic,
    mutate,
    read_instance,
)
from intervaltp.encoding import check_config, decode, is_balanced, random_balanced_config, random_config
from intervaltp.instance import Feasibility, GenerationFailed, IntervalTpInstance, classify_feasibility, generate_random

from conftest import small_instance
from test_transport import check_certificate, random_scenario

criterion = pytest.mark.criterion

# memetic values per benchmark instance 1..10
BENCHMARK_MEMETIC = [9425, 9200, 9425, 9130, 9420, 10320, 8700, 9260, 9885, 9370]


def benchmark_instances():
    root = os.environ.get("INTERVALTP_XIE_DIR")
    if not root:
        pytest.skip("INTERVALTP_XIE_DIR not set; 20x20 benchmark dataset unavailable")
    files = [p for p in Path(root).iterdir() if p.suffix in (".json", ".csv")]
    files.sort(key=lambda p: int(re.findall(r"\d+", p.stem)[-1]))
    if len(files) != 10:
        pytest.fail(f"expected 10 benchmark instances in {root}, found {len(files)}")
    return [read_instance(p) for p in files]


@criterion("1 oracle equivalence of the exact reduction")
def test_exact_matches_grid_oracle():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    mismatches = []
    for case in range(200):
        inst = small_instance(rng, rng.randint(1, 3), rng.randint(1, 3), width=4)
        exact, oracle = exact_worst(inst).worst_value, grid_oracle_worst(inst)
        if exact != oracle:
            mismatches.append((case, exact, oracle))
    elapsed = time.perf_counter() - t0
    assert mismatches == []
    assert elapsed < 60


@criterion("2 LP kernel equivalence")
def test_kernel_matches_oracle():
    rng = random.Random(7)
    t0 = time.perf_counter()
    for _ in range(200):
        sc = random_scenario(rng, rng.randint(1, 8), rng.randint(1, 8))
        result = evaluate(sc)
        assert result.objective == evaluate_oracle(sc).objective
        check_certificate(sc, result)
    assert time.perf_counter() - t0 < 30


@criterion("3 heuristic soundness")
def test_heuristics_never_exceed_exact():
    rng = random.Random(3)
    hits = 0
    cases = 0
    seed = 0
    while cases < 50:
        m, n = rng.randint(1, 5), rng.randint(1, 5)
        seed += 1
        try:
            inst = generate_random(m, n, seed=seed)
        except GenerationFailed:
            continue
        cases += 1
        worst = exact_worst(inst).worst_value
        for run in (local_search_first, local_search_best):
            assert run(inst, seed=seed).best_value <= worst
        assert genetic(inst, GaParams(seed=seed)).best_value <= worst
        value = memetic(inst, GaParams(seed=seed)).best_value
        assert value <= worst
        hits += value == worst
    print(f"memetic attained the exact value on {hits}/50 instances")
    assert hits >= 45


@criterion("4 benchmark values of the memetic algorithm")
def test_benchmark_values():
    instances = benchmark_instances()
    shortfalls = []
    for idx, (inst, target) in enumerate(zip(instances, BENCHMARK_MEMETIC), start=1):
        reached = 0
        for seed in range(5):
            report = memetic(inst, GaParams(seed=seed))
            assert report.wall_time < 30, f"instance {idx} seed {seed} took {report.wall_time:.1f}s"
            reached += report.best_value >= target
        if reached < 3:
            shortfalls.append((idx, reached))
    assert shortfalls == []


@criterion("5 local search statistics")
def test_local_search_statistics():
    instances = benchmark_instances()
    out_of_band = []
    for idx, inst in enumerate(instances, start=1):
        first = [local_search_first(inst, seed=s) for s in range(10)]
        best = [local_search_best(inst, seed=s) for s in range(10)]
        its = statistics.fmean(r.iterations for r in first)
        lps = statistics.fmean(r.fitness_calls for r in first)
        its_best = statistics.fmean(r.iterations for r in best)
        print(f"instance {idx}: first {its:.1f} it / {lps:.1f} LPs, best {its_best:.1f} it")
        if not (30 <= its <= 60 and 400 <= lps <= 750 and 2 <= its_best <= 4):
            out_of_band.append((idx, its, lps, its_best))
    assert out_of_band == []


def _balanced_samples(count, seed):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        inst = small_instance(rng, rng.randint(1, 5), rng.randint(1, 5), width=8, base=10)
        a = random_balanced_config(inst, rng)
        if is_balanced(inst, a):
            out.append((inst, a))
            # several configurations per instance keep setup cheap
            for _ in range(19):
                b = random_balanced_config(inst, rng)
                if is_balanced(inst, b):
                    out.append((inst, b))
    return out[:count]


@criterion("6 property suites")
def test_mutation_balanced_closure():
    rng = random.Random(61)
    violations = 0
    for inst, a in _balanced_samples(10_000, 60):
        b = mutate(inst, a, rng)
        check_config(inst, b)
        violations += not is_balanced(inst, b)
    assert violations == 0


@criterion("6 property suites")
def test_crossover_membership():
    rng = random.Random(62)
    violations = 0
    for _ in range(10_000):
        size = rng.randint(2, 12)
        a = [rng.choice((-1, 1)) for _ in range(size)]
        b = [rng.choice((-1, 1)) for _ in range(size)]
        a[rng.randrange(size)] = 0
        b[rng.randrange(size)] = 0
        z = crossover(tuple(a), tuple(b), rng)
        ok = len(z) == size and z.count(0) == 1 and set(z) <= {-1, 0, 1}
        violations += not ok
    assert violations == 0


@criterion("6 property suites")
def test_evaluate_monotonicity():
    rng = random.Random(63)
    for _ in range(1000):
        sc = random_scenario(rng, rng.randint(1, 5), rng.randint(1, 5))
        base = evaluate(sc).objective
        s = list(sc.supply)
        s[rng.randrange(len(s))] += rng.randint(1, 5)
        assert evaluate(Scenario(sc.cost, s, sc.demand)).objective <= base
        d = list(sc.demand)
        j = rng.randrange(len(d))
        if d[j] > 0:
            d[j] -= rng.randint(1, d[j])
            assert evaluate(Scenario(sc.cost, sc.supply, d)).objective <= base


@criterion("6 property suites")
def test_decode_bound_exactness_sampled():
    rng = random.Random(64)
    for _ in range(2000):
        inst = small_instance(rng, rng.randint(1, 4), rng.randint(1, 4), width=6)
        a = random_config(inst, rng)
        d = decode(inst, a)
        values = d.scenario.supply + d.scenario.demand
        for i, v in enumerate(a):
            if v:
                assert values[i] == (inst.bounds_hi[i] if v > 0 else inst.bounds_lo[i])
        assert d.scenario.within(inst)


@criterion("6 property suites")
def test_seed_determinism_and_trace():
    inst = generate_random(6, 6, seed=11)
    for alg in ("ls-first", "ls-best", "ga", "ma"):
        def go():
            if alg.startswith("ls"):
                fn = local_search_first if alg == "ls-first" else local_search_best
                return fn(inst, seed=5)
            return (genetic if alg == "ga" else memetic)(inst, GaParams(seed=5))

        first, second = go(), go()
        assert first.to_dict(timing=False) == second.to_dict(timing=False)
        values = [v for _, v in first.value_trace]
        assert all(x < y for x, y in zip(values, values[1:]))


@criterion("7 all-feasible shortcut")
def test_all_feasible_shortcut():
    rng = random.Random(77)
    cases = 0
    while cases < 50:
        m, n = rng.randint(1, 3), rng.randint(1, 3)
        s_lo = [rng.randint(10, 20) for _ in range(m)]
        d_lo = [rng.randint(0, 5) for _ in range(n)]
        d_hi = [x + rng.randint(0, 4) for x in d_lo]
        c_lo = [[rng.randint(0, 9) for _ in range(n)] for _ in range(m)]
        c_hi = [[c + rng.randint(0, 4) for c in row] for row in c_lo]
        inst = IntervalTpInstance.from_bounds(
            c_lo, c_hi, s_lo, [s + rng.randint(0, 4) for s in s_lo], d_lo, d_hi)
        if classify_feasibility(inst) is not Feasibility.ALL_SCENARIOS_FEASIBLE:
            continue
        cases += 1
        direct = evaluate(Scenario(inst.worst_cost, inst.supply_lo, inst.demand_hi)).objective
        fast = exact_worst(inst)
        slow = exact_worst(inst, shortcut=False)
        assert fast.path == "shortcut"
        assert fast.worst_value == direct == slow.worst_value
