import random
from collections import Counter
from fractions import Fraction

import pytest

from intervaltp import (
    GaParams,
    IntervalTpInstance,
    crossover,
    exact_worst,
    genetic,
    local_search_best,
    local_search_first,
    memetic,
    mutate,
    select,
)
from intervaltp.encoding import check_config, decode_values, is_balanced
from intervaltp.heuristics import selection_probabilities

from conftest import small_instance

F = Fraction


@pytest.mark.parametrize(
    "strategy, expected",
    [
        ("fps1", [F(1, 5), F(3, 10), F(1, 2)]),
        ("fps2", [F(0), F(1, 4), F(3, 4)]),
        ("fps3", [F(1, 7), F(2, 7), F(4, 7)]),
    ],
)
def test_selection_probabilities(strategy, expected):
    assert selection_probabilities([2, 3, 5], strategy, fps3_ratio=4) == expected


def test_fps3_ratio_holds():
    p = selection_probabilities([10, 40, 25, 31], "fps3", fps3_ratio=6)
    assert max(p) / min(p) == 6


def test_degenerate_probabilities_are_uniform():
    assert selection_probabilities([4, 4, 4], "fps2") == [F(1, 3)] * 3
    assert selection_probabilities([0, 0], "fps1") == [F(1, 2)] * 2


def test_fps_sampling_frequencies():
    rng = random.Random(0)
    picks = select([2, 3, 5], "fps1", rng, count=30000)
    freq = Counter(picks)
    for i, p in enumerate((0.2, 0.3, 0.5)):
        assert abs(freq[i] / 30000 - p) < 0.02


def test_tournament_and_elites():
    rng = random.Random(1)
    fits = [1, 9, 5, 9]
    picks = select(fits, "tournament", rng, count=6, elite_count=2, tournament_size=4)
    assert picks[:2] == [1, 3]
    assert len(picks) == 6
    # size-one tournaments are uniform draws
    freq = Counter(select(fits, "tournament", random.Random(2), count=8000, tournament_size=1))
    assert all(abs(freq[i] / 8000 - 0.25) < 0.03 for i in range(4))


def test_tournament_ties_go_to_first_drawn():
    class Fixed(random.Random):
        def randrange(self, n):
            return self.seq.pop(0)

    rng = Fixed()
    rng.seq = [2, 0, 1]
    assert select([7, 7, 7], "tournament", rng, count=1, tournament_size=3) == [2]


def test_crossover_trace():
    a, b = (0, 1, -1, 1), (1, -1, 0, 1)
    for seed in range(50):
        z = crossover(a, b, random.Random(seed))
        assert z.count(0) == 1
        if z[0] == 0:
            assert z[2] == -1 and z[3] == 1
        else:
            assert z[2] == 0 and z[0] == 1 and z[3] == 1


def test_crossover_identity():
    a = (1, -1, 0, 1, -1)
    assert all(crossover(a, a, random.Random(s)) == a for s in range(20))


def test_crossover_length_mismatch():
    with pytest.raises(ValueError):
        crossover((0, 1), (0, 1, 1), random.Random(0))


def test_mutate_unbalanced_flips_one_coordinate():
    inst = IntervalTpInstance.from_bounds([[1], [1]], [[1], [1]], [5, 5], [9, 9], [1], [2])
    a = (1, 0, 1)
    assert not is_balanced(inst, a)
    for seed in range(30):
        b = mutate(inst, a, random.Random(seed))
        diff = [i for i in range(3) if a[i] != b[i]]
        assert len(diff) == 1 and diff[0] != 1


def test_local_search_toy(toy):
    for run in (local_search_first, local_search_best):
        r = run(toy, start=(0, 1, 1))
        assert r.best_value == 24
        assert r.iterations == 1
        assert r.best_config == (0, 1, 1)


def test_local_search_rejects_unbalanced_start(toy):
    with pytest.raises(ValueError):
        local_search_first(toy, start=(-1, 0, 1))


def test_local_search_point_instance():
    inst = IntervalTpInstance.from_bounds([[2, 3]], [[2, 3]], [9], [9], [4, 4], [4, 4])
    r = local_search_best(inst)
    assert r.best_value == 20


def test_local_search_cap():
    rng = random.Random(4)
    inst = small_instance(rng, 4, 4, width=8, base=10)
    r = local_search_first(inst, cap=1, seed=3)
    assert r.iterations <= 1


def test_point_instance_ga_stalls():
    inst = IntervalTpInstance.from_bounds([[2, 3]], [[2, 3]], [9], [9], [4, 4], [4, 4])
    r = genetic(inst, GaParams(stall_limit=5, seed=1))
    assert r.best_value == 20
    assert r.generations == 6


@pytest.mark.parametrize("algorithm", [genetic, memetic])
def test_seed_determinism(algorithm):
    inst = small_instance(random.Random(8), 3, 4, width=9, base=12)
    p = GaParams(seed=42, pop_size=12, stall_limit=5)
    a, b = algorithm(inst, p).to_dict(timing=False), algorithm(inst, p).to_dict(timing=False)
    assert a == b


def test_memetic_without_learning_is_genetic():
    inst = small_instance(random.Random(9), 3, 3, width=9, base=12)
    p = GaParams(seed=5, prob_local_search=0.0, pop_size=10, stall_limit=6)
    ga, ma = genetic(inst, p).to_dict(timing=False), memetic(inst, p).to_dict(timing=False)
    ga.pop("algorithm"), ma.pop("algorithm")
    assert ga == ma


def test_trace_is_increasing():
    inst = small_instance(random.Random(10), 4, 4, width=9, base=12)
    for r in (memetic(inst, GaParams(seed=1)), genetic(inst, GaParams(seed=1)), local_search_first(inst, seed=1)):
        values = [v for _, v in r.value_trace]
        times = [t for t, _ in r.value_trace]
        assert all(x < y for x, y in zip(values, values[1:]))
        assert times == sorted(times)
        assert values[-1] == r.best_value


def test_time_limit_stops_early():
    inst = small_instance(random.Random(12), 6, 6, width=9, base=12)
    r = memetic(inst, GaParams(seed=0, time_limit=0.0))
    assert r.stopped_by == "time-limit"
    assert r.generations == 1


def test_report_matches_best_config():
    inst = small_instance(random.Random(13), 3, 3, width=9, base=12)
    for alg in (genetic, memetic):
        r = alg(inst, GaParams(seed=2, pop_size=8, stall_limit=4))
        check_config(inst, r.best_config)
        values, feasible, _ = decode_values(inst, r.best_config)
        assert feasible
        assert tuple(values) == r.best_supply + r.best_demand
        assert r.best_value <= exact_worst(inst).worst_value


@pytest.mark.parametrize("selection", ["fps1", "fps2", "fps3", "tournament"])
def test_every_selection_runs(selection):
    inst = small_instance(random.Random(14), 3, 3, width=9, base=12)
    r = memetic(inst, GaParams(seed=0, selection=selection, elite_count=2, stall_limit=5))
    assert r.best_value <= exact_worst(inst).worst_value


def test_params_validation():
    with pytest.raises(ValueError):
        GaParams(prob_crossover=1.5)
    with pytest.raises(ValueError):
        GaParams(selection="roulette")
    with pytest.raises(ValueError):
        GaParams(pop_size=2, tournament_size=3)
