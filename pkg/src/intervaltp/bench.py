"""Running solvers by name, benchmark batches and CSV/JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .exact import DEFAULT_CAP, exact_worst
from .heuristics import GaParams, RunReport, genetic, local_search_best, local_search_first, memetic
from .instance import IntervalTpInstance, dump_number, read_instance

ALGORITHMS = ("exact", "ls-first", "ls-best", "ga", "ma")
HEURISTICS = ("ls-first", "ls-best", "ga", "ma")
JOBS_ENV = "INTERVALTP_JOBS"


def run_algorithm(
    instance: IntervalTpInstance,
    algorithm: str,
    params: Optional[GaParams] = None,
    *,
    ls_cap: Optional[int] = None,
    exact_cap: int = DEFAULT_CAP,
) -> RunReport:
    """Run one solver and return its report.

    ``params.seed`` and ``params.time_limit`` also drive the local searches;
    ``ls_cap`` bounds their iterations.
    """
    params = params or GaParams()
    if algorithm == "exact":
        t0 = time.perf_counter()
        result = exact_worst(instance, cap=exact_cap)
        elapsed = time.perf_counter() - t0
        return RunReport(
            algorithm="exact",
            params={"cap": exact_cap, "path": result.path},
            seed=None,
            best_value=result.worst_value,
            best_config=result.worst_config,
            best_supply=result.worst_scenario.supply,
            best_demand=result.worst_scenario.demand,
            lp_count=result.scenarios_examined,
            fitness_calls=result.scenarios_examined,
            wall_time=elapsed,
            value_trace=[(elapsed, result.worst_value)],
        )
    if algorithm == "ls-first":
        return local_search_first(instance, cap=ls_cap, seed=params.seed, time_limit=params.time_limit)
    if algorithm == "ls-best":
        return local_search_best(instance, cap=ls_cap, seed=params.seed, time_limit=params.time_limit)
    if algorithm == "ga":
        return genetic(instance, params)
    if algorithm == "ma":
        return memetic(instance, params)
    raise ValueError(f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}")


def report_json(report: RunReport, timing: bool = True) -> str:
    return json.dumps(report.to_dict(timing), sort_keys=True, indent=1) + "\n"


REPORT_CSV_FIELDS = [
    "algorithm", "seed", "status", "best_value", "wall_time", "lp_count", "fitness_calls",
    "iterations", "generations", "stopped_by", "best_config",
]


def report_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, REPORT_CSV_FIELDS, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    row = report.to_dict()
    row["wall_time"] = f"{report.wall_time:.6f}"
    writer.writerow(row)
    return buf.getvalue()


# --- benchmark batches --------------------------------------------------------


@dataclass
class BenchSpec:
    instances: Sequence[str]
    algorithms: Sequence[str] = HEURISTICS
    runs: int = 5
    seed_base: int = 0
    params: GaParams = field(default_factory=GaParams)
    ls_cap: Optional[int] = None
    jobs: int = 1

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}")


RUN_FIELDS = [
    "instance", "algorithm", "run", "seed", "status", "best_value", "wall_time", "lp_count",
    "fitness_calls", "iterations", "generations", "best_config", "error",
]
AGGREGATE_FIELDS = [
    "instance", "algorithm", "runs", "failures",
    "value_min", "value_avg", "value_max",
    "time_min", "time_avg", "time_max",
    "lp_avg", "fitness_calls_avg", "iterations_avg", "generations_avg",
]


def _run_cell(cell):
    label, instance, algorithm, run, seed, params, ls_cap = cell
    row = {"instance": label, "algorithm": algorithm, "run": run, "seed": seed}
    try:
        report = run_algorithm(instance, algorithm, replace(params, seed=seed), ls_cap=ls_cap)
    except Exception as exc:  # one failed cell must not abort the batch
        row.update(status="error", error=f"{type(exc).__name__}: {exc}")
        return row, None
    row.update(
        status="ok",
        best_value=dump_number(report.best_value),
        wall_time=report.wall_time,
        lp_count=report.lp_count,
        fitness_calls=report.fitness_calls,
        iterations=report.iterations,
        generations=report.generations,
        best_config=report.to_dict()["best_config"],
        error="",
    )
    return row, report


def _mean(values):
    if all(isinstance(v, (int, Fraction)) for v in values):
        avg = Fraction(sum(values), len(values))
        return avg.numerator if avg.denominator == 1 else float(avg)
    return statistics.fmean(values)


def aggregate(rows: Sequence[dict]) -> list[dict]:
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault((row["instance"], row["algorithm"]), []).append(row)
    out = []
    for (label, alg), items in sorted(groups.items(), key=lambda kv: (kv[0][0], ALGORITHMS.index(kv[0][1]))):
        ok = [r for r in items if r["status"] == "ok"]
        agg = {"instance": label, "algorithm": alg, "runs": len(items), "failures": len(items) - len(ok)}
        if ok:
            vals = [r["best_value"] for r in ok]
            vals = [Fraction(v) if isinstance(v, str) else v for v in vals]
            times = [r["wall_time"] for r in ok]
            agg.update(
                value_min=dump_number(min(vals)),
                value_avg=_mean(vals),
                value_max=dump_number(max(vals)),
                time_min=min(times),
                time_avg=statistics.fmean(times),
                time_max=max(times),
                lp_avg=_mean([r["lp_count"] for r in ok]),
                fitness_calls_avg=_mean([r["fitness_calls"] for r in ok]),
                iterations_avg=_mean([r["iterations"] for r in ok]),
                generations_avg=_mean([r["generations"] for r in ok]),
            )
        out.append(agg)
    return out


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def run_bench(spec: BenchSpec, loaded: Optional[dict] = None):
    """Execute every (instance, algorithm, run) cell.

    Run ``r`` uses seed ``seed_base + r``; local-search variants with the same
    seed therefore start from the same configuration. Returns
    ``(run_rows, aggregate_rows, reports)`` with rows in a deterministic order.
    """
    loaded = dict(loaded or {})
    cells = []
    broken = []
    for path in spec.instances:
        label = str(path)
        if label not in loaded:
            try:
                loaded[label] = read_instance(path)
            except (OSError, ValueError) as exc:
                error = f"{type(exc).__name__}: {exc}"
                for alg in spec.algorithms:
                    for run in range(spec.runs):
                        row = {"instance": label, "algorithm": alg, "run": run,
                               "seed": spec.seed_base + run, "status": "error", "error": error}
                        broken.append((row, None))
                continue
        for alg in spec.algorithms:
            for run in range(spec.runs):
                cells.append((label, loaded[label], alg, run, spec.seed_base + run, spec.params, spec.ls_cap))
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            results = list(pool.map(_run_cell, cells))
    else:
        results = [_run_cell(c) for c in cells]
    results += broken
    rows = [r for r, _ in results]
    reports = [rep for _, rep in results]
    return rows, aggregate(rows), reports


def write_csv(rows: Sequence[dict], fields: Sequence[str], target) -> None:
    def emit(fh):
        writer = csv.DictWriter(fh, fields, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(row.get(k, "")) for k in fields})

    if isinstance(target, (str, Path)):
        with open(target, "w", encoding="utf-8", newline="") as fh:
            emit(fh)
    else:
        emit(target)


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.6f}"
    return value
