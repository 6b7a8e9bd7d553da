"""Command line interface: ``intervaltp {solve,bench,gen,verify}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .bench import (
    AGGREGATE_FIELDS,
    ALGORITHMS,
    HEURISTICS,
    RUN_FIELDS,
    BenchSpec,
    default_jobs,
    report_csv,
    report_json,
    run_algorithm,
    run_bench,
    write_csv,
)
from .encoding import RepairFailed
from .exact import DEFAULT_BUDGET, DEFAULT_CAP, WARN_SIZE, BudgetExceeded, exact_worst, grid_oracle_worst
from .heuristics import GaParams
from .instance import (
    GenerationFailed,
    ParseError,
    Scenario,
    ValidationError,
    dump_number,
    generate_random,
    read_instance,
    write_instance,
)
from .transport import evaluate

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INCONSISTENT = 0, 1, 2, 3

DATA_ERRORS = (ParseError, ValidationError, RepairFailed, GenerationFailed, OSError, ValueError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text):
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def _ga_options():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("heuristic parameters")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--pop", type=_positive, default=30, help="population size")
    g.add_argument("--tga", type=_positive, default=20, help="generations without improvement before stopping")
    g.add_argument("--pls", type=_probability, default=0.7, help="local search probability (memetic)")
    g.add_argument("--tls", type=_positive, default=None, help="local search iteration cap (default: none)")
    g.add_argument("--pm-balanced", type=_probability, default=0.1)
    g.add_argument("--pm-unbalanced", type=_probability, default=0.7)
    g.add_argument("--pc", type=_probability, default=1.0, help="crossover probability")
    g.add_argument("--selection", choices=("fps1", "fps2", "fps3", "tournament"), default="tournament")
    g.add_argument("--fps3-ratio", type=float, default=4.0)
    g.add_argument("--tournament-size", type=_positive, default=3)
    g.add_argument("--elite", type=int, default=0)
    g.add_argument("--time-limit", type=float, default=None, help="cooperative wall-clock limit in seconds")
    g.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="largest m+n accepted by the exact solver")
    return p


def _params(args) -> GaParams:
    return GaParams(
        pop_size=args.pop,
        stall_limit=args.tga,
        prob_crossover=args.pc,
        prob_mutation_balanced=args.pm_balanced,
        prob_mutation_unbalanced=args.pm_unbalanced,
        prob_local_search=args.pls,
        ls_iteration_cap=args.tls,
        selection=args.selection,
        tournament_size=min(args.tournament_size, args.pop),
        fps3_ratio=args.fps3_ratio,
        elite_count=args.elite,
        seed=args.seed,
        time_limit=args.time_limit,
    )


def _load(path, fmt=None):
    if path == "-":
        return read_instance(sys.stdin, fmt or "canonical-json")
    return read_instance(path, fmt)


def _emit(text, out):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    instance = _load(args.instance, args.input_format)
    alg = args.alg
    if alg == "ls":
        alg = f"ls-{args.ls_policy}"
    if alg == "exact" and instance.size > WARN_SIZE:
        print(f"warning: exact enumeration with m+n = {instance.size} may take very long", file=sys.stderr)
    params = _params(args)
    report = run_algorithm(instance, alg, params, ls_cap=args.tls, exact_cap=args.cap)
    text = report_json(report, timing=not args.no_timing) if args.format == "json" else report_csv(report)
    _emit(text, args.out)
    if args.dump_flow:
        result = evaluate(Scenario(instance.worst_cost, report.best_supply, report.best_demand))
        with open(args.dump_flow, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["source", "destination", "flow"])
            for i, row in enumerate(result.flow, start=1):
                for j, x in enumerate(row, start=1):
                    writer.writerow([i, j, dump_number(x)])
    return EXIT_OK


def _expand(paths):
    out = []
    for p in paths:
        path = Path(p)
        if path.is_dir():
            out.extend(sorted(str(q) for q in path.iterdir() if q.suffix in (".json", ".csv")))
        else:
            out.append(str(path))
    return out


def cmd_bench(args) -> int:
    algorithms = [a.strip() for a in args.algs.split(",") if a.strip()]
    spec = BenchSpec(
        instances=_expand(args.instances),
        algorithms=algorithms,
        runs=args.runs,
        seed_base=args.seed_base,
        params=_params(args),
        ls_cap=args.tls,
        jobs=args.jobs or default_jobs(),
    )
    rows, agg, reports = run_bench(spec)
    if args.runs_out:
        write_csv(rows, RUN_FIELDS, args.runs_out)
    if args.reports_dir:
        outdir = Path(args.reports_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        for row, report in zip(rows, reports):
            if report is not None:
                name = f"{Path(row['instance']).stem}__{row['algorithm']}__run{row['run']:02d}.json"
                (outdir / name).write_text(report_json(report), encoding="utf-8")
    if args.out:
        write_csv(agg, AGGREGATE_FIELDS, args.out)
    else:
        write_csv(agg, AGGREGATE_FIELDS, sys.stdout)
    failures = sum(1 for r in rows if r["status"] != "ok")
    if failures:
        print(f"{failures} of {len(rows)} runs failed", file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    ext = "csv" if args.format == "flat-csv" else "json"
    for k in range(args.count):
        name = f"itp_{args.m}x{args.n}_{k + 1:03d}"
        instance = generate_random(
            args.m, args.n,
            cost_range=tuple(args.cost_range),
            supply_base_range=tuple(args.supply_range),
            demand_base_range=tuple(args.demand_range),
            seed=args.seed + k,
            name=name,
        )
        path = outdir / f"{name}.{ext}"
        write_instance(instance, path, args.format)
        print(path)
    return EXIT_OK


def cmd_verify(args) -> int:
    instance = _load(args.instance, args.input_format)
    exact = exact_worst(instance, cap=args.cap)
    report = {"instance": instance.name, "m": instance.m, "n": instance.n,
              "exact": dump_number(exact.worst_value)}
    consistent = True
    try:
        oracle = grid_oracle_worst(instance, budget=args.budget)
    except BudgetExceeded as exc:
        report["grid_oracle"] = None
        report["grid_oracle_skipped"] = str(exc)
    else:
        report["grid_oracle"] = dump_number(oracle)
        report["exact_paths_agree"] = oracle == exact.worst_value
        consistent &= oracle == exact.worst_value
    heuristics = {}
    params = _params(args)
    for alg in HEURISTICS:
        value = run_algorithm(instance, alg, params, ls_cap=args.tls).best_value
        heuristics[alg] = {"value": dump_number(value), "gap": dump_number(exact.worst_value - value)}
        consistent &= value <= exact.worst_value
    report["heuristics"] = heuristics
    report["consistent"] = bool(consistent)
    _emit(json.dumps(report, indent=1, sort_keys=True) + "\n", args.out)
    return EXIT_OK if consistent else EXIT_INCONSISTENT


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="intervaltp", description="Worst finite optimal value of interval transportation problems.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    ga = _ga_options()

    p = sub.add_parser("solve", parents=[ga], help="run one solver on one instance")
    p.add_argument("instance", help="instance file, or - for stdin")
    p.add_argument("--alg", choices=(*ALGORITHMS, "ls"), default="ma")
    p.add_argument("--ls-policy", choices=("first", "best"), default="first", help="policy for --alg ls")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--input-format", choices=("canonical-json", "flat-csv"), default=None)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--no-timing", action="store_true", help="omit timing fields from JSON")
    p.add_argument("--dump-flow", metavar="PATH", help="write the optimal flow of the best scenario as CSV")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", parents=[ga], help="repeated seeded runs with an aggregate CSV")
    p.add_argument("instances", nargs="+", help="instance files or directories")
    p.add_argument("--algs", default=",".join(HEURISTICS), help="comma-separated algorithm list")
    p.add_argument("--runs", type=_positive, default=5)
    p.add_argument("--seed-base", type=int, default=0)
    p.add_argument("--jobs", type=_positive, default=None)
    p.add_argument("--out", help="aggregate CSV (default stdout)")
    p.add_argument("--runs-out", help="per-run CSV")
    p.add_argument("--reports-dir", help="directory for per-run JSON reports")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen", help="generate random instances with upper bounds twice the lower bounds")
    p.add_argument("m", type=_positive)
    p.add_argument("n", type=_positive)
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cost-range", type=_positive, nargs=2, default=(1, 20), metavar=("LO", "HI"))
    p.add_argument("--supply-range", type=_positive, nargs=2, default=(10, 50), metavar=("LO", "HI"))
    p.add_argument("--demand-range", type=_positive, nargs=2, default=(10, 50), metavar=("LO", "HI"))
    p.add_argument("--format", choices=("canonical-json", "flat-csv"), default="canonical-json")
    p.add_argument("--outdir", default=".")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", parents=[ga], help="cross-check exact paths and heuristics on a small instance")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="grid oracle point budget")
    p.add_argument("--input-format", choices=("canonical-json", "flat-csv"), default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help/--version
        return exc.code
    try:
        return args.func(args)
    except DATA_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
