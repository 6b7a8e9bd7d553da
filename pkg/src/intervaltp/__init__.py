"""Exact and heuristic solvers for the worst finite optimal value of interval
transportation problems."""

__version__ = "0.1.0"

from .encoding import (
    FitnessCache,
    RepairFailed,
    config_from_str,
    config_to_str,
    decode,
    fitness,
    neighborhood,
    repair,
)
from .exact import ExactResult, InstanceTooLarge, exact_worst, grid_oracle_worst
from .heuristics import (
    GaParams,
    RunReport,
    crossover,
    genetic,
    local_search_best,
    local_search_first,
    memetic,
    mutate,
    select,
)
from .instance import (
    Feasibility,
    Interval,
    IntervalTpInstance,
    Scenario,
    classify_feasibility,
    generate_random,
    read_instance,
    validate,
    write_instance,
)
from .transport import EvalResult, evaluate, evaluate_oracle

__all__ = [
    "EvalResult",
    "ExactResult",
    "Feasibility",
    "FitnessCache",
    "GaParams",
    "InstanceTooLarge",
    "Interval",
    "IntervalTpInstance",
    "RepairFailed",
    "RunReport",
    "Scenario",
    "classify_feasibility",
    "config_from_str",
    "config_to_str",
    "crossover",
    "decode",
    "evaluate",
    "evaluate_oracle",
    "exact_worst",
    "fitness",
    "generate_random",
    "genetic",
    "grid_oracle_worst",
    "local_search_best",
    "local_search_first",
    "memetic",
    "mutate",
    "neighborhood",
    "read_instance",
    "repair",
    "select",
    "validate",
    "write_instance",
]
