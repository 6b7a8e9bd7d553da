"""Interval transportation problem data model, validation, file I/O and generation."""

from __future__ import annotations

import csv
import enum
import io
import json
import random
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from pathlib import Path
from typing import IO, NamedTuple, Sequence, Union

Number = Union[int, Fraction]


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GenerationFailed(RuntimeError):
    pass


class Interval(NamedTuple):
    lo: Number
    hi: Number

    @property
    def width(self) -> Number:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi


class Feasibility(enum.Enum):
    NO_FEASIBLE_SCENARIO = "NoFeasibleScenario"
    ALL_SCENARIOS_FEASIBLE = "AllScenariosFeasible"
    MIXED = "Mixed"


@dataclass(frozen=True)
class IntervalTpInstance:
    """Interval costs, supplies and demands of a transportation problem.

    ``m`` and ``n`` are stored explicitly so that a malformed file can be
    reported by :func:`validate` instead of failing on construction.
    """

    m: int
    n: int
    cost: tuple[tuple[Interval, ...], ...]
    supply: tuple[Interval, ...]
    demand: tuple[Interval, ...]
    name: str = ""

    @classmethod
    def from_bounds(cls, cost_lo, cost_hi, supply_lo, supply_hi, demand_lo, demand_hi, name=""):
        cost = tuple(
            tuple(Interval(lo, hi) for lo, hi in zip(row_lo, row_hi))
            for row_lo, row_hi in zip(cost_lo, cost_hi)
        )
        supply = tuple(Interval(lo, hi) for lo, hi in zip(supply_lo, supply_hi))
        demand = tuple(Interval(lo, hi) for lo, hi in zip(demand_lo, demand_hi))
        return cls(len(supply), len(demand), cost, supply, demand, name)

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def supply_lo(self) -> list[Number]:
        return [iv.lo for iv in self.supply]

    @property
    def supply_hi(self) -> list[Number]:
        return [iv.hi for iv in self.supply]

    @property
    def demand_lo(self) -> list[Number]:
        return [iv.lo for iv in self.demand]

    @property
    def demand_hi(self) -> list[Number]:
        return [iv.hi for iv in self.demand]

    @property
    def cost_lo(self) -> list[list[Number]]:
        return [[iv.lo for iv in row] for row in self.cost]

    @property
    def cost_hi(self) -> list[list[Number]]:
        return [[iv.hi for iv in row] for row in self.cost]

    # supplies then demands, the coordinate order used by configurations
    @cached_property
    def bounds_lo(self) -> tuple[Number, ...]:
        return tuple(iv.lo for iv in self.supply) + tuple(iv.lo for iv in self.demand)

    @cached_property
    def bounds_hi(self) -> tuple[Number, ...]:
        return tuple(iv.hi for iv in self.supply) + tuple(iv.hi for iv in self.demand)

    @cached_property
    def worst_cost(self) -> tuple[tuple[Number, ...], ...]:
        return tuple(tuple(iv.hi for iv in row) for row in self.cost)

    def is_integer(self) -> bool:
        values = [v for iv in (*self.supply, *self.demand) for v in iv]
        values += [v for row in self.cost for iv in row for v in iv]
        return all(isinstance(v, int) or getattr(v, "denominator", None) == 1 for v in values)


@dataclass(frozen=True)
class Scenario:
    cost: tuple[tuple[Number, ...], ...]
    supply: tuple[Number, ...]
    demand: tuple[Number, ...]

    def __post_init__(self):
        object.__setattr__(self, "cost", tuple(tuple(row) for row in self.cost))
        object.__setattr__(self, "supply", tuple(self.supply))
        object.__setattr__(self, "demand", tuple(self.demand))

    @property
    def m(self) -> int:
        return len(self.supply)

    @property
    def n(self) -> int:
        return len(self.demand)

    @property
    def is_feasible(self) -> bool:
        return sum(self.supply) >= sum(self.demand)

    @property
    def is_balanced(self) -> bool:
        return sum(self.supply) == sum(self.demand)

    def within(self, instance: IntervalTpInstance) -> bool:
        return (
            all(v in iv for v, iv in zip(self.supply, instance.supply))
            and all(v in iv for v, iv in zip(self.demand, instance.demand))
            and all(
                v in iv
                for row, irow in zip(self.cost, instance.cost)
                for v, iv in zip(row, irow)
            )
        )


def validate(instance: IntervalTpInstance) -> list[str]:
    """Return a list of human-readable violations, empty for a valid instance."""
    problems = []
    if instance.m < 1:
        problems.append("m: must be at least 1")
    if instance.n < 1:
        problems.append("n: must be at least 1")
    if len(instance.supply) != instance.m:
        problems.append(
            f"supply: dimension mismatch, m={instance.m} but {len(instance.supply)} intervals"
        )
    if len(instance.demand) != instance.n:
        problems.append(
            f"demand: dimension mismatch, n={instance.n} but {len(instance.demand)} intervals"
        )
    if len(instance.cost) != instance.m or any(len(row) != instance.n for row in instance.cost):
        problems.append(f"cost: dimension mismatch, expected {instance.m}x{instance.n} matrix")

    def check(label, iv):
        if iv.lo > iv.hi:
            problems.append(f"{label}: lo ≤ hi violated ({iv.lo} > {iv.hi})")
        if iv.lo < 0:
            problems.append(f"{label}: lo ≥ 0 violated ({iv.lo})")

    for i, iv in enumerate(instance.supply):
        check(f"supply[{i}]", iv)
    for j, iv in enumerate(instance.demand):
        check(f"demand[{j}]", iv)
    for i, row in enumerate(instance.cost):
        for j, iv in enumerate(row):
            check(f"cost[{i}][{j}]", iv)

    if sum(instance.supply_hi) < sum(instance.demand_lo):
        problems.append("instance: no feasible scenario: Σ s̄ < Σ d̲")
    return problems


def classify_feasibility(instance: IntervalTpInstance) -> Feasibility:
    if sum(instance.supply_hi) < sum(instance.demand_lo):
        return Feasibility.NO_FEASIBLE_SCENARIO
    if sum(instance.supply_lo) >= sum(instance.demand_hi):
        return Feasibility.ALL_SCENARIOS_FEASIBLE
    return Feasibility.MIXED


def generate_random(
    m: int,
    n: int,
    cost_range: tuple[int, int] = (1, 20),
    supply_base_range: tuple[int, int] = (10, 50),
    demand_base_range: tuple[int, int] = (10, 50),
    seed: int | None = None,
    max_retries: int = 1000,
    name: str = "",
) -> IntervalTpInstance:
    """Random integer instance with upper bounds twice the lower bounds.

    Supply and cost are drawn first; the demand base is resampled until the
    instance has both feasible and infeasible scenarios.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    for lo, hi in (cost_range, supply_base_range, demand_base_range):
        if lo < 1 or hi < lo:
            raise ValueError(f"bad range {(lo, hi)}")
    rng = random.Random(seed)
    s_lo = [rng.randint(*supply_base_range) for _ in range(m)]
    c_lo = [[rng.randint(*cost_range) for _ in range(n)] for _ in range(m)]
    c_hi = [[rng.randint(c, cost_range[1]) for c in row] for row in c_lo]
    total_s = sum(s_lo)
    for _ in range(max_retries):
        d_lo = [rng.randint(*demand_base_range) for _ in range(n)]
        # mixed: Σ s̲ < Σ d̄ = 2 Σ d̲ and Σ s̄ = 2 Σ s̲ ≥ Σ d̲
        if total_s < 2 * sum(d_lo) and 2 * total_s >= sum(d_lo):
            break
    else:
        raise GenerationFailed(f"no mixed instance after {max_retries} demand draws")
    return IntervalTpInstance.from_bounds(
        c_lo, c_hi, s_lo, [2 * s for s in s_lo], d_lo, [2 * d for d in d_lo], name=name
    )


# --- serialization ---------------------------------------------------------


def dump_number(x):
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    raise TypeError(f"unsupported scalar {x!r}")


def load_number(x, where):
    if isinstance(x, bool):
        raise ParseError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, (float, str)):
        try:
            value = Fraction(str(x).strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"{where}: not a number: {x!r}") from None
        return value.numerator if value.denominator == 1 else value
    raise ParseError(f"{where}: expected a number, got {x!r}")


def to_dict(instance: IntervalTpInstance) -> dict:
    return {
        "name": instance.name,
        "m": instance.m,
        "n": instance.n,
        "cost_lo": [[dump_number(v) for v in row] for row in instance.cost_lo],
        "cost_hi": [[dump_number(v) for v in row] for row in instance.cost_hi],
        "supply_lo": [dump_number(v) for v in instance.supply_lo],
        "supply_hi": [dump_number(v) for v in instance.supply_hi],
        "demand_lo": [dump_number(v) for v in instance.demand_lo],
        "demand_hi": [dump_number(v) for v in instance.demand_hi],
    }


def _matrix(raw, m, n, key):
    if not isinstance(raw, list):
        raise ParseError(f"{key}: expected a list")
    if raw and all(not isinstance(r, list) for r in raw):
        # flat row-major form
        if n < 1 or len(raw) % n:
            raise ValidationError([f"{key}: dimension mismatch, {len(raw)} entries for n={n}"])
        raw = [raw[i : i + n] for i in range(0, len(raw), n)]
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, list):
            raise ParseError(f"{key}[{i}]: expected a list")
        rows.append([load_number(v, f"{key}[{i}][{j}]") for j, v in enumerate(row)])
    return rows


def from_dict(data: dict) -> IntervalTpInstance:
    if not isinstance(data, dict):
        raise ParseError("top level: expected a JSON object")
    keys = ("m", "n", "cost_lo", "cost_hi", "supply_lo", "supply_hi", "demand_lo", "demand_hi")
    for key in keys:
        if key not in data:
            raise ParseError(f"missing field '{key}'")
    m, n = data["m"], data["n"]
    if not isinstance(m, int) or not isinstance(n, int):
        raise ParseError("m, n: expected integers")

    def vector(key):
        raw = data[key]
        if not isinstance(raw, list):
            raise ParseError(f"{key}: expected a list")
        return [load_number(v, f"{key}[{i}]") for i, v in enumerate(raw)]

    s_lo, s_hi, d_lo, d_hi = (vector(k) for k in ("supply_lo", "supply_hi", "demand_lo", "demand_hi"))
    c_lo = _matrix(data["cost_lo"], m, n, "cost_lo")
    c_hi = _matrix(data["cost_hi"], m, n, "cost_hi")

    problems = []
    for lo_key, lo, hi_key, hi in (
        ("supply_lo", s_lo, "supply_hi", s_hi),
        ("demand_lo", d_lo, "demand_hi", d_hi),
        ("cost_lo", c_lo, "cost_hi", c_hi),
    ):
        if len(lo) != len(hi):
            problems.append(f"{lo_key}/{hi_key}: dimension mismatch ({len(lo)} vs {len(hi)})")
    for r_lo, r_hi in zip(c_lo, c_hi):
        if len(r_lo) != len(r_hi):
            problems.append("cost_lo/cost_hi: dimension mismatch in row lengths")
            break
    if problems:
        raise ValidationError(problems)

    instance = IntervalTpInstance(
        m=m,
        n=n,
        cost=tuple(tuple(map(Interval, rl, rh)) for rl, rh in zip(c_lo, c_hi)),
        supply=tuple(map(Interval, s_lo, s_hi)),
        demand=tuple(map(Interval, d_lo, d_hi)),
        name=str(data.get("name", "")),
    )
    problems = validate(instance)
    if problems:
        raise ValidationError(problems)
    return instance


CSV_HEADER = ["kind", "index1", "index2", "lo", "hi"]


def _write_csv(instance, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, row in enumerate(instance.cost, start=1):
        for j, iv in enumerate(row, start=1):
            writer.writerow(["cost", i, j, dump_number(iv.lo), dump_number(iv.hi)])
    for i, iv in enumerate(instance.supply, start=1):
        writer.writerow(["supply", i, "", dump_number(iv.lo), dump_number(iv.hi)])
    for j, iv in enumerate(instance.demand, start=1):
        writer.writerow(["demand", j, "", dump_number(iv.lo), dump_number(iv.hi)])


def _read_csv(stream, name=""):
    reader = csv.reader(stream)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("line 1: empty file, missing header") from None
    if [h.strip() for h in header] != CSV_HEADER:
        raise ParseError(f"line 1: expected header {','.join(CSV_HEADER)}")
    cost, supply, demand = {}, {}, {}
    for row in reader:
        line = reader.line_num
        if not row or not any(cell.strip() for cell in row):
            continue
        if len(row) != 5:
            missing = CSV_HEADER[len(row)] if len(row) < 5 else None
            detail = f"missing field '{missing}'" if missing else "too many fields"
            raise ParseError(f"line {line}: {detail}")
        kind, a, b, lo, hi = (cell.strip() for cell in row)
        try:
            i = int(a)
        except ValueError:
            raise ParseError(f"line {line}: index1 is not an integer: {a!r}") from None
        if i < 1:
            raise ParseError(f"line {line}: index1 must be ≥ 1")
        iv = Interval(load_number(lo, f"line {line}: lo"), load_number(hi, f"line {line}: hi"))
        if kind == "cost":
            try:
                j = int(b)
            except ValueError:
                raise ParseError(f"line {line}: index2 is not an integer: {b!r}") from None
            if j < 1:
                raise ParseError(f"line {line}: index2 must be ≥ 1")
            target, key = cost, (i, j)
        elif kind == "supply":
            target, key = supply, i
        elif kind == "demand":
            target, key = demand, i
        else:
            raise ParseError(f"line {line}: unknown kind {kind!r}")
        if key in target:
            raise ParseError(f"line {line}: duplicate {kind} entry {key}")
        target[key] = iv
    if not supply:
        raise ParseError("missing field 'supply'")
    if not demand:
        raise ParseError("missing field 'demand'")
    m, n = max(supply), max(demand)
    for label, table, size in (("supply", supply, m), ("demand", demand, n)):
        for k in range(1, size + 1):
            if k not in table:
                raise ParseError(f"missing field '{label}' index {k}")
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if (i, j) not in cost:
                raise ParseError(f"missing field 'cost' index ({i},{j})")
    extra = [key for key in cost if key[0] > m or key[1] > n]
    if extra:
        raise ValidationError([f"cost: dimension mismatch, entry {extra[0]} outside {m}x{n}"])
    instance = IntervalTpInstance(
        m=m,
        n=n,
        cost=tuple(tuple(cost[i, j] for j in range(1, n + 1)) for i in range(1, m + 1)),
        supply=tuple(supply[i] for i in range(1, m + 1)),
        demand=tuple(demand[j] for j in range(1, n + 1)),
        name=name,
    )
    problems = validate(instance)
    if problems:
        raise ValidationError(problems)
    return instance


def _guess_format(path) -> str:
    return "flat-csv" if str(path).lower().endswith(".csv") else "canonical-json"


def read_instance(source: Union[str, Path, IO[str]], format: str | None = None) -> IntervalTpInstance:
    """Read an instance from a path or a text stream.

    ``format`` is ``"canonical-json"`` or ``"flat-csv"``; for paths it defaults
    from the file extension.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        fmt = format or _guess_format(path)
        with open(path, encoding="utf-8", newline="") as fh:
            if fmt == "canonical-json":
                return _read_json(fh, path.stem)
            if fmt == "flat-csv":
                return _read_csv(fh, path.stem)
        raise ValueError(f"unknown format {fmt!r}")
    fmt = format or "canonical-json"
    if fmt == "canonical-json":
        return _read_json(source, "")
    if fmt == "flat-csv":
        return _read_csv(source)
    raise ValueError(f"unknown format {fmt!r}")


def _read_json(stream, default_name):
    try:
        data = json.load(stream)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    instance = from_dict(data)
    if not instance.name and default_name:
        instance = IntervalTpInstance(
            instance.m, instance.n, instance.cost, instance.supply, instance.demand, default_name
        )
    return instance


def write_instance(instance: IntervalTpInstance, target: Union[str, Path, IO[str]], format: str | None = None):
    if isinstance(target, (str, Path)):
        fmt = format or _guess_format(target)
        with open(target, "w", encoding="utf-8", newline="") as fh:
            write_instance(instance, fh, fmt)
        return
    fmt = format or "canonical-json"
    if fmt == "canonical-json":
        target.write(dumps_instance(instance))
    elif fmt == "flat-csv":
        _write_csv(instance, target)
    else:
        raise ValueError(f"unknown format {fmt!r}")


def dumps_instance(instance: IntervalTpInstance, format: str = "canonical-json") -> str:
    if format == "canonical-json":
        return json.dumps(to_dict(instance), indent=1) + "\n"
    buf = io.StringIO()
    write_instance(instance, buf, format)
    return buf.getvalue()


def loads_instance(text: str, format: str = "canonical-json") -> IntervalTpInstance:
    return read_instance(io.StringIO(text), format)
