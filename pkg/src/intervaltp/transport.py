"""Optimal value of a single transportation scenario.

:func:`evaluate` is the production kernel: a transportation simplex on the
balanced problem obtained by adding a zero-cost dummy destination that absorbs
surplus supply. :func:`evaluate_oracle` solves the same LP with a dense
two-phase simplex over exact fractions and is only meant for cross-checks.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .instance import Number, Scenario

# |reduced cost| stays below (rows + cols) * max|c|; keep well clear of int64 limits
_INT64_SAFE = 2**62


class DimensionMismatch(ValueError):
    pass


class NegativeData(ValueError):
    pass


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class EvalResult:
    status: Status
    objective: Optional[Number] = None
    flow: Optional[tuple[tuple[Number, ...], ...]] = None
    # dual certificate of the balanced problem (last entry of col_potentials is the dummy)
    row_potentials: Optional[tuple[Number, ...]] = None
    col_potentials: Optional[tuple[Number, ...]] = None
    pivots: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def _check(scenario: Scenario):
    m, n = len(scenario.supply), len(scenario.demand)
    if m < 1 or n < 1:
        raise DimensionMismatch("need at least one source and one destination")
    if len(scenario.cost) != m or any(len(row) != n for row in scenario.cost):
        raise DimensionMismatch(f"cost matrix is not {m}x{n}")
    if any(v < 0 for v in scenario.supply) or any(v < 0 for v in scenario.demand):
        raise NegativeData("supply and demand must be non-negative")
    if any(c < 0 for row in scenario.cost for c in row):
        raise NegativeData("costs must be non-negative")


def _cost_array(cost):
    flat = [c for row in cost for c in row]
    if all(isinstance(c, int) for c in flat):
        bound = max((abs(c) for c in flat), default=0) * (len(cost) + len(cost[0]) + 1)
        if bound < _INT64_SAFE:
            return np.array(cost, dtype=np.int64)
    return np.array(cost, dtype=object)


# --- initial basic feasible solutions ---------------------------------------
# Every starter removes exactly one row or column per allocation, which keeps
# the basic cells a spanning tree even under degeneracy.


def _allocate(i, j, a, b, basis, rows_left, cols_left):
    x = min(a[i], b[j])
    basis[i, j] = x
    a[i] -= x
    b[j] -= x
    if a[i] == 0 and len(rows_left) > 1:
        rows_left.discard(i)
    else:
        cols_left.discard(j)


def _start_northwest(c, a, b):
    basis = {}
    rows_left, cols_left = set(range(len(a))), set(range(len(b)))
    i = j = 0
    while cols_left:
        _allocate(i, j, a, b, basis, rows_left, cols_left)
        if i not in rows_left:
            i += 1
        else:
            j += 1
    return basis


def _start_least_cost(c, a, b):
    basis = {}
    rows_left, cols_left = set(range(len(a))), set(range(len(b)))
    order = sorted(
        ((c[i][j], i, j) for i in range(len(a)) for j in range(len(b))),
        key=lambda t: (t[0], t[1], t[2]),
    )
    for _, i, j in order:
        if not cols_left:
            break
        if i in rows_left and j in cols_left:
            _allocate(i, j, a, b, basis, rows_left, cols_left)
    return basis


def _start_vogel(c, a, b):
    basis = {}
    m, n = len(a), len(b)
    rows_left, cols_left = set(range(m)), set(range(n))
    cf = np.array([[float(x) for x in row] for row in c])
    live = np.ones((m, n), dtype=bool)

    def penalty(values):
        finite = values[np.isfinite(values)]
        if finite.size == 0:
            return -1.0
        if finite.size == 1:
            return finite[0]
        lo2 = np.partition(finite, 1)[:2]
        return lo2[1] - lo2[0]

    while cols_left:
        masked = np.where(live, cf, np.inf)
        best = None
        for i in sorted(rows_left):
            p = penalty(masked[i])
            if best is None or p > best[0]:
                best = (p, "r", i)
        for j in sorted(cols_left):
            p = penalty(masked[:, j])
            if p > best[0]:
                best = (p, "c", j)
        _, kind, idx = best
        if kind == "r":
            i, j = idx, int(np.argmin(masked[idx]))
        else:
            i, j = int(np.argmin(masked[:, idx])), idx
        _allocate(i, j, a, b, basis, rows_left, cols_left)
        if i not in rows_left:
            live[i, :] = False
        if j not in cols_left:
            live[:, j] = False
    return basis


_STARTS = {"northwest": _start_northwest, "least-cost": _start_least_cost, "vogel": _start_vogel}


# --- transportation simplex --------------------------------------------------


def _potentials(c, m, n, row_adj, col_adj, dtype):
    u = [None] * m
    v = [None] * n
    u[0] = 0
    queue = deque([(0, True)])
    while queue:
        k, is_row = queue.popleft()
        if is_row:
            for j in row_adj[k]:
                if v[j] is None:
                    v[j] = c[k][j] - u[k]
                    queue.append((j, False))
        else:
            for i in col_adj[k]:
                if u[i] is None:
                    u[i] = c[i][k] - v[k]
                    queue.append((i, True))
    return np.array(u, dtype=dtype), np.array(v, dtype=dtype)


def _tree_path(row_adj, col_adj, start_col, goal_row):
    """Basic cells on the tree path from column ``start_col`` to row ``goal_row``."""
    parent = {("c", start_col): None}
    queue = deque([("c", start_col)])
    while queue:
        node = queue.popleft()
        if node == ("r", goal_row):
            break
        kind, k = node
        nbrs = (("r", i) for i in col_adj[k]) if kind == "c" else (("c", j) for j in row_adj[k])
        for nb in nbrs:
            if nb not in parent:
                parent[nb] = node
                queue.append(nb)
    cells = []
    node = ("r", goal_row)
    while parent[node] is not None:
        prev = parent[node]
        cells.append((node[1], prev[1]) if node[0] == "r" else (prev[1], node[1]))
        node = prev
    cells.reverse()
    return cells


def _solve_balanced(c, a, b, start="least-cost", pivot_rule="dantzig", max_degenerate=None):
    m, n = len(a), len(b)
    carr = _cost_array(c)
    basis = _STARTS[start](c, list(a), list(b))
    row_adj = [set() for _ in range(m)]
    col_adj = [set() for _ in range(n)]
    for i, j in basis:
        row_adj[i].add(j)
        col_adj[j].add(i)

    if max_degenerate is None:
        max_degenerate = m + n
    bland = pivot_rule == "bland"
    degenerate_run = 0
    pivots = 0
    while True:
        u, v = _potentials(c, m, n, row_adj, col_adj, carr.dtype)
        reduced = carr - u[:, None] - v[None, :]
        if bland:
            negative = np.flatnonzero(reduced < 0)
            if negative.size == 0:
                break
            flat = int(negative[0])
        else:
            flat = int(np.argmin(reduced))
            if not reduced.flat[flat] < 0:
                break
        ie, je = divmod(flat, n)

        path = _tree_path(row_adj, col_adj, je, ie)
        minus = path[0::2]
        theta = min(basis[cell] for cell in minus)
        leave = min((cell for cell in minus if basis[cell] == theta), key=lambda t: t[0] * n + t[1])
        for cell in minus:
            basis[cell] -= theta
        for cell in path[1::2]:
            basis[cell] += theta
        del basis[leave]
        row_adj[leave[0]].discard(leave[1])
        col_adj[leave[1]].discard(leave[0])
        basis[ie, je] = theta
        row_adj[ie].add(je)
        col_adj[je].add(ie)
        pivots += 1

        if theta == 0:
            degenerate_run += 1
            # Dantzig pricing can stall on degenerate pivots; Bland's rule cannot cycle
            if degenerate_run > max_degenerate:
                bland = True
        else:
            degenerate_run = 0
    return basis, u, v, pivots


def evaluate(scenario: Scenario, *, start: str = "least-cost", pivot_rule: str = "dantzig") -> EvalResult:
    """Solve min Σ c·x s.t. row sums ≤ supply, column sums = demand, x ≥ 0."""
    _check(scenario)
    supply, demand = list(scenario.supply), list(scenario.demand)
    surplus = sum(supply) - sum(demand)
    if surplus < 0:
        return EvalResult(Status.INFEASIBLE)
    m, n = len(supply), len(demand)
    cost = [list(row) + [0] for row in scenario.cost]
    basis, u, v, pivots = _solve_balanced(cost, supply, demand + [surplus], start, pivot_rule)

    flow = [[0] * n for _ in range(m)]
    for (i, j), x in basis.items():
        if j < n:
            flow[i][j] = x
    objective = sum(cost[i][j] * x for (i, j), x in basis.items() if j < n)
    return EvalResult(
        Status.OPTIMAL,
        objective=objective,
        flow=tuple(tuple(row) for row in flow),
        row_potentials=tuple(u.tolist()),
        col_potentials=tuple(v.tolist()),
        pivots=pivots,
    )


# --- dense two-phase simplex oracle ------------------------------------------


def _pivot(tableau, row, col):
    pivot_row = tableau[row]
    p = pivot_row[col]
    if p != 1:
        tableau[row] = pivot_row = [x / p for x in pivot_row]
    for r, other in enumerate(tableau):
        if r != row and other[col] != 0:
            f = other[col]
            tableau[r] = [x - f * y for x, y in zip(other, pivot_row)]


def _simplex(tableau, basis, allowed):
    """Minimise the objective held in the last row (reduced costs, -value in rhs).

    Bland's rule: lowest-index entering column, lowest basis index on ratio ties.
    """
    obj = tableau[-1]
    while True:
        obj = tableau[-1]
        entering = next((j for j in allowed if obj[j] < 0), None)
        if entering is None:
            return
        best = None
        for r in range(len(tableau) - 1):
            coef = tableau[r][entering]
            if coef > 0:
                ratio = tableau[r][-1] / coef
                key = (ratio, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            raise RuntimeError("unbounded transportation LP; cannot happen with c ≥ 0")
        row = best[1]
        _pivot(tableau, row, entering)
        basis[row] = entering


def evaluate_oracle(scenario: Scenario) -> EvalResult:
    """Independent check of :func:`evaluate` via a textbook two-phase simplex.

    Variables are x_ij (row-major), then one slack per supply row, then one
    artificial per demand row. All arithmetic is in ``Fraction``.
    """
    _check(scenario)
    m, n = len(scenario.supply), len(scenario.demand)
    nx = m * n
    n_slack = m
    n_art = n
    width = nx + n_slack + n_art + 1
    tableau = []
    basis = []
    for i in range(m):
        row = [Fraction(0)] * width
        for j in range(n):
            row[i * n + j] = Fraction(1)
        row[nx + i] = Fraction(1)
        row[-1] = Fraction(scenario.supply[i])
        tableau.append(row)
        basis.append(nx + i)
    for j in range(n):
        row = [Fraction(0)] * width
        for i in range(m):
            row[i * n + j] = Fraction(1)
        row[nx + n_slack + j] = Fraction(1)
        row[-1] = Fraction(scenario.demand[j])
        tableau.append(row)
        basis.append(nx + n_slack + j)

    # phase 1: minimise the sum of artificials, priced out against the basis
    phase1 = [Fraction(0)] * width
    for r in range(m, m + n):
        phase1 = [p - x for p, x in zip(phase1, tableau[r])]
    for j in range(nx + n_slack, nx + n_slack + n_art):
        phase1[j] = Fraction(0)
    tableau.append(phase1)
    _simplex(tableau, basis, range(nx + n_slack))
    if tableau[-1][-1] != 0:
        return EvalResult(Status.INFEASIBLE)
    tableau.pop()

    # drive zero-level artificials out of the basis
    for r, var in enumerate(basis):
        if var >= nx + n_slack:
            col = next((j for j in range(nx + n_slack) if tableau[r][j] != 0), None)
            if col is not None:
                _pivot(tableau, r, col)
                basis[r] = col
    keep = [r for r, var in enumerate(basis) if var < nx + n_slack]
    tableau = [tableau[r] for r in keep]
    basis = [basis[r] for r in keep]

    costs = [Fraction(scenario.cost[i][j]) for i in range(m) for j in range(n)]
    costs += [Fraction(0)] * (n_slack + n_art + 1)
    phase2 = list(costs)
    for r, var in enumerate(basis):
        if phase2[var] != 0:
            f = phase2[var]
            phase2 = [p - f * x for p, x in zip(phase2, tableau[r])]
    tableau.append(phase2)
    _simplex(tableau, basis, range(nx + n_slack))

    values = [Fraction(0)] * (nx + n_slack)
    for r, var in enumerate(basis):
        values[var] = tableau[r][-1]
    flow = tuple(tuple(_plain(values[i * n + j]) for j in range(n)) for i in range(m))
    return EvalResult(Status.OPTIMAL, objective=_plain(-tableau[-1][-1]), flow=flow)


def _plain(x: Fraction) -> Number:
    return x.numerator if x.denominator == 1 else x
