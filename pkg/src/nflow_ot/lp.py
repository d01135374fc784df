"""Exact rational linear programming.

Dense two-phase tableau simplex over :class:`~fractions.Fraction` with Bland's
rule.  Instances here are small (a few hundred cells at most) and every caller
needs exact optima, so no floating point path exists.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .cost import CostFn
from .measures import AtomicMeasure, Plan
from .scalars import INF, ExtendedScalar, as_fraction

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = {LE: LE, "<": LE, "le": LE, EQ: EQ, "=": EQ, "eq": EQ, GE: GE, ">": GE, "ge": GE}

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass(frozen=True)
class LinearProgram:
    """``objective . x`` subject to rows ``(coeffs, relation, rhs)`` and bounds.

    ``bounds`` is a per-variable ``(lower, upper)`` pair, either side may be
    None.  When omitted every variable gets ``(0, None)``.
    """

    objective: tuple
    constraints: tuple = ()
    bounds: Optional[tuple] = None

    def __post_init__(self):
        obj = tuple(as_fraction(v) for v in self.objective)
        rows = []
        for coeffs, rel, rhs in self.constraints:
            if len(coeffs) != len(obj):
                raise ValueError("constraint row length differs from objective length")
            if rel not in _RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            rows.append((tuple(as_fraction(v) for v in coeffs), _RELATIONS[rel], as_fraction(rhs)))
        if self.bounds is None:
            bounds = tuple((Fraction(0), None) for _ in obj)
        else:
            if len(self.bounds) != len(obj):
                raise ValueError("bounds length differs from objective length")
            bounds = tuple(
                (None if lo is None else as_fraction(lo), None if hi is None else as_fraction(hi))
                for lo, hi in self.bounds
            )
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "constraints", tuple(rows))
        object.__setattr__(self, "bounds", bounds)

    @property
    def num_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpOutcome:
    status: str
    solution: Optional[tuple] = None
    value: Optional[Fraction] = None
    # one multiplier per original constraint row; sign convention is that of
    # the minimization form: objective - A^T duals is dual feasible
    duals: Optional[tuple] = field(default=None, compare=False)


class _Tableau:
    """Equality-form tableau ``A x = b`` with ``x >= 0`` and ``b >= 0``."""

    def __init__(self, A, b):
        self.m = len(A)
        self.ncols = len(A[0]) if A else 0
        self.rows = [list(r) + [rhs] for r, rhs in zip(A, b)]
        self.basis = [None] * self.m

    def pivot(self, r, c):
        row = self.rows[r]
        piv = row[c]
        if piv != 1:
            row[:] = [v / piv for v in row]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[c]
                if f:
                    other[:] = [v - f * w for v, w in zip(other, row)]
        self.basis[r] = c

    def reduced_costs(self, cost):
        # reduced cost d_j = c_j - sum_i c_B(i) a_ij
        d = list(cost) + [Fraction(0)]
        for i, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb:
                d = [dj - cb * a for dj, a in zip(d, self.rows[i])]
        return d

    def run(self, cost, allowed):
        """Bland's-rule primal simplex minimizing ``cost`` over columns ``allowed``."""
        while True:
            d = self.reduced_costs(cost)
            entering = next((j for j in allowed if d[j] < 0), None)
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering)

    def values(self):
        x = [Fraction(0)] * self.ncols
        for i, bv in enumerate(self.basis):
            x[bv] = self.rows[i][-1]
        return x


def _solve_linear(M, rhs):
    """Solve the square nonsingular system ``M y = rhs`` exactly."""
    n = len(M)
    aug = [list(r) + [v] for r, v in zip(M, rhs)]
    for col in range(n):
        p = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[p] = aug[p], aug[col]
        piv = aug[col][col]
        aug[col] = [v / piv for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col]:
                f = aug[i][col]
                aug[i] = [v - f * w for v, w in zip(aug[i], aug[col])]
    return [aug[i][-1] for i in range(n)]


def solve_lp(p: LinearProgram, sense: str = "min") -> LpOutcome:
    """Exact simplex; returns a basic optimal solution when one exists."""
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    nv = p.num_vars
    flip = -1 if sense == "max" else 1
    obj = [flip * c for c in p.objective]

    # substitute x = lo + x' (lower bound), x = hi - x' (upper only),
    # x = x+ - x- (free) so that every standard variable is >= 0
    cols = []  # (original var, sign)
    shift = [Fraction(0)] * nv
    extra_rows = []  # upper-bound rows as (col index, bound)
    for j, (lo, hi) in enumerate(p.bounds):
        if lo is not None:
            shift[j] = lo
            cols.append((j, 1))
            if hi is not None:
                if hi < lo:
                    return LpOutcome(INFEASIBLE)
                extra_rows.append((len(cols) - 1, hi - lo))
        elif hi is not None:
            shift[j] = hi
            cols.append((j, -1))
        else:
            cols.append((j, 1))
            cols.append((j, -1))

    A, b, row_sign, n_user = [], [], [], len(p.constraints)
    slack_of = []
    for coeffs, rel, rhs in p.constraints:
        row = [coeffs[j] * s for j, s in cols]
        rhs = rhs - sum(coeffs[j] * shift[j] for j in range(nv))
        A.append(row)
        b.append(rhs)
        slack_of.append(rel)
    for col, ub in extra_rows:
        row = [Fraction(0)] * len(cols)
        row[col] = Fraction(1)
        A.append(row)
        b.append(ub)
        slack_of.append(LE)

    n_struct = len(cols)
    n_slack = sum(1 for rel in slack_of if rel != EQ)
    width = n_struct + n_slack
    k = n_struct
    for i, rel in enumerate(slack_of):
        A[i] = A[i] + [Fraction(0)] * n_slack
        if rel == LE:
            A[i][k] = Fraction(1)
            k += 1
        elif rel == GE:
            A[i][k] = Fraction(-1)
            k += 1
    for i in range(len(A)):
        sgn = -1 if b[i] < 0 else 1
        row_sign.append(sgn)
        if sgn < 0:
            A[i] = [-v for v in A[i]]
            b[i] = -b[i]

    cost = [Fraction(0)] * width
    for c_idx, (j, s) in enumerate(cols):
        cost[c_idx] = obj[j] * s
    const = sum(obj[j] * shift[j] for j in range(nv))

    m = len(A)
    if m == 0:
        # no rows: optimal at zero unless some cost is negative
        if any(v < 0 for v in cost):
            return LpOutcome(UNBOUNDED)
        x = _recover(cols, shift, [Fraction(0)] * width, nv)
        return LpOutcome(OPTIMAL, tuple(x), flip * const, ())

    # phase 1: artificials in columns width..width+m-1
    art0 = width
    tab = _Tableau([A[i] + [Fraction(int(i == r)) for r in range(m)] for i in range(m)], b)
    tab.basis = list(range(art0, art0 + m))
    phase1_cost = [Fraction(0)] * width + [Fraction(1)] * m
    tab.run(phase1_cost, range(width + m))
    if sum(tab.rows[i][-1] for i, bv in enumerate(tab.basis) if bv >= art0) != 0:
        return LpOutcome(INFEASIBLE)

    # drive zero-level artificials out; rows where that is impossible are redundant
    keep = []
    for i in range(m):
        if tab.basis[i] >= art0:
            j = next((j for j in range(width) if tab.rows[i][j] != 0), None)
            if j is None:
                continue
            tab.pivot(i, j)
        keep.append(i)
    tab.rows = [tab.rows[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]
    tab.m = len(keep)

    full_cost = cost + [Fraction(0)] * m
    status = tab.run(full_cost, range(width))
    if status == UNBOUNDED:
        return LpOutcome(UNBOUNDED)

    xs = tab.values()[:width]
    x = _recover(cols, shift, xs, nv)
    value = sum((c * v for c, v in zip(p.objective, x)), Fraction(0))

    # duals from B^T y = c_B over the kept (original, sign-normalized) rows
    B = [[A[keep[r]][bv] for r in range(len(keep))] for bv in tab.basis]
    y_kept = _solve_linear(B, [cost[bv] for bv in tab.basis]) if keep else []
    y = [Fraction(0)] * m
    for r, i in enumerate(keep):
        y[i] = y_kept[r] * row_sign[i]
    duals = tuple(flip * v for v in y[:n_user])
    return LpOutcome(OPTIMAL, tuple(x), value, duals)


def _recover(cols, shift, xs, nv):
    x = list(shift)
    for c_idx, (j, s) in enumerate(cols):
        x[j] += s * xs[c_idx]
    return x


def solve_transport(
    c: CostFn,
    marginals: Sequence[AtomicMeasure],
    *,
    return_potentials: bool = False,
):
    """Minimize ``<c, gamma>`` over couplings of ``marginals``.

    Variables live on the finite-cost cells of the product of the marginal
    supports.  Returns ``(plan, value)``; when no coupling exists on finite
    cells the result is ``(None, INF)``.  With ``return_potentials`` a third
    element holds dual potentials, one AtomicMeasure-like dict per coordinate,
    or None when infeasible.
    """
    marginals = list(marginals)
    if len(marginals) != c.n:
        raise ValueError(f"cost has arity {c.n} but {len(marginals)} marginals were given")
    masses = {mu.total_mass() for mu in marginals}
    if len(masses) != 1:
        raise ValueError("marginals must have equal total masses")
    for mu in marginals:
        if any(w < 0 for _, w in mu.items()):
            raise ValueError("marginals must be nonnegative")

    supports = [mu.support() for mu in marginals]
    cells = [t for t in product(*supports) if c.evaluate(t) is not INF]
    rows_index = [(k, x) for k, sup in enumerate(supports) for x in sup]

    def fail():
        return (None, INF, None) if return_potentials else (None, INF)

    if not cells:
        if all(mu.is_zero() for mu in marginals):
            plan = Plan(c.n)
            pots = [dict() for _ in marginals]
            return (plan, Fraction(0), pots) if return_potentials else (plan, Fraction(0))
        return fail()

    objective = [c.evaluate(t) for t in cells]
    constraints = []
    for k, x in rows_index:
        coeffs = [1 if t[k] == x else 0 for t in cells]
        constraints.append((coeffs, EQ, marginals[k][x]))
    out = solve_lp(LinearProgram(objective, constraints), "min")
    if out.status != OPTIMAL:
        return fail()
    plan = Plan(c.n, zip(cells, out.solution))
    if not return_potentials:
        return plan, out.value
    pots = [dict() for _ in marginals]
    for (k, x), u in zip(rows_index, out.duals):
        pots[k][x] = u
    return plan, out.value, pots
