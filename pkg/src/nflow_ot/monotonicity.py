"""c-cyclical monotonicity of finite configurations.

Two independent deciders:

* :func:`check_monotone_permutations` enumerates the permutation competitors
  of every l-tuple drawn from the support, for l up to ``ell_max``;
* :func:`check_monotone_lp` asks whether a finitely supported plan is
  cost-minimal among all plans with its marginals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial, lcm
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .cost import CostFn, integrate_plan
from .lp import solve_transport
from .measures import Plan, marginals
from .scalars import INF, ExtendedScalar

DEFAULT_BUDGET = 10**7


class BudgetExceededError(RuntimeError):
    """The permutation enumeration would exceed the configured budget."""


@dataclass(frozen=True)
class PermutationWitness:
    """An l-tuple of support points and permutations whose competitor is cheaper.

    Permutations are 0-based tuples; ``permutations[k][j]`` is the index of the
    tuple whose k-th coordinate lands in competitor j.
    """

    tuples: tuple
    permutations: tuple
    lhs: ExtendedScalar
    rhs: ExtendedScalar

    def competitor_tuples(self) -> tuple:
        n = len(self.permutations)
        return tuple(
            tuple(self.tuples[self.permutations[k][j]][k] for k in range(n))
            for j in range(len(self.tuples))
        )


@dataclass(frozen=True)
class CompetitorWitness:
    competitor: Plan
    original_cost: ExtendedScalar
    competitor_cost: ExtendedScalar


@dataclass(frozen=True)
class MonotonicityVerdict:
    monotone: bool
    witness: Optional[object] = None
    # largest l that was fully checked (permutation route only)
    ell_checked: Optional[int] = None

    def __post_init__(self):
        w = self.witness
        if self.monotone:
            return
        if isinstance(w, PermutationWitness):
            assert w.lhs > w.rhs
        elif isinstance(w, CompetitorWitness):
            assert w.competitor_cost < w.original_cost
        else:
            raise ValueError("a non-monotone verdict needs a witness")


def enumeration_count(s: int, n: int, ell_max: int, fix_first: bool = True) -> int:
    """Number of (selection, permutation tuple) pairs visited for l = 1..ell_max."""
    nfree = n - 1 if fix_first else n
    return sum(s**ell * factorial(ell) ** nfree for ell in range(1, ell_max + 1))


def _scaled_tensor(support, c):
    """Integer-scaled cost tensor over the per-coordinate value grids."""
    n = c.n
    grids = [sorted({t[k] for t in support}) for k in range(n)]
    pos = [{v: i for i, v in enumerate(g)} for g in grids]
    shape = [len(g) for g in grids]
    strides = np.ones(n, dtype=np.int64)
    for k in range(n - 2, -1, -1):
        strides[k] = strides[k + 1] * shape[k + 1]
    size = int(np.prod(shape))
    values: list = [None] * size
    for flat in range(size):
        r, cell = flat, []
        for k in range(n):
            cell.append(grids[k][r // int(strides[k])])
            r %= int(strides[k])
        values[flat] = c.evaluate(tuple(cell))
    inf = np.array([v is INF for v in values], dtype=np.bool_)
    finite = [v for v in values if v is not INF]
    denom = lcm(*(v.denominator for v in finite)) if finite else 1
    ints = [0 if v is INF else int(v * denom) for v in values]
    loc = np.array([[pos[k][t[k]] for k in range(n)] for t in support], dtype=np.int64)
    return loc, strides, ints, inf, denom


def check_monotone_permutations(
    support: Sequence[tuple],
    c: CostFn,
    ell_max: int,
    *,
    budget: int = DEFAULT_BUDGET,
    fix_first: bool = True,
    backend: Optional[str] = None,
) -> MonotonicityVerdict:
    """Test sum c(x_j) <= sum c((sigma . x)_j) for all l <= ell_max.

    l-tuples are drawn from ``support`` with repetition.  With ``fix_first``
    the first permutation is pinned to the identity, which loses nothing:
    relabelling j -> sigma_1(j) maps both sides onto themselves.  The first
    violation in lexicographic order is returned as the witness.
    """
    if ell_max < 1:
        raise ValueError("ell_max must be >= 1")
    support = sorted({tuple(t) for t in support})
    if not support:
        return MonotonicityVerdict(True, ell_checked=ell_max)
    n = c.n
    for t in support:
        if len(t) != n:
            raise ValueError(f"support tuple {t} does not match cost arity {n}")
    count = enumeration_count(len(support), n, ell_max, fix_first)
    if count > budget:
        raise BudgetExceededError(
            f"{count} permutation tuples exceed the budget of {budget}"
        )
    loc, strides, ints, inf, denom = _scaled_tensor(support, c)
    biggest = max((abs(v) for v in ints), default=0)
    if biggest * ell_max < _kernels.INT64_SAFE:
        vals = np.array(ints, dtype=np.int64)
    else:
        vals = np.array(ints, dtype=object)
        if backend == "numba":
            backend = "numpy"
    nfree = n - 1 if fix_first else n
    for ell in range(1, ell_max + 1):
        si, pi = _kernels.first_violation(loc, strides, vals, inf, ell, nfree, backend=backend)
        if si < 0:
            continue
        return MonotonicityVerdict(False, _decode_witness(support, c, ell, si, pi, nfree))
    return MonotonicityVerdict(True, ell_checked=ell_max)


def _decode_witness(support, c, ell, si, pi, nfree):
    s, n = len(support), c.n
    sel = []
    r = si
    for _ in range(ell):
        sel.append(r % s)
        r //= s
    sel.reverse()
    perms = list(permutations(range(ell)))
    chosen = []
    r = pi
    for _ in range(nfree):
        chosen.append(perms[r % len(perms)])
        r //= len(perms)
    chosen.reverse()
    ident = tuple(range(ell))
    full = tuple([ident] * (n - nfree) + chosen)
    tuples = tuple(support[i] for i in sel)
    w = PermutationWitness(tuples, full, Fraction(0), Fraction(0))
    lhs = sum((c.evaluate(t) for t in tuples), Fraction(0))
    rhs = sum((c.evaluate(t) for t in w.competitor_tuples()), Fraction(0))
    return PermutationWitness(tuples, full, lhs, rhs)


def check_monotone_lp(alpha: Plan, c: CostFn) -> MonotonicityVerdict:
    """Is ``alpha`` cost-minimal among plans with its own marginals?"""
    original = integrate_plan(c, alpha)
    if original is INF:
        raise ValueError("alpha has infinite cost")
    plan, value = solve_transport(c, marginals(alpha))
    if value >= original:
        return MonotonicityVerdict(True)
    return MonotonicityVerdict(False, CompetitorWitness(plan, original, value))


def uniform_plan(support: Sequence[tuple]) -> Plan:
    support = sorted({tuple(t) for t in support})
    w = Fraction(1, len(support))
    return Plan(len(support[0]), {t: w for t in support})
