"""N-graphs and finitely supported N-flows.

An N-flow is a signed weighting of N-edges (n-tuples of points).  Its
boundary pushes the weights to each coordinate; a flow with zero boundary is
closed.  Coordinate position is carried by tuple position, so the vertex
(x, k) of the N-graph is "point x seen from coordinate k".
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .cost import CostFn
from .measures import AtomicMeasure, TupleMeasure, marginal
from .scalars import INF, ExtendedScalar


class NFlow(TupleMeasure):
    """Finitely supported signed weighting of n-edges."""

    __slots__ = ()

    @classmethod
    def from_plan(cls, p: TupleMeasure) -> "NFlow":
        return cls(p.n, p.items())

    @property
    def coeffs(self) -> dict:
        return self.atoms


@dataclass(frozen=True)
class NGraph:
    n: int
    edges: tuple
    cost: Optional[CostFn] = None

    def __post_init__(self):
        edges = tuple(sorted({tuple(e) for e in self.edges}))
        for e in edges:
            if len(e) != self.n:
                raise ValueError(f"edge {e} does not have {self.n} components")
            if self.cost is not None and self.cost.evaluate(e) is INF:
                raise ValueError(f"edge {e} has infinite cost")
        object.__setattr__(self, "edges", edges)

    def weight(self, e) -> ExtendedScalar:
        if self.cost is None:
            raise ValueError("graph carries no cost")
        return self.cost.evaluate(e)

    def restrict(self, edges) -> "NGraph":
        keep = {tuple(e) for e in edges}
        return NGraph(self.n, tuple(e for e in self.edges if e in keep), self.cost)


@dataclass(frozen=True)
class BoundaryVector:
    components: tuple

    def is_zero(self) -> bool:
        return all(mu.is_zero() for mu in self.components)

    def abs_mass(self) -> Fraction:
        return sum((mu.abs_mass() for mu in self.components), Fraction(0))

    def __add__(self, other):
        return BoundaryVector(tuple(a + b for a, b in zip(self.components, other.components)))

    def __rmul__(self, a):
        return BoundaryVector(tuple(a * mu for mu in self.components))


def associated_ngraph(c: CostFn, vertex_bound: int) -> NGraph:
    """Edges: all tuples with entries in 1..vertex_bound on which ``c`` is finite."""
    if vertex_bound < 1:
        raise ValueError("vertex_bound must be >= 1")
    return NGraph(c.n, tuple(c.finite_cells(vertex_bound)), c)


def boundary(A: TupleMeasure) -> BoundaryVector:
    return BoundaryVector(tuple(marginal(A, k) for k in range(1, A.n + 1)))


def mass(A: TupleMeasure) -> Fraction:
    return A.abs_mass()


def is_closed(A: TupleMeasure) -> bool:
    return boundary(A).is_zero()


def integrate_flow(c: CostFn, A: TupleMeasure) -> ExtendedScalar:
    """Sum of m(a) c(a); INF as soon as c is infinite anywhere on the support."""
    if c.n != A.n:
        raise ValueError(f"arity mismatch: cost {c.n}, flow {A.n}")
    total = Fraction(0)
    for e, w in A.items():
        v = c.evaluate(e)
        if v is INF:
            return INF
        total += w * v
    return total


def is_subflow(A: TupleMeasure, B: TupleMeasure) -> bool:
    """True iff A(e) lies between 0 and B(e) for every edge (so |A| + |B - A| = |B|)."""
    if A.n != B.n:
        raise ValueError(f"arity mismatch: {A.n} vs {B.n}")
    for e, a in A.items():
        b = B[e]
        if b > 0:
            if not 0 <= a <= b:
                return False
        elif b < 0:
            if not b <= a <= 0:
                return False
        else:
            return False
    return True


def incidence_matrix(edges: Sequence[tuple], n: int):
    """Rows indexed by (coordinate, point), columns by edges; entries 0/1."""
    rows = sorted({(k, e[k]) for e in edges for k in range(n)})
    index = {r: i for i, r in enumerate(rows)}
    M = [[0] * len(edges) for _ in rows]
    for j, e in enumerate(edges):
        for k in range(n):
            M[index[(k, e[k])]][j] = 1
    return rows, M


def _row_reduce(M, ncols):
    """Fraction-free Gauss-Jordan elimination over the integers.

    Returns (reduced rows, pivot columns).  Rows are kept primitive (gcd 1)
    after every update, which bounds entry growth.
    """
    rows = [list(r) for r in M if any(r)]
    pivots = []
    r = 0
    for col in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        a = prow[col]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                b = rows[i][col]
                new = [a * x - b * y for x, y in zip(rows[i], prow)]
                g = 0
                for v in new:
                    g = gcd(g, v)
                rows[i] = [v // g for v in new] if g > 1 else new
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def incidence_rank(edges: Sequence[tuple], n: int) -> int:
    edges = list(edges)
    if not edges:
        return 0
    _, M = incidence_matrix(edges, n)
    _, pivots = _row_reduce(M, len(edges))
    return len(pivots)


def kernel_basis(edges: Sequence[tuple], n: int) -> list[NFlow]:
    """Basis of the closed flows supported on ``edges`` (one per free column)."""
    edges = sorted({tuple(e) for e in edges})
    if not edges:
        return []
    _, M = incidence_matrix(edges, n)
    rows, pivots = _row_reduce(M, len(edges))
    pivot_set = set(pivots)
    basis = []
    for free in range(len(edges)):
        if free in pivot_set:
            continue
        coeffs = {edges[free]: Fraction(1)}
        for row, pc in zip(rows, pivots):
            if row[free]:
                coeffs[edges[pc]] = Fraction(-row[free], row[pc])
        basis.append(_normalized(NFlow(n, coeffs)))
    return basis


def _normalized(A: NFlow) -> NFlow:
    first = next(iter(A.items()))[1]
    return Fraction(1) / first * A


def find_finite_closed_flow(G: NGraph | Sequence[tuple], n: Optional[int] = None) -> Optional[NFlow]:
    """A nonzero closed flow supported on the graph's edges, or None.

    The witness is the kernel vector of the first free column of the
    incidence matrix, scaled so that its first nonzero coefficient (in sorted
    edge order) is 1.
    """
    if isinstance(G, NGraph):
        edges, n = G.edges, G.n
    else:
        edges = tuple(sorted({tuple(e) for e in G}))
        if n is None:
            if not edges:
                return None
            n = len(edges[0])
    basis = kernel_basis(edges, n)
    return basis[0] if basis else None
