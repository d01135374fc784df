"""Loop decomposition of closed 2-flows and Smirnov-type splitting of N-flows."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .lp import EQ, LE, OPTIMAL, LinearProgram, solve_lp
from .nflow import NFlow, boundary, is_closed, is_subflow, mass
from .measures import TupleMeasure


class NotClosedError(ValueError):
    pass


@dataclass(frozen=True)
class Loop2:
    """Closed alternating path x0, y0, x1, y1, ..., x_{r-1}, y_{r-1} (back to x0).

    The induced 2-flow is ``coefficient`` times
    sum_i [(x_i, y_i)] - [(x_{i+1}, y_i)] with x_r = x0.
    """

    vertices: tuple
    coefficient: Fraction

    def __post_init__(self):
        v = tuple(self.vertices)
        if len(v) < 4 or len(v) % 2:
            raise ValueError("a 2-flow-loop alternates at least two X1 and two X2 points")
        xs, ys = v[0::2], v[1::2]
        if len(set(xs)) != len(xs) or len(set(ys)) != len(ys):
            raise ValueError("loop points must not repeat")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))

    def edges(self):
        xs, ys = self.vertices[0::2], self.vertices[1::2]
        r = len(xs)
        pos = [(xs[i], ys[i]) for i in range(r)]
        neg = [(xs[(i + 1) % r], ys[i]) for i in range(r)]
        return pos, neg

    def to_flow(self) -> NFlow:
        pos, neg = self.edges()
        m = self.coefficient
        return NFlow(2, [(e, m) for e in pos] + [(e, -m) for e in neg])

    def mass(self) -> Fraction:
        return abs(self.coefficient) * len(self.vertices)


def decompose_closed_2flow(A: TupleMeasure) -> list[Loop2]:
    """Split a closed finite 2-flow into 2-flow-loops without cancellations.

    Each round takes the edge of smallest |coefficient| (lexicographically
    first among ties) and follows Kirchhoff balance: from a positive edge it
    moves along its X2 point to a negative edge, from a negative edge along its
    X1 point to a positive edge.  Among admissible partners it prefers one
    that is closest to getting back to the starting X1 point, so the first
    self-intersection is the return to the start.  The loop is subtracted
    with the minimal weight, which zeroes the starting edge; at most
    |support| rounds are needed.
    """
    if A.n != 2:
        raise ValueError(f"2-flow expected, got arity {A.n}")
    if not is_closed(A):
        raise NotClosedError("input flow is not closed")
    rest = dict(A.items())
    loops = []
    while rest:
        e0 = min(rest, key=lambda e: (abs(rest[e]), e))
        sign = 1 if rest[e0] > 0 else -1
        m = abs(rest[e0])
        path = _alternating_path(rest, e0, sign)
        loop = Loop2(path, sign * m)
        pos, neg = loop.edges()
        for e in pos:
            rest[e] -= sign * m
        for e in neg:
            rest[e] += sign * m
        rest = {e: w for e, w in rest.items() if w != 0}
        loops.append(loop)
    return loops


def _alternating_path(rest, e0, sign):
    # arcs: "positive" edges (same sign as e0) run X1 -> X2, others X2 -> X1
    out = {}
    for (x, y), w in rest.items():
        if w * sign > 0:
            out.setdefault(("x", x), []).append(("y", y))
        else:
            out.setdefault(("y", y), []).append(("x", x))
    for v in out:
        out[v].sort()
    start, first = ("x", e0[0]), ("y", e0[1])
    # distance to the start along arcs, by BFS on reversed arcs
    rev = {}
    for u, vs in out.items():
        for v in vs:
            rev.setdefault(v, []).append(u)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for u in rev.get(v, ()):
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    if first not in dist:
        raise AssertionError("Kirchhoff balance violated: no way back to the start")
    walk = [start, first]
    cur = first
    while True:
        nxt = min(
            (v for v in out.get(cur, ()) if v in dist and dist[v] < dist[cur]),
            key=lambda v: (dist[v], v),
        )
        if nxt == start:
            break
        walk.append(nxt)
        cur = nxt
    return tuple(p for _, p in walk)


def max_cycle_subflow(A: TupleMeasure) -> NFlow:
    """Closed subflow of A of largest mass, from one exact LP.

    With y_e = sign(A(e)) C(e) the program is: maximize sum y_e subject to
    0 <= y_e <= |A(e)| and boundary(C) = 0.
    """
    edges = list(A.support())
    if not edges:
        return NFlow(A.n)
    signs = [1 if A[e] > 0 else -1 for e in edges]
    rows = sorted({(k, e[k]) for e in edges for k in range(A.n)})
    constraints = []
    for k, x in rows:
        coeffs = [s if e[k] == x else 0 for e, s in zip(edges, signs)]
        constraints.append((coeffs, EQ, 0))
    bounds = [(Fraction(0), abs(A[e])) for e in edges]
    out = solve_lp(LinearProgram([1] * len(edges), constraints, bounds), "max")
    if out.status != OPTIMAL:
        raise AssertionError(f"cycle LP ended {out.status}; C = 0 is always feasible")
    C = NFlow(A.n, [(e, s * y) for e, s, y in zip(edges, signs, out.solution)])
    assert is_closed(C) and is_subflow(C, A)
    return C


@dataclass(frozen=True)
class SmirnovParts:
    acyclic: NFlow
    solenoidal: NFlow
    cyclic: NFlow

    def total(self) -> NFlow:
        return self.acyclic + self.solenoidal + self.cyclic


def smirnov_decompose(A: TupleMeasure, *, certify: bool = True) -> SmirnovParts:
    """acyclic + solenoidal + cyclic = A without cancellations.

    For finite support the solenoidal part is always zero: a nonzero closed
    flow with finite support is its own finite cyclic subflow.
    """
    A = NFlow(A.n, A.items())
    cyclic = max_cycle_subflow(A)
    acyclic = A - cyclic
    parts = SmirnovParts(acyclic, NFlow(A.n), cyclic)
    if certify:
        if not max_cycle_subflow(acyclic).is_zero():
            raise AssertionError("residual still carries a closed subflow")
        if mass(acyclic) + mass(cyclic) != mass(A):
            raise AssertionError("decomposition has cancellations")
    return parts


def is_acyclic(A: TupleMeasure) -> bool:
    return max_cycle_subflow(A).is_zero()


def loop_split(C: TupleMeasure) -> list:
    """Elementary pieces of a closed flow: loops for n = 2, the flow itself otherwise."""
    if C.n == 2:
        return decompose_closed_2flow(C)
    return [C] if not C.is_zero() else []


__all__ = [
    "Loop2",
    "NotClosedError",
    "SmirnovParts",
    "boundary",
    "decompose_closed_2flow",
    "is_acyclic",
    "loop_split",
    "max_cycle_subflow",
    "smirnov_decompose",
]
