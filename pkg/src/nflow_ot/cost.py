"""Extended-valued costs on n-tuples and their pairing with plans."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping

from .measures import TupleMeasure
from .scalars import (
    INF,
    ExtendedScalar,
    as_fraction,
    format_extended,
    format_rational,
    parse_extended,
)


class UndefinedIntegralError(ValueError):
    """Raised when a signed plan meets an infinite cost on its support."""


@dataclass(frozen=True)
class FSpec:
    """Auxiliary function f: N -> (0, 1] given as a finite prefix and a constant tail.

    ``prefix[a-1]`` is f(a) for a <= len(prefix); every later argument maps to
    ``tail``.
    """

    prefix: tuple = ()
    tail: Fraction = Fraction(1, 4)

    def __post_init__(self):
        prefix = tuple(as_fraction(v) for v in self.prefix)
        tail = as_fraction(self.tail)
        for v in prefix + (tail,):
            if not 0 < v <= 1:
                raise ValueError(f"f must take values in (0, 1], got {v}")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", tail)

    @classmethod
    def default(cls) -> "FSpec":
        return cls((Fraction(1),), Fraction(1, 4))

    @classmethod
    def constant(cls, value=1) -> "FSpec":
        return cls((), value)

    def __call__(self, a: int) -> Fraction:
        if a < 1:
            raise ValueError(f"f is defined on positive integers, got {a}")
        if a <= len(self.prefix):
            return self.prefix[a - 1]
        return self.tail

    def is_decreasing(self) -> bool:
        vals = self.prefix + (self.tail,)
        return all(x >= y for x, y in zip(vals, vals[1:]))

    def quarter_series(self, offset: int) -> Fraction:
        """Exact value of sum_{k>=1} 4^-k f(2k + offset) for offset in {-1, 0}.

        Terms are summed explicitly while 2k + offset still reads the prefix;
        the remaining tail is the geometric sum tail * 4^-K * 4/3.
        """
        total = Fraction(0)
        k = 1
        while 2 * k + offset <= len(self.prefix):
            total += Fraction(1, 4**k) * self(2 * k + offset)
            k += 1
        return total + self.tail * Fraction(4, 3) / 4**k


class CostFn:
    """Total function from n-tuples of points to ExtendedScalar."""

    n: int

    def evaluate(self, x) -> ExtendedScalar:
        x = tuple(x)
        if len(x) != self.n:
            raise ValueError(f"cost has arity {self.n}, got tuple {x}")
        return self._value(x)

    __call__ = evaluate

    def _value(self, x: tuple) -> ExtendedScalar:
        raise NotImplementedError

    def finite_cells(self, vertex_bound: int) -> list[tuple]:
        """All tuples with entries in 1..vertex_bound where the cost is finite."""
        pts = range(1, vertex_bound + 1)
        return [t for t in product(pts, repeat=self.n) if self._value(t) is not INF]

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class TableCost(CostFn):
    n: int
    entries: Mapping = field(default_factory=dict)
    default: object = INF

    def __post_init__(self):
        table = {}
        for t, v in dict(self.entries).items():
            t = tuple(t)
            if len(t) != self.n:
                raise ValueError(f"table key {t} does not have {self.n} components")
            table[t] = v if v is INF else as_fraction(v)
        object.__setattr__(self, "entries", dict(sorted(table.items())))
        if self.default is not INF:
            object.__setattr__(self, "default", as_fraction(self.default))

    def __hash__(self):
        return hash((self.n, tuple(self.entries.items()), self.default))

    def _value(self, x):
        return self.entries.get(x, self.default)

    def finite_cells(self, vertex_bound):
        if self.default is not INF:
            return super().finite_cells(vertex_bound)
        return [
            t for t, v in self.entries.items()
            if v is not INF and all(1 <= p <= vertex_bound for p in t)
        ]

    def to_dict(self):
        return {
            "kind": "table",
            "n": self.n,
            "entries": [{"t": list(t), "v": format_extended(v)} for t, v in self.entries.items()],
            "default": format_extended(self.default),
        }


@dataclass(frozen=True)
class CounterexampleCost(CostFn):
    """Symmetric 3-cost: 1 at (1,1,1), f(a) on permutations of (a,a,a+1), inf elsewhere."""

    f: FSpec = field(default_factory=FSpec.default)
    n: int = field(default=3, init=False)

    def _value(self, x):
        if any(p < 1 for p in x):
            return INF
        a, b, c = sorted(x)
        if a == b == c == 1:
            return Fraction(1)
        if a == b and c == a + 1:
            return self.f(a)
        return INF

    def finite_cells(self, vertex_bound):
        cells = [(1, 1, 1)] if vertex_bound >= 1 else []
        for a in range(1, vertex_bound):
            cells += [(a, a, a + 1), (a, a + 1, a), (a + 1, a, a)]
        return sorted(cells)

    def to_dict(self):
        return {
            "kind": "counterexample",
            "prefix": [format_rational(v) for v in self.f.prefix],
            "tail": format_rational(self.f.tail),
        }


def counterexample_cost(f: FSpec | None = None) -> CounterexampleCost:
    return CounterexampleCost(f if f is not None else FSpec.default())


def evaluate(c: CostFn, x) -> ExtendedScalar:
    return c.evaluate(x)


def cost_from_dict(d: dict) -> CostFn:
    kind = d.get("kind")
    if kind == "counterexample":
        return CounterexampleCost(FSpec(tuple(d.get("prefix", ())), d["tail"]))
    if kind == "table":
        entries = {}
        for e in d.get("entries", []):
            entries[tuple(e["t"])] = parse_extended(e["v"])
        default = parse_extended(d.get("default", "inf"))
        n = d.get("n")
        if n is None:
            if not entries:
                raise ValueError("table cost without entries needs an explicit 'n'")
            n = len(next(iter(entries)))
        return TableCost(int(n), entries, default)
    raise ValueError(f"unknown cost kind {kind!r}")


def integrate_plan(c: CostFn, p: TupleMeasure) -> ExtendedScalar:
    """Exact sum of weight * cost over the atoms of ``p``.

    Returns INF when a positive atom sits on an infinite cell.  A negative atom
    on an infinite cell has no meaningful value and raises.
    """
    if p.n != c.n:
        raise ValueError(f"arity mismatch: cost {c.n}, plan {p.n}")
    total = Fraction(0)
    hit_inf = False
    for t, w in p.items():
        v = c.evaluate(t)
        if v is INF:
            if w < 0:
                raise UndefinedIntegralError(f"negative weight {w} on infinite cell {t}")
            hit_inf = True
        else:
            total += w * v
    return INF if hit_inf else total
