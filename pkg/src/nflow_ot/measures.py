"""Exact atomic measures on integer points and on n-tuples of integer points."""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Iterable, Iterator, Mapping

from .scalars import as_fraction


def _check_point(p) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or p < 0:
        raise ValueError(f"points are nonnegative integers, got {p!r}")
    return p


class AtomicMeasure:
    """Finite signed measure on nonnegative integers with exact weights."""

    __slots__ = ("_atoms", "_hash")

    def __init__(self, atoms: Mapping[int, object] | Iterable = ()):
        acc: dict[int, Fraction] = defaultdict(Fraction)
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for p, w in items:
            acc[_check_point(p)] += as_fraction(w)
        self._atoms = {p: acc[p] for p in sorted(acc) if acc[p] != 0}
        self._hash = None

    @classmethod
    def dirac(cls, p: int, w=1) -> "AtomicMeasure":
        return cls({p: w})

    @property
    def atoms(self) -> dict[int, Fraction]:
        return dict(self._atoms)

    def __getitem__(self, p: int) -> Fraction:
        return self._atoms.get(p, Fraction(0))

    def __iter__(self) -> Iterator[int]:
        return iter(self._atoms)

    def __len__(self):
        return len(self._atoms)

    def items(self):
        return self._atoms.items()

    def support(self) -> tuple[int, ...]:
        return tuple(self._atoms)

    def total_mass(self) -> Fraction:
        return sum(self._atoms.values(), Fraction(0))

    def abs_mass(self) -> Fraction:
        return sum((abs(w) for w in self._atoms.values()), Fraction(0))

    def is_zero(self) -> bool:
        return not self._atoms

    def restrict(self, points: Iterable[int]) -> "AtomicMeasure":
        keep = set(points)
        return AtomicMeasure({p: w for p, w in self._atoms.items() if p in keep})

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return AtomicMeasure(list(self._atoms.items()) + list(other._atoms.items()))

    def __neg__(self):
        return AtomicMeasure({p: -w for p, w in self._atoms.items()})

    def __sub__(self, other):
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return self + (-other)

    def __rmul__(self, a):
        a = as_fraction(a)
        return AtomicMeasure({p: a * w for p, w in self._atoms.items()})

    def __eq__(self, other):
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return self._atoms == other._atoms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._atoms.items()))
        return self._hash

    def __repr__(self):
        body = " + ".join(f"{w}*d{p}" for p, w in self._atoms.items())
        return f"AtomicMeasure({body or '0'})"


class TupleMeasure:
    """Finite signed map from n-tuples of points to exact weights.

    Shared representation of plans and n-flows.  Zero weights are dropped on
    construction and keys are kept in sorted order, so equality, iteration and
    serialization are canonical.
    """

    __slots__ = ("n", "_atoms", "_hash")

    def __init__(self, n: int, atoms: Mapping[tuple, object] | Iterable = ()):
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ValueError(f"arity must be a positive integer, got {n!r}")
        acc: dict[tuple, Fraction] = defaultdict(Fraction)
        items = atoms.items() if isinstance(atoms, Mapping) else atoms
        for t, w in items:
            t = tuple(t)
            if len(t) != n:
                raise ValueError(f"tuple {t} does not have {n} components")
            for p in t:
                _check_point(p)
            acc[t] += as_fraction(w)
        self.n = n
        self._atoms = {t: acc[t] for t in sorted(acc) if acc[t] != 0}
        self._hash = None

    def _new(self, atoms):
        return type(self)(self.n, atoms)

    @classmethod
    def unit(cls, t: tuple, w=1):
        return cls(len(t), {tuple(t): w})

    @classmethod
    def zero(cls, n: int):
        return cls(n)

    @property
    def atoms(self) -> dict[tuple, Fraction]:
        return dict(self._atoms)

    def __getitem__(self, t) -> Fraction:
        return self._atoms.get(tuple(t), Fraction(0))

    def __iter__(self):
        return iter(self._atoms)

    def __len__(self):
        return len(self._atoms)

    def __contains__(self, t):
        return tuple(t) in self._atoms

    def items(self):
        return self._atoms.items()

    def support(self) -> tuple[tuple, ...]:
        return tuple(self._atoms)

    def total_mass(self) -> Fraction:
        return sum(self._atoms.values(), Fraction(0))

    def abs_mass(self) -> Fraction:
        return sum((abs(w) for w in self._atoms.values()), Fraction(0))

    def is_zero(self) -> bool:
        return not self._atoms

    def is_nonnegative(self) -> bool:
        return all(w > 0 for w in self._atoms.values())

    def is_probability(self) -> bool:
        return self.is_nonnegative() and self.total_mass() == 1

    def _coerce(self, other):
        if not isinstance(other, TupleMeasure):
            return None
        if other.n != self.n:
            raise ValueError(f"arity mismatch: {self.n} vs {other.n}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._new(list(self._atoms.items()) + list(other._atoms.items()))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return self._new({t: -w for t, w in self._atoms.items()})

    def __rmul__(self, a):
        a = as_fraction(a)
        return self._new({t: a * w for t, w in self._atoms.items()})

    def __eq__(self, other):
        if not isinstance(other, TupleMeasure):
            return NotImplemented
        return self.n == other.n and self._atoms == other._atoms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, tuple(self._atoms.items())))
        return self._hash

    def __repr__(self):
        body = " + ".join(f"{w}*{t}" for t, w in self._atoms.items())
        return f"{type(self).__name__}(n={self.n}, {body or '0'})"


class Plan(TupleMeasure):
    """Finite atomic measure on n-tuples (a transport plan when nonnegative)."""

    __slots__ = ()

    def __init__(self, n: int, atoms=()):
        super().__init__(n, atoms)
        if n < 2:
            raise ValueError("a plan needs at least 2 marginals")


def marginal(p: TupleMeasure, k: int) -> AtomicMeasure:
    """Pushforward of ``p`` under the k-th coordinate projection (k is 1-based)."""
    if not 1 <= k <= p.n:
        raise IndexError(f"marginal index {k} out of range 1..{p.n}")
    return AtomicMeasure((t[k - 1], w) for t, w in p.items())


def marginals(p: TupleMeasure) -> list[AtomicMeasure]:
    return [marginal(p, k) for k in range(1, p.n + 1)]


def combine(a, p: Plan, b, q: Plan) -> Plan:
    """Atomwise ``a*p + b*q``."""
    if p.n != q.n:
        raise ValueError(f"arity mismatch: {p.n} vs {q.n}")
    a, b = as_fraction(a), as_fraction(b)
    atoms = [(t, a * w) for t, w in p.items()] + [(t, b * w) for t, w in q.items()]
    return type(p)(p.n, atoms)


def symmetrize(p: TupleMeasure) -> TupleMeasure:
    """Average each atom over all coordinate permutations of its tuple."""
    scale = Fraction(1, factorial(p.n))
    atoms = []
    for t, w in p.items():
        share = w * scale
        atoms.extend((s, share) for s in permutations(t))
    return p._new(atoms)


def is_symmetric(p: TupleMeasure) -> bool:
    return all(p[s] == w for t, w in p.items() for s in permutations(t))
