"""Exact scalars: rationals plus a single positive infinity.

Finite values are plain :class:`fractions.Fraction` objects.  ``INF`` is a
singleton that orders above every rational and absorbs finite addition, so
``Fraction(3) + INF is INF`` and ``max(Fraction(7), INF) is INF``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union


class _PositiveInfinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_PositiveInfinity, ())

    def __hash__(self):
        return hash("nflow_ot.INF")

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __lt__(self, other):
        if other is self or isinstance(other, Rational):
            return False
        return NotImplemented

    def __le__(self, other):
        if other is self:
            return True
        if isinstance(other, Rational):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if isinstance(other, Rational):
            return True
        return NotImplemented

    def __ge__(self, other):
        if other is self or isinstance(other, Rational):
            return True
        return NotImplemented

    def __add__(self, other):
        if other is self or isinstance(other, Rational):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other):
        # only positive scalings are meaningful; 0*inf never arises because
        # zero-weight atoms are never stored
        if isinstance(other, Rational):
            if other > 0:
                return self
            raise ArithmeticError(f"inf * {other} is undefined here")
        return NotImplemented

    __rmul__ = __mul__


INF = _PositiveInfinity()

ExtendedScalar = Union[Fraction, _PositiveInfinity]


def is_finite(x) -> bool:
    return x is not INF


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to Fraction (no floats)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    raise TypeError(f"not an exact rational: {x!r}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``.  Decimal points and zero denominators are rejected."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed rational {text!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(p, q)


def parse_extended(text: str) -> ExtendedScalar:
    if text.strip() == "inf":
        return INF
    return parse_rational(text)


def format_rational(x: Fraction) -> str:
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def format_extended(x) -> str:
    if x is INF:
        return "inf"
    return format_rational(x)
