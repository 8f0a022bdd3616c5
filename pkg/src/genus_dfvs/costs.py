"""Vertex costs: nonnegative rationals plus an absorbing infinite sentinel."""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from numbers import Rational
from typing import Iterable, Union


@total_ordering
class _Infinity:
    """Cost that can never be paid.

    Compares greater than every finite number and absorbs addition. Kept
    separate from ``float('inf')`` so infinite vertices never leak into the
    rational arithmetic of the LP.
    """

    _instance: "_Infinity | None" = None

    def __new__(cls) -> "_Infinity":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("genus_dfvs.INF")

    def __lt__(self, other: object) -> bool:
        if other is self:
            return False
        if isinstance(other, (int, Rational, float)):
            return False
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if other is self:
            return False
        if isinstance(other, (int, Rational, float)):
            return True
        return NotImplemented

    def __add__(self, other: object) -> "_Infinity":
        if other is self or isinstance(other, (int, Rational, float)):
            return self
        return NotImplemented

    __radd__ = __add__

    def __mul__(self, other: object) -> "_Infinity":
        if isinstance(other, (int, Rational)) and other > 0:
            return self
        return NotImplemented

    __rmul__ = __mul__

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Cost = Union[int, Fraction, _Infinity]


def is_finite(c: Cost) -> bool:
    return c is not INF


def parse_cost(text: str) -> Cost:
    """Parse ``inf``, an integer, ``p/q`` or a decimal into a cost."""
    t = text.strip().lower()
    if t in ("inf", "infinity", "+inf"):
        return INF
    value = Fraction(t)
    if value < 0:
        raise ValueError(f"negative cost {text!r}")
    return int(value) if value.denominator == 1 else value


def format_cost(c: Cost) -> str:
    if c is INF:
        return "inf"
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def total(costs: Iterable[Cost]) -> Cost:
    acc: Cost = Fraction(0)
    for c in costs:
        acc = acc + c
    if acc is not INF and acc.denominator == 1:
        return int(acc)
    return acc
