"""Exact extended-rational intervals.

Endpoints are :class:`fractions.Fraction` values or one of the two signed
infinities :data:`POS_INF` / :data:`NEG_INF`.  No floating point is involved.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class Infinity:
    """A signed infinity that orders correctly against ints and Fractions."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = 1 if sign > 0 else -1

    def __neg__(self) -> "Infinity":
        return NEG_INF if self.sign > 0 else POS_INF

    def __eq__(self, other) -> bool:
        return isinstance(other, Infinity) and other.sign == self.sign

    def __hash__(self) -> int:
        return hash(("inf", self.sign))

    def __lt__(self, other) -> bool:
        if isinstance(other, Infinity):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other) -> bool:
        return self == other or self < other

    def __gt__(self, other) -> bool:
        if isinstance(other, Infinity):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other) -> bool:
        return self == other or self > other

    def __repr__(self) -> str:
        return "+inf" if self.sign > 0 else "-inf"


POS_INF = Infinity(1)
NEG_INF = Infinity(-1)

ExtRational = Union[Fraction, Infinity]


def is_finite(v) -> bool:
    return not isinstance(v, Infinity)


def ext_ratio(num: int, den: int) -> ExtRational:
    """num/den as an extended rational; n/0 is a signed infinity (n != 0)."""
    if den == 0:
        if num == 0:
            raise ZeroDivisionError("0/0 has no extended-rational value")
        return POS_INF if num > 0 else NEG_INF
    return Fraction(num, den)


@dataclass(frozen=True)
class RatInterval:
    """Closed (by default) interval ``[lo, hi]`` of extended rationals.

    ``lo_open``/``hi_open`` mark endpoints that are limits rather than
    attained values.
    """

    lo: ExtRational
    hi: ExtRational
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> "RatInterval":
        if is_finite(v):
            v = Fraction(v)
        return cls(v, v)

    @classmethod
    def everything(cls) -> "RatInterval":
        return cls(NEG_INF, POS_INF, True, True)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> ExtRational:
        if is_finite(self.lo) and is_finite(self.hi):
            return self.hi - self.lo
        return POS_INF

    @property
    def midpoint(self) -> ExtRational:
        if self.is_point:
            return self.lo
        if is_finite(self.lo) and is_finite(self.hi):
            return (self.lo + self.hi) / 2
        raise ValueError("unbounded interval has no midpoint")

    def contains(self, v) -> bool:
        if v < self.lo or v > self.hi:
            return False
        if v == self.lo and self.lo_open and not self.is_point:
            return False
        if v == self.hi and self.hi_open and not self.is_point:
            return False
        return True

    def issubset(self, other: "RatInterval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "RatInterval") -> "RatInterval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if hi < lo:
            raise ValueError("disjoint intervals")
        return RatInterval(lo, hi)

    def __repr__(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        return f"{left}{self.lo}, {self.hi}{right}"
