"""Precision handling, rational intervals and conversions to mpmath intervals."""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv

DEFAULT_PRECISION = 128


def default_precision() -> int:
    """Bits used for certified logarithms; SMALLDIV_PRECISION overrides."""
    raw = os.environ.get("SMALLDIV_PRECISION")
    if raw:
        bits = int(raw)
        if bits < 53:
            raise ValueError("SMALLDIV_PRECISION must be at least 53")
        return bits
    return DEFAULT_PRECISION


@contextmanager
def ivprec(bits: int):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


@dataclass(frozen=True)
class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def hull(cls, a, b) -> "RationalInterval":
        a, b = Fraction(a), Fraction(b)
        return cls(min(a, b), max(a, b))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def scale(self, c) -> "RationalInterval":
        return RationalInterval.hull(self.lo * c, self.hi * c)

    def shift(self, c) -> "RationalInterval":
        return RationalInterval(self.lo + c, self.hi + c)

    def __mul__(self, other):
        if isinstance(other, RationalInterval):
            ends = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
            return RationalInterval(min(ends), max(ends))
        return self.scale(other)

    __rmul__ = __mul__

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return RationalInterval(-self.hi, -self.lo)
        return RationalInterval(Fraction(0), max(-self.lo, self.hi))

    def __lt__(self, v):
        return self.hi < v

    def __gt__(self, v):
        return self.lo > v

    def __le__(self, v):
        return self.hi <= v

    def __ge__(self, v):
        return self.lo >= v

    def rounded(self, bits: int) -> "RationalInterval":
        """Outward rounding to dyadic endpoints, keeping about ``bits`` bits."""
        mag = max(abs(self.lo), abs(self.hi))
        if mag == 0:
            return self
        e = bits - (mag.numerator.bit_length() - mag.denominator.bit_length())

        def floor_scaled(x):
            # floor(x * 2^e) in integer arithmetic
            if e >= 0:
                return (x.numerator << e) // x.denominator
            return x.numerator // (x.denominator << -e)

        lo, hi = floor_scaled(self.lo), -floor_scaled(-self.hi)
        if e >= 0:
            return RationalInterval(Fraction(lo, 1 << e), Fraction(hi, 1 << e))
        return RationalInterval(Fraction(lo << -e), Fraction(hi << -e))

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def fraction_to_iv(q: Fraction):
    q = Fraction(q)
    return iv.mpf(q.numerator) / q.denominator


def to_iv(value, prec: int | None = None):
    """Enclose an exact number, surd or rational interval at ``prec`` bits."""
    from .surd import QuadraticSurd

    prec = prec or default_precision()
    if isinstance(value, QuadraticSurd):
        return value.to_iv(prec)
    with ivprec(prec + 8):
        if isinstance(value, RationalInterval):
            return iv.mpf([fraction_to_iv(value.lo).a, fraction_to_iv(value.hi).b])
        if isinstance(value, (int, Fraction)):
            return fraction_to_iv(value)
    raise TypeError(f"no interval enclosure for {type(value).__name__}")


def certified_lt(a, b) -> bool | None:
    """a < b for exact values or enclosures; None when undecidable."""
    if isinstance(a, RationalInterval):
        if a.hi < b:
            return True
        if a.lo >= b:
            return False
        return None
    return a < b


def scaled_floor(value, bits: int) -> tuple[int, int]:
    """Integers (L, H) with L <= value * 2**bits <= H."""
    from math import floor, ceil
    from .surd import QuadraticSurd

    if isinstance(value, QuadraticSurd):
        L = value.scaled_floor(bits)
        return L, L + 1
    if isinstance(value, RationalInterval):
        return floor(value.lo * (1 << bits)), ceil(value.hi * (1 << bits))
    v = Fraction(value) * (1 << bits)
    return floor(v), ceil(v)
