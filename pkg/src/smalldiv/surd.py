"""Exact arithmetic in a real quadratic field Q(sqrt(d))."""

from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt

from mpmath import iv

from ._numerics import ivprec
from .errors import PreconditionError


def _is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


class QuadraticSurd:
    """The number r + s*sqrt(d) with rational r, s and square-free-ish d > 1.

    Only d is required to be a positive non-square; two surds combine when
    they share d or when one of them is rational (s == 0).
    """

    __slots__ = ("r", "s", "d")

    def __init__(self, r, s=0, d: int = 5):
        d = int(d)
        if d <= 1 or _is_square(d):
            raise PreconditionError(f"sqrt({d}) is rational")
        self.r = Fraction(r)
        self.s = Fraction(s)
        self.d = d

    @classmethod
    def from_parts(cls, a: int, b: int, d: int, c: int) -> "QuadraticSurd":
        """(a + b*sqrt(d)) / c."""
        if c == 0:
            raise PreconditionError("zero denominator in surd")
        return cls(Fraction(a, c), Fraction(b, c), d)

    # -- coercion ---------------------------------------------------------
    def _unify(self, other):
        """Return (a, b) sharing one radicand, or None for foreign types."""
        if isinstance(other, (int, Fraction)):
            return self, QuadraticSurd(other, 0, self.d)
        if not isinstance(other, QuadraticSurd):
            return None
        if other.d == self.d:
            return self, other
        if other.s == 0:
            return self, QuadraticSurd(other.r, 0, self.d)
        if self.s == 0:
            return QuadraticSurd(self.r, 0, other.d), other
        raise PreconditionError(f"cannot mix sqrt({self.d}) and sqrt({other.d})")

    @property
    def is_rational(self) -> bool:
        return self.s == 0

    def conjugate(self) -> "QuadraticSurd":
        return QuadraticSurd(self.r, -self.s, self.d)

    def norm(self) -> Fraction:
        return self.r * self.r - self.s * self.s * self.d

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        u = self._unify(other)
        if u is None:
            return NotImplemented
        a, b = u
        return QuadraticSurd(a.r + b.r, a.s + b.s, a.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.r, -self.s, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        u = self._unify(other)
        if u is None:
            return NotImplemented
        a, b = u
        return QuadraticSurd(a.r - b.r, a.s - b.s, a.d)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        u = self._unify(other)
        if u is None:
            return NotImplemented
        a, b = u
        return QuadraticSurd(a.r * b.r + a.s * b.s * a.d, a.r * b.s + a.s * b.r, a.d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        u = self._unify(other)
        if u is None:
            return NotImplemented
        a, b = u
        n = b.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero surd")
        return a * QuadraticSurd(b.r / n, -b.s / n, a.d)

    def __rtruediv__(self, other):
        return QuadraticSurd(Fraction(other), 0, self.d) / self

    def __pow__(self, k: int):
        if k < 0:
            return 1 / (self ** (-k))
        out = QuadraticSurd(1, 0, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- order ------------------------------------------------------------
    def _integer_form(self):
        """(A, C, D) with self == (A + C*sqrt(d)) / D and D > 0."""
        D = self.r.denominator * self.s.denominator // gcd(
            self.r.denominator, self.s.denominator
        )
        return int(self.r * D), int(self.s * D), D

    def sign(self) -> int:
        A, C, _ = self._integer_form()
        if C == 0:
            return (A > 0) - (A < 0)
        if A == 0 or (A > 0) == (C > 0):
            return 1 if C > 0 else -1
        # opposite signs: compare A^2 with C^2 d
        if A * A > C * C * self.d:
            return 1 if A > 0 else -1
        return 1 if C > 0 else -1

    def __floor__(self) -> int:
        A, C, D = self._integer_form()
        if C == 0:
            return A // D
        t = isqrt(C * C * self.d)
        f = t if C > 0 else -t - 1
        return (A + f) // D

    def floor(self) -> int:
        return self.__floor__()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> int:
        if self._unify(other) is None:
            raise TypeError(f"cannot compare surd with {type(other).__name__}")
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.s == 0 and self.r == other
        if isinstance(other, QuadraticSurd):
            if self.s == 0 and other.s == 0:
                return self.r == other.r
            return self.d == other.d and self.r == other.r and self.s == other.s
        return NotImplemented

    def __hash__(self):
        if self.s == 0:
            return hash(self.r)
        return hash((self.r, self.s, self.d))

    # -- numerics ---------------------------------------------------------
    def to_iv(self, prec: int = 128):
        """Interval enclosure with relative width about 2**-prec."""
        if self.s == 0:
            with ivprec(prec + 8):
                return iv.mpf(self.r.numerator) / self.r.denominator
        A, C, D = self._integer_form()
        # cancellation loses about log2(|A| / |value|) bits
        work = prec + 16 + max(A.bit_length(), (C * C * self.d).bit_length() // 2)
        for _ in range(8):
            with ivprec(work):
                val = (iv.mpf(A) + iv.mpf(C) * iv.sqrt(iv.mpf(self.d))) / D
                if val.a > 0 or val.b < 0:
                    mag = min(abs(val.a), abs(val.b))
                    if val.delta <= mag * iv.mpf(2) ** (-prec):
                        return val
            work *= 2
        return val

    def __float__(self):
        return float(self.to_iv(64).mid)

    def scaled_floor(self, bits: int) -> int:
        """floor(self * 2**bits), exactly."""
        return (self * (1 << bits)).floor()

    def __repr__(self):
        return f"QuadraticSurd({self.r}, {self.s}, {self.d})"

    def __str__(self):
        if self.s == 0:
            return str(self.r)
        A, C, D = self._integer_form()
        sgn = "+" if C > 0 else "-"
        core = f"{A} {sgn} {abs(C)}*sqrt({self.d})" if A else f"{C}*sqrt({self.d})"
        return f"({core})/{D}" if D != 1 else core
