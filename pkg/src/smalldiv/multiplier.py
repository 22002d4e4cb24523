"""Multipliers lambda of germs fixing 0.

Three kinds:

* ``circle``: lambda = exp(2 pi i alpha) with alpha kept symbolically as a
  continued-fraction table; powers and divisors are evaluated from a
  fixed-point enclosure of n*alpha mod 1, never by subtracting rounded
  complex numbers;
* ``root``: an exact root of unity in a cyclotomic field;
* ``complex``: any other complex number, exact (rational or Gaussian
  rational) when given that way, otherwise numeric.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import gmpy2
from gmpy2 import mpc, mpfr

from .contfrac import ContinuedFractionTable, as_real_input, expand_cf
from .cyclotomic import CycElem, cyclotomic_field, root_of_unity
from .errors import PrecisionExhausted, PreconditionError, ResonantDivisor
from .reals import RationalReal

DEFAULT_SERIES_PRECISION = 256


def _ctx(prec):
    return gmpy2.context(gmpy2.get_context(), precision=prec)


class Multiplier:
    kind = "?"
    spec = "?"

    def exact(self):
        """Exact value (Fraction or cyclotomic element) or None."""
        return None

    def numeric(self, prec: int = DEFAULT_SERIES_PRECISION) -> mpc:
        raise NotImplementedError

    def power(self, n: int, prec: int = DEFAULT_SERIES_PRECISION) -> mpc:
        with _ctx(prec):
            return self.numeric(prec) ** n

    def divisor(self, n: int, prec: int = DEFAULT_SERIES_PRECISION) -> mpc:
        """lambda^n - lambda, numerically; ResonantDivisor if it vanishes."""
        ex = self.exact()
        if ex is not None:
            d = ex**n - ex
            if d == 0:
                raise ResonantDivisor(n)
            if isinstance(d, CycElem):
                return d.to_mpc(prec)
            with _ctx(prec):
                return mpc(gmpy2.mpq(d.numerator, d.denominator))
        with _ctx(prec + 32):
            lam = self.numeric(prec + 32)
            d = lam**n - lam
        if d == 0:
            raise ResonantDivisor(n)
        return d

    def exact_divisor(self, n: int):
        ex = self.exact()
        if ex is None:
            return None
        d = ex**n - ex
        if d == 0:
            raise ResonantDivisor(n)
        return d

    def modulus(self, prec: int = DEFAULT_SERIES_PRECISION) -> mpfr:
        with _ctx(prec):
            return abs(self.numeric(prec))

    def __repr__(self):
        return f"{type(self).__name__}({self.spec})"


class CircleMultiplier(Multiplier):
    """lambda = exp(2 pi i alpha), alpha irrational."""

    kind = "circle"

    def __init__(self, alpha):
        if isinstance(alpha, ContinuedFractionTable):
            table = alpha
        else:
            src = as_real_input(alpha)
            if isinstance(src, RationalReal):
                raise PreconditionError("rational rotation number: use RootMultiplier")
            table = expand_cf(src, 8)
        self.table = table
        self.spec = f"circle:{table.spec}"
        self._fixed = {}

    @property
    def alpha_table(self) -> ContinuedFractionTable:
        return self.table

    def _fixed_point(self, bits):
        if bits not in self._fixed:
            self._fixed[bits] = self.table.fixed_point(bits)
        return self._fixed[bits]

    def offset(self, m: int, prec: int = DEFAULT_SERIES_PRECISION) -> mpfr:
        """d with m*alpha = k + d, |d| <= 1/2, to about ``prec`` relative bits."""
        if m == 0:
            return mpfr(0)
        P = prec + 2 * abs(m).bit_length() + 48
        for _ in range(6):
            L, H = self._fixed_point(P)
            one = 1 << P
            r = (m * L) % one
            if r > one // 2:
                r -= one
            err = abs(m) * (H - L) + 1
            if abs(r) > err << (prec + 8):
                with _ctx(P + 8):
                    return mpfr(r) / mpfr(one)
            P *= 2
        raise PrecisionExhausted(f"cannot resolve {m}*alpha mod 1 to {prec} bits")

    def numeric(self, prec=DEFAULT_SERIES_PRECISION):
        return self.power(1, prec)

    def power(self, n, prec=DEFAULT_SERIES_PRECISION):
        d = self.offset(n, prec)
        with _ctx(prec + 16):
            return gmpy2.exp(2 * gmpy2.const_pi() * mpc(0, 1) * d)

    def circle_divisor(self, m: int, prec=DEFAULT_SERIES_PRECISION) -> mpc:
        """lambda^m - 1 = 2i e^{i pi d} sin(pi d), d the offset of m*alpha."""
        if m == 0:
            raise ResonantDivisor(0)
        d = self.offset(m, prec)
        with _ctx(prec + 16):
            pi = gmpy2.const_pi()
            return 2 * mpc(0, 1) * gmpy2.exp(mpc(0, 1) * pi * d) * gmpy2.sin(pi * d)

    def divisor(self, n, prec=DEFAULT_SERIES_PRECISION):
        # lambda^n - lambda = lambda (lambda^{n-1} - 1)
        if n == 1:
            raise ResonantDivisor(1)
        with _ctx(prec + 16):
            return self.power(1, prec) * self.circle_divisor(n - 1, prec)


class RootMultiplier(Multiplier):
    """lambda = exp(2 pi i p / q), exact."""

    kind = "root"

    def __init__(self, p: int, q: int):
        if q < 1 or gcd(p, q) != 1:
            raise PreconditionError("root of unity needs q >= 1 and gcd(p, q) = 1")
        self.p, self.q = p % q, q
        self.value = root_of_unity(p, q)
        self.field = self.value.field
        self.spec = f"root:{self.p}/{q}"

    def exact(self):
        return self.value

    def numeric(self, prec=DEFAULT_SERIES_PRECISION):
        return self.value.to_mpc(prec)


class ComplexMultiplier(Multiplier):
    kind = "complex"

    def __init__(self, value):
        self._exact = None
        if isinstance(value, (int, Fraction)):
            self._exact = Fraction(value)
            self.spec = f"complex:{self._exact}"
        elif isinstance(value, tuple):
            re, im = Fraction(value[0]), Fraction(value[1])
            if im == 0:
                self._exact = re
            else:
                self._exact = cyclotomic_field(4)((re, im))
            self.spec = f"complex:{re}{'+' if im >= 0 else '-'}{abs(im)}i"
        elif isinstance(value, CycElem):
            self._exact = value
            self.spec = f"complex:{value!r}"
        else:
            self._numeric = mpc(value)
            self.spec = f"complex:{value}"
        if self._exact is not None and self._exact == 0:
            raise PreconditionError("multiplier must be nonzero")

    def exact(self):
        return self._exact

    def numeric(self, prec=DEFAULT_SERIES_PRECISION):
        ex = self._exact
        if ex is None:
            with _ctx(prec):
                return +self._numeric
        if isinstance(ex, Fraction):
            with _ctx(prec):
                return mpc(gmpy2.mpq(ex.numerator, ex.denominator))
        return ex.to_mpc(prec)


def parse_multiplier(spec) -> Multiplier:
    """``circle:<real spec>``, ``root:p/q``, ``complex:re,im`` or a number."""
    if isinstance(spec, Multiplier):
        return spec
    if isinstance(spec, (int, Fraction, tuple, CycElem)):
        return ComplexMultiplier(spec)
    if isinstance(spec, (complex, mpc)):
        return ComplexMultiplier(spec)
    s = str(spec).strip()
    kind, sep, body = s.partition(":")
    if not sep:
        kind, body = "complex", s
    kind = kind.lower()
    from .errors import MalformedSpec

    try:
        if kind == "circle":
            src = as_real_input(body)
            if isinstance(src, RationalReal):
                v = src.value
                return RootMultiplier(v.numerator, v.denominator)
            return CircleMultiplier(src)
        if kind == "root":
            p, _, q = body.partition("/")
            return RootMultiplier(int(p), int(q))
        if kind == "complex":
            if "," in body:
                re, im = body.split(",")
                return ComplexMultiplier((Fraction(re.strip()), Fraction(im.strip())))
            return ComplexMultiplier(Fraction(body))
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedSpec(f"malformed multiplier {spec!r}: {exc}") from exc
    raise MalformedSpec(f"unknown multiplier spec {spec!r}")
