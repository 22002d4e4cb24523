"""Exact arithmetic in the cyclotomic field Q(zeta_M), zeta_M = exp(2 pi i / M).

Elements are polynomials in zeta reduced modulo the M-th cyclotomic
polynomial.  With 4 | M the field contains i, so Gaussian rationals embed.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

import gmpy2
from flint import fmpq, fmpq_poly, fmpz_poly

from .errors import PreconditionError


def _fmpq(v) -> fmpq:
    v = Fraction(v)
    return fmpq(v.numerator, v.denominator)


@lru_cache(maxsize=None)
def cyclotomic_field(M: int) -> "CyclotomicField":
    return CyclotomicField(M)


class CyclotomicField:
    def __init__(self, M: int):
        if M < 1:
            raise PreconditionError("cyclotomic order must be positive")
        self.M = M
        self.modulus = fmpq_poly(fmpz_poly.cyclotomic(M).coeffs())
        self.degree = self.modulus.degree()

    def element(self, poly) -> "CycElem":
        return CycElem(self, fmpq_poly(poly) % self.modulus)

    def __call__(self, value) -> "CycElem":
        """Embed an int, Fraction, complex with rational parts, or (re, im)."""
        if isinstance(value, CycElem):
            if value.field is not self:
                raise PreconditionError("elements of different cyclotomic fields")
            return value
        if isinstance(value, tuple):
            re, im = value
            return self(re) + self(im) * self.i
        if isinstance(value, complex):
            return self((Fraction(value.real), Fraction(value.imag)))
        return CycElem(self, fmpq_poly([_fmpq(value)]))

    def zeta(self, k: int = 1) -> "CycElem":
        k %= self.M
        return self.element(fmpq_poly([0] * k + [1]))

    @property
    def i(self) -> "CycElem":
        if self.M % 4:
            raise PreconditionError(f"i is not in Q(zeta_{self.M})")
        return self.zeta(self.M // 4)

    def zero(self) -> "CycElem":
        return CycElem(self, fmpq_poly([]))

    def one(self) -> "CycElem":
        return CycElem(self, fmpq_poly([1]))

    def __repr__(self):
        return f"Q(zeta_{self.M})"


class CycElem:
    __slots__ = ("field", "poly")

    def __init__(self, field: CyclotomicField, poly: fmpq_poly):
        self.field = field
        self.poly = poly

    def _lift(self, other):
        if isinstance(other, CycElem):
            if other.field.M != self.field.M:
                raise PreconditionError("elements of different cyclotomic fields")
            return other.poly
        if isinstance(other, (int, Fraction)):
            return fmpq_poly([_fmpq(other)])
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return CycElem(self.field, self.poly + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return CycElem(self.field, self.poly - o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return CycElem(self.field, o - self.poly)

    def __neg__(self):
        return CycElem(self.field, -self.poly)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return CycElem(self.field, (self.poly * o) % self.field.modulus)

    __rmul__ = __mul__

    def inverse(self) -> "CycElem":
        if self.poly.is_zero():
            raise ZeroDivisionError("division by zero in cyclotomic field")
        g, s, _ = self.poly.xgcd(self.field.modulus)
        # modulus is irreducible, so g is a nonzero constant
        return CycElem(self.field, (s / g.coeffs()[0]) % self.field.modulus)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * CycElem(self.field, o).inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return CycElem(self.field, o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.field.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.poly == o

    def __hash__(self):
        return hash((self.field.M, str(self.poly)))

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def conjugate(self) -> "CycElem":
        """Complex conjugate: zeta -> zeta^{-1}."""
        out = self.field.zero()
        for k, c in enumerate(self.poly.coeffs()):
            if c != 0:
                out = out + self.field.zeta(-k) * Fraction(int(c.p), int(c.q))
        return out

    def to_mpc(self, precision: int = 256):
        """Numerical value as a gmpy2 mpc."""
        M = self.field.M
        with gmpy2.context(gmpy2.get_context(), precision=precision + 16):
            z = gmpy2.exp(2 * gmpy2.const_pi() * gmpy2.mpc(0, 1) / M)
            acc = gmpy2.mpc(0)
            for c in reversed(self.poly.coeffs()):
                acc = acc * z + gmpy2.mpq(int(c.p), int(c.q))
            return +acc

    def __complex__(self):
        return complex(self.to_mpc(64))

    def rational_parts(self):
        """(re, im) as Fractions when the element is a Gaussian rational, else None."""
        if self.field.M % 4:
            if self.poly.degree() <= 0:
                return (self._const(), Fraction(0))
            return None
        i = self.field.i
        re = (self + self.conjugate()) * Fraction(1, 2)
        im = (self - self.conjugate()) * Fraction(1, 2) / i
        if re.poly.degree() > 0 or im.poly.degree() > 0:
            return None
        return re._const(), im._const()

    def _const(self) -> Fraction:
        cs = self.poly.coeffs()
        if not cs:
            return Fraction(0)
        return Fraction(int(cs[0].p), int(cs[0].q))

    def __repr__(self):
        parts = self.rational_parts()
        if parts is not None:
            return f"{parts[0]}+{parts[1]}i"
        return f"[{self.poly}](zeta_{self.field.M})"


def root_of_unity(p: int, q: int, M: int | None = None) -> CycElem:
    """exp(2 pi i p / q) in Q(zeta_M), M = lcm(q, 4) by default."""
    if q < 1 or gcd(p, q) != 1:
        raise PreconditionError("need q >= 1 and gcd(p, q) = 1")
    if M is None:
        M = q * 4 // gcd(q, 4)
    if M % q:
        raise PreconditionError("q must divide M")
    return cyclotomic_field(M).zeta(p * (M // q))
