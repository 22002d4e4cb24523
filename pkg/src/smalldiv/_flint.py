"""Conversions between gmpy2 numbers and python-flint balls."""

from __future__ import annotations

from contextlib import contextmanager
from fractions import Fraction

import gmpy2
from flint import acb, arb, ctx, fmpq
from gmpy2 import mpc, mpfr


@contextmanager
def flint_prec(bits: int, cap: int | None = None):
    old_prec, old_cap = ctx.prec, ctx.cap
    ctx.prec = bits
    if cap is not None:
        ctx.cap = cap
    try:
        yield
    finally:
        ctx.prec, ctx.cap = old_prec, old_cap


def mpfr_to_arb(x: mpfr) -> arb:
    if gmpy2.is_zero(x):
        return arb(0)
    n, d = x.as_integer_ratio()
    return arb(fmpq(int(n), int(d)))


def to_acb(z) -> acb:
    if isinstance(z, acb):
        return z
    if isinstance(z, mpc):
        return acb(mpfr_to_arb(z.real), mpfr_to_arb(z.imag))
    if isinstance(z, mpfr):
        return acb(mpfr_to_arb(z))
    if isinstance(z, Fraction):
        return acb(arb(fmpq(z.numerator, z.denominator)))
    if hasattr(z, "to_mpc"):
        return to_acb(z.to_mpc(ctx.prec))
    return acb(z)


def arb_to_mpfr(x: arb) -> mpfr:
    m, e = x.mid().man_exp()
    m, e = int(m), int(e)
    if m == 0:
        return mpfr(0)
    return gmpy2.mul_2exp(mpfr(m), e) if hasattr(gmpy2, "mul_2exp") else mpfr(m) * mpfr(2) ** e


def acb_to_mpc(z: acb) -> mpc:
    return mpc(arb_to_mpfr(z.real), arb_to_mpfr(z.imag))


def acb_radius(z: acb) -> float:
    return float(z.rad())
