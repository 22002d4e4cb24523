"""Germs f(z) = lambda z + sum f_n z^n and their formal linearization.

The linearization h (h_1 = 1) solves f(h(z)) = h(lambda z).  Comparing
coefficients of z^n gives

    h_n (lambda^n - lambda) = sum_{j=2}^{n} f_j [h^j]_n,

where [h^j]_n only involves h_1..h_{n-1}.  Two engines evaluate it:

``recurrence``
    order by order with an incremental table of the powers [h^j]_n.  Works
    for exact coefficients and accepts a per-order hook that may choose f_n
    (used by the Cremer construction).  Cost O(d N^2) for degree d.
``newton``
    Newton doubling on python-flint ball series; each step solves the
    linearized equation delta(lambda z) - f'(h) delta = f(h) - h(lambda z).
    Numeric only, much faster for dense germs.

Every result passes a mandatory residual check of f o h - h o R_lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import gmpy2
import numpy as np
from flint import acb, acb_series
from gmpy2 import mpc, mpfr

from . import series as ser
from ._flint import acb_to_mpc, flint_prec, to_acb
from .cyclotomic import CycElem, cyclotomic_field
from .errors import InvariantViolation, PreconditionError, ResonantDivisor
from .multiplier import (
    DEFAULT_SERIES_PRECISION,
    CircleMultiplier,
    Multiplier,
    RootMultiplier,
    parse_multiplier,
)


def _ctx(prec):
    return gmpy2.context(gmpy2.get_context(), precision=prec)


def _to_mpc(v, prec):
    with _ctx(prec):
        if isinstance(v, mpc):
            return +v
        if isinstance(v, CycElem):
            return v.to_mpc(prec)
        if isinstance(v, (int, Fraction)):
            v = Fraction(v)
            return mpc(gmpy2.mpq(v.numerator, v.denominator))
        if isinstance(v, tuple):
            re, im = Fraction(v[0]), Fraction(v[1])
            return mpc(gmpy2.mpq(re.numerator, re.denominator), gmpy2.mpq(im.numerator, im.denominator))
        return mpc(v)


def _is_exact_value(v) -> bool:
    return isinstance(v, (int, Fraction, CycElem)) or (
        isinstance(v, tuple) and all(isinstance(c, (int, Fraction)) for c in v)
    )


@dataclass(frozen=True)
class GermSeries:
    """lambda z + f_2 z^2 + ... + f_N z^N.

    ``coeffs`` holds f_2..f_N.  In the exact backend all entries (and the
    multiplier) live in one field: ``Fraction`` or a cyclotomic field.  In
    the numeric backend they are gmpy2 ``mpc`` numbers of ``precision`` bits.
    """

    multiplier: Multiplier
    coeffs: tuple
    exact: bool
    precision: int = DEFAULT_SERIES_PRECISION
    label: str = ""

    @property
    def order(self) -> int:
        return len(self.coeffs) + 1

    @property
    def lam(self):
        if self.exact:
            return self.multiplier.exact()
        return self.multiplier.numeric(self.precision)

    def coeff(self, n: int):
        if n == 1:
            return self.lam
        if 2 <= n <= self.order:
            return self.coeffs[n - 2]
        return self.zero()

    def zero(self):
        if not self.exact:
            return mpc(0)
        lam = self.multiplier.exact()
        return lam * 0

    def one(self):
        return self.zero() + 1

    def degree(self) -> int:
        for n in range(self.order, 1, -1):
            if not ser._is_zero(self.coeffs[n - 2]):
                return n
        return 1

    def series(self, N: int | None = None) -> list:
        """[0, lambda, f_2, ..., f_N]."""
        N = self.order if N is None else N
        return [self.zero()] + [self.coeff(n) for n in range(1, N + 1)]

    def to_numeric(self, precision: int | None = None) -> "GermSeries":
        prec = precision or self.precision
        return GermSeries(
            self.multiplier, tuple(_to_mpc(c, prec) for c in self.coeffs), False, prec, self.label
        )


def make_germ(multiplier, coeffs: Sequence, exact: bool | None = None,
              precision: int | None = None, label: str = "") -> GermSeries:
    """Build a germ from f_2, f_3, ... .

    Exact entries (ints, Fractions, (re, im) pairs of rationals, cyclotomic
    elements) with an exact multiplier give the exact backend unless
    ``exact=False``.
    """
    mult = parse_multiplier(multiplier)
    prec = precision or DEFAULT_SERIES_PRECISION
    lam = mult.exact()
    can_exact = lam is not None and all(_is_exact_value(c) for c in coeffs)
    if exact is None:
        exact = can_exact
    if exact and not can_exact:
        raise PreconditionError("exact backend needs an exact multiplier and exact coefficients")
    if not exact:
        return GermSeries(mult, tuple(_to_mpc(c, prec) for c in coeffs), False, prec, label)
    gaussian = any(isinstance(c, tuple) and Fraction(c[1]) != 0 for c in coeffs)
    if isinstance(lam, Fraction) and not gaussian and not any(isinstance(c, CycElem) for c in coeffs):
        return GermSeries(mult, tuple(Fraction(c[0] if isinstance(c, tuple) else c) for c in coeffs),
                          True, prec, label)
    fld = lam.field if isinstance(lam, CycElem) else cyclotomic_field(4)
    if isinstance(lam, Fraction):
        mult = _FieldLifted(mult, fld)
    return GermSeries(mult, tuple(fld(c) for c in coeffs), True, prec, label)


class _FieldLifted(Multiplier):
    """A rational multiplier viewed inside a cyclotomic field."""

    def __init__(self, base: Multiplier, fld):
        self.base = base
        self.kind = base.kind
        self.spec = base.spec
        self._value = fld(base.exact())

    def exact(self):
        return self._value

    def numeric(self, prec=DEFAULT_SERIES_PRECISION):
        return self.base.numeric(prec)


def quadratic_germ(multiplier, normalization: str = "half", N: int = 2, **kw) -> GermSeries:
    """lambda z (1 - z/2) (``half``) or lambda (z - z^2) (``unit``)."""
    mult = parse_multiplier(multiplier)
    lam = mult.exact()
    if lam is None:
        lamv = mult.numeric(kw.get("precision") or DEFAULT_SERIES_PRECISION)
        c = -lamv / 2 if normalization == "half" else -lamv
        coeffs = [c] + [mpc(0)] * (N - 2)
        return make_germ(mult, coeffs, exact=False, label=f"quadratic-{normalization}", **kw)
    c = -lam / 2 if normalization == "half" else -lam
    if isinstance(c, Fraction):
        coeffs = [c] + [Fraction(0)] * (N - 2)
    else:
        coeffs = [c] + [c * 0] * (N - 2)
    return make_germ(mult, coeffs, label=f"quadratic-{normalization}", **kw)


def rotation_germ(multiplier, N: int = 2, **kw) -> GermSeries:
    mult = parse_multiplier(multiplier)
    lam = mult.exact()
    zero = Fraction(0) if lam is None or isinstance(lam, Fraction) else lam * 0
    return make_germ(mult, [zero] * (N - 1), label="rotation", **kw)


# ---------------------------------------------------------------------------
# results


@dataclass(frozen=True)
class RadiusEstimate:
    """Radius-of-convergence estimate from coefficient growth (not a certificate)."""

    hadamard: float
    trend_radius: float
    corrected_radius: float
    slope: float
    window: tuple[int, int]
    points: int
    degenerate: bool = False
    kind: str = "estimate"


@dataclass(frozen=True)
class LinearizationSeries:
    h: tuple  # h_0 = 0, h_1 = 1, ..., h_N
    order: int
    residual_order: int
    exact: bool
    f: tuple = field(repr=False, default=())
    radius_estimate: RadiusEstimate | None = None
    residual: float = 0.0
    ball_radius: tuple | None = field(repr=False, default=None)
    method: str = "recurrence"

    def coeff(self, n: int):
        return self.h[n]

    def abs_values(self) -> list[mpfr]:
        return [abs(_to_mpc(c, 64)) if self.exact else abs(c) for c in self.h]


# ---------------------------------------------------------------------------
# engines


def _divisors(germ: GermSeries, N: int, prec: int):
    mult = germ.multiplier
    out = [None, None]
    for n in range(2, N + 1):
        if germ.exact:
            out.append(mult.exact_divisor(n))
        else:
            out.append(mult.divisor(n, prec))
    return out


def _recurrence(germ: GermSeries, N: int, step=None, prec: int = DEFAULT_SERIES_PRECISION):
    zero, one = germ.zero(), germ.one()
    fvals = [zero] * (N + 1)
    fvals[1] = germ.lam
    deg = N if step is not None else min(germ.degree(), N)
    for n in range(2, min(germ.order, N) + 1):
        fvals[n] = germ.coeff(n)
    divs = _divisors(germ, N, prec)
    dmax = max(deg, 1)
    T = np.empty((dmax + 1, N + 1), dtype=object)
    T.fill(zero)
    h = np.empty(N + 1, dtype=object)
    h.fill(zero)
    h[1] = one
    T[1, 1] = one
    for n in range(2, N + 1):
        jmax = min(n, dmax)
        for j in range(2, jmax + 1):
            T[j, n] = np.dot(h[1 : n - j + 2], T[j - 1, n - 1 : j - 2 : -1])
        S = zero
        for j in range(2, min(n - 1, dmax) + 1):
            if not ser._is_zero(fvals[j]):
                S = S + fvals[j] * T[j, n]
        if step is not None:
            fvals[n] = step(n, S)
        total = S + fvals[n] if n <= dmax else S
        h[n] = total / divs[n]
        T[1, n] = h[n]
    return list(h), fvals, divs


def _newton(germ: GermSeries, N: int, prec: int):
    deg = min(germ.degree(), N)
    work = prec + 32
    with flint_prec(work, N + 1), _ctx(work):
        mult = germ.multiplier
        lam = to_acb(germ.lam)
        fser = [acb(0), lam] + [to_acb(germ.coeff(n)) for n in range(2, deg + 1)]
        fprime = [acb(n) * fser[n] for n in range(1, len(fser))]
        lam_pow = [acb(1)] + [to_acb(mult.power(n, work)) for n in range(1, N + 1)]
        divs = [None, None] + [to_acb(mult.divisor(n, work)) for n in range(2, N + 1)]
        h = [acb(0), acb(1)]
        m = 2
        from flint import ctx

        while m <= N:
            m2 = min(2 * m, N + 1)
            ctx.cap = m2
            hs = acb_series(h, prec=m2)
            F = acb_series(fser, prec=m2)(hs).coeffs()
            C = acb_series(fprime, prec=m2)(hs).coeffs()
            F += [acb(0)] * (m2 - len(F))
            C += [acb(0)] * (m2 - len(C))
            delta = []
            for n in range(m, m2):
                acc = F[n]
                for i in range(1, n - m + 1):
                    acc += C[i] * delta[n - i - m]
                delta.append(acc / divs[n])
            # re-centre the balls: the next step recomputes the residual anyway
            h.extend(acb(d.mid()) for d in delta)
            m = m2
        hs = [acb_to_mpc(c) for c in h[: N + 1]]
    with _ctx(prec):
        hs = [+c for c in hs]
    return hs, lam_pow


def residual_check(germ: GermSeries, h: Sequence, N: int, prec: int | None = None,
                   tol: float = 1e-10) -> float:
    """Scaled size of f(h(z)) - h(lambda z) through order N.

    Exact backends return 0.0 or raise; numeric ones rescale z so that the
    coefficients of h are O(1) and compare against ``tol``.
    """
    if germ.exact:
        fz = germ.series(N)
        lhs = ser.compose(fz, list(h[: N + 1]), N)
        rhs = ser.dilate(list(h[: N + 1]), germ.lam)
        for n in range(N + 1):
            if not ser._is_zero(lhs[n] - rhs[n]):
                raise InvariantViolation(f"conjugacy residual nonzero at order {n}")
        return 0.0
    prec = prec or germ.precision
    rho = _rescale(h, N)
    work = prec + 32
    with flint_prec(work, N + 1), _ctx(work):
        r = to_acb(mpc(rho))
        rp = [acb(1)]
        for _ in range(N + 1):
            rp.append(rp[-1] * r)
        deg = min(germ.degree(), N)
        fser = [acb(0), to_acb(germ.lam)] + [to_acb(germ.coeff(n)) * rp[n - 1] for n in range(2, deg + 1)]
        hser = [acb(0)] + [to_acb(h[n]) * rp[n - 1] for n in range(1, N + 1)]
        F = acb_series(fser, prec=N + 1)(acb_series(hser, prec=N + 1)).coeffs()
        F += [acb(0)] * (N + 1 - len(F))
        mult = germ.multiplier
        scale = max([1.0] + [float(abs(c).mid()) for c in fser[2:]])
        worst = 0.0
        for n in range(1, N + 1):
            lp = to_acb(mult.power(n, work))
            res = F[n] - lp * hser[n]
            mag = float(abs(res).upper()) / scale
            worst = max(worst, mag)
            if mag > tol:
                raise InvariantViolation(f"conjugacy residual {mag:.3e} at order {n} exceeds {tol:g}")
        return worst


def _rescale(h, N) -> float:
    """rho <= 1 with |h_n| rho^{n-1} <= 1 for all n."""
    best = 0.0
    for n in range(2, N + 1):
        a = abs(h[n])
        if a > 0:
            best = max(best, float(gmpy2.log(a)) / (n - 1))
    return min(1.0, math.exp(-best))


def linearize(germ: GermSeries, N: int | None = None, *, method: str = "auto",
              step: Callable | None = None, precision: int | None = None,
              check: bool = True) -> LinearizationSeries:
    """Formal linearization of ``germ`` through order N."""
    N = germ.order if N is None else N
    if N < 1:
        raise PreconditionError("order must be positive")
    prec = precision or germ.precision
    if method == "auto":
        method = "newton" if (not germ.exact and step is None and germ.degree() > 24) else "recurrence"
    if method == "newton":
        if germ.exact or step is not None:
            raise PreconditionError("newton engine is numeric and has no step hook")
        h, _ = _newton(germ, N, prec)
        fvals = germ.series(N)
    elif method == "recurrence":
        if germ.exact:
            h, fvals, _ = _recurrence(germ, N, step, prec)
        else:
            with _ctx(prec):
                h, fvals, _ = _recurrence(germ, N, step, prec)
    else:
        raise PreconditionError(f"unknown method {method!r}")
    used = germ
    if step is not None:
        used = GermSeries(germ.multiplier, tuple(fvals[2 : N + 1]), germ.exact, prec, germ.label)
    res = residual_check(used, h, N, prec) if check else float("nan")
    est = radius_estimate(h) if N >= 32 else None
    return LinearizationSeries(tuple(h), N, N if check else 0, germ.exact, tuple(fvals), est, res,
                               None, method)


# ---------------------------------------------------------------------------
# radius estimate


def _log_abs(c) -> float | None:
    if isinstance(c, mpc):
        a = abs(c)
        return None if a == 0 else float(gmpy2.log(a))
    if isinstance(c, CycElem):
        a = abs(c.to_mpc(128))
        return None if a == 0 else float(gmpy2.log(a))
    if isinstance(c, Fraction):
        return None if c == 0 else math.log(abs(c.numerator)) - math.log(c.denominator)
    a = abs(c)
    if a == 0:
        return None
    return float(gmpy2.log(mpfr(a))) if not isinstance(a, float) else math.log(a)


def radius_estimate(h, window: tuple[int, int] | None = None) -> RadiusEstimate:
    """Estimate the radius of convergence of sum h_n z^n.

    ``hadamard`` is 1/exp(max_{n in window} log|h_n|/n).  ``trend_radius``
    comes from a least-squares line log|h_n| ~ a + s n and
    ``corrected_radius`` from log|h_n| ~ a + s n + c log n.
    """
    coeffs = h.h if isinstance(h, LinearizationSeries) else h
    N = len(coeffs) - 1
    if N < 32:
        raise PreconditionError("radius estimate needs at least 32 coefficients")
    n0, n1 = window if window is not None else (max(2, N // 2), N)
    ns, logs = [], []
    for n in range(n0, n1 + 1):
        v = _log_abs(coeffs[n])
        if v is not None:
            ns.append(n)
            logs.append(v)
    if not ns:
        inf = float("inf")
        return RadiusEstimate(inf, inf, inf, float("-inf"), (n0, n1), 0, True)
    had = 1.0 / math.exp(max(l / n for n, l in zip(ns, logs)))
    if len(ns) >= 3:
        x = np.array(ns, dtype=float)
        y = np.array(logs)
        slope = float(np.polyfit(x, y, 1)[0])
        A = np.column_stack([np.ones_like(x), x, np.log(x)])
        coef = np.linalg.lstsq(A, y, rcond=None)[0]
        corr = math.exp(-float(coef[1]))
    else:
        slope = logs[-1] / ns[-1]
        corr = math.exp(-slope)
    return RadiusEstimate(had, math.exp(-slope), corr, slope, (n0, n1), len(ns))


# ---------------------------------------------------------------------------
# Cremer construction


@dataclass(frozen=True)
class CremerSeries:
    germ: GermSeries
    linearization: LinearizationSeries
    divisors: tuple  # |lambda^n - lambda| for n = 2..N (index n)
    precision: int = DEFAULT_SERIES_PRECISION

    def abs_h(self, n: int) -> mpfr:
        with _ctx(self.precision):
            return abs(self.linearization.h[n])

    def lower_bound_failures(self) -> list[int]:
        """n with |h_n| |lambda^n - lambda| < 1, up to rounding at the working precision."""
        slack = mpfr(2) ** (32 - self.precision)
        with _ctx(self.precision):
            return [n for n in range(2, len(self.divisors))
                    if abs(self.linearization.h[n]) * self.divisors[n] < 1 - slack]


def cremer_series(alpha, N: int, precision: int | None = None) -> CremerSeries:
    """Germ with |f_n| = 1 whose linearization obeys |h_n| >= 1/|lambda^n - lambda|.

    f_n is chosen with the phase of S_n = sum_{j<n} f_j [h^j]_n so that
    |S_n + f_n| = |S_n| + 1; when S_n = 0 the phase is 0.
    """
    if isinstance(alpha, Multiplier):
        mult = alpha
    elif isinstance(alpha, str) and alpha.startswith("circle:"):
        mult = parse_multiplier(alpha)
    else:
        mult = CircleMultiplier(alpha)
    if not isinstance(mult, CircleMultiplier):
        raise PreconditionError("Cremer construction needs an irrational rotation number")
    prec = precision or DEFAULT_SERIES_PRECISION
    base = GermSeries(mult, tuple(mpc(0) for _ in range(N - 1)), False, prec, "cremer")

    def phase(n, S):
        a = abs(S)
        return mpc(1) if a == 0 else S / a

    lin = linearize(base, N, method="recurrence", step=phase, precision=prec)
    germ = GermSeries(mult, tuple(lin.f[2 : N + 1]), False, prec, "cremer")
    with _ctx(prec):
        divs = (None, None) + tuple(abs(mult.divisor(n, prec)) for n in range(2, N + 1))
    return CremerSeries(germ, lin, divs, prec)


def cremer_germ(alpha, N: int, precision: int | None = None) -> GermSeries:
    return cremer_series(alpha, N, precision).germ
