"""Diophantine classes and the Brjuno function.

All logarithms are evaluated in mpmath interval arithmetic; the reported
reals are interval midpoints and the enclosures are kept alongside.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from mpmath import iv, mp, mpf

from ._numerics import default_precision, ivprec, to_iv
from .contfrac import ContinuedFractionTable, as_real_input, expand_cf
from .errors import DepthInsufficient, PreconditionError
from .reals import RationalReal, SurdReal
from .surd import QuadraticSurd

BRJUNO_CERTIFIED = "brjuno-certified"
DIVERGENCE_SUSPECTED = "divergence-suspected"
UNDECIDED = "undecided"

CERTIFIED_MEMBER = "certified-member"
CERTIFIED_NONMEMBER = "certified-nonmember"
UNDECIDED_AT_DEPTH = "undecided-at-depth"


def _mid(x) -> mpf:
    with mp.workprec(max(iv.prec, mp.prec)):
        return mpf(x.mid)


@dataclass(frozen=True)
class BrjunoValue:
    partial_sum: mpf
    depth: int
    tail_bound: mpf | None  # None stands for "unbounded-unknown"
    quotient_sum: mpf
    flags: str
    enclosure: object = field(repr=False, default=None)

    @property
    def upper_bound(self):
        """Certified upper bound for B(x) when a tail bound is known."""
        if self.tail_bound is None:
            return None
        return mpf(self.enclosure.b) + self.tail_bound


@dataclass(frozen=True)
class DiophantineClass:
    gamma: Fraction
    tau: Fraction
    verdict: str
    witness: tuple[int, int] | None = None
    depth: int = 0

    def __post_init__(self):
        if self.gamma <= 0:
            raise PreconditionError("gamma must be positive")
        if self.verdict == CERTIFIED_NONMEMBER and self.witness is None:
            raise PreconditionError("a nonmember verdict needs a witness")


def _need(table: ContinuedFractionTable, N: int):
    if N < 0:
        raise PreconditionError("N must be nonnegative")
    if table.depth < N + 1:
        raise DepthInsufficient(f"need table depth >= {N + 1}, have {table.depth}")


def _log_inv(x, prec):
    return -iv.log(to_iv(x, prec))


def _series_enclosure(table, N, prec, term):
    with ivprec(prec + 16):
        total = iv.mpf(0)
        for n in range(N + 1):
            b = iv.mpf(1) if n == 0 else to_iv(table.beta[n - 1], prec + 16)
            total += b * term(table.x[n])
        return total


def tail_bound(table: ContinuedFractionTable, N: int, prec: int | None = None):
    """g^N log(a_max + 2) / (1 - g), or None if no quotient bound is known."""
    amax = table.quotient_bound()
    if amax is None:
        return None
    prec = prec or default_precision()
    with ivprec(prec):
        g = (iv.sqrt(5) - 1) / 2
        t = g**N * iv.log(amax + 2) / (1 - g)
        with mp.workprec(prec):
            return mpf(t.b)


def brjuno_series(table: ContinuedFractionTable, N: int, precision: int | None = None) -> BrjunoValue:
    """Partial Brjuno sum sum_{n<=N} beta_{n-1} log(1/x_n)."""
    _need(table, N)
    prec = precision or table.precision
    enc = _series_enclosure(table, N, prec, lambda x: _log_inv(x, prec + 16))
    qsum = brjuno_quotient_sum(table, N, prec)
    tb = None if isinstance(table.source, RationalReal) else tail_bound(table, N, prec)
    if tb is not None:
        flag = BRJUNO_CERTIFIED
    else:
        # a non-decaying quotient-sum term signals a wild next quotient
        with ivprec(prec):
            last = iv.log(table.q[N + 1]) / table.q[N]
        flag = DIVERGENCE_SUSPECTED if last.a >= 1 else UNDECIDED
    with ivprec(prec + 16):
        ps = _mid(enc)
    return BrjunoValue(ps, N, tb, qsum, flag, enc)


def brjuno_quotient_sum(table: ContinuedFractionTable, N: int, precision: int | None = None) -> mpf:
    """sum_{n<=N} log(q_{n+1}) / q_n."""
    _need(table, N)
    prec = precision or table.precision
    with ivprec(prec + 16):
        s = iv.mpf(0)
        for n in range(N + 1):
            s += iv.log(table.q[n + 1]) / table.q[n]
        return _mid(s)


def b_sigma(table: ContinuedFractionTable, sigma, N: int, precision: int | None = None) -> mpf:
    """sum_{n<=N} beta_{n-1} x_n^(-1/sigma)."""
    _need(table, N)
    prec = precision or table.precision
    with ivprec(prec + 16):
        s = _iv_real(sigma)
        if not s.a > 0:
            raise PreconditionError("sigma must be positive")
        expo = -1 / s
        enc = _series_enclosure(table, N, prec, lambda x: to_iv(x, prec + 16) ** expo)
        return _mid(enc)


@dataclass(frozen=True)
class PeriodicBrjuno:
    """B(x) = sum_i coeffs[i] * log(1 / points[i]) with exact surd data."""

    coeffs: tuple
    points: tuple
    enclosure: object = field(repr=False)
    precision: int = 53

    @property
    def value(self) -> mpf:
        with ivprec(self.precision):
            return _mid(self.enclosure)

    def expression(self) -> str:
        return " + ".join(f"({c}) * log(1/({x}))" for c, x in zip(self.coeffs, self.points))


def brjuno_periodic_exact(x, precision: int | None = None) -> PeriodicBrjuno:
    """Closed form of B for an eventually periodic expansion.

    With remainders periodic from index k with period m and P the product of
    the remainders over one period, B = sum_{n<k} beta_{n-1} log(1/x_n)
    + (1 - P)^{-1} sum_{k<=n<k+m} beta_{n-1} log(1/x_n).
    """
    src = as_real_input(x)
    if not isinstance(src, SurdReal):
        raise PreconditionError("brjuno_periodic_exact needs an eventually periodic (surd) input")
    first, m = src.period()
    k = first - 1
    table = expand_cf(src, k + m + 1)
    P = QuadraticSurd(1, 0, table.frac.d)
    for i in range(k, k + m):
        P = P * table.x[i]
    coeffs, points = [], []
    for n in range(k + m):
        c = table.beta_at(n - 1)
        if n >= k:
            c = c / (1 - P)
        coeffs.append(c)
        points.append(table.x[n])
    prec = precision or default_precision()
    with ivprec(prec + 16):
        enc = iv.mpf(0)
        for c, xn in zip(coeffs, points):
            enc += to_iv(c, prec + 16) * _log_inv(xn, prec + 16)
    return PeriodicBrjuno(tuple(coeffs), tuple(points), enc, prec + 16)


def _iv_real(v):
    f = _as_fraction(v)
    return iv.mpf(f.numerator) / f.denominator


def _as_fraction(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


def _violates(table, n, gamma: Fraction, tau: Fraction, prec: int) -> bool | None:
    """Is q_n^{1+tau} beta_n < gamma?  None if undecided at this precision."""
    b = table.beta[n]
    if b == 0:
        return True
    with ivprec(prec):
        lhs = iv.exp((1 + _iv_real(tau)) * iv.log(table.q[n])) * to_iv(b, prec)
        g = _iv_real(gamma)
        if lhs.b < g.a:
            return True
        if lhs.a >= g.b:
            return False
    return None


def diophantine_test(table: ContinuedFractionTable, gamma, tau, depth: int | None = None,
                     max_depth: int = 100_000) -> DiophantineClass:
    """Classify x against |x - p/q| >= gamma q^{-2-tau}.

    Violations at convergents certify non-membership; membership is only
    certified for bounded-quotient inputs with tau >= 0 and
    gamma <= 1/(a_max + 2).
    """
    gamma, tau = _as_fraction(gamma), _as_fraction(tau)
    if gamma <= 0:
        raise PreconditionError("gamma must be positive")
    depth = table.depth if depth is None else min(depth, table.depth)
    if depth < 2 and not isinstance(table.source, RationalReal):
        raise PreconditionError("diophantine_test needs depth >= 2")
    prec = table.precision

    def scan(tab, lo, hi):
        for n in range(lo, hi + 1):
            v = _violates(tab, n, gamma, tau, prec)
            if v is None:
                v = _violates(tab, n, gamma, tau, 4 * prec)
            if v:
                return n
        return None

    n = scan(table, 0, depth)
    if n is not None:
        return DiophantineClass(gamma, tau, CERTIFIED_NONMEMBER, (table.p[n], table.q[n]), depth)
    if tau < 0:
        # the condition can never hold; deepen until a convergent shows it
        tab, lo = table, depth + 1
        while tab.depth < max_depth:
            tab = tab.extend(min(max_depth, 2 * tab.depth + 8))
            n = scan(tab, lo, tab.depth)
            if n is not None:
                return DiophantineClass(gamma, tau, CERTIFIED_NONMEMBER, (tab.p[n], tab.q[n]), tab.depth)
            lo = tab.depth + 1
        return DiophantineClass(gamma, tau, UNDECIDED_AT_DEPTH, None, tab.depth)
    amax = table.quotient_bound()
    if (
        amax is not None
        and not isinstance(table.source, RationalReal)
        and gamma <= Fraction(1, amax + 2)
    ):
        return DiophantineClass(gamma, tau, CERTIFIED_MEMBER, None, depth)
    return DiophantineClass(gamma, tau, UNDECIDED_AT_DEPTH, None, depth)
