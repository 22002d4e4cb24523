"""Real-number inputs for continued-fraction expansion.

Four backends feed :func:`smalldiv.contfrac.expand_cf`:

* :class:`RationalReal` -- an exact fraction, finite expansion;
* :class:`SurdReal` -- an exact quadratic irrational, eventually periodic;
* :class:`QuotientReal` -- a number given by its partial quotients
  (an explicit rule such as the expansion of e);
* :class:`DecimalReal` -- a decimal approximation with a declared error,
  expanded only as far as the quotients are certified.

Exact backends hand out remainders as ``Fraction``/``QuadraticSurd``; the
others hand out :class:`RationalInterval` enclosures.  No plain floats.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from math import floor, isqrt
from typing import Callable

from ._numerics import RationalInterval, default_precision
from .errors import MalformedSpec, PrecisionExhausted, PreconditionError, RationalTerminated
from .surd import QuadraticSurd


class RealInput:
    """Common interface; subclasses implement the quotient stream."""

    exact = True
    spec = "?"

    def quotient(self, n: int) -> int:
        raise NotImplementedError

    def remainder(self, n: int, bits: int | None = None):
        """x_n, exactly or as an enclosure of relative width ~2**-bits."""
        raise NotImplementedError

    def frac_value(self, width: Fraction | None = None):
        """x_0 = x - floor(x), exactly or as an enclosure of at most ``width``."""
        raise NotImplementedError

    def quotient_sup(self, start: int = 1) -> int | None:
        """sup of a_n over n >= start when provably known, else None."""
        return None

    def is_periodic(self) -> bool:
        return False

    def __str__(self):
        return self.spec


class RationalReal(RealInput):
    def __init__(self, value):
        self.value = Fraction(value)
        self.spec = f"rat:{self.value}"
        a, xs = [], []
        x = self.value
        a.append(floor(x))
        x = x - a[0]
        xs.append(x)
        while x != 0:
            inv = 1 / x
            a.append(floor(inv))
            x = inv - a[-1]
            xs.append(x)
        self._a, self._x = a, xs

    @property
    def length(self) -> int:
        """Index of the last partial quotient."""
        return len(self._a) - 1

    def quotient(self, n):
        if n > self.length:
            raise RationalTerminated(f"{self.spec} has only {self.length + 1} partial quotients")
        return self._a[n]

    def remainder(self, n, bits=None):
        if n > self.length:
            raise RationalTerminated(f"{self.spec} terminates at index {self.length}")
        return self._x[n]

    def frac_value(self, width=None):
        return self._x[0]

    def quotient_sup(self, start=1):
        rest = self._a[start:]
        return max(rest) if rest else 0


class SurdReal(RealInput):
    """Exact quadratic irrational; the expansion is computed by the Gauss map
    in Q(sqrt(d)) and its period is detected from repeated remainders."""

    def __init__(self, value: QuadraticSurd, spec: str | None = None):
        if value.is_rational:
            raise PreconditionError("surd input is rational; use RationalReal")
        self.value = value
        self.spec = spec or f"surd:{value}"
        a0 = value.floor()
        self._a = [a0]
        self._x = [value - a0]
        self._seen = {self._x[0]: 0}
        self._period = None  # (start, length)

    def _grow(self, n):
        while len(self._a) <= n:
            x = self._x[-1]
            inv = 1 / x
            an = inv.floor()
            nxt = inv - an
            self._a.append(an)
            self._x.append(nxt)
            idx = len(self._x) - 1
            if self._period is None:
                if nxt in self._seen:
                    j = self._seen[nxt]
                    self._period = (j + 1, idx - j)
                else:
                    self._seen[nxt] = idx

    def period(self) -> tuple[int, int]:
        """(first index of the periodic quotients, period length)."""
        n = len(self._a)
        while self._period is None:
            n += 16
            self._grow(n)
        return self._period

    def quotient(self, n):
        self._grow(n)
        return self._a[n]

    def remainder(self, n, bits=None):
        self._grow(n)
        return self._x[n]

    def frac_value(self, width=None):
        return self._x[0]

    def is_periodic(self):
        return True

    def quotient_sup(self, start=1):
        first, length = self.period()
        hi = max(start, first) + length
        self._grow(hi)
        return max(self._a[start:hi])


class QuotientReal(RealInput):
    """A real number defined by a rule n -> a_n (a_0 any integer, a_n >= 1).

    Remainders are enclosed between consecutive convergents of the tail,
    with enough lookahead to reach the requested precision.
    """

    exact = False

    def __init__(self, rule: Callable[[int], int], spec: str, bound: int | None = None):
        self._rule = lru_cache(maxsize=None)(rule)
        self.spec = spec
        self._bound = bound

    def quotient(self, n):
        a = int(self._rule(n))
        if n >= 1 and a < 1:
            raise PreconditionError(f"partial quotient a_{n} = {a} < 1 in {self.spec}")
        return a

    def quotient_sup(self, start=1):
        return self._bound

    def _tail_enclosure(self, n, bits):
        """Enclose x_n = [0; a_{n+1}, a_{n+2}, ...] between two tail convergents."""
        bits = bits or default_precision()
        tol = Fraction(1, 1 << (bits + 2))
        P1, Q1, P0, Q0 = 0, 1, 1, 0
        m = n + 1
        while True:
            a = self.quotient(m)
            P1, Q1, P0, Q0 = a * P1 + P0, a * Q1 + Q0, P1, Q1
            # the true tail is (P1 + t P0)/(Q1 + t Q0) for some t in (0, 1)
            enc = RationalInterval.hull(Fraction(P1, Q1), Fraction(P1 + P0, Q1 + Q0))
            if enc.width <= tol * enc.lo:
                return enc
            m += 1

    def remainder(self, n, bits=None):
        return self._tail_enclosure(n, bits)

    def frac_value(self, width=None):
        if width is None:
            return self._tail_enclosure(0, default_precision())
        bits = (width.denominator // max(width.numerator, 1)).bit_length() + 4
        return self._tail_enclosure(0, bits)


class DecimalReal(RealInput):
    """x known only to lie in [center - radius, center + radius]."""

    exact = False

    def __init__(self, center, radius, spec: str | None = None):
        self.center = Fraction(center)
        self.radius = Fraction(radius)
        if self.radius <= 0:
            raise PreconditionError("decimal input needs a positive error radius")
        lo, hi = self.center - self.radius, self.center + self.radius
        if floor(lo) != floor(hi):
            raise PrecisionExhausted(f"integer part of {spec} is not certified")
        self.spec = spec or f"dec:{self.center}+-{self.radius}"
        a0 = floor(lo)
        self._a = [a0]
        self._ends = [(lo - a0, hi - a0)]
        self._exhausted = None

    def _grow(self, n):
        while len(self._a) <= n:
            if self._exhausted is not None:
                raise PrecisionExhausted(self._exhausted)
            lo, hi = self._ends[-1]
            if lo == 0 or hi == 0:
                self._exhausted = f"{self.spec}: enclosure touches a rational after {len(self._a) - 1} quotients"
                continue
            alo, ahi = floor(1 / lo), floor(1 / hi)
            if alo != ahi:
                self._exhausted = (
                    f"{self.spec}: precision exhausted, quotient {len(self._a)} is "
                    f"not certified ({ahi}..{alo})"
                )
                continue
            self._a.append(alo)
            self._ends.append((1 / lo - alo, 1 / hi - alo))

    def quotient(self, n):
        self._grow(n)
        return self._a[n]

    def remainder(self, n, bits=None):
        self._grow(n)
        return RationalInterval.hull(*self._ends[n])

    def frac_value(self, width=None):
        return RationalInterval.hull(*self._ends[0])

    def certified_depth(self, limit: int = 10_000) -> int:
        """Largest n for which a_n is certified."""
        try:
            self._grow(limit)
        except PrecisionExhausted:
            pass
        return len(self._a) - 1


# ---------------------------------------------------------------------------
# constructors and named numbers


def golden() -> SurdReal:
    """g = (sqrt(5) - 1) / 2 = [0; 1, 1, 1, ...]."""
    return SurdReal(QuadraticSurd(Fraction(-1, 2), Fraction(1, 2), 5), "golden")


def metallic(p: int) -> SurdReal:
    """x_p = (sqrt(p^2 + 4) - p) / 2 = [0; p, p, p, ...]."""
    return SurdReal(QuadraticSurd(Fraction(-p, 2), Fraction(1, 2), p * p + 4), f"xp:{p}")


def _e_rule(n: int) -> int:
    if n == 0:
        return 2
    return 2 * (n + 1) // 3 if n % 3 == 2 else 1


def euler_e() -> QuotientReal:
    """e = [2; 1, 2, 1, 1, 4, 1, 1, 6, ...]."""
    return QuotientReal(_e_rule, "e")


def from_quotients(prefix, period=()) -> RealInput:
    """[a_0; a_1, ..., a_k, (c_1, ..., c_m) repeated] as an exact number.

    Without a period the expansion is finite and the result rational.
    """
    prefix = [int(a) for a in prefix]
    period = [int(c) for c in period]
    if not prefix:
        raise PreconditionError("empty quotient list")
    if any(a < 1 for a in prefix[1:]) or any(c < 1 for c in period):
        raise PreconditionError("partial quotients after a_0 must be >= 1")
    spec = "quot:" + ",".join(map(str, prefix))
    if period:
        spec += ",(" + ",".join(map(str, period)) + ")"
    if not period:
        value = Fraction(prefix[-1])
        for a in reversed(prefix[:-1]):
            value = a + 1 / value
        r = RationalReal(value)
        r.spec = spec
        return r
    # z = [c_1; c_2, ..., c_m, z] solves Q z^2 + (Q' - P) z - P' = 0
    P1, Q1, P0, Q0 = 1, 0, 0, 1  # P_{-1}, Q_{-1}, P_{-2}, Q_{-2}
    for c in period:
        P1, Q1, P0, Q0 = c * P1 + P0, c * Q1 + Q0, P1, Q1
    A, B, C = Q1, Q0 - P1, -P0
    disc = B * B - 4 * A * C
    r = isqrt(disc)
    if r * r == disc:
        raise PreconditionError("periodic tail gave a rational fixed point")
    z = QuadraticSurd(Fraction(-B, 2 * A), Fraction(1, 2 * A), disc)
    # x = [a_0; a_1, ..., a_k, z]
    value = z
    for a in reversed(prefix):
        value = a + 1 / value
    real = SurdReal(value, spec)
    # the expansion must reproduce the given quotients
    for i, a in enumerate(prefix + period * 2):
        if real.quotient(i) != a:
            raise PreconditionError(f"{spec}: quotient {i} does not round-trip")
    return real


# ---------------------------------------------------------------------------
# spec strings

_SURD_TERM = re.compile(r"([+-]?)(\d*)\*?sqrt\((\d+)\)|([+-]?)(\d+)")


def from_q_schedule(target: Callable[[int], int], prefix=(0, 1), spec: str = "qsched") -> QuotientReal:
    """Quotients chosen so that q_{n+1} >= target(q_n), with a_n >= 1.

    ``prefix`` fixes a_0, a_1, ...; every later a_n is the least quotient
    meeting the target.
    """
    a = [int(x) for x in prefix]
    if len(a) < 2 or any(x < 1 for x in a[1:]):
        raise PreconditionError("prefix needs a_0 and a_1 >= 1")
    q = [1, a[1]]
    for x in a[2:]:
        q.append(x * q[-1] + q[-2])

    def rule(n):
        while len(a) <= n:
            want = int(target(q[-1]))
            nxt = max(1, -(-(want - q[-2]) // q[-1]))
            a.append(nxt)
            q.append(nxt * q[-1] + q[-2])
        return a[n]

    return QuotientReal(rule, spec)


def named_schedule(name: str) -> QuotientReal:
    """``exp``: q_{n+1} >= 2^{q_n}; ``qlogq``: q_{n+1} >= q_n^{max(1, log q_n)} + 1."""
    if name == "exp":
        return from_q_schedule(lambda q: 2**q, (0, 1, 1), "qsched:exp")
    if name == "qlogq":
        return from_q_schedule(lambda q: int(q ** max(1.0, math.log(q))) + 1, (0, 1, 1), "qsched:qlogq")
    raise MalformedSpec(f"unknown quotient schedule {name!r}")


def _parse_surd(text: str) -> QuadraticSurd:
    t = text.replace(" ", "").replace("−", "-")
    den = 1
    m = re.fullmatch(r"\((.*)\)/(-?\d+)", t)
    if m:
        t, den = m.group(1), int(m.group(2))
    elif "/" in t:
        num, _, d = t.rpartition("/")
        t, den = num, int(d)
    a = b = 0
    d = None
    pos = 0
    for tm in _SURD_TERM.finditer(t):
        if tm.start() != pos:
            raise MalformedSpec(f"cannot parse surd {text!r}")
        pos = tm.end()
        if tm.group(3):
            coef = int(tm.group(2)) if tm.group(2) else 1
            if tm.group(1) == "-":
                coef = -coef
            if d is not None and d != int(tm.group(3)):
                raise MalformedSpec(f"two radicands in {text!r}")
            d = int(tm.group(3))
            b += coef
        else:
            v = int(tm.group(5))
            a += -v if tm.group(4) == "-" else v
    if pos != len(t) or d is None:
        raise MalformedSpec(f"cannot parse surd {text!r}")
    return QuadraticSurd.from_parts(a, b, d, den)


def _parse_decimal(text: str) -> DecimalReal:
    body = text
    bits = None
    if "@" in body:
        body, _, b = body.partition("@")
        b = b.lower().removesuffix("bits").removesuffix("bit")
        bits = int(b)
    body = body.strip().replace("−", "-")
    try:
        center = Fraction(body)
    except ValueError as exc:
        raise MalformedSpec(f"bad decimal {text!r}") from exc
    if bits is not None:
        radius = Fraction(1, 1 << bits)
    else:
        digits = len(body.partition(".")[2])
        radius = Fraction(1, 2 * 10**digits)
    return DecimalReal(center, radius, f"dec:{text}")


def parse_real(spec: str) -> RealInput:
    """Parse an input string.

    Accepted forms: ``rat:3/7`` (or a bare fraction), ``surd:(-1+sqrt(5))/2``,
    ``quot:0,1,2,(1,2)`` (a parenthesised group is the period, a trailing
    ``...`` repeats the last quotient), ``dec:0.7071067811@128bits``,
    ``xp:P`` for (sqrt(P^2+4)-P)/2, ``qsched:exp`` / ``qsched:qlogq`` (see
    :func:`named_schedule`), and the names ``golden``, ``silver``
    (sqrt(2)-1) and ``e``.
    """
    s = spec.strip().replace("−", "-").replace("…", "...")
    kind, sep, body = s.partition(":")
    if not sep:
        kind, body = "", s
    kind = kind.lower()
    try:
        if kind == "" and body in ("golden", "g"):
            return golden()
        if kind == "" and body == "silver":
            r = from_quotients([0], [2])
            r.spec = "silver"
            return r
        if kind == "" and body == "e":
            return euler_e()
        if kind == "xp":
            return metallic(int(body))
        if kind == "surd":
            v = _parse_surd(body)
            return SurdReal(v, spec) if not v.is_rational else RationalReal(v.r)
        if kind == "dec":
            return _parse_decimal(body)
        if kind == "quot":
            return _parse_quotients(body)
        if kind == "qsched":
            return named_schedule(body)
        if kind in ("rat", ""):
            return RationalReal(Fraction(body))
    except MalformedSpec:
        raise
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedSpec(f"malformed real spec {spec!r}: {exc}") from exc
    raise MalformedSpec(f"unknown real spec {spec!r}")


def _parse_quotients(body: str) -> RealInput:
    body = body.replace(";", ",").replace(" ", "")
    period: list[int] = []
    m = re.search(r",?\(([\d,]+)\)(,?\.\.\.)?$", body)
    if m:
        period = [int(c) for c in m.group(1).split(",") if c]
        body = body[: m.start()]
    elif body.endswith("..."):
        body = body[:-3].rstrip(",")
        items = [int(c) for c in body.split(",") if c]
        return from_quotients(items, [items[-1]] if len(items) > 1 else [1])
    items = [int(c) for c in body.split(",") if c]
    return from_quotients(items, period)
