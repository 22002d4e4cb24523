"""Continued-fraction tables: quotients, convergents, remainders and beta_n."""

from __future__ import annotations

from fractions import Fraction
from math import floor

from ._numerics import RationalInterval, default_precision, scaled_floor
from .errors import DepthInsufficient, PrecisionExhausted, PreconditionError, RationalTerminated
from .reals import RationalReal, RealInput, SurdReal, parse_real
from .surd import QuadraticSurd

GOLDEN = QuadraticSurd(Fraction(-1, 2), Fraction(1, 2), 5)  # g
GOLDEN_INV = QuadraticSurd(Fraction(1, 2), Fraction(1, 2), 5)  # G = 1/g


def as_real_input(x) -> RealInput:
    if isinstance(x, RealInput):
        return x
    if isinstance(x, ContinuedFractionTable):
        return x.source
    if isinstance(x, str):
        return parse_real(x)
    if isinstance(x, QuadraticSurd):
        return SurdReal(x) if not x.is_rational else RationalReal(x.r)
    if isinstance(x, (int, Fraction)):
        return RationalReal(x)
    raise PreconditionError(f"unsupported real input {type(x).__name__}; floats are not accepted")


class _Lazy:
    """Read-only sequence whose items are computed on first access."""

    def __init__(self, fn, length):
        self._fn = fn
        self._len = length
        self._cache = {}

    def __len__(self):
        return self._len

    def __getitem__(self, n):
        if isinstance(n, slice):
            return [self[i] for i in range(*n.indices(self._len))]
        if n < 0:
            n += self._len
        if not 0 <= n < self._len:
            raise IndexError(n)
        if n not in self._cache:
            self._cache[n] = self._fn(n)
        return self._cache[n]

    def __iter__(self):
        return (self[i] for i in range(self._len))


class ContinuedFractionTable:
    """Expansion data for one real number up to a fixed depth.

    ``a``, ``p`` and ``q`` are tuples of integers indexed from 0.  ``x`` and
    ``beta`` are lazily evaluated sequences; their entries are exact
    (``Fraction``/``QuadraticSurd``) for rational and surd inputs and
    :class:`RationalInterval` enclosures otherwise.
    """

    def __init__(self, source: RealInput, depth: int, precision: int | None = None):
        if depth < 0:
            raise PreconditionError("depth must be nonnegative")
        self.source = source
        self.depth = depth
        self.precision = precision or default_precision()
        if isinstance(source, RationalReal) and depth > source.length:
            raise RationalTerminated(
                f"{source.spec}: expansion ends at index {source.length}, depth {depth} requested"
            )
        a = [source.quotient(n) for n in range(depth + 1)]
        p, q = [], []
        pm1, qm1, pm2, qm2 = 1, 0, 0, 1
        for an in a:
            pn, qn = an * pm1 + pm2, an * qm1 + qm2
            p.append(pn)
            q.append(qn)
            pm2, qm2, pm1, qm1 = pm1, qm1, pn, qn
        self.a = tuple(a)
        self.p = tuple(p)
        self.q = tuple(q)
        self.exact = source.exact
        self.x = _Lazy(self._x_at, depth + 1)
        self.beta = _Lazy(self._beta_at, depth + 1)

    # -- basic accessors ---------------------------------------------------
    @property
    def a0(self) -> int:
        return self.a[0]

    @property
    def frac(self):
        """x_0 = x - a_0."""
        return self.x[0]

    @property
    def value(self):
        return self.frac + self.a0 if self.exact else self.frac.shift(self.a0)

    @property
    def spec(self) -> str:
        return self.source.spec

    def _x_at(self, n):
        x = self.source.remainder(n, self.precision + 8)
        if isinstance(x, RationalInterval):
            return x.rounded(self.precision + 8)
        return x

    def _beta_at(self, n):
        if self.exact:
            v = self.q[n] * self.value - self.p[n]
            return -v if v < 0 else v
        # resume from the nearest cached product
        cache = self.beta._cache
        k = n - 1
        while k >= 0 and k not in cache:
            k -= 1
        prod = cache[k] if k >= 0 else None
        for i in range(k + 1, n + 1):
            prod = self.x[0] if i == 0 else (prod * self.x[i]).rounded(self.precision + 8)
            if i < n:
                cache[i] = prod
        return prod

    def beta_at(self, n: int):
        """beta_n with the convention beta_{-1} = 1."""
        return Fraction(1) if n == -1 else self.beta[n]

    def convergent(self, n: int) -> Fraction:
        return Fraction(self.p[n], self.q[n])

    def k_index(self, n: int) -> int:
        """k with q_k <= n < q_{k+1}; needs n < q_depth."""
        if n < 1:
            raise PreconditionError("n must be a positive integer")
        if n >= self.q[-1]:
            raise DepthInsufficient(
                f"n = {n} needs a convergent denominator above it (q_{self.depth} = {self.q[-1]})"
            )
        k = 0
        while self.q[k + 1] <= n:
            k += 1
        return k

    def quotient_bound(self) -> int | None:
        """Provable sup of a_n over n >= 1, when the input supplies one."""
        return self.source.quotient_sup(1)

    def is_periodic(self) -> bool:
        return self.source.is_periodic()

    def frac_enclosure(self, width: Fraction):
        """x_0 exactly, or an enclosure no wider than ``width``."""
        if self.exact:
            return self.frac
        enc = self.source.frac_value(width)
        return enc

    def fixed_point(self, bits: int) -> tuple[int, int]:
        """(L, H) with L <= x_0 * 2**bits <= H."""
        return scaled_floor(self.frac_enclosure(Fraction(1, 1 << (bits + 1))), bits)

    def extend(self, depth: int) -> "ContinuedFractionTable":
        """A deeper table for the same input (tables themselves never change)."""
        if depth <= self.depth:
            return self
        return ContinuedFractionTable(self.source, depth, self.precision)

    def __repr__(self):
        return f"ContinuedFractionTable({self.spec!r}, depth={self.depth})"


def expand_cf(x, depth: int, precision: int | None = None) -> ContinuedFractionTable:
    """Expand ``x`` (a RealInput, spec string, int, Fraction or surd) to ``depth``."""
    return ContinuedFractionTable(as_real_input(x), depth, precision)


def table_covering(x, n: int, precision: int | None = None) -> ContinuedFractionTable:
    """The shallowest table with q_depth > n (grown one quotient at a time,
    so that fast-growing expansions are not over-expanded)."""
    if isinstance(x, ContinuedFractionTable):
        table = x
    else:
        table = ContinuedFractionTable(as_real_input(x), 1, precision)
    while table.q[-1] <= n:
        table = table.extend(table.depth + 1)
    return table


def nearest_offset(n: int, table: ContinuedFractionTable):
    """(m, d) with n*x_0 = m + d and |d| <= 1/2; d exact or an enclosure."""
    if table.exact:
        v = n * table.frac
        m = floor(v + Fraction(1, 2))
        return m, v - m
    k = table.k_index(n) if n < table.q[-1] else table.depth - 1
    width = Fraction(1, 2 * n * table.q[min(k + 1, table.depth)] << table.precision)
    enc = table.frac_enclosure(width).scale(n)
    m = floor(enc.mid + Fraction(1, 2))
    return m, enc.shift(-m)


class DistanceOracle:
    """Certified ||n alpha||_Z as integer enclosures scaled by 2**P."""

    def __init__(self, table: ContinuedFractionTable, nmax: int, margin: int = 96):
        self.table = table
        self._set_bits(margin + max(nmax, 1).bit_length())

    def _set_bits(self, bits):
        self.P = bits
        self.one = 1 << bits
        self.L, self.H = self.table.fixed_point(bits)

    def scaled(self, n: int) -> tuple[int, int]:
        """(lo, hi) with lo <= ||n alpha|| * 2**P <= hi."""
        one = self.one
        r = (n * self.L) % one
        err = n * (self.H - self.L) + 1
        if r > one // 2:
            r = one - r
            lo, hi = r - err, r + 1
        else:
            lo, hi = r, r + err
        # ||n alpha|| = 1/2 needs a rational alpha; the enclosure just clips
        return max(lo, 0), min(hi, one // 2)

    def below(self, n: int, den: int) -> bool:
        """Is ||n alpha|| <= 1/den?  Decided exactly (refining if needed)."""
        if n == 0:
            return True
        for _ in range(6):
            lo, hi = self.scaled(n)
            if hi * den <= self.one:
                return True
            if lo * den > self.one:
                return False
            self._set_bits(2 * self.P)
        raise PrecisionExhausted(f"cannot compare ||{n} alpha|| with 1/{den}")

    def enclose(self, n: int, rel_bits: int = 40) -> tuple[int, int, int]:
        """(lo, hi, P) with lo <= ||n alpha|| * 2**P <= hi and hi - lo <= lo * 2**-rel_bits."""
        for _ in range(40):
            lo, hi = self.scaled(n)
            if lo > 0 and (hi - lo) << rel_bits <= lo:
                return lo, hi, self.P
            self._set_bits(2 * self.P)
        raise PrecisionExhausted(f"cannot resolve ||{n} alpha|| to {rel_bits} relative bits")



def dist_to_integers(n: int, table: ContinuedFractionTable):
    """||n x||_Z, exact or as a certified interval."""
    table.k_index(n)  # depth precondition
    _, d = nearest_offset(n, table)
    if isinstance(d, RationalInterval):
        d = abs(d)
        return RationalInterval(d.lo, min(d.hi, Fraction(1, 2)))
    return -d if d < 0 else d


def is_best_approximation(p: int, q: int, table: ContinuedFractionTable) -> bool:
    """True iff (p, q) is one of the computed convergents (p_n, q_n)."""
    if q < 1:
        raise PreconditionError("q must be positive")
    if q >= table.q[-1]:
        raise DepthInsufficient(f"q = {q} is not below q_{table.depth} = {table.q[-1]}")
    return any(pn == p and qn == q for pn, qn in zip(table.p, table.q))


def branch_interval(quotients) -> RationalInterval:
    """Closure of the set of x in (0,1) whose expansion starts with ``quotients``.

    The endpoints are p_k/q_k and (p_k + p_{k-1})/(q_k + q_{k-1}); the
    returned interval is ordered lo < hi and its interior is the branch.
    """
    qs = [int(a) for a in quotients]
    if any(a < 1 for a in qs):
        raise PreconditionError("partial quotients must be >= 1")
    pm1, qm1, pm2, qm2 = 0, 1, 1, 0  # index 0 (a_0 = 0) and index -1
    for a in qs:
        pm1, qm1, pm2, qm2 = a * pm1 + pm2, a * qm1 + qm2, pm1, qm1
    return RationalInterval.hull(Fraction(pm1, qm1), Fraction(pm1 + pm2, qm1 + qm2))


def check_invariants(table: ContinuedFractionTable) -> list[str]:
    """Return the list of violated table invariants (empty when all hold)."""
    bad = []
    p, q, D = table.p, table.q, table.depth
    for n in range(1, D + 1):
        if q[n] <= 0 or (n >= 2 and q[n] <= q[n - 1]):
            bad.append(f"q not increasing at {n}")
    pm1, qm1 = 1, 0
    for n in range(D + 1):
        if q[n] * pm1 - p[n] * qm1 != (-1) ** n:
            bad.append(f"determinant identity fails at {n}")
        pm1, qm1 = p[n], q[n]
        if 2 * q[n] < _golden_power_lb(n - 1):
            bad.append(f"2 q_{n} < G^{n - 1}")
    g_enc = _golden_enclosure()
    terminal = isinstance(table.source, RationalReal) and D == table.source.length
    for n in range(D + 1):
        b = table.beta[n]
        if table.exact:
            if b != abs(q[n] * table.value - p[n]):
                bad.append(f"beta_{n} != |q_n x - p_n|")
            if isinstance(b, QuadraticSurd) and b.d != 5 and not b.is_rational:
                over = b > g_enc.hi**n or (b > g_enc.lo**n and b.to_iv(300) > GOLDEN.to_iv(300) ** n)
            else:
                over = b > GOLDEN**n
            if over:
                bad.append(f"beta_{n} > g^{n}")
        else:
            if b.lo > g_enc.hi**n:
                bad.append(f"beta_{n} > g^{n}")
        if n < D:
            prod = b * q[n + 1]
            last = terminal and n == D - 1
            if table.exact:
                ok = Fraction(1, 2) < prod and (prod <= 1 if last else prod < 1)
            else:
                ok = prod.hi > Fraction(1, 2) and prod.lo < 1
            if not ok:
                bad.append(f"beta_{n} q_{n + 1} outside (1/2, 1)")
        c = table.convergent(n)
        x = table.value
        if table.exact and not (terminal and n == D):
            side = c < x if n % 2 == 0 else c > x
            if not side:
                bad.append(f"convergent {n} on the wrong side")
    if table.exact:
        for n in range(D + 1):
            xn = table.x[n]
            if n >= 1:
                fold = (p[n] + p[n - 1] * xn) / (q[n] + q[n - 1] * xn)
            else:
                fold = p[0] + xn
            if fold != table.value:
                bad.append(f"reconstruction fails at {n}")
    return bad


def _golden_enclosure() -> RationalInterval:
    L = GOLDEN.scaled_floor(200)
    return RationalInterval(Fraction(L, 1 << 200), Fraction(L + 1, 1 << 200))


def _golden_power_lb(n: int):
    """An exact value of G^n (n >= -1) as a surd."""
    return GOLDEN_INV**n
