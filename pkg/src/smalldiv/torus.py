"""The cohomological equation mu . du = v on the n-torus, mode by mode.

Fields are finite Fourier sums.  A coefficient is stored exactly as
c_k (2 pi i)^scale with c_k a pair (re, im) of rationals or quadratic surds,
so that D_mu (multiplication by 2 pi i k.mu) and its inverse never round.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpc, mpfr
from mpmath import iv

from ._numerics import ivprec
from .contfrac import DistanceOracle, as_real_input, table_covering
from .errors import (
    DepthInsufficient,
    ExponentTooSmall,
    MalformedSpec,
    NonzeroMean,
    PreconditionError,
    ResonantMode,
)
from .reals import RationalReal, SurdReal
from .surd import QuadraticSurd


def _exact(x):
    if isinstance(x, (Fraction, QuadraticSurd)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError:
            src = as_real_input(x)
            if isinstance(src, RationalReal):
                return src.value
            if isinstance(src, SurdReal):
                return src.value
            raise PreconditionError(f"{x!r} is neither rational nor a quadratic surd")
    if isinstance(x, float):
        return Fraction(x)
    raise PreconditionError(f"unsupported exact entry {type(x).__name__}")


def _is_zero(x) -> bool:
    return x == 0


def _num(x, prec: int) -> mpfr:
    if isinstance(x, QuadraticSurd):
        # extra bits absorb the cancellation in r + s sqrt(d)
        with gmpy2.context(gmpy2.get_context(), precision=prec + 64):
            v = gmpy2.mpfr(gmpy2.mpq(x.r.numerator, x.r.denominator)) + gmpy2.mpfr(
                gmpy2.mpq(x.s.numerator, x.s.denominator)
            ) * gmpy2.sqrt(x.d)
        return mpfr(v, prec)
    return mpfr(gmpy2.mpq(x.numerator, x.denominator), prec)


class FourierField:
    """Finite-support Fourier field T^n -> C^m.

    ``modes`` maps integer tuples k to a tuple of m pairs (re, im).  The
    actual coefficient is (re + i im) (2 pi i)^scale.
    """

    def __init__(self, dim: int, modes: dict, m: int = 1, scale: int = 0):
        if dim < 1 or m < 1:
            raise PreconditionError("dim and m must be positive")
        clean = {}
        for k, val in modes.items():
            k = tuple(int(t) for t in k)
            if len(k) != dim:
                raise PreconditionError(f"mode {k} does not have dimension {dim}")
            if m == 1 and (len(val) == 2 and not isinstance(val[0], tuple)):
                val = (val,)
            val = tuple((_exact(re), _exact(im)) for re, im in val)
            if len(val) != m:
                raise PreconditionError(f"mode {k} has {len(val)} components, expected {m}")
            if all(_is_zero(re) and _is_zero(im) for re, im in val):
                continue
            clean[k] = val
        self.dim, self.m, self.scale = dim, m, scale
        self.modes = dict(sorted(clean.items()))

    @classmethod
    def zero(cls, dim: int, m: int = 1) -> "FourierField":
        return cls(dim, {}, m)

    @property
    def support(self):
        return tuple(self.modes)

    @property
    def mean(self):
        return self.modes.get((0,) * self.dim, tuple((Fraction(0), Fraction(0)) for _ in range(self.m)))

    def exact_coefficient(self, k):
        return self.modes.get(tuple(k))

    def coefficient(self, k, prec: int = 128) -> list:
        """Numerical coefficient values (mpc), one per component."""
        val = self.modes.get(tuple(k))
        if val is None:
            return [mpc(0)] * self.m
        with gmpy2.context(gmpy2.get_context(), precision=prec):
            f = (2 * gmpy2.const_pi() * mpc(0, 1)) ** self.scale
            return [mpc(_num(re, prec), _num(im, prec)) * f for re, im in val]

    def abs_max(self, k, prec: int = 64) -> mpfr:
        return max(abs(c) for c in self.coefficient(k, prec))

    def is_real(self) -> bool:
        """Hermitian symmetry of the actual coefficients, decided exactly."""
        sgn = -1 if self.scale % 2 else 1
        for k, val in self.modes.items():
            other = self.modes.get(tuple(-t for t in k))
            if other is None:
                return False
            for (re, im), (re2, im2) in zip(val, other):
                # actual_{-k} = conj(actual_k)  <=>  c_{-k} = sgn * conj(c_k)
                if re2 != sgn * re or im2 != -sgn * im:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, FourierField):
            return NotImplemented
        return (self.dim, self.m, self.scale, self.modes) == (other.dim, other.m, other.scale, other.modes)

    def __repr__(self):
        return f"FourierField(dim={self.dim}, m={self.m}, modes={len(self.modes)}, scale={self.scale})"

    def to_json(self) -> dict:
        modes = []
        for k, val in self.modes.items():
            comp = [{"re": str(re), "im": str(im)} for re, im in val]
            entry = {"k": list(k)}
            if self.m == 1:
                entry.update(comp[0])
            else:
                entry["components"] = comp
            modes.append(entry)
        return {"dim": self.dim, "m": self.m, "scale": self.scale, "modes": modes}

    @classmethod
    def from_json(cls, data: dict) -> "FourierField":
        try:
            dim = int(data["dim"])
            m = int(data.get("m", 1))
            modes = {}
            for entry in data["modes"]:
                k = tuple(int(t) for t in entry["k"])
                if "components" in entry:
                    val = tuple((c.get("re", "0"), c.get("im", "0")) for c in entry["components"])
                else:
                    val = ((entry.get("re", "0"), entry.get("im", "0")),)
                val = tuple((_exact(str(re)), _exact(str(im))) for re, im in val)
                modes[k] = val
            return cls(dim, modes, m, int(data.get("scale", 0)))
        except (KeyError, TypeError, ValueError, PreconditionError) as exc:
            raise MalformedSpec(f"malformed field description: {exc}") from exc


def sample_field(values: np.ndarray, max_abs_k: int | None = None) -> FourierField:
    """Finite Fourier field from samples on a uniform grid of T^n (discrete
    transform; coefficients become exact rationals of the float values)."""
    values = np.asarray(values)
    dim = values.ndim
    coeffs = np.fft.fftn(values) / values.size
    modes = {}
    for idx in np.ndindex(*values.shape):
        k = tuple(i if i <= s // 2 else i - s for i, s in zip(idx, values.shape))
        if max_abs_k is not None and sum(abs(t) for t in k) > max_abs_k:
            continue
        c = coeffs[idx]
        if abs(c) > 1e-14:
            modes[k] = (Fraction(float(c.real)), Fraction(float(c.imag)))
    return FourierField(dim, modes)


# ---------------------------------------------------------------------------
# frequency vectors


def _abs_k(k) -> int:
    return sum(abs(t) for t in k)


def _dot(mu, k):
    total = Fraction(0)
    for a, b in zip(mu, k):
        if b:
            total = a * b + total
    return total


def _sup_ratio(tau: Fraction, r: Fraction) -> float:
    """max_{m >= 1} m^tau (1 + m)^-r  (finite once r >= tau)."""
    tau, r = float(tau), float(r)
    cands = {1}
    if r > tau and tau > 0:
        m0 = tau / (r - tau)
        cands |= {max(1, math.floor(m0)), max(1, math.ceil(m0))}
    return max(m**tau * (1 + m) ** (-r) for m in cands)


@dataclass(frozen=True)
class FrequencyVector:
    mu: tuple
    gamma: Fraction | None = None
    tau: Fraction | None = None
    checked: int | None = None  # |k| range verified exactly; None for symbolic
    symbolic: bool = False
    note: str = ""

    @property
    def dim(self) -> int:
        return len(self.mu)

    @property
    def certified(self) -> bool:
        return self.gamma is not None and (self.symbolic or self.checked is not None)

    def dot(self, k):
        return _dot(self.mu, k)

    @classmethod
    def from_entries(cls, entries) -> "FrequencyVector":
        return cls(tuple(_exact(e) for e in entries))

    @classmethod
    def quadratic_pair(cls, alpha, scale=1) -> "FrequencyVector":
        """mu = scale * (1, alpha) for a quadratic irrational alpha.

        With A the largest partial quotient, ||q alpha|| >= 1/((A + 2) q) for
        every q >= 1, hence |mu.k| >= |scale| / ((A + 2) |k|): tau = 1.
        """
        src = as_real_input(alpha)
        if not isinstance(src, SurdReal):
            raise PreconditionError("quadratic_pair needs a quadratic irrational")
        A = src.quotient_sup(1)
        scale = _exact(scale)
        gamma = abs(scale) / (A + 2)
        if isinstance(gamma, QuadraticSurd):
            raise PreconditionError("scale must be rational")
        return cls((scale, scale * src.value), Fraction(gamma), Fraction(1), None, True,
                   f"gamma = 1/(a_max + 2) with a_max = {A}")

    @classmethod
    def algebraic_basis(cls, entries, gamma) -> "FrequencyVector":
        """A Q-basis of a real number field, accepted with tau = n - 1 as a
        stated property (not verified here)."""
        mu = tuple(_exact(e) for e in entries)
        return cls(mu, Fraction(gamma), Fraction(len(mu) - 1), None, True,
                   "tau = n - 1 for a field basis, stated not verified")

    def certify(self, gamma, tau, K: int) -> "FrequencyVector":
        """Verify |mu.k| >= gamma |k|^-tau for 0 < |k| <= K, exactly."""
        gamma, tau = Fraction(gamma), Fraction(tau)
        bad = self.violations(gamma, tau, K)
        if bad:
            raise PreconditionError(f"diophantine bound fails at k = {bad[0]}")
        return FrequencyVector(self.mu, gamma, tau, K, False, f"checked for |k| <= {K}")

    def violations(self, gamma, tau, K: int, limit: int = 10) -> list:
        out = []
        for k in lattice_ball(self.dim, K):
            d = abs(self.dot(k))
            n = _abs_k(k)
            if tau.denominator == 1 and tau >= 0:
                ok = d * n ** int(tau) >= gamma
            else:
                with ivprec(96):
                    lhs = _iv(d) * iv.mpf(n) ** (iv.mpf(tau.numerator) / tau.denominator)
                    ok = not (lhs.b < _iv(gamma).a)
            if not ok:
                out.append(k)
                if len(out) >= limit:
                    break
        return out


def _iv(x):
    if isinstance(x, QuadraticSurd):
        return x.to_iv(96)
    return iv.mpf(x.numerator) / x.denominator


def lattice_ball(dim: int, K: int):
    """All k in Z^dim with 0 < |k|_1 <= K."""
    for k in itertools.product(range(-K, K + 1), repeat=dim):
        n = _abs_k(k)
        if 0 < n <= K:
            yield k


def parse_frequency(spec: str) -> FrequencyVector:
    """``golden`` style names give (1, alpha) with a symbolic certificate;
    otherwise a comma separated list of real specs."""
    s = spec.strip()
    parts = [p for p in s.split(",") if p.strip()] if "," in s else [s]
    try:
        if len(parts) == 1:
            return FrequencyVector.quadratic_pair(parts[0])
        entries = tuple(_exact(p) for p in parts)
    except PreconditionError as exc:
        raise MalformedSpec(f"malformed frequency vector {spec!r}: {exc}") from exc
    if len(entries) == 2 and isinstance(entries[0], Fraction) and entries[0] != 0:
        ratio = entries[1] / entries[0]
        if isinstance(ratio, QuadraticSurd) and not ratio.is_rational:
            fv = FrequencyVector.quadratic_pair(SurdReal(ratio), entries[0])
            return FrequencyVector(entries, fv.gamma, fv.tau, None, True, fv.note)
    return FrequencyVector(entries)


# ---------------------------------------------------------------------------
# the solver


def _map_field(v: FourierField, fn, dscale: int) -> FourierField:
    modes = {}
    for k, val in v.modes.items():
        modes[k] = tuple(fn(k, re, im) for re, im in val)
    return FourierField(v.dim, modes, v.m, v.scale + dscale)


def solve_cohomological(v: FourierField, mu: FrequencyVector) -> FourierField:
    """u with u_k = v_k / (2 pi i k.mu), u_0 = 0."""
    if v.dim != mu.dim:
        raise PreconditionError(f"field dimension {v.dim} != frequency dimension {mu.dim}")
    zero = (0,) * v.dim
    if zero in v.modes:
        raise NonzeroMean("v has a nonzero mean; the equation has no solution")
    for k in v.modes:
        if mu.dot(k) == 0:
            raise ResonantMode(k)

    def div(k, re, im):
        d = mu.dot(k)
        return (re / d, im / d)

    return _map_field(v, div, -1)


def D_mu(u: FourierField, mu: FrequencyVector) -> FourierField:
    """(D_mu u)_k = 2 pi i k.mu u_k."""
    if u.dim != mu.dim:
        raise PreconditionError("dimension mismatch")

    def mul(k, re, im):
        d = mu.dot(k)
        return (re * d, im * d)

    return _map_field(u, mul, 1)


# ---------------------------------------------------------------------------
# loss of differentiability


def proxy_norm(u: FourierField, j, prec: int = 64) -> mpfr:
    """sup_k (1 + |k|)^j |u_k|."""
    best = mpfr(0)
    for k in u.modes:
        best = max(best, mpfr(1 + _abs_k(k)) ** j * u.abs_max(k, prec))
    return best


def lattice_count(n: int, m: int) -> int:
    """Number of k in Z^n with |k|_1 = m (m >= 1)."""
    return sum(2**j * comb(n, j) * comb(m - 1, j - 1) for j in range(1, min(n, m) + 1))


def lattice_zeta(n: int, delta: float) -> float:
    """sum_{k in Z^n, k != 0} |k|_1^-delta; infinite unless delta > n."""
    if delta <= n:
        return math.inf
    # lattice_count(n, m) is a polynomial in m of degree n - 1
    return float(mpmath.nsum(lambda m: lattice_count(n, int(m)) * mpmath.mpf(m) ** (-delta), [1, mpmath.inf]))


@dataclass(frozen=True)
class NormEstimate:
    i: int
    r: Fraction
    ratio: float  # proxy_i(u) / proxy_{i+r}(v)
    bound: float  # sup-proxy constant: max_m m^tau (1+m)^-r / (2 pi gamma)
    A_summation: float  # (2 pi)^(i-1) gamma^-1 sum |k|^-(r - tau), infinite unless r - tau > n
    delta: Fraction

    @property
    def holds(self) -> bool:
        return self.ratio <= self.bound * (1 + 1e-12)


def norm_estimate(v: FourierField, mu: FrequencyVector, i: int, r) -> NormEstimate:
    """Loss-of-differentiability ratio for one field against the constants."""
    if not mu.certified:
        raise PreconditionError("norm estimate needs a certified (gamma, tau)")
    r = Fraction(r)
    n = mu.dim
    if r <= mu.tau + n - 1:
        raise ExponentTooSmall(f"r = {r} <= tau + n - 1 = {mu.tau + n - 1}")
    u = solve_cohomological(v, mu)
    if mu.checked is not None and any(_abs_k(k) > mu.checked for k in v.modes):
        raise DepthInsufficient(f"support exceeds the checked range |k| <= {mu.checked}")
    bound = _sup_ratio(mu.tau, r) / (2 * math.pi * float(mu.gamma))
    delta = r - mu.tau
    Asum = (2 * math.pi) ** (i - 1) / float(mu.gamma) * lattice_zeta(n, float(delta))
    nv = proxy_norm(v, float(i + r))
    ratio = 0.0 if nv == 0 else float(proxy_norm(u, i) / nv)
    return NormEstimate(i, r, ratio, bound, Asum, delta)


# ---------------------------------------------------------------------------
# the fundamental solution of f(x + alpha) - f(x) = g


@dataclass(frozen=True)
class FundamentalCoeffs:
    n: np.ndarray  # 1..N (the coefficient of -n has the same modulus)
    log_lo: np.ndarray  # certified bounds on log|1/(e^{2 pi i n alpha} - 1)|
    log_hi: np.ndarray

    @property
    def magnitude(self) -> np.ndarray:
        return np.exp(0.5 * (self.log_lo + self.log_hi))


def fundamental_solution_coeffs(alpha, N: int, rel_bits: int = 40) -> FundamentalCoeffs:
    """|1/(e^{2 pi i n alpha} - 1)| = 1/(2 sin(pi ||n alpha||)) for 1 <= n <= N."""
    table = table_covering(alpha, 1)
    if isinstance(table.source, RationalReal):
        raise PreconditionError("alpha must be irrational")
    dist = DistanceOracle(table, N)
    lo_out = np.empty(N)
    hi_out = np.empty(N)
    for n in range(1, N + 1):
        lo, hi, P = dist.enclose(n, rel_bits)
        with ivprec(rel_bits + 40):
            d = iv.mpf([lo, hi]) / iv.mpf(2) ** P
            val = -iv.log(2 * iv.sin(iv.pi * d))
        lo_out[n - 1] = float(val.a)
        hi_out[n - 1] = float(val.b)
    return FundamentalCoeffs(np.arange(1, N + 1), lo_out, hi_out)


def _log_spike(table, k: int) -> float:
    """log 1/(2 sin(pi ||q_k alpha||)) from ||q_k alpha|| = 1/(q_{k+1} + q_k t),
    t = [0; a_{k+2}, ...] bracketed by a_{k+2} when the table has it.
    No high-precision alpha is needed, so fast-growing quotients stay cheap."""
    q, qn = table.q[k], table.q[k + 1]
    if k + 2 <= table.depth:
        a = table.a[k + 2]
        t_lo, t_hi = 1 / iv.mpf(a + 1), 1 / iv.mpf(a)
    else:
        t_lo, t_hi = iv.mpf(0), iv.mpf(1)
    with ivprec(80):
        lo = 1 / (iv.mpf(qn) + q * t_hi)
        hi = 1 / (iv.mpf(qn) + q * t_lo)
        d = iv.mpf([lo.a, hi.b])
        return float((-iv.log(2 * iv.sin(iv.pi * d))).mid)


@dataclass(frozen=True)
class GrowthReport:
    verdict: str  # distribution-consistent | hyperfunction-consistent | neither | undecided
    q: tuple  # spike positions q_k <= N
    log_spikes: tuple  # log of the coefficient modulus at n = q_k
    exponents: tuple  # log M_k / log q_k
    rates: tuple  # log q_{k+1} / q_k
    exponent_slope: float | None
    rate_decay: float | None  # last rate over the largest rate


def growth_classify(alpha, N: int, min_spikes: int = 3, slope_tol: float = 0.1,
                    decay: float = 0.25) -> GrowthReport:
    """Finite-depth consistency check of the growth of 1/(e^{2 pi i n alpha} - 1).

    The coefficients peak at n = q_k with modulus M_k ~ q_{k+1}/(2 pi).
    Polynomial growth shows as a flat exponent log M_k / log q_k (fitted
    slope across k at most ``slope_tol``).  Sub-exponential growth shows as
    log q_{k+1} / q_k falling to at most ``decay`` times its peak.
    These are labels for what the computed window shows, not certificates.
    """
    table = table_covering(alpha, N)
    ks = [k for k in range(table.depth) if 2 <= table.q[k] <= N and table.q[k] != table.q[k - 1]]
    qs = [table.q[k] for k in ks]
    logs = [_log_spike(table, k) for k in ks]
    exps = [lm / math.log(q) for q, lm in zip(qs, logs)]
    rates = [math.log(table.q[k + 1]) / table.q[k] for k in ks]
    if len(qs) < min_spikes:
        return GrowthReport("undecided", tuple(qs), tuple(logs), tuple(exps), tuple(rates), None, None)
    slope = float(np.polyfit(np.arange(len(qs), dtype=float), exps, 1)[0])
    ratio = rates[-1] / max(rates)
    if slope <= slope_tol:
        verdict = "distribution-consistent"
    elif ratio <= decay and rates[-1] < rates[-2]:
        verdict = "hyperfunction-consistent"
    else:
        verdict = "neither"
    return GrowthReport(verdict, tuple(qs), tuple(logs), tuple(exps), tuple(rates), slope, ratio)
