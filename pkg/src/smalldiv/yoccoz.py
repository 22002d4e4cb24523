"""The quadratic family: Yoccoz's function u, its series, and radius estimators.

Two normalizations of the quadratic polynomial are in use:

* ``half``: P(z) = lambda (z - z^2/2), critical point 1.  Here u_n(lambda) =
  lambda^{-n} P^n(1) and |u(lambda)| is the radius r_2 of the linearization.
* ``unit``: Q(z) = lambda (z - z^2) = P(2z)/2, critical point 1/2.  Its
  linearization H satisfies H(z) = H_P(2z)/2, so its radius is r_2/2.

The linearization recurrence below is written for the unit form; every
radius that leaves this module is converted to the r_2 (= |u|) scale.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from flint import fmpq, fmpq_poly
from gmpy2 import mpc, mpfr

from .contfrac import table_covering
from .errors import InvariantViolation, OrbitEscaped, PreconditionError, ResonantDivisor, ToleranceUnreachable
from .germs import RadiusEstimate, radius_estimate
from .multiplier import CircleMultiplier, Multiplier, parse_multiplier

UNIT_TO_R2 = 2  # radius(H_unit) * 2 = r_2
ESCAPE_RADIUS = 4
R2_UPPER = 2
R2_REFINED = Fraction(8, 7)


def _ctx(prec):
    return gmpy2.context(gmpy2.get_context(), precision=prec)


# ---------------------------------------------------------------------------
# u(lambda)


def u_iterate(lam, n: int, prec: int | None = None):
    """u_n(lambda) from u_0 = 1, u_{k+1} = u_k - (lambda^k / 2) u_k^2.

    Python complex arithmetic by default, gmpy2 ``mpc`` when ``prec`` is given.
    """
    if n < 0:
        raise PreconditionError("n must be >= 0")
    if prec is None:
        lam = complex(lam)
        u, p = 1 + 0j, 1 + 0j
        for _ in range(n):
            u -= 0.5 * p * u * u
            p *= lam
        return u
    with _ctx(prec):
        lam = mpc(lam)
        u, p = mpc(1), mpc(1)
        for _ in range(n):
            u -= p * u * u / 2
            p *= lam
        return u


def truncation_bound(modulus: float, n: int) -> float:
    """|u - u_n| <= 2 |lambda|^n (1 - |lambda|)^{-5} for |lambda| < 1.

    Each step changes u by |lambda|^k |u_k|^2 / 2 with |u_k| <= 2 (1 - |lambda|)^{-2}.
    """
    if modulus >= 1:
        return math.inf
    if modulus == 0:
        return 0.0 if n >= 1 else 0.5
    return 2.0 * math.exp(n * math.log(modulus) - 5 * math.log1p(-modulus))


def steps_for(modulus: float, tol: float) -> int:
    """Smallest n with truncation_bound(modulus, n) <= tol."""
    if modulus == 0:
        return 1
    if modulus >= 1:
        raise ToleranceUnreachable("|lambda| >= 1: the iteration does not converge")
    n = math.ceil((math.log(tol / 2) + 5 * math.log1p(-modulus)) / math.log(modulus))
    return max(n, 1)


def u_value(lam, tol: float = 1e-12, max_steps: int = 10**7):
    """(u(lambda), error bound) for |lambda| < 1."""
    mod = abs(complex(lam))
    n = steps_for(mod, tol)
    if n > max_steps:
        raise ToleranceUnreachable(f"|lambda| = {mod}: {n} steps needed for tolerance {tol}")
    return u_iterate(lam, n), truncation_bound(mod, n)


def u_series(N: int) -> list[Fraction]:
    """Exact Maclaurin coefficients c_0..c_N of u.

    Iterates the recurrence on polynomials truncated at degree N; coefficient j
    no longer changes once the step index exceeds j, so N + 1 steps suffice.
    """
    if N < 0:
        raise PreconditionError("N must be >= 0")
    u = fmpq_poly([1])
    for k in range(N + 1):
        sq = u.mul_low(u, N + 1 - k) if N + 1 - k > 0 else fmpq_poly([])
        u = (u - sq.left_shift(k) * fmpq(1, 2)).truncate(N + 1)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in u.coeffs()]
    coeffs += [Fraction(0)] * (N + 1 - len(coeffs))
    for c in coeffs:
        d = c.denominator
        if d & (d - 1):
            raise InvariantViolation(f"non-dyadic coefficient {c}")
    return coeffs


# ---------------------------------------------------------------------------
# the linearization H of lambda (z - z^2)


@dataclass(frozen=True)
class QuadraticLinearization:
    H: tuple  # H_0 = 0, H_1 = 1, ..., H_N
    h: tuple  # majorant, same indexing
    lam: object
    order: int

    def radius(self, window=None) -> RadiusEstimate:
        """Coefficient-growth estimate of the radius of H (unit form)."""
        return radius_estimate(self.H, window)

    def r2_estimate(self, window=None) -> float:
        """Hadamard estimate converted to the r_2 = |u| scale."""
        return UNIT_TO_R2 * self.radius(window).hadamard


def _one_minus_powers(lam, N: int, prec: int):
    """1 - lambda^{n-1} for n = 2..N (index n)."""
    out = [None, None]
    if isinstance(lam, CircleMultiplier):
        for n in range(2, N + 1):
            out.append(-lam.circle_divisor(n - 1, prec))
        return out
    if isinstance(lam, Multiplier):
        ex = lam.exact()
        num = lam.numeric(prec + 32)
    else:
        ex, num = None, mpc(lam)
    with _ctx(prec + 32):
        p = num  # lambda^{n-1}
        for n in range(2, N + 1):
            d = 1 - p
            if d == 0 or (ex is not None and ex ** (n - 1) == ex * 0 + 1):
                raise ResonantDivisor(n)
            out.append(d)
            p *= num
    return out


def quadratic_linearization(lam, N: int, prec: int = 256) -> QuadraticLinearization:
    """H_n = (1 - lambda^{n-1})^{-1} sum_{i+j=n} H_i H_j and its majorant
    h_n = |1 - lambda^{n-1}|^{-1} sum h_i h_j, for lambda (z - z^2)."""
    if N < 1:
        raise PreconditionError("N must be >= 1")
    if isinstance(lam, str):
        lam = parse_multiplier(lam)
    divs = _one_minus_powers(lam, N, prec)
    with _ctx(prec):
        H = [mpc(0), mpc(1)]
        h = [mpfr(0), mpfr(1)]
        slack = mpfr(2) ** (20 - prec)
        for n in range(2, N + 1):
            S, s = mpc(0), mpfr(0)
            for i in range(1, (n - 1) // 2 + 1):
                S += H[i] * H[n - i]
                s += h[i] * h[n - i]
            S, s = 2 * S, 2 * s
            if n % 2 == 0:
                S += H[n // 2] ** 2
                s += h[n // 2] ** 2
            d = divs[n]
            H.append(S / d)
            h.append(s / abs(d))
            if abs(H[n]) > h[n] * (1 + slack):
                raise InvariantViolation(f"|H_{n}| > h_{n}")
    return QuadraticLinearization(tuple(H), tuple(h), lam, N)


def majorant_growth(q: QuadraticLinearization) -> list[float]:
    """Running max over m <= n of log(h_m)/m, for n = 1..N (index n)."""
    out = [float("-inf"), 0.0]
    best = 0.0
    for n in range(2, q.order + 1):
        best = max(best, float(gmpy2.log(q.h[n])) / n)
        out.append(best)
    return out


# ---------------------------------------------------------------------------
# radial limits


@dataclass(frozen=True)
class RadialLimit:
    alpha: str
    radii: tuple
    values: tuple  # |u(r e^{2 pi i alpha})|
    errors: tuple  # truncation bounds
    steps: tuple
    extrapolated: float  # linear fit against 1 - r over the last three radii
    within_a_priori: bool

    @property
    def log_r2(self) -> float:
        return math.log(self.extrapolated)


def radial_limit_estimate(alpha, radii, N: int | None = None, tol: float = 1e-9,
                          max_steps: int = 2 * 10**7) -> RadialLimit:
    """|u(r e^{2 pi i alpha})| along a radius, an estimator of r_2(e^{2 pi i alpha}).

    With ``N`` the iteration length is fixed and every point must meet ``tol``;
    without it each radius gets the smallest admissible length.
    """
    radii = [float(r) for r in radii]
    if not radii or any(not 0 < r < 1 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise PreconditionError("radii must be strictly increasing in (0, 1)")
    table = table_covering(alpha, 1)
    mult = CircleMultiplier(table)
    e = complex(mult.numeric(64))
    vals, errs, steps = [], [], []
    for r in radii:
        n = steps_for(r, tol) if N is None else N
        if n > max_steps:
            raise ToleranceUnreachable(f"r = {r} needs {n} steps for tolerance {tol}")
        err = truncation_bound(r, n)
        if err > tol:
            raise ToleranceUnreachable(f"N = {n} leaves truncation error {err:.3g} > {tol} at r = {r}")
        vals.append(abs(u_iterate(r * e, n)))
        errs.append(err)
        steps.append(n)
    if len(radii) >= 3:
        x = np.array([1 - r for r in radii[-3:]])
        y = np.array(vals[-3:])
        ext = float(np.polyfit(x, y, 1)[1])
    else:
        ext = vals[-1]
    if any(v > R2_UPPER + e_ for v, e_ in zip(vals, errs)):
        raise InvariantViolation("|u| exceeds 2 inside the disk")
    return RadialLimit(table.spec, tuple(radii), tuple(vals), tuple(errs), tuple(steps), ext,
                       ext <= float(R2_REFINED))


# ---------------------------------------------------------------------------
# orbits and Birkhoff averages


@dataclass(frozen=True)
class CriticalOrbit:
    lam: complex
    seed: complex
    points: np.ndarray = field(repr=False)  # z_0 .. z_{m-1}
    log_sums: np.ndarray = field(repr=False)  # cumulative sums of log|z_j|
    normalization: str = "half"

    def average(self, m: int) -> float:
        return float(self.log_sums[m - 1] / m)


def quadratic_map(lam, normalization: str = "half"):
    lam = complex(lam)
    if normalization == "half":
        return lambda z: lam * (z - 0.5 * z * z)
    if normalization == "unit":
        return lambda z: lam * (z - z * z)
    raise PreconditionError(f"unknown normalization {normalization!r}")


def conjugated_rotation(lam):
    """f = h o R_lambda o h^{-1} with h(w) = w/(1 - w), and h itself."""
    lam = complex(lam)

    def h(w):
        return w / (1 - w)

    def f(z):
        w = z / (1 + z)
        return h(lam * w)

    return f, h


def critical_orbit(lam, m: int, seed=None, f=None, normalization: str = "half") -> CriticalOrbit:
    """Iterate ``f`` (default: the quadratic polynomial) m times from ``seed``
    (default: the critical point) and accumulate log|z_j|."""
    if isinstance(lam, Multiplier):
        lam = complex(lam.numeric(64))
    lam = complex(lam)
    if f is None:
        f = quadratic_map(lam, normalization)
        if seed is None:
            seed = 1.0 if normalization == "half" else 0.5
    if seed is None:
        raise PreconditionError("a seed is required for a custom map")
    z = complex(seed)
    pts = np.empty(m, dtype=complex)
    for j in range(m):
        if abs(z) > ESCAPE_RADIUS:
            raise OrbitEscaped(j, z)
        if z == 0:
            raise PreconditionError("orbit hit the fixed point 0")
        pts[j] = z
        z = f(z)
    return CriticalOrbit(lam, complex(seed), pts, np.cumsum(np.log(np.abs(pts))), normalization)


@dataclass(frozen=True)
class BirkhoffEstimate:
    checkpoints: tuple
    averages: tuple  # (1/m) sum_{j<m} log|z_j|
    log_r: float  # average at the last checkpoint, in the orbit's own scale
    log_r2: float | None  # converted to the r_2 scale for the quadratic family
    decay_exponent: float | None  # fitted, non-normative stand-in for 1 - chi
    error_model: str = "|avg - log r| <= (8/r)(2 pi/q_k)^(1-chi), chi unknown"


def birkhoff_radius(orbit: CriticalOrbit, checkpoints=None, alpha=None) -> BirkhoffEstimate:
    """Running Birkhoff averages of log|z_j| at the given checkpoints.

    With ``alpha`` and no explicit checkpoints the convergent denominators
    q_k <= m are used.
    """
    m = len(orbit.points)
    if checkpoints is None:
        if alpha is not None:
            table = table_covering(alpha, m)
            checkpoints = sorted({q for q in table.q if 1 <= q <= m})
        else:
            checkpoints = [m]
    cps = [int(c) for c in checkpoints if 1 <= int(c) <= m]
    if not cps:
        raise PreconditionError("no checkpoint inside the orbit length")
    avgs = [orbit.average(c) for c in cps]
    last = avgs[-1]
    decay = None
    pairs = [(c, abs(a - last)) for c, a in zip(cps[:-1], avgs[:-1]) if abs(a - last) > 0 and c >= 3]
    if len(pairs) >= 3:
        x = np.log([c for c, _ in pairs])
        y = np.log([d for _, d in pairs])
        decay = float(-np.polyfit(x, y, 1)[0])
    conv = None
    if orbit.normalization == "half":
        conv = last
    elif orbit.normalization == "unit":
        conv = last + math.log(UNIT_TO_R2)
    return BirkhoffEstimate(tuple(cps), tuple(avgs), last, conv, decay)


# ---------------------------------------------------------------------------
# level-set grids


@dataclass(frozen=True)
class GridPoint:
    re: float
    im: float
    log_abs_u: float
    arg_u: float
    error: float
    ok: bool


def _grid_chunk(lams: np.ndarray, n: int) -> np.ndarray:
    u = np.ones_like(lams)
    p = np.ones_like(lams)
    for _ in range(n):
        u = u - 0.5 * p * u * u
        p = p * lams
    return u


def grid_emit(rmin: float, rmax: float, res: int, tol: float = 1e-10, max_steps: int = 20000,
              workers: int = 1) -> list[GridPoint]:
    """Polar grid |lambda| in [rmin, rmax] x arg in [0, 2 pi), res x res points.

    Each point gets the truncation bound of its iteration; points whose bound
    exceeds ``tol`` (near the unit circle) are kept with ``ok = False``.
    """
    if not 0 <= rmin <= rmax < 1:
        raise PreconditionError("need 0 <= rmin <= rmax < 1")
    if res < 1:
        raise PreconditionError("res must be positive")
    radii = np.linspace(rmin, rmax, res) if res > 1 else np.array([rmin])
    thetas = np.arange(res) * (2 * math.pi / res)
    n = min(steps_for(float(rmax), tol), max_steps)
    rows = [r * np.exp(1j * thetas) for r in radii]

    def run(row):
        return _grid_chunk(row, n)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            us = list(ex.map(run, rows))
    else:
        us = [run(row) for row in rows]
    out = []
    for r, row, urow in zip(radii, rows, us):
        err = truncation_bound(float(r), n)
        for lam, u in zip(row, urow):
            lam = complex(lam)
            out.append(GridPoint(lam.real, lam.imag, math.log(abs(u)), cmath.phase(u), err, err <= tol))
    return out
