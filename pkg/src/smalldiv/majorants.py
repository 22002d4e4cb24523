"""Majorant sequences and the bound checks built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .errors import InvariantViolation, PreconditionError
from .germs import GermSeries, linearize


def _power_table_sum(N: int, weight) -> list[int]:
    """x_1 = 1, x_n = sum_{j=2}^n weight(j) [x^j]_n, by a direct power table."""
    x = [0] * (N + 1)
    if N >= 1:
        x[1] = 1
    P = [[0] * (N + 1) for _ in range(N + 1)]  # P[j][n] = [x^j]_n
    if N >= 1:
        P[1][1] = 1
    for n in range(2, N + 1):
        for j in range(2, n + 1):
            P[j][n] = sum(x[i] * P[j - 1][n - i] for i in range(1, n - j + 2))
        x[n] = sum(weight(j) * P[j][n] for j in range(2, n + 1))
        P[1][n] = x[n]
    return x


def sigma_majorant(N: int, method: str = "fast") -> list[int]:
    """sigma_1..sigma_N (returned with a leading 0 so that s[n] is sigma_n).

    ``fast`` uses 2 sigma^2 - (1 + z) sigma + z = 0, i.e.
    sigma_n = 2 sum_{i=1}^{n-1} sigma_i sigma_{n-i} - sigma_{n-1};
    ``definition`` sums all compositions directly.
    """
    if N < 1:
        raise PreconditionError("N must be >= 1")
    if method == "definition":
        return _power_table_sum(N, lambda j: 1)
    s = [0] * (N + 1)
    s[1] = 1
    for n in range(2, N + 1):
        s[n] = 2 * sum(s[i] * s[n - i] for i in range(1, n)) - s[n - 1]
    return s


def s_majorant(N: int, method: str = "fast") -> list[int]:
    """s_1..s_N with s = z + sum_{m>=2} m s^m (leading 0 included).

    ``fast`` uses the polynomial identity t - 4t^2 + 2t^3 - z + 2zt - zt^2 = 0
    equivalent to s = z + s^2 (2 - s)/(1 - s)^2.
    """
    if N < 1:
        raise PreconditionError("N must be >= 1")
    if method == "definition":
        return _power_table_sum(N, lambda j: j)
    s = [0] * (N + 1)
    s[1] = 1
    sq = [0] * (N + 1)  # coefficients of s^2
    cu = [0] * (N + 1)  # coefficients of s^3
    for n in range(2, N + 1):
        # s^2 and s^3 at order n use s_1..s_{n-1} only
        sq[n] = sum(s[i] * s[n - i] for i in range(1, n))
        cu[n] = sum(s[i] * sq[n - i] for i in range(1, n - 1))
        s[n] = 4 * sq[n] - 2 * cu[n] - 2 * s[n - 1] + sq[n - 1]
    return s


@dataclass(frozen=True)
class MajorantLedger:
    sigma: tuple
    s: tuple
    bound_log: tuple | None = None  # log s_n + K(n-1), index n


def majorant_ledger(N: int, davie=None) -> MajorantLedger:
    sig = sigma_majorant(N)
    s = s_majorant(N)
    bl = None
    if davie is not None:
        bl = tuple([float("nan")] + [math.log(s[n]) + davie.K_float(n - 1) for n in range(1, N + 1)])
    return MajorantLedger(tuple(sig), tuple(s), bl)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    holds: bool
    checked: int
    first_violation: int | None
    worst_margin: float  # max over n of log|h_n| - log(bound_n); <= 0 when holding
    constants: dict


def _abs_log(c) -> float | None:
    a = abs(c)
    if a == 0:
        return None
    return float(gmpy2.log(mpfr(a) if not isinstance(a, mpfr) else a))


def koenigs_bound_check(germ: GermSeries, N: int, r=Fraction(1, 2), strict: bool = True) -> BoundReport:
    """Check |h_n| <= (c_1 c_2 / r)^{n-1} sigma_n for n <= N.

    c_1 = max(1, max_j |f_j| r^{j-1}) and c_2 = max(1, 1/(|lambda| | 1 - |lambda| |)),
    the latter bounding sup_n |lambda^n - lambda|^{-1} from |lambda| alone.
    """
    r = Fraction(r)
    if not 0 < r < 1:
        raise PreconditionError("r must lie in (0, 1)")
    num = germ if not germ.exact else germ.to_numeric()
    mod = float(abs(num.lam))
    if mod == 0 or abs(mod - 1) < 1e-15:
        raise PreconditionError("Koenigs bound needs 0 < |lambda| != 1")
    c1 = 1.0
    for n in range(2, germ.order + 1):
        c1 = max(c1, float(abs(num.coeff(n))) * float(r) ** (n - 1))
    c2 = max(1.0, 1.0 / (mod * abs(1.0 - mod)))
    lin = linearize(num, N)
    sig = sigma_majorant(N)
    base = math.log(c1 * c2 / float(r))
    worst, first = -math.inf, None
    for n in range(1, N + 1):
        lh = _abs_log(lin.h[n])
        if lh is None:
            continue
        margin = lh - ((n - 1) * base + math.log(sig[n]))
        worst = max(worst, margin)
        if margin > 1e-12 and first is None:
            first = n
    rep = BoundReport(first is None, N, first, worst, {"c1": c1, "c2": c2, "r": float(r)})
    if strict and first is not None:
        raise InvariantViolation(f"Koenigs majorant bound fails at n = {first}")
    return rep


def siegel_brjuno_check(h, davie, N: int | None = None, strict: bool = False) -> BoundReport:
    """Check |h_n| <= s_n exp(K(n-1)) for n <= N (germs with |f_n| <= n)."""
    coeffs = h.h if hasattr(h, "h") else h
    N = len(coeffs) - 1 if N is None else N
    if davie.N < N - 1:
        raise PreconditionError(f"Davie table covers n <= {davie.N}, need {N - 1}")
    s = s_majorant(N)
    worst, first = -math.inf, None
    for n in range(1, N + 1):
        lh = _abs_log(coeffs[n])
        if lh is None:
            continue
        margin = lh - (math.log(s[n]) + davie.K_float(n - 1))
        worst = max(worst, margin)
        if margin > 1e-9 and first is None:
            first = n
    rep = BoundReport(first is None, N, first, worst, {})
    if strict and first is not None:
        raise InvariantViolation(f"Siegel-Brjuno majorant fails at n = {first}")
    return rep
