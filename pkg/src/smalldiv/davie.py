"""Davie's arithmetic functions h_k, g_k and K(n).

For a rotation number alpha with convergent denominators q_k:

    A_k   = {n >= 0 : ||n alpha|| <= 1/(8 q_k)}
    E_k   = max(q_k, q_{k+1}/4),   eta_k = q_k / E_k
    A_k*  = A_k plus every j with j_1 < j < j_2, j_1, j_2 in A_k,
            j_2 - j_1 < E_k and q_k | j - j_1
    m_n   = max{j <= n : j in A_k*}
    l(n)  = max((1 + eta_k) n/q_k - 2, (m_n eta_k + n)/q_k - 1)
    h_k(n) = (m_n + eta_k n)/q_k - 1   if m_n + q_k in A_k*, else l(n)
    g_k(n) = max(h_k(n), floor(n/q_k))
    K(n)  = n log 2 + sum_{k <= k(n)} g_k(n) log(2 q_{k+1})

with q_{k(n)} <= n < q_{k(n)+1}.  All of h_k and g_k are rationals with
denominator q_k * max(4 q_k, q_{k+1}); they are stored as scaled integers so
that every structural property is checked exactly.  Only K itself involves
logarithms; those are evaluated in interval arithmetic when certified values
are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from mpmath import iv

from ._numerics import ivprec
from .contfrac import ContinuedFractionTable, DistanceOracle, table_covering
from .errors import DepthInsufficient, InvariantViolation, PreconditionError



def universal_c0(terms: int = 200) -> float:
    """An explicit c_0 valid for every alpha.

    K(n)/n - sum log(q_{k+1})/q_k is at most
    log 2 (1 + sum (1/q_k + 4/q_{k+1})) + 4 sum log(q_{k+1})/q_{k+1};
    q_k >= F_k (Fibonacci, F_0 = F_1 = 1) bounds both sums, using
    max log(x)/x = log(3)/3 over integers for the first few terms.
    """
    F = [1, 1]
    while len(F) < terms + 2:
        F.append(F[-1] + F[-2])
    s1 = sum(1 / F[k] + 4 / F[k + 1] for k in range(terms))
    s2 = sum(math.log(3) / 3 if F[k + 1] <= 3 else math.log(F[k + 1]) / F[k + 1] for k in range(terms))
    return math.log(2) * (1 + s1) + 4 * s2


DAVIE_C0 = universal_c0()  # about 18.98


def _dist_iv(dist: DistanceOracle, n: int, prec: int):
    lo, hi = dist.scaled(n)
    with ivprec(prec):
        return iv.mpf([iv.mpf(lo) / dist.one, iv.mpf(hi) / dist.one])


def _table_for(table, N: int) -> ContinuedFractionTable:
    if not isinstance(table, ContinuedFractionTable):
        table = table_covering(table, N)
    return table


def k_of(q, n: int) -> int:
    """Largest k with q_k <= n (-1 for n = 0)."""
    if n <= 0:
        return -1
    k = -1
    for i, qi in enumerate(q):
        if qi <= n:
            k = i
        else:
            break
    return k


@dataclass
class DavieLayer:
    """Everything attached to one index k.  h and g are scaled by ``den``."""

    k: int
    q: int
    q_next: int
    E: Fraction
    eta: Fraction
    den: int
    A: np.ndarray  # sorted elements of A_k in the scanned window
    A_star: np.ndarray  # boolean mask over 0..N + q_k
    m: np.ndarray  # m_n for n = 0..N
    l: np.ndarray  # scaled l(n)
    h: np.ndarray  # scaled h_k(n)
    g: np.ndarray  # scaled g_k(n)
    case1: np.ndarray  # True where m_n + q_k lies in A_k*

    def value(self, arr, n) -> Fraction:
        return Fraction(int(arr[n]), self.den)


@dataclass
class DavieTable:
    alpha: ContinuedFractionTable
    N: int
    k_max: int
    layers: list = field(repr=False)
    K: np.ndarray = field(repr=False)  # float K(0..N)
    k_of_n: np.ndarray = field(repr=False)
    report: dict = field(default_factory=dict, repr=False)

    @property
    def q(self):
        return self.alpha.q

    def layer(self, k: int) -> DavieLayer:
        if not 0 <= k <= self.k_max:
            raise PreconditionError(f"k = {k} outside 0..{self.k_max}")
        return self.layers[k]

    def A_k(self, k):
        return tuple(int(a) for a in self.layer(k).A if a <= self.N)

    def A_k_star(self, k):
        return tuple(int(j) for j in np.flatnonzero(self.layer(k).A_star) if j <= self.N)

    def E_k(self, k):
        return self.layer(k).E

    def eta_k(self, k):
        return self.layer(k).eta

    def m_n(self, k, n):
        return int(self.layer(k).m[n])

    def l_k(self, k, n) -> Fraction:
        L = self.layer(k)
        return L.value(L.l, n)

    def h_k(self, k, n) -> Fraction:
        L = self.layer(k)
        return L.value(L.h, n)

    def g_k(self, k, n) -> Fraction:
        L = self.layer(k)
        return L.value(L.g, n)

    def K_float(self, n: int) -> float:
        if not 0 <= n <= self.N:
            raise PreconditionError(f"n = {n} outside 0..{self.N}")
        return float(self.K[n])

    def K_iv(self, n: int, prec: int = 80):
        """Certified enclosure of K(n)."""
        if not 0 <= n <= self.N:
            raise PreconditionError(f"n = {n} outside 0..{self.N}")
        with ivprec(prec):
            total = n * iv.log(2)
            for k in range(int(self.k_of_n[n]) + 1):
                L = self.layers[k]
                gk = int(L.g[n])
                if gk:
                    total += iv.mpf(gk) / L.den * iv.log(2 * L.q_next)
            return total

    def K_step_iv(self, n: int, prec: int = 80):
        """Certified enclosure of K(n) - K(n - 1), summed termwise."""
        with ivprec(prec):
            total = iv.log(2)
            kn, kp = int(self.k_of_n[n]), int(self.k_of_n[n - 1])
            for k in range(kn + 1):
                L = self.layers[k]
                c = int(L.g[n]) - (int(L.g[n - 1]) if k <= kp else 0)
                if c:
                    total += iv.mpf(c) / L.den * iv.log(2 * L.q_next)
            return total


def _a_k(dist: DistanceOracle, q: int, q_next: int, S: int, keep_upto: int) -> np.ndarray:
    """Sorted elements of A_k in [0, S].

    Below q_{k+1}/4 every element is a multiple of q_k (the trichotomy lemma),
    and there ||t q_k alpha|| = t ||q_k alpha|| grows with t, so those are
    enumerated directly; only the largest one beyond ``keep_upto`` is kept.
    The rest of the window is scanned.
    """
    den = 8 * q
    cut = -(-q_next // 4)  # ceil(q_{k+1}/4)
    t_top = (min(cut, S + 1) - 1) // q
    lo, hi = 0, t_top  # largest t <= t_top with ||t q alpha|| <= 1/den
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if dist.below(mid * q, den):
            lo = mid
        else:
            hi = mid - 1
    elems = [t * q for t in range(min(lo, keep_upto // q) + 1)]
    if lo:
        elems.append(lo * q)
    for n in range(max(cut, 1), S + 1):
        if dist.below(n, den):
            elems.append(n)
    return np.array(sorted(set(elems)), dtype=object if S >= 2**62 else np.int64)


def _a_star(A: np.ndarray, q: int, E: Fraction, upto: int) -> np.ndarray:
    mask = np.zeros(upto + 1, dtype=bool)
    for a in A:
        if a <= upto:
            mask[int(a)] = True
    Al = [int(a) for a in A]
    for i, j1 in enumerate(Al):
        if j1 >= upto:
            break
        # largest j2 in A_k with j2 < j1 + E_k
        lo, hi = i + 1, len(Al)
        while lo < hi:
            mid = (lo + hi) // 2
            if Al[mid] < j1 + E:
                lo = mid + 1
            else:
                hi = mid
        if lo - 1 <= i:
            continue
        j2 = Al[lo - 1]
        stop = min(j2, upto + 1)
        mask[j1 + q : stop : q] = True
    return mask


def _layer(k: int, table: ContinuedFractionTable, dist: DistanceOracle, N: int) -> DavieLayer:
    q, qn = table.q[k], table.q[k + 1]
    E = max(Fraction(q), Fraction(qn, 4))
    F = max(4 * q, qn)  # 4 E_k
    eta = Fraction(4 * q, F)
    den = q * F
    S = N + q + -(-F // 4)
    upto = N + q
    A = _a_k(dist, q, qn, S, upto)
    star = _a_star(A, q, E, upto)
    idx = np.arange(upto + 1, dtype=np.int64)
    m = np.maximum.accumulate(np.where(star, idx, 0))[: N + 1]
    n = idx[: N + 1]
    use_obj = den * (N + q) * 8 >= 2**62
    if use_obj:
        m = m.astype(object)
        n = n.astype(object)
    # scaled quantities: value * q_k * F
    first = n * F + 4 * n * q - 2 * den  # (1 + eta) n/q - 2
    second = 4 * m * q + n * F - den  # (m eta + n)/q - 1
    lval = np.maximum(first, second)
    case1 = star[(m + q).astype(np.int64)]
    hval = np.where(case1, m * F + 4 * n * q - den, lval)
    floor = (n // q) * den
    gval = np.maximum(hval, floor)
    return DavieLayer(k, q, qn, E, eta, den, A, star, m, lval, hval, gval, case1)


def _check_layer(L: DavieLayer, N: int) -> list[str]:
    """Exact checks of the h_k / g_k properties on one layer."""
    bad = []
    q, den, F = L.q, L.den, L.den // L.q
    n = np.arange(N + 1, dtype=np.int64)
    if L.h.dtype == object:
        n = n.astype(object)
    upper = n * F + 4 * n * q  # (1 + eta) n / q, scaled
    h, g = L.h, L.g
    if np.any(h < upper - 2 * den) or np.any(h > upper - den):
        bad.append(f"k={L.k}: h_k outside [(1+eta)n/q - 2, (1+eta)n/q - 1]")
    star = L.A_star[1 : N + 1]
    dh = h[1:] - h[:-1]
    if np.any(dh[star] < den):
        bad.append(f"k={L.k}: h_k(n) < h_k(n-1) + 1 for some n in A_k*")
    if np.any(dh < 0):
        bad.append(f"k={L.k}: h_k decreases")
    if N >= q and np.any(h[q:] - h[:-q] < den):
        bad.append(f"k={L.k}: h_k(n + q_k) < h_k(n) + 1")
    if g[0] != 0:
        bad.append(f"k={L.k}: g_k(0) != 0")
    if np.any(g < 0):
        bad.append(f"k={L.k}: g_k negative")
    if np.any(g > upper):
        bad.append(f"k={L.k}: g_k(n) > (1+eta)n/q")
    for n1 in range(1, N // 2 + 1):
        # g(n1) + g(n2) <= g(n1 + n2) for n1 <= n2 <= N - n1
        if np.any(g[n1] + g[n1 : N - n1 + 1] > g[2 * n1 : N + 1]):
            bad.append(f"k={L.k}: g_k not superadditive at n1={n1}")
            break
    inA = np.zeros(N + 1, dtype=bool)
    for a in L.A:
        if 0 < a <= N:
            inA[int(a)] = True
    dg = g[1:] - g[:-1]
    if np.any(dg[inA[1:]] < den):
        bad.append(f"k={L.k}: g_k(n) < g_k(n-1) + 1 for some n in A_k")
    return bad


def build_davie(table, N: int, *, check: bool = True, strict: bool = True, prec: int = 80) -> DavieTable:
    """Davie's functions for 0 <= n <= N, 0 <= k <= k(N).

    With ``check`` every listed property is verified; ``strict`` turns a
    violation into InvariantViolation, otherwise it lands in ``report``.
    """
    table = _table_for(table, N)
    if N < 1:
        raise PreconditionError("N must be >= 1")
    if table.q[-1] <= N:
        raise DepthInsufficient(f"table reaches q_{table.depth} = {table.q[-1]} <= N = {N}; extend it")
    kN = k_of(table.q, N)
    span = max(table.q[kN + 1], 4) + 2 * N + table.q[kN]
    dist = DistanceOracle(table, span)
    layers = [_layer(k, table, dist, N) for k in range(kN + 1)]
    k_of_n = np.array([k_of(table.q, n) for n in range(N + 1)], dtype=np.int64)
    K = np.arange(N + 1, dtype=float) * math.log(2)
    for L in layers:
        w = math.log(2 * L.q_next) / L.den
        active = k_of_n >= L.k
        K += np.where(active, L.g.astype(float) * w, 0.0)
    dt = DavieTable(table, N, kN, layers, K, k_of_n)
    if check:
        dt.report = check_davie(dt, prec=prec)
        if strict and dt.report["violations"]:
            raise InvariantViolation("; ".join(dt.report["violations"][:5]))
    return dt


def check_davie(dt: DavieTable, prec: int = 80) -> dict:
    """Verify the h_k, g_k and K properties; returns a report dict."""
    N = dt.N
    bad = []
    for L in dt.layers:
        bad += _check_layer(L, N)
    if dt.K[0] != 0:
        bad.append("K(0) != 0")
    # K superadditivity: exact, termwise.  Each coefficient of log(2 q_{k+1})
    # in K(n1 + n2) - K(n1) - K(n2) is g_k(n1+n2) - [k<=k(n1)] g_k(n1) -
    # [k<=k(n2)] g_k(n2), nonnegative once g_k >= 0 and superadditive and
    # k(n) is nondecreasing, all checked exactly above.
    if np.any(np.diff(dt.k_of_n) < 0):
        bad.append("k(n) decreasing")
    # Floating cross-check of the same inequality.
    worst_b = -math.inf
    Kf = dt.K
    for n1 in range(1, N // 2 + 1):
        d = Kf[n1] + Kf[n1 : N - n1 + 1] - Kf[2 * n1 : N + 1]
        worst_b = max(worst_b, float(d.max() / max(1.0, Kf[N])))
    step = small_divisor_step_check(dt, dt.alpha, N, prec=prec)
    if step["violations"]:
        bad.append(f"-log|lambda^n - 1| > K(n) - K(n-1) at n = {step['violations'][:5]}")
    c0 = fitted_c0(dt)
    if c0 > DAVIE_C0:
        bad.append(f"K(n)/n exceeds the Brjuno sum by {c0:.4f} > {DAVIE_C0}")
    return {
        "N": N,
        "k_max": dt.k_max,
        "violations": bad,
        "superadditivity_float_slack": worst_b,
        "step_min_margin": step["min_margin"],
        "c0_fitted": c0,
        "c0_regression": DAVIE_C0,
    }


def fitted_c0(dt: DavieTable) -> float:
    """max_n K(n)/n - sum_{k <= k(n)} log(q_{k+1})/q_k over 1 <= n <= N."""
    q = dt.alpha.q
    partial = np.cumsum([math.log(q[k + 1]) / q[k] for k in range(dt.k_max + 1)])
    n = np.arange(1, dt.N + 1)
    br = partial[dt.k_of_n[1:]]
    return float(np.max(dt.K[1:] / n - br))


def k_function(dt: DavieTable, n: int, prec: int = 80):
    """Certified enclosure of K(n) (an mpmath interval)."""
    return dt.K_iv(n, prec)


def small_divisor_step_check(dt: DavieTable, table=None, N: int | None = None, prec: int = 80) -> dict:
    """Check -log|lambda^n - 1| <= K(n) - K(n - 1) for 1 <= n <= N.

    |lambda^n - 1| = 2 sin(pi ||n alpha||) is evaluated from a certified
    enclosure of ||n alpha||, the step of K termwise; both in interval
    arithmetic.
    """
    table = dt.alpha if table is None else table
    N = dt.N if N is None else N
    if N > dt.N:
        raise PreconditionError(f"N = {N} beyond the table (N = {dt.N})")
    dist = DistanceOracle(table, N)
    rows, viol, undecided = [], [], []
    min_margin = math.inf
    for n in range(1, N + 1):
        for _ in range(4):
            d = _dist_iv(dist, n, prec)
            with ivprec(prec):
                lhs = -iv.log(2 * iv.sin(iv.pi * d))
            rhs = dt.K_step_iv(n, prec)
            if lhs.b <= rhs.a or lhs.a > rhs.b:
                break
            prec *= 2
        if lhs.a > rhs.b:
            viol.append(n)
        elif not lhs.b <= rhs.a:
            undecided.append(n)
        margin = float(rhs.mid) - float(lhs.mid)
        min_margin = min(min_margin, margin)
        rows.append((n, float(dt.K[n]), float(rhs.mid), float(lhs.mid)))
    return {
        "checked": N,
        "violations": viol + undecided,
        "undecided": undecided,
        "min_margin": min_margin,
        "rows": rows,
    }


def lemma53_check(table, k: int, N: int) -> dict:
    """Exhaustive scan of 1 <= n <= N with ||n alpha|| <= 1/(4 q_k).

    Every such n must satisfy n >= q_k and either q_k | n or n >= q_{k+1}/4.
    """
    table = _table_for(table, N)
    if k + 1 > table.depth:
        raise DepthInsufficient(f"need q_{k + 1}; table depth is {table.depth}")
    q, qn = table.q[k], table.q[k + 1]
    dist = DistanceOracle(table, N)
    flagged, bad = [], []
    for n in range(1, N + 1):
        if dist.below(n, 4 * q):
            flagged.append(n)
            if n < q or (n % q and 4 * n < qn):
                bad.append(n)
    return {"k": k, "q_k": q, "q_k1": qn, "N": N, "flagged": flagged, "counterexamples": bad}
