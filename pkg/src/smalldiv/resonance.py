"""Germs with a root-of-unity multiplier: linearizability and normal forms.

Everything here is exact, in the cyclotomic field carrying the multiplier.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import series as ser
from .errors import InvariantViolation, OrderInsufficient, PreconditionError, QPeriodic
from .germs import GermSeries


def _check_root(germ: GermSeries, q: int):
    if not germ.exact:
        raise PreconditionError("root-of-unity analysis needs the exact backend")
    lam = germ.lam
    one = lam * 0 + 1
    if lam**q != one:
        raise PreconditionError(f"multiplier is not a q-th root of unity (q = {q})")
    for d in range(1, q):
        if q % d == 0 and lam**d == one:
            raise PreconditionError(f"multiplier is not primitive of order {q}")
    return lam


def _ident(zero, one, N):
    return [zero, one] + [zero] * (N - 1)


@dataclass(frozen=True)
class RootOfUnityResult:
    linearizable: bool
    h_inverse: tuple | None
    order: int


def root_of_unity_check(germ: GermSeries, q: int, N: int | None = None) -> RootOfUnityResult:
    """Is f^q = id through order N?  If so return k = (1/q) sum lambda^{-j} f^j,
    verified to satisfy k o f = lambda k through order N."""
    N = germ.order if N is None else N
    lam = _check_root(germ, q)
    f = germ.series(N)
    zero, one = germ.zero(), germ.one()
    it = _ident(zero, one, N)
    k = [zero] * (N + 1)
    lam_inv = one / lam
    w = one
    for j in range(q):
        k = ser.add(k, ser.scale(it, w), N)
        it = ser.compose(f, it, N)
        w = w * lam_inv
    if any(not ser._is_zero(a - b) for a, b in zip(it, _ident(zero, one, N))):
        return RootOfUnityResult(False, None, N)
    k = ser.scale(k, one / q)
    lhs = ser.compose(k, f, N)
    rhs = ser.scale(k, lam)
    if any(not ser._is_zero(a - b) for a, b in zip(lhs, rhs)):
        raise InvariantViolation("averaged series does not conjugate f to the rotation")
    return RootOfUnityResult(True, tuple(k), N)


@dataclass(frozen=True)
class NormalForm:
    n: int
    a: object
    b: object
    q: int
    conjugator: tuple  # Phi with Phi^{-1} o f o Phi = P_{n,a,b,lambda} + O(z^{N+1})
    order: int


def normal_form_polynomial(lam, q: int, n: int, a, b, N: int) -> list:
    """lambda z (1 + a z^{nq} + a^2 b z^{2nq}) truncated at order N."""
    zero = lam * 0
    P = [zero] * (N + 1)
    P[1] = lam
    if n * q + 1 <= N:
        P[n * q + 1] = lam * a
    if 2 * n * q + 1 <= N:
        P[2 * n * q + 1] = lam * a * a * b
    return P


def _conjugate(g, phi, N):
    """phi^{-1} o g o phi."""
    return ser.compose(ser.reversion(phi, N), ser.compose(g, phi, N), N)


def resonant_normal_form(germ: GermSeries, q: int, N: int | None = None) -> NormalForm:
    """Reduce f to lambda z (1 + a z^{nq} + a^2 b z^{2nq}) through order N.

    Orders are processed upwards.  A conjugation by z + beta z^{j'} changes
    the coefficient of z^j affinely in beta, so beta is read off from two
    trial conjugations (beta = 0 and 1).  Non-resonant j use j' = j; once the
    first resonant coefficient fixes n, resonant j = mq + 1 with m > n and
    m != 2n use j' = j - nq.
    """
    N = germ.order if N is None else N
    lam = _check_root(germ, q)
    zero, one = germ.zero(), germ.one()
    g = germ.series(N)
    Phi = _ident(zero, one, N)
    n = None
    cn = c2n = None
    for j in range(2, N + 1):
        jp = j
        if (j - 1) % q == 0:
            m = (j - 1) // q
            if n is None:
                if not ser._is_zero(g[j]):
                    n, cn = m, g[j]
                continue
            if m == 2 * n:
                c2n = g[j]
                continue
            # orders rise, so m > n here
            jp = j - n * q
        if ser._is_zero(g[j]):
            continue
        phi1 = _ident(zero, one, N)
        phi1[jp] = one
        g1 = _conjugate(g, phi1, N)
        slope = g1[j] - g[j]
        if ser._is_zero(slope):
            raise InvariantViolation(f"zero slope while normalizing order {j}")
        beta = (zero - g[j]) / slope
        phi = _ident(zero, one, N)
        phi[jp] = beta
        g = _conjugate(g, phi, N)
        Phi = ser.compose(Phi, phi, N)
        if not ser._is_zero(g[j]):
            raise InvariantViolation(f"order {j} not cleared")
    if n is None:
        raise QPeriodic(f"no resonant term through order {N}: f^{q} = id to this order")
    if N < 2 * n * q + 1:
        raise OrderInsufficient(f"order {N} < 2nq + 1 = {2 * n * q + 1}")
    if c2n is None:
        c2n = zero
    a = cn / lam
    b = c2n / (lam * a * a)
    P = normal_form_polynomial(lam, q, n, a, b, N)
    f = germ.series(N)
    lhs = ser.compose(f, Phi, N)
    rhs = ser.compose(Phi, P, N)
    if any(not ser._is_zero(x - y) for x, y in zip(lhs, rhs)):
        raise InvariantViolation("normal form residual f o Phi - Phi o P is nonzero")
    return NormalForm(n, a, b, q, tuple(Phi), N)
