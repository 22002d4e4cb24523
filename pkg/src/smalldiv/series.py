"""Truncated power series as coefficient lists ``c[0..N]``.

The helpers are agnostic of the coefficient type: Fractions, cyclotomic
elements and gmpy2 ``mpc`` numbers all work, as long as ``zero`` is given
where the type cannot be inferred.
"""

from __future__ import annotations

from typing import Sequence


def _zero_like(seq):
    for c in seq:
        return c * 0
    return 0


def pad(a: Sequence, N: int, zero=None) -> list:
    zero = _zero_like(a) if zero is None else zero
    out = list(a[: N + 1])
    out.extend([zero] * (N + 1 - len(out)))
    return out


def add(a, b, N: int) -> list:
    a, b = pad(a, N), pad(b, N)
    return [x + y for x, y in zip(a, b)]


def sub(a, b, N: int) -> list:
    a, b = pad(a, N), pad(b, N)
    return [x - y for x, y in zip(a, b)]


def scale(a, c) -> list:
    return [c * x for x in a]


def mul(a, b, N: int) -> list:
    """(a * b) mod z^{N+1}."""
    zero = _zero_like(a)
    out = [zero] * (N + 1)
    nz_b = [(j, y) for j, y in enumerate(b[: N + 1]) if not _is_zero(y)]
    for i, x in enumerate(a[: N + 1]):
        if _is_zero(x):
            continue
        for j, y in nz_b:
            if i + j > N:
                break
            out[i + j] = out[i + j] + x * y
    return out


def compose(f, g, N: int) -> list:
    """(f o g) mod z^{N+1}; requires g[0] == 0."""
    if g and not _is_zero(g[0]):
        raise ValueError("inner series must vanish at 0")
    f = pad(f, N)
    zero = _zero_like(f)
    out = [zero] * (N + 1)
    # Horner from the top, skipping a trailing run of zeros
    top = N
    while top > 0 and _is_zero(f[top]):
        top -= 1
    out[0] = f[top]
    for k in range(top - 1, -1, -1):
        out = mul(out, g, N)
        out[0] = out[0] + f[k]
    return out


def dilate(a, lam) -> list:
    """a(lam * z)."""
    out = list(a[:1])
    p = lam
    for c in a[1:]:
        out.append(c * p)
        p = p * lam
    return out


def iterate(f, q: int, N: int) -> list:
    """f composed with itself q times (q >= 0), mod z^{N+1}."""
    one = _one_like(f)
    zero = one * 0
    out = [zero, one] + [zero] * (N - 1)
    for _ in range(q):
        out = compose(f, out, N)
    return out


def reversion(g, N: int) -> list:
    """Compositional inverse of g = z + ..., mod z^{N+1}."""
    g = pad(g, N)
    one = g[1]
    if not _is_one(one):
        raise ValueError("reversion implemented for tangent-to-identity series")
    zero = one * 0
    h = [zero, one] + [zero] * (N - 1)
    for n in range(2, N + 1):
        # coefficient n of g(h) with h_n unknown contributes h_n; solve for 0
        c = compose(g, h[: n] + [zero], n)[n]
        h[n] = zero - c
    return h


def _is_zero(x) -> bool:
    iz = getattr(x, "is_zero", None)
    if iz is not None and callable(iz):
        return iz()
    return x == 0


def _is_one(x) -> bool:
    return x == 1


def _one_like(seq):
    for c in seq:
        return c * 0 + 1
    return 1
