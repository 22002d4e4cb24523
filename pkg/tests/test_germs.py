import math
import random
from fractions import Fraction

import gmpy2
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv import series as ser
from smalldiv.errors import InvariantViolation, PreconditionError
from smalldiv.germs import (
    cremer_series,
    linearize,
    make_germ,
    quadratic_germ,
    radius_estimate,
    residual_check,
    rotation_germ,
)
from smalldiv.majorants import koenigs_bound_check, s_majorant, sigma_majorant
from smalldiv.yoccoz import u_value

F = Fraction


# ---------------------------------------------------------------------------
# first coefficients, transcribed by hand


def test_h2_h3_closed_forms():
    lam, f2, f3 = F(1, 3), F(2), F(-1, 5)
    h = linearize(make_germ(lam, [f2, f3]), 3).h
    assert h[2] == f2 / (lam**2 - lam)
    assert h[3] == (f3 + 2 * f2**2 / (lam**2 - lam)) / (lam**3 - lam)


def test_h2_gaussian_multiplier():
    germ = make_germ((F(1, 3), F(1, 4)), [(F(2), F(1))])
    h2 = linearize(germ, 2).h[2]
    lam = complex(1 / 3, 1 / 4)
    assert abs(complex(h2) - complex(2, 1) / (lam**2 - lam)) < 1e-15


def test_rotation_linearizes_to_identity():
    lin = linearize(rotation_germ(F(1, 2), 12), 12)
    assert list(lin.h) == [0, 1] + [0] * 11
    lin = linearize(rotation_germ("circle:golden", 40), 40)
    assert all(abs(c) == 0 for c in lin.h[2:])


def test_residual_check_catches_a_wrong_series():
    germ = make_germ(F(1, 3), [F(2)])
    h = list(linearize(germ, 6).h)
    assert residual_check(germ, h, 6) == 0.0
    h[4] += F(1, 10**9)
    with pytest.raises(InvariantViolation):
        residual_check(germ, h, 6)


def test_engines_agree_numerically():
    rng = random.Random(5)
    coeffs = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(40)]
    germ = make_germ("circle:golden", coeffs, exact=False)
    a = linearize(germ, 60, method="recurrence").h
    b = linearize(germ, 60, method="newton").h
    for x, y in zip(a[1:], b[1:]):
        assert abs(x - y) <= 1e-30 * max(1, abs(x))


def test_exact_and_numeric_backends_agree():
    germ = make_germ(F(2, 5), [F(1, 2), F(-3), F(1, 7)])
    ex = linearize(germ, 25).h
    nu = linearize(germ.to_numeric(), 25).h
    for x, y in zip(ex[1:], nu[1:]):
        assert abs(gmpy2.mpc(float(x)) - y) <= 1e-12 * max(1.0, abs(float(x)))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(-3, 3, max_denominator=20), min_size=1, max_size=5),
       st.fractions(F(1, 10), F(9, 10), max_denominator=30))
def test_conjugacy_identity_exact(coeffs, lam):
    # f o h = h o R_lambda through the computed order, independently recomposed
    N = 8
    germ = make_germ(lam, coeffs)
    h = list(linearize(germ, N).h)
    lhs = ser.compose(germ.series(N), h, N)
    rhs = [h[n] * lam**n for n in range(N + 1)]
    assert lhs == rhs


# ---------------------------------------------------------------------------
# majorant sequences


def _s_oracle(N):
    """Fixed-point iteration of s = z + sum_{m>=2} m s^m on truncated series."""
    s = [F(0)] * (N + 1)
    s[1] = F(1)
    for _ in range(N):
        total = [F(0)] * (N + 1)
        total[1] = F(1)
        power = s[:]
        for m in range(2, N + 1):
            power = ser.mul(power, s, N)
            total = [t + m * p for t, p in zip(total, power)]
        s = total
    return [int(c) for c in s]


def test_sigma_first_values():
    s = sigma_majorant(10)
    assert s[1:4] == [1, 1, 3]
    assert s == sigma_majorant(10, method="definition")


def test_s_first_values():
    s = s_majorant(12)
    assert s[1:4] == [1, 2, 11]
    assert s == _s_oracle(12)
    assert s == s_majorant(12, method="definition")


def test_sigma_growth_constant():
    rho = 3 - 2 * math.sqrt(2)
    s = sigma_majorant(300)
    scaled = [s[n] * rho ** (n - 1) for n in range(1, 301)]
    c3 = max(scaled)
    # fitted constant attained early, then n^{-3/2} decay
    assert scaled.index(c3) < 5 and scaled[-1] < c3 / 100


@settings(max_examples=10, deadline=None)
@given(st.integers(2, 25))
def test_fast_and_definition_agree(N):
    assert sigma_majorant(N) == sigma_majorant(N, method="definition")
    assert s_majorant(N) == s_majorant(N, method="definition")


def test_koenigs_bounds():
    germ = make_germ(F(1, 2), [F(-1, 4)] + [F(0)] * 3, exact=False)
    assert koenigs_bound_check(germ, 200).holds
    germ = make_germ(F(2), [F(-1)] + [F(0)] * 3, exact=False)
    assert koenigs_bound_check(germ, 200).holds
    assert koenigs_bound_check(rotation_germ(F(1, 2), 10), 10).holds


def test_koenigs_rejects_circle():
    with pytest.raises(PreconditionError):
        koenigs_bound_check(rotation_germ("circle:golden", 5), 5)


# ---------------------------------------------------------------------------
# Cremer construction


def test_cremer_first_term_and_lower_bound():
    cs = cremer_series("quot:0;1,1,1000,(1)", 80)
    assert cs.germ.coeff(2) == 1
    # n = 2 is an equality: h_2 = 1/(lambda^2 - lambda)
    assert abs(cs.abs_h(2) * cs.divisors[2] - 1) < 1e-60
    for n in range(2, 81):
        assert abs(abs(complex(cs.germ.coeff(n))) - 1) < 1e-14
    assert cs.lower_bound_failures() == []


def test_cremer_needs_irrational():
    with pytest.raises(PreconditionError):
        cremer_series("root:1/3", 10)


# ---------------------------------------------------------------------------
# radius estimates


def test_radius_of_rotation_is_infinite():
    est = radius_estimate(linearize(rotation_germ("circle:golden", 40), 40))
    assert est.degenerate and math.isinf(est.hadamard)


def test_radius_of_geometric_series():
    est = radius_estimate([F(0)] + [F(1, 2**n) for n in range(1, 201)])
    assert abs(est.hadamard - 2.0) < 0.02


def test_radius_half_against_u():
    germ = quadratic_germ(F(1, 2), N=400, exact=False)
    est = linearize(germ, 400).radius_estimate
    target = abs(u_value(0.5)[0])
    # the log-corrected fit absorbs the n^{-3/2} prefactor
    assert abs(est.corrected_radius / target - 1) < 0.02


@pytest.mark.parametrize("alpha", ["golden", "silver", "e", "quot:0;1,1,40,(1)"])
def test_siegel_brjuno_majorant(alpha):
    from smalldiv.contfrac import table_covering
    from smalldiv.davie import build_davie
    from smalldiv.majorants import siegel_brjuno_check

    N = 120
    rng = random.Random(alpha)
    # coefficients respecting |f_n| <= n
    coeffs = [complex(*(rng.uniform(-1, 1) for _ in range(2))) * n / 1.5 for n in range(2, N + 1)]
    germ = make_germ(f"circle:{alpha}", coeffs, exact=False)
    lin = linearize(germ, N)
    dt = build_davie(table_covering(alpha, N), N - 1, check=False)
    assert siegel_brjuno_check(lin, dt, N).holds
