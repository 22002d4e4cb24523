import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv.errors import OrbitEscaped, PreconditionError, ResonantDivisor, ToleranceUnreachable
from smalldiv.yoccoz import (
    birkhoff_radius,
    conjugated_rotation,
    critical_orbit,
    grid_emit,
    majorant_growth,
    quadratic_linearization,
    radial_limit_estimate,
    truncation_bound,
    u_iterate,
    u_series,
    u_value,
)

F = Fraction


def test_u_at_zero():
    u, err = u_value(0)
    assert u == 0.5 and err == 0


@pytest.mark.parametrize("lam", [0.3, -0.7 + 0.2j, 0.9j])
def test_first_iterates(lam):
    assert u_iterate(lam, 1) == 0.5
    assert abs(u_iterate(lam, 2) - (0.5 - lam / 8)) < 1e-15


def test_series_leading_coefficients():
    c = u_series(11)
    assert c[:8] == [F(1, 2), F(-1, 8), F(-1, 8), F(-1, 16), F(-9, 128), F(-1, 128), F(-7, 128), F(3, 256)]
    assert c[11] == F(559, 32768)


def _cauchy_coefficients(n_max, radius=0.5, samples=256):
    """Maclaurin coefficients of u by a trapezoid Cauchy integral at 40 digits."""
    with mpmath.workdps(40):
        out = []
        pts = [radius * mpmath.expjpi(2 * mpmath.mpf(j) / samples) for j in range(samples)]
        vals = []
        for lam in pts:
            u, p = mpmath.mpc(1), mpmath.mpc(1)
            for _ in range(400):
                u -= p * u * u / 2
                p *= lam
            vals.append(u)
        for n in range(n_max + 1):
            s = sum(v * mpmath.expjpi(-2 * mpmath.mpf(n * j) / samples) for j, v in enumerate(vals))
            out.append(s / samples / radius**n)
        return out


def test_series_against_cauchy_integral():
    exact = u_series(14)
    numeric = _cauchy_coefficients(14)
    for c, z in zip(exact, numeric):
        assert abs(float(c) - complex(z)) < 1e-20
    # the tenth coefficient is negative
    assert exact[10] == F(-25, 2048)


def test_series_is_dyadic_and_sums_to_u():
    c = u_series(60)
    assert all(x.denominator & (x.denominator - 1) == 0 for x in c)
    lam = 0.2 + 0.1j
    total = sum(float(x) * lam**n for n, x in enumerate(c))
    assert abs(total - u_value(lam)[0]) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.95), st.floats(0, 2 * math.pi))
def test_bounds_inside_disk(r, theta):
    lam = cmath.rect(r, theta)
    n = 40
    un = u_iterate(lam, n)
    assert abs(un) <= 2 * (1 - r) ** -2 + 1e-12
    u, err = u_value(lam, tol=1e-8)
    assert abs(u - un) <= truncation_bound(r, n) + err + 1e-12


def test_tolerance_unreachable():
    with pytest.raises(ToleranceUnreachable):
        u_value(0.9999999, tol=1e-14, max_steps=1000)


def test_h_recurrence_start():
    lam = complex(0.3, 0.4)
    ql = quadratic_linearization(lam, 5)
    assert ql.H[1] == 1
    assert abs(complex(ql.H[2]) - 1 / (1 - lam)) < 1e-15
    assert abs(complex(ql.H[3]) - 2 / ((1 - lam) * (1 - lam**2))) < 1e-15


def test_majorant_increasing_on_circle():
    ql = quadratic_linearization("circle:golden", 150)
    h = [float(x) for x in ql.h]
    # h_{n+1} >= 2 h_1 h_n / |1 - lambda^n| >= h_n once n >= 2; h_2 = 1/|1 - lambda| may dip below h_1
    assert abs(h[2] - 1 / abs(1 - complex(ql.lam.numeric(64)))) < 1e-14
    assert all(b > a for a, b in zip(h[2:], h[3:]))
    assert all(abs(H) <= x * (1 + 1e-30) for H, x in zip(ql.H[1:], ql.h[1:]))
    growth = majorant_growth(ql)
    assert all(b >= a for a, b in zip(growth[1:], growth[2:]))


def test_resonant_divisor():
    with pytest.raises(ResonantDivisor):
        quadratic_linearization("root:1/3", 6)


def test_radius_from_linearization_inside_disk():
    ql = quadratic_linearization(0.5, 300)
    u = abs(u_value(0.5)[0])
    # unit form converted to the |u| scale
    assert abs(ql.radius().corrected_radius * 2 / u - 1) < 0.02


def test_radial_values_bounded():
    rl = radial_limit_estimate("golden", [0.9, 0.95, 0.98, 0.99])
    assert all(v <= 2 for v in rl.values)
    assert all(e <= 1e-9 for e in rl.errors)
    assert rl.within_a_priori


def test_radial_preconditions():
    with pytest.raises(PreconditionError):
        radial_limit_estimate("golden", [0.9, 0.8])
    with pytest.raises(ToleranceUnreachable):
        radial_limit_estimate("golden", [0.5, 0.99], N=100)


def test_birkhoff_exact_on_rotation():
    lam = cmath.exp(2j * math.pi * (math.sqrt(5) - 1) / 2)
    seed = 0.3 * cmath.exp(0.7j)
    orb = critical_orbit(lam, 500, seed=seed, f=lambda z: lam * z)
    est = birkhoff_radius(orb)
    assert abs(est.log_r - math.log(0.3)) < 1e-12


def test_birkhoff_conjugated_rotation():
    # the orbit of h(w0) stays on h(|w| = |w0|); log|z| averages to log|w0| - avg log|1-w|
    lam = cmath.exp(2j * math.pi * (math.sqrt(5) - 1) / 2)
    f, h = conjugated_rotation(lam)
    w0 = 0.4
    orb = critical_orbit(lam, 4000, seed=h(w0), f=f)
    est = birkhoff_radius(orb, alpha="golden")
    # mean of log|1 - w| over |w| = 0.4 is 0, so the average tends to log 0.4
    assert abs(est.log_r - math.log(w0)) < 1e-3
    assert est.checkpoints[-1] <= 4000 and len(est.averages) == len(est.checkpoints)


def test_orbit_escapes_outside_disk():
    with pytest.raises(OrbitEscaped):
        critical_orbit(1.5, 100, seed=6.0)


def test_grid_symmetries():
    pts = grid_emit(0.0, 0.6, 8)
    assert len(pts) == 64
    origin = [p for p in pts if p.re == 0 and p.im == 0]
    assert origin and all(abs(p.log_abs_u - math.log(0.5)) < 1e-12 for p in origin)
    by_angle = {}
    for p in pts:
        by_angle[(round(p.re, 12), round(p.im, 12))] = p
    for (re, im), p in by_angle.items():
        twin = by_angle.get((re, round(-im, 12) + 0.0))
        if twin is not None:
            # u has real coefficients: u(conj lambda) = conj u(lambda)
            assert abs(twin.log_abs_u - p.log_abs_u) < 1e-12
            assert abs(twin.arg_u + p.arg_u) < 1e-12 or abs(p.im) < 1e-15
        if abs(im) < 1e-15:
            assert abs(p.arg_u) < 1e-12


def test_grid_flags_points_near_circle():
    pts = grid_emit(0.5, 0.999, 3, tol=1e-10, max_steps=500)
    assert not all(p.ok for p in pts)
    assert all(p.ok for p in pts if math.hypot(p.re, p.im) < 0.51)


def test_grid_threads_match():
    a = grid_emit(0.1, 0.7, 6, workers=1)
    b = grid_emit(0.1, 0.7, 6, workers=3)
    assert a == b


def test_u_iterate_precision_backend():
    lo = u_iterate(0.5 + 0.3j, 200)
    hi = u_iterate(0.5 + 0.3j, 200, prec=200)
    assert abs(lo - complex(hi)) < 1e-13
    assert np.isfinite(lo.real)
