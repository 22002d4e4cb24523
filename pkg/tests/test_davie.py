import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv.contfrac import dist_to_integers, expand_cf
from smalldiv.davie import (
    DAVIE_C0,
    build_davie,
    k_of,
    lemma53_check,
    small_divisor_step_check,
    universal_c0,
)
from smalldiv.errors import DepthInsufficient, PreconditionError

F = Fraction


def _hand_davie(spec, N, depth=20):
    """Straight transcription of the definitions with exact distances.

    Returns (g, K) with g[k][n] Fractions and K[n] floats.
    """
    t = expand_cf(spec, depth)
    q = t.q
    kN = k_of(q, N)
    window = N + 2 * q[kN + 1] + 10
    dist = [dist_to_integers(n, t) if n else F(0) for n in range(window + 1)]
    g = []
    for k in range(kN + 1):
        qk, qn = q[k], q[k + 1]
        E = max(F(qk), F(qn, 4))
        eta = qk / E
        A = [n for n in range(window + 1) if dist[n] <= F(1, 8 * qk)]
        star = set(A)
        for j1 in A:
            for j2 in A:
                if j1 < j2 and j2 - j1 < E:
                    star.update(j for j in range(j1 + 1, j2) if (j - j1) % qk == 0)
        row = []
        for n in range(N + 1):
            m = max(j for j in star if j <= n)
            ell = max((1 + eta) * n / qk - 2, (m * eta + n) / qk - 1)
            h = (m + eta * n) / qk - 1 if m + qk in star else ell
            row.append(max(h, F(n // qk)))
        g.append(row)
    K = [n * math.log(2) + sum(float(g[k][n]) * math.log(2 * q[k + 1]) for k in range(k_of(q, n) + 1))
         for n in range(N + 1)]
    return g, K


def test_a3_golden():
    dt = build_davie("golden", 20)
    assert dt.A_k(3) == (0, 13)
    t = expand_cf("golden", 10)
    # exhaustive exact scan (n = 0 is always in)
    scan = [0] + [n for n in range(1, 21) if dist_to_integers(n, t) <= F(1, 24)]
    assert scan == [0, 13]


def test_eta_and_E():
    dt = build_davie("golden", 100)
    for k in range(dt.k_max + 1):
        qk, qn = dt.q[k], dt.q[k + 1]
        assert dt.E_k(k) == max(F(qk), F(qn, 4))
        assert dt.eta_k(k) == qk / dt.E_k(k)


def test_g_and_K_at_zero():
    dt = build_davie("e", 200)
    assert all(dt.g_k(k, 0) == 0 for k in range(dt.k_max + 1))
    assert dt.K_float(0) == 0


def test_K1_golden_regression():
    dt = build_davie("golden", 10)
    _, K = _hand_davie("golden", 10)
    assert abs(dt.K_float(1) - 2.77258872223978) < 1e-12
    assert abs(K[1] - 2.77258872223978) < 1e-12
    with mpmath.workprec(80):
        enc = dt.K_iv(1)
        exact = 4 * mpmath.iv.log(2)
        assert enc.a <= exact.b and exact.a <= enc.b


@pytest.mark.parametrize("spec", ["golden", "silver", "e", "quot:0;1,1,50,(1,2)"])
def test_against_hand_transcription(spec):
    N = 80
    dt = build_davie(spec, N)
    g, K = _hand_davie(spec, N, depth=25)
    for k in range(dt.k_max + 1):
        assert [dt.g_k(k, n) for n in range(N + 1)] == g[k], (spec, k)
    assert max(abs(a - b) for a, b in zip(dt.K, K)) < 1e-9


def test_lemma53_golden_scan():
    for k in range(1, 8):
        r = lemma53_check("golden", k, 1000)
        assert r["counterexamples"] == []
        assert r["flagged"] and min(r["flagged"]) >= r["q_k"]


def test_lemma53_random_surds():
    rng = random.Random(11)
    for _ in range(6):
        D = rng.choice([d for d in range(2, 80) if int(math.isqrt(d)) ** 2 != d])
        spec = f"surd:(sqrt({D})-{math.isqrt(D)})/1"
        for k in range(1, 7):
            r = lemma53_check(expand_cf(spec, 20), k, 1000)
            assert r["counterexamples"] == [], (spec, k)


def test_lemma53_needs_depth():
    with pytest.raises(DepthInsufficient):
        lemma53_check(expand_cf("golden", 3), 3, 10)


def test_small_divisor_step_golden():
    dt = build_davie("golden", 2000)
    r = small_divisor_step_check(dt)
    assert r["violations"] == [] and r["min_margin"] > 0


def test_small_divisor_step_large_quotient():
    dt = build_davie("quot:0;1,1,500,(1)", 1500)
    r = small_divisor_step_check(dt)
    assert r["violations"] == []


def test_report_is_clean_and_c0_bounded():
    dt = build_davie("e", 1000)
    assert dt.report["violations"] == []
    assert dt.report["c0_fitted"] <= DAVIE_C0
    assert 18 < universal_c0() < 20


def test_step_check_beyond_table():
    dt = build_davie("golden", 50)
    with pytest.raises(PreconditionError):
        small_divisor_step_check(dt, N=60)


@pytest.fixture(scope="module")
def silver_table():
    return build_davie("silver", 600)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 300), st.integers(0, 300))
def test_superadditive_spot(silver_table, n1, n2):
    dt = silver_table
    K = dt.K
    assert K[n1] + K[n2] <= K[n1 + n2] + 1e-9
    for k in range(min(dt.k_of_n[n1], dt.k_of_n[n2]) + 1):
        assert dt.g_k(k, n1) + dt.g_k(k, n2) <= dt.g_k(k, n1 + n2)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 599))
def test_h_bounds(silver_table, n):
    dt = silver_table
    for k in range(dt.k_max + 1):
        eta, q = dt.eta_k(k), dt.q[k]
        h = dt.h_k(k, n)
        assert (1 + eta) * n / q - 2 <= h <= (1 + eta) * n / q - 1
        assert dt.h_k(k, n - 1) <= h
        if n + q <= dt.N:
            assert dt.h_k(k, n + q) >= h + 1
