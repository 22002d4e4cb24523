from fractions import Fraction
from math import floor

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalldiv.contfrac import (
    GOLDEN,
    DistanceOracle,
    branch_interval,
    check_invariants,
    dist_to_integers,
    expand_cf,
    is_best_approximation,
    table_covering,
)
from smalldiv.errors import (
    DepthInsufficient,
    MalformedSpec,
    PrecisionExhausted,
    PreconditionError,
    RationalTerminated,
)
from smalldiv.reals import from_quotients, parse_real
from smalldiv.surd import QuadraticSurd


def _cf_oracle(x: Fraction, n: int) -> list[int]:
    """Plain Gauss-map expansion of a rational, the textbook way."""
    out = []
    for _ in range(n):
        a = floor(x)
        out.append(a)
        if x == a:
            break
        x = 1 / (x - a)
    return out


def test_golden_depth6():
    t = expand_cf("surd:(-1+sqrt(5))/2", 6)
    assert t.a == (0, 1, 1, 1, 1, 1, 1)
    assert t.q == (1, 1, 2, 3, 5, 8, 13)


def test_e_quotients():
    t = expand_cf("e", 14)
    assert t.a == (2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1, 8, 1, 1, 10)


def test_silver_by_surd_identity():
    x = QuadraticSurd(-1, 1, 2)
    assert 1 / x == x + 2  # so every quotient after a_0 is 2
    assert expand_cf("silver", 5).a == (0, 2, 2, 2, 2, 2)


def test_rational_matches_gauss_map():
    x = Fraction(355, 113)
    t = expand_cf(f"rat:{x}", 2)
    assert list(t.a) == _cf_oracle(x, 3)
    with pytest.raises(RationalTerminated):
        expand_cf("rat:355/113", 5)


def test_dist_golden_three():
    t = expand_cf("golden", 8)
    g = GOLDEN
    assert dist_to_integers(3, t) == g * g * g * g
    assert abs(float(dist_to_integers(3, t)) - 0.145898) < 1e-6


def test_dist_at_convergents_is_beta():
    for spec in ("golden", "silver", "surd:(1+sqrt(7))/3"):
        t = expand_cf(spec, 12)
        for k in range(1, 11):
            assert dist_to_integers(t.q[k], t) == t.beta[k]


def test_dist_n1_small_alpha():
    t = expand_cf("surd:sqrt(2)-1", 6)
    assert dist_to_integers(1, t) == t.frac


def _best_oracle(alpha, p, q):
    """(p, q) beats every (p', q') with q' < q, using 60-digit arithmetic."""
    with mpmath.workdps(60):
        a = mpmath.mpf(alpha)
        d = abs(q * a - p)
        for qq in range(1, q):
            pp = int(mpmath.nint(qq * a))
            if abs(qq * a - pp) <= d:
                return False
        return abs(q * a - int(mpmath.nint(q * a))) == d


def test_best_approximation_golden():
    t = expand_cf("golden", 8)
    g = float(GOLDEN)
    assert is_best_approximation(1, 2, t) is True
    assert is_best_approximation(2, 4, t) is False
    assert is_best_approximation(1, 3, t) is False
    for p, q in [(1, 2), (2, 4), (1, 3), (2, 3), (3, 5)]:
        assert is_best_approximation(p, q, t) == _best_oracle(g, p, q), (p, q)
    assert is_best_approximation(t.p[3], t.q[3], t)


def test_best_approximation_depth():
    t = expand_cf("golden", 4)
    with pytest.raises(DepthInsufficient):
        is_best_approximation(8, 13, t)


def _branch_oracle(quotients, max_den=80):
    """Rationals in (0, 1) whose expansion starts with the given quotients."""
    hits = []
    k = len(quotients)
    for den in range(2, max_den):
        for num in range(1, den):
            x = Fraction(num, den)
            if x.denominator != den:
                continue
            a = _cf_oracle(x, k + 3)[1:]
            if len(a) > k and a[:k] == list(quotients):
                hits.append(x)
    return hits


@pytest.mark.parametrize(
    "quotients, lo, hi",
    [((1,), Fraction(1, 2), Fraction(1)), ((2,), Fraction(1, 3), Fraction(1, 2)),
     ((1, 1), Fraction(1, 2), Fraction(2, 3))],
)
def test_branch_interval(quotients, lo, hi):
    iv = branch_interval(quotients)
    assert (iv.lo, iv.hi) == (lo, hi)
    hits = _branch_oracle(quotients)
    assert hits and all(lo <= x <= hi for x in hits)
    # the oracle hits come arbitrarily close to both ends
    assert min(hits) - lo < Fraction(1, 20) and hi - max(hits) < Fraction(1, 20)


def test_branch_interval_rejects_zero():
    with pytest.raises(PreconditionError):
        branch_interval((1, 0))


def test_invariants_named_inputs():
    for spec in ("golden", "silver", "e", "xp:3", "quot:0,1,2,(3,1)", "dec:0.7071067811865475@64bits"):
        depth = 20 if spec.startswith("dec") else 40
        t = expand_cf(spec, depth)
        assert check_invariants(t) == [], spec


def test_decimal_certified_depth_is_finite():
    r = parse_real("dec:0.7071067811865475@64bits")
    d = r.certified_depth()
    assert 10 < d < 60
    with pytest.raises(PrecisionExhausted):
        expand_cf(r, d + 40)


def test_malformed_specs():
    for bad in ("surd:((", "quot:a,b", "nonsense:1", "dec:"):
        with pytest.raises(MalformedSpec):
            parse_real(bad)


def test_table_covering_is_shallow():
    t = table_covering("golden", 100)
    assert t.q[-1] > 100 and t.q[-2] <= 100


def test_distance_oracle_matches_exact():
    t = expand_cf("silver", 20)
    dist = DistanceOracle(t, 500)
    for n in range(1, 500, 7):
        lo, hi, P = dist.enclose(n)
        exact = dist_to_integers(n, t)
        assert Fraction(lo, 1 << P) <= exact <= Fraction(hi, 1 << P)


quotients = st.lists(st.integers(1, 50), min_size=3, max_size=25)


@settings(max_examples=60, deadline=None)
@given(quotients, quotients)
def test_eventually_periodic_invariants(pre, period):
    x = from_quotients([0] + pre, period[:3])
    t = expand_cf(x, 30)
    assert check_invariants(t) == []
    for n in range(1, 31):
        assert t.q[n] * t.p[n - 1] - t.p[n] * t.q[n - 1] == (-1) ** n


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=5, max_denominator=10**6))
def test_rational_reconstruction(x):
    src = parse_real(f"rat:{x}")
    t = expand_cf(src, src.length)
    assert t.convergent(t.depth) == x
    assert list(t.a) == _cf_oracle(x, src.length + 1)
