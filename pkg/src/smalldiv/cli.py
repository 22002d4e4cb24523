"""Command-line front end: ``smalldiv <command> ...``.

Exit status: 0 success, 1 failed invariant, 2 precondition error,
3 precision or depth exhausted, 64 unknown command, 65 malformed input.
JSON output is canonical (sorted keys); rationals are "p/q" strings and
complex numbers {"re": ..., "im": ...} objects.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import gmpy2
import mpmath
import numpy as np

from . import brjuno, contfrac, davie, germs, majorants, resonance, torus, yoccoz
from ._numerics import RationalInterval, default_precision, ivprec
from .cyclotomic import CycElem
from .errors import (
    DepthInsufficient,
    InvariantViolation,
    MalformedSpec,
    OrbitEscaped,
    PrecisionExhausted,
    PreconditionError,
    ToleranceUnreachable,
)
from .reals import parse_real
from .surd import QuadraticSurd

COMMANDS = ("cf", "brjuno", "linearize", "cremer", "normal-form", "davie", "yoccoz", "radius",
            "torus", "selftest")

EXIT_OK, EXIT_INVARIANT, EXIT_PRECONDITION, EXIT_EXHAUSTED = 0, 1, 2, 3
EXIT_USAGE, EXIT_MALFORMED = 64, 65


class _Usage(Exception):
    pass


@dataclass(frozen=True)
class JobConfig:
    precision: int = 128
    depth: int | None = None
    order: int | None = None
    fmt: str = "json"
    out: str | None = None
    threads: int = 1

    def __post_init__(self):
        if self.precision < 53:
            raise PreconditionError("precision must be at least 53 bits")
        for name in ("depth", "order"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise PreconditionError(f"{name} must be nonnegative")
        if self.threads < 1:
            raise PreconditionError("threads must be positive")


# ---------------------------------------------------------------------------
# serialization


def _digits(bits: int) -> int:
    return int(math.ceil(bits * math.log10(2))) + 1


def _to_fraction(x) -> Fraction | None:
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, RationalInterval):
        return x.mid
    if type(x).__name__ == "mpfr":
        n, d = x.as_integer_ratio()
        return Fraction(n, d)
    return None


def dec(x, bits: int) -> str:
    """Decimal string of a real value carrying ``bits`` of declared precision."""
    if isinstance(x, (QuadraticSurd, mpmath.ctx_iv.ivmpf)):
        enc = x.to_iv(bits + 16) if isinstance(x, QuadraticSurd) else x
        # the interval context has its own precision
        with ivprec(bits + 16), mpmath.workprec(bits + 16):
            v = mpmath.mpf(enc.mid.a)
    else:
        f = _to_fraction(x)
        with mpmath.workprec(bits + 16):
            if f is not None:
                v = mpmath.mpf(f.numerator) / f.denominator
            else:
                if isinstance(x, float) and not math.isfinite(x):
                    return str(x)
                v = mpmath.mpf(x)
    if mpmath.isinf(v) or mpmath.isnan(v):
        return str(float(v))
    with mpmath.workprec(bits + 16):
        return mpmath.nstr(v, _digits(bits), min_fixed=-5, max_fixed=_digits(bits) + 1)


def rat(x) -> str:
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def cplx(z, bits: int) -> dict:
    """Complex value as {"re", "im"}; exact Gaussian rationals stay "p/q"."""
    if isinstance(z, (int, Fraction)):
        return {"re": rat(z), "im": "0"}
    if isinstance(z, tuple):
        return {"re": rat(z[0]), "im": rat(z[1])}
    if isinstance(z, CycElem):
        parts = z.rational_parts()
        if parts is not None:
            return {"re": rat(parts[0]), "im": rat(parts[1])}
        z = z.to_mpc(bits + 16)
    if type(z).__name__ == "mpc":
        return {"re": dec(z.real, bits), "im": dec(z.imag, bits)}
    z = complex(z)
    return {"re": dec(z.real, bits), "im": dec(z.imag, bits)}


def emit_json(obj, out: str | None = None):
    text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def emit_csv(header: list[str], rows, bits: int, out: str | None = None, note: str = ""):
    buf = io.StringIO()
    buf.write(f"# precision_bits={bits}{note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _real_spec(spec: str):
    return parse_real(spec)


def _load_json(arg: str):
    try:
        if arg.lstrip().startswith("{"):
            return json.loads(arg)
        return json.loads(Path(arg).read_text())
    except json.JSONDecodeError as exc:
        raise MalformedSpec(f"invalid JSON: {exc}") from exc
    except OSError as exc:
        raise PreconditionError(f"cannot read {arg}: {exc}") from exc


def _exact_coeff(c):
    if isinstance(c, dict):
        return (Fraction(str(c.get("re", "0"))), Fraction(str(c.get("im", "0"))))
    return Fraction(str(c))


def load_germ(arg: str, order: int, precision: int) -> germs.GermSeries:
    """Germ description: {"lambda": spec, "coefficients": [f_2, f_3, ...]}
    or {"lambda": spec, "family": "quadratic"|"rotation", "normalization": ...}."""
    data = _load_json(arg)
    try:
        lam = str(data["lambda"])
        family = data.get("family")
        exact = data.get("exact")
        if family == "quadratic":
            return germs.quadratic_germ(lam, data.get("normalization", "half"), max(order, 2),
                                        precision=precision)
        if family == "rotation":
            return germs.rotation_germ(lam, max(order, 2), precision=precision)
        if family is not None:
            raise MalformedSpec(f"unknown germ family {family!r}")
        coeffs = [_exact_coeff(c) for c in data["coefficients"]]
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedSpec(f"malformed germ description: {exc}") from exc
    coeffs += [Fraction(0)] * max(0, order - 1 - len(coeffs))
    return germs.make_germ(lam, coeffs, exact=exact, precision=precision)


def _series_json(h, bits: int) -> list:
    out = []
    for c in h:
        if isinstance(c, Fraction):
            out.append(rat(c))
        else:
            out.append(cplx(c, bits))
    return out


def _radius_json(est) -> dict | None:
    if est is None:
        return None
    return {
        "hadamard": repr(est.hadamard),
        "trend_radius": repr(est.trend_radius),
        "corrected_radius": repr(est.corrected_radius),
        "slope": repr(est.slope),
        "window": list(est.window),
        "kind": est.kind,
    }


# ---------------------------------------------------------------------------
# commands


def cmd_cf(args, cfg: JobConfig) -> int:
    if args.branch:
        iv = contfrac.branch_interval([int(a) for a in args.branch.split(",")])
        emit_json({"branch": [int(a) for a in args.branch.split(",")], "lo": rat(iv.lo), "hi": rat(iv.hi)},
                  cfg.out)
        return EXIT_OK
    if not args.spec:
        raise _Usage("cf needs an input spec")
    src = _real_spec(args.spec)
    depth = cfg.depth if cfg.depth is not None else 10
    table = contfrac.expand_cf(src, depth, cfg.precision)
    bits = cfg.precision
    rows = [(n, table.a[n], table.p[n], table.q[n], dec(table.beta[n], bits)) for n in range(depth + 1)]
    if cfg.fmt == "csv":
        emit_csv(["n", "a", "p", "q", "beta"], rows, bits, cfg.out)
        return EXIT_OK
    obj = {
        "input": args.spec,
        "depth": depth,
        "precision_bits": bits,
        "a": list(table.a),
        "p": list(table.p),
        "q": list(table.q),
        "beta": [r[4] for r in rows],
        "invariant_violations": contfrac.check_invariants(table),
    }
    if args.dist:
        obj["dist"] = {str(n): dec(contfrac.dist_to_integers(n, table), bits)
                       for n in (int(t) for t in args.dist.split(","))}
    if args.best:
        p, _, q = args.best.partition("/")
        obj["best_approximation"] = contfrac.is_best_approximation(int(p), int(q), table)
    emit_json(obj, cfg.out)
    return EXIT_OK


def cmd_brjuno(args, cfg: JobConfig) -> int:
    src = _real_spec(args.spec)
    bits = cfg.precision
    N = cfg.depth if cfg.depth is not None else 40
    obj = {"input": args.spec, "precision_bits": bits}
    if args.exact_periodic:
        pb = brjuno.brjuno_periodic_exact(src, bits)
        obj["exact_periodic"] = {"expression": pb.expression(), "value": dec(pb.value, bits)}
    else:
        table = contfrac.expand_cf(src, N + 1, bits)
        val = brjuno.brjuno_series(table, N, bits)
        obj.update({
            "depth": N,
            "partial_sum": dec(val.partial_sum, bits),
            "tail_bound": None if val.tail_bound is None else dec(val.tail_bound, bits),
            "quotient_sum": dec(val.quotient_sum, bits),
            "flags": val.flags,
        })
        if args.sigma is not None:
            obj["b_sigma"] = {"sigma": args.sigma, "value": dec(brjuno.b_sigma(table, Fraction(args.sigma), N, bits), bits)}
        if args.gamma is not None:
            dc = brjuno.diophantine_test(table, Fraction(args.gamma), Fraction(args.tau or "0"))
            obj["diophantine"] = {
                "gamma": rat(dc.gamma),
                "tau": rat(dc.tau),
                "verdict": dc.verdict,
                "witness": None if dc.witness is None else list(dc.witness),
                "depth": dc.depth,
            }
    emit_json(obj, cfg.out)
    return EXIT_OK


def cmd_linearize(args, cfg: JobConfig) -> int:
    N = cfg.order if cfg.order is not None else 20
    germ = load_germ(args.germ, N, cfg.precision)
    lin = germs.linearize(germ, N, method=args.method, precision=cfg.precision)
    bits = cfg.precision
    obj = {
        "order": N,
        "exact": lin.exact,
        "method": lin.method,
        "h": _series_json(lin.h, bits),
        "residual_order": lin.residual_order,
        "radius_estimate": _radius_json(lin.radius_estimate),
    }
    if args.koenigs is not None:
        rep = majorants.koenigs_bound_check(germ, N, Fraction(args.koenigs), strict=False)
        obj["koenigs"] = {"holds": rep.holds, "first_violation": rep.first_violation,
                          "worst_margin": repr(rep.worst_margin)}
    if args.majorant:
        mult = germ.multiplier
        if not hasattr(mult, "alpha_table"):
            raise PreconditionError("the majorant check needs a circle multiplier")
        dt = davie.build_davie(contfrac.table_covering(mult.alpha_table, N), max(N - 1, 1), check=False)
        rep = majorants.siegel_brjuno_check(lin, dt, N)
        obj["siegel_brjuno"] = {"holds": rep.holds, "first_violation": rep.first_violation,
                                "worst_margin": repr(rep.worst_margin)}
    emit_json(obj, cfg.out)
    return EXIT_OK


def cmd_cremer(args, cfg: JobConfig) -> int:
    N = cfg.order if cfg.order is not None else 200
    cs = germs.cremer_series(_real_spec(args.alpha), N, max(cfg.precision, 256))
    bits = 64
    abs_h, abs_d, runmax = [], [], []
    holds = not cs.lower_bound_failures()
    best = -math.inf
    for n in range(2, N + 1):
        a, d = cs.abs_h(n), cs.divisors[n]
        abs_h.append(dec(a, bits))
        abs_d.append(dec(d, bits))
        best = max(best, float(gmpy2.log(a)) / n)
        runmax.append(repr(best))
    emit_json({
        "alpha": args.alpha,
        "order": N,
        "f": _series_json(cs.germ.series(N)[2:], bits),
        "abs_h": abs_h,
        "abs_divisor": abs_d,
        "lower_bound_holds": holds,
        "running_max_log_h_over_n": runmax,
    }, cfg.out)
    return EXIT_OK if holds else EXIT_INVARIANT


def cmd_normal_form(args, cfg: JobConfig) -> int:
    N = cfg.order if cfg.order is not None else 12
    germ = load_germ(args.germ, N, cfg.precision)
    bits = cfg.precision
    rc = resonance.root_of_unity_check(germ, args.q, N)
    obj = {"q": args.q, "order": N, "linearizable": rc.linearizable}
    if rc.linearizable:
        obj["h_inverse"] = _series_json(rc.h_inverse, bits)
    else:
        nf = resonance.resonant_normal_form(germ, args.q, N)
        obj["normal_form"] = {"n": nf.n, "a": cplx(nf.a, bits), "b": cplx(nf.b, bits),
                              "conjugator": _series_json(nf.conjugator, bits)}
    emit_json(obj, cfg.out)
    return EXIT_OK


def cmd_davie(args, cfg: JobConfig) -> int:
    N = args.N
    table = contfrac.table_covering(_real_spec(args.spec), N, cfg.precision)
    kN = davie.k_of(table.q, N)
    if args.k_max is not None and kN > args.k_max:
        raise DepthInsufficient(f"N = {N} needs k up to {kN} > --k-max {args.k_max}")
    dt = davie.build_davie(table, N, check=True, strict=False)
    rep = dict(dt.report)
    rep["input"] = args.spec
    rep["superadditivity_float_slack"] = repr(rep["superadditivity_float_slack"])
    rep["step_min_margin"] = repr(rep["step_min_margin"])
    rep["c0_fitted"] = repr(rep["c0_fitted"])
    rep["c0_regression"] = repr(rep["c0_regression"])
    rep["q"] = list(table.q[: kN + 2])
    if args.K is not None:
        enc = davie.k_function(dt, args.K)
        rep["K"] = {"n": args.K, "lo": dec(enc.a, 64), "hi": dec(enc.b, 64)}
    if args.sets is not None:
        k = args.sets
        rep["sets"] = {"k": k, "A_k": list(dt.A_k(k)), "A_k_star": list(dt.A_k_star(k)),
                       "E_k": rat(dt.E_k(k)), "eta_k": rat(dt.eta_k(k)),
                       "g_k": [rat(dt.g_k(k, n)) for n in range(N + 1)]}
    if args.lemma53 is not None:
        lm = davie.lemma53_check(table, args.lemma53, N)
        rep["lemma53"] = {"k": lm["k"], "q_k": lm["q_k"], "q_k1": lm["q_k1"],
                          "flagged": lm["flagged"][:50], "counterexamples": lm["counterexamples"]}
    if args.csv:
        step = davie.small_divisor_step_check(dt)
        rows = [(n, repr(K), repr(dK), repr(lhs)) for n, K, dK, lhs in step["rows"]]
        emit_csv(["n", "K", "K_step", "neg_log_divisor"], rows, 53, args.csv)
    emit_json(rep, cfg.out)
    return EXIT_OK if not rep["violations"] else EXIT_INVARIANT


def _pair(text: str, n: int, kind=float):
    try:
        vals = [kind(t) for t in text.split(",")]
    except ValueError as exc:
        raise MalformedSpec(f"malformed list {text!r}") from exc
    if len(vals) != n:
        raise MalformedSpec(f"expected {n} comma separated values, got {text!r}")
    return vals


def cmd_yoccoz(args, cfg: JobConfig) -> int:
    if args.series is not None:
        cs = yoccoz.u_series(args.series)
        emit_json({"series_order": args.series, "coefficients": [rat(c) for c in cs]}, cfg.out)
        return EXIT_OK
    if args.at is not None:
        re_, im_ = _pair(args.at, 2)
        lam = complex(re_, im_)
        if args.n is not None:
            u = yoccoz.u_iterate(lam, args.n, cfg.precision)
            err = yoccoz.truncation_bound(abs(lam), args.n)
        else:
            u, err = yoccoz.u_value(lam, args.tol)
        emit_json({"lambda": {"re": args.at.split(",")[0], "im": args.at.split(",")[1]},
                   "u": cplx(u, cfg.precision if args.n is not None else 53),
                   "truncation_bound": repr(err)}, cfg.out)
        return EXIT_OK
    if args.grid is not None:
        rmin, rmax, res = _pair(args.grid, 3)
        pts = yoccoz.grid_emit(rmin, rmax, int(res), tol=args.tol, max_steps=args.max_steps,
                               workers=cfg.threads)
        rows = [(repr(p.re), repr(p.im), repr(p.log_abs_u), repr(p.arg_u), repr(p.error), int(p.ok))
                for p in pts]
        emit_csv(["re", "im", "log_abs_u", "arg_u", "error", "ok"], rows, 53, cfg.out,
                 f" tol={args.tol}")
        return EXIT_OK
    raise _Usage("yoccoz needs one of --series, --at, --grid")


def cmd_radius(args, cfg: JobConfig) -> int:
    src = _real_spec(args.alpha)
    obj = {"alpha": args.alpha, "method": args.method}
    table = contfrac.expand_cf(src, 41, cfg.precision)
    B = brjuno.brjuno_series(table, 40, cfg.precision).partial_sum
    obj["brjuno_partial_sum"] = dec(B, 64)
    if args.method == "radial":
        radii = [float(t) for t in args.radii.split(",")]
        rl = yoccoz.radial_limit_estimate(src, radii, tol=args.tol)
        obj.update({
            "radii": [repr(r) for r in rl.radii],
            "values": [repr(v) for v in rl.values],
            "errors": [repr(e) for e in rl.errors],
            "extrapolated": repr(rl.extrapolated),
            "log_r2": repr(rl.log_r2),
            "within_a_priori": rl.within_a_priori,
        })
    elif args.method == "birkhoff":
        mult = germs.CircleMultiplier(src)
        orbit = yoccoz.critical_orbit(mult, args.m, normalization=args.normalization)
        be = yoccoz.birkhoff_radius(orbit, alpha=src)
        obj.update({
            "checkpoints": list(be.checkpoints),
            "averages": [repr(a) for a in be.averages],
            "log_r2": repr(be.log_r2),
            "decay_exponent": None if be.decay_exponent is None else repr(be.decay_exponent),
        })
    else:
        N = cfg.order if cfg.order is not None else 400
        ql = yoccoz.quadratic_linearization(germs.CircleMultiplier(src), N, max(cfg.precision, 256))
        r2 = ql.r2_estimate()
        obj.update({"order": N, "r2_hadamard": repr(r2), "log_r2": repr(math.log(r2)),
                    "radius": _radius_json(ql.radius())})
    obj["log_r2_plus_B"] = repr(float(obj["log_r2"]) + float(B))
    emit_json(obj, cfg.out)
    return EXIT_OK


def cmd_torus(args, cfg: JobConfig) -> int:
    bits = cfg.precision
    if args.classify is not None:
        r = torus.growth_classify(_real_spec(args.classify), args.N)
        emit_json({
            "alpha": args.classify,
            "N": args.N,
            "verdict": r.verdict,
            "q": list(r.q),
            "log_spikes": [repr(v) for v in r.log_spikes],
            "exponents": [repr(v) for v in r.exponents],
            "rates": [repr(v) for v in r.rates],
            "exponent_slope": None if r.exponent_slope is None else repr(r.exponent_slope),
            "rate_decay": None if r.rate_decay is None else repr(r.rate_decay),
        }, cfg.out)
        return EXIT_OK
    if args.fundamental is not None:
        fc = torus.fundamental_solution_coeffs(_real_spec(args.fundamental), args.N)
        rows = [(int(n), repr(float(lo)), repr(float(hi))) for n, lo, hi in zip(fc.n, fc.log_lo, fc.log_hi)]
        emit_csv(["n", "log_abs_lo", "log_abs_hi"], rows, 40, cfg.out, " (relative bits)")
        return EXIT_OK
    if args.samples is not None:
        try:
            values = np.loadtxt(args.samples, ndmin=1)
        except (OSError, ValueError) as exc:
            raise MalformedSpec(f"cannot read samples: {exc}") from exc
        v = torus.sample_field(values, args.max_k)
    elif args.field is not None:
        v = torus.FourierField.from_json(_load_json(args.field))
    else:
        raise _Usage("torus needs a field file, --samples, --classify or --fundamental")
    obj = {"field": v.to_json()}
    if args.mu is None:
        if args.solve or args.norm:
            raise _Usage("--solve and --norm need --mu")
        emit_json(obj, cfg.out)
        return EXIT_OK
    mu = torus.parse_frequency(args.mu)
    obj["mu"] = {"entries": [str(e) for e in mu.mu],
                 "gamma": None if mu.gamma is None else rat(mu.gamma),
                 "tau": None if mu.tau is None else rat(mu.tau),
                 "certified": mu.certified, "note": mu.note}
    if args.solve:
        u = torus.solve_cohomological(v, mu)
        obj["solution"] = u.to_json()
        obj["round_trip_exact"] = torus.D_mu(u, mu) == v
        obj["real"] = v.is_real() and u.is_real()
    if args.norm:
        i, r = int(args.norm[0]), Fraction(args.norm[1])
        ne = torus.norm_estimate(v, mu, i, r)
        obj["norm"] = {"i": i, "r": rat(r), "ratio": repr(ne.ratio), "bound": repr(ne.bound),
                       "summation_constant": repr(ne.A_summation), "holds": ne.holds}
    emit_json(obj, cfg.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# selftest


def _selftest_checks():
    from .reals import golden

    def cf_invariants():
        for s in ("golden", "silver", "e", "surd:(1+sqrt(7))/3", "dec:0.7071067811865475@64bits"):
            t = contfrac.expand_cf(parse_real(s), 12 if s.startswith("dec") else 30)
            assert not contfrac.check_invariants(t), s
        t = contfrac.expand_cf(golden(), 6)
        assert t.a == (0, 1, 1, 1, 1, 1, 1) and t.q == (1, 1, 2, 3, 5, 8, 13)

    def brjuno_closed_form():
        for p in (1, 2, 3):
            x = f"xp:{p}"
            ex = brjuno.brjuno_periodic_exact(x).value
            ser = brjuno.brjuno_series(contfrac.expand_cf(parse_real(x), 61), 60).partial_sum
            assert abs(ex - ser) < 1e-12, (p, ex, ser)

    def linearization_residual():
        g = germs.quadratic_germ("circle:golden", N=60)
        germs.linearize(g, 60)  # the residual check raises on failure
        g = germs.make_germ(Fraction(1, 2), [Fraction(-1, 4)])
        assert majorants.koenigs_bound_check(g, 60).holds

    def davie_properties():
        dt = davie.build_davie("golden", 300)
        assert not dt.report["violations"]
        assert davie.lemma53_check("golden", 4, 200)["counterexamples"] == []

    def yoccoz_series():
        cs = yoccoz.u_series(11)
        assert cs[:4] == [Fraction(1, 2), Fraction(-1, 8), Fraction(-1, 8), Fraction(-1, 16)]
        assert cs[11] == Fraction(559, 32768)
        assert yoccoz.u_iterate(0, 5) == 0.5

    def normal_form():
        germ = germs.make_germ("root:1/2", [0, -1, 0, Fraction(-3)])
        nf = resonance.resonant_normal_form(germ, 2, 6)
        assert (nf.n, nf.a, nf.b) == (1, 1, 3), nf

    def torus_round_trip():
        mu = torus.parse_frequency("golden")
        v = torus.FourierField(2, {(1, 2): (1, 2), (-1, -2): (1, -2), (3, -1): (Fraction(1, 3), 0)})
        assert torus.D_mu(torus.solve_cohomological(v, mu), mu) == v
        assert torus.growth_classify("golden", 10**4).verdict == "distribution-consistent"

    return [
        ("continued-fraction invariants", cf_invariants),
        ("Brjuno closed forms", brjuno_closed_form),
        ("linearization residual and Koenigs bound", linearization_residual),
        ("Davie properties", davie_properties),
        ("Yoccoz series", yoccoz_series),
        ("resonant normal form", normal_form),
        ("torus round trip and growth", torus_round_trip),
    ]


def cmd_selftest(args, cfg: JobConfig) -> int:
    failed = 0
    for name, fn in _selftest_checks():
        t0 = time.perf_counter()
        try:
            fn()
            status = "ok"
        except Exception as exc:  # report every failure, keep going
            failed += 1
            status = f"FAIL ({type(exc).__name__}: {exc})"
        print(f"{name}: {status} [{time.perf_counter() - t0:.2f}s]")
    print("selftest passed" if not failed else f"selftest: {failed} check(s) failed")
    return EXIT_OK if not failed else EXIT_INVARIANT


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, default=None, help="bits (default 128 or SMALLDIV_PRECISION)")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--threads", type=int, default=1)

    p = _Parser(prog="smalldiv", description="Small-divisor computations.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("cf", parents=[common], help="continued fraction table")
    s.add_argument("spec", nargs="?")
    s.add_argument("--depth", type=int)
    fmt = s.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv")
    s.add_argument("--dist", help="comma separated n for ||n x||")
    s.add_argument("--best", help="p/q to test as a best approximation")
    s.add_argument("--branch", help="a_1,...,a_k: the branch interval")

    s = sub.add_parser("brjuno", parents=[common], help="Brjuno sums and diophantine test")
    s.add_argument("spec")
    s.add_argument("--depth", type=int)
    s.add_argument("--sigma")
    s.add_argument("--exact-periodic", action="store_true")
    s.add_argument("--gamma")
    s.add_argument("--tau")

    s = sub.add_parser("linearize", parents=[common], help="formal linearization of a germ")
    s.add_argument("germ", help="JSON file or inline JSON")
    s.add_argument("--order", type=int)
    s.add_argument("--method", default="auto", choices=["auto", "recurrence", "newton"])
    s.add_argument("--koenigs", help="radius r for the Koenigs majorant check")
    s.add_argument("--majorant", action="store_true", help="Siegel-Brjuno majorant check")

    s = sub.add_parser("cremer", parents=[common], help="Cremer germ construction")
    s.add_argument("--alpha", required=True)
    s.add_argument("--order", type=int)

    s = sub.add_parser("normal-form", parents=[common], help="root-of-unity multipliers")
    s.add_argument("germ")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--order", type=int)

    s = sub.add_parser("davie", parents=[common], help="Davie's functions and K(n)")
    s.add_argument("spec")
    s.add_argument("--N", type=int, default=200)
    s.add_argument("--k-max", type=int)
    s.add_argument("--csv", help="path for the (n, K, step, -log|divisor|) table")
    s.add_argument("--K", type=int, help="enclose K(n) at this n")
    s.add_argument("--sets", type=int, metavar="k", help="A_k, A_k*, E_k, eta_k and g_k(0..N)")
    s.add_argument("--lemma53", type=int, metavar="k")

    s = sub.add_parser("yoccoz", parents=[common], help="Yoccoz's function u")
    s.add_argument("--series", type=int)
    s.add_argument("--at", help="re,im")
    s.add_argument("--n", type=int)
    s.add_argument("--grid", help="rmin,rmax,res")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--max-steps", type=int, default=20000)

    s = sub.add_parser("radius", parents=[common], help="r_2 estimators on the circle")
    s.add_argument("--alpha", required=True)
    s.add_argument("--method", choices=["radial", "birkhoff", "hadamard"], default="radial")
    s.add_argument("--radii", default="0.99,0.995,0.998,0.999,0.9995")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--m", type=int, default=10**5)
    s.add_argument("--normalization", choices=["half", "unit"], default="half")
    s.add_argument("--order", type=int)

    s = sub.add_parser("torus", parents=[common], help="cohomological equation on the torus")
    s.add_argument("field", nargs="?", help="JSON field file or inline JSON")
    s.add_argument("--mu")
    s.add_argument("--solve", action="store_true")
    s.add_argument("--norm", nargs=2, metavar=("i", "r"))
    s.add_argument("--classify", metavar="ALPHA")
    s.add_argument("--fundamental", metavar="ALPHA")
    s.add_argument("--N", type=int, default=10**4)
    s.add_argument("--samples", help="uniform-grid samples (text, 1-D or 2-D)")
    s.add_argument("--max-k", type=int)

    sub.add_parser("selftest", parents=[common], help="run the invariant corpus")
    return p


HANDLERS = {
    "cf": cmd_cf,
    "brjuno": cmd_brjuno,
    "linearize": cmd_linearize,
    "cremer": cmd_cremer,
    "normal-form": cmd_normal_form,
    "davie": cmd_davie,
    "yoccoz": cmd_yoccoz,
    "radius": cmd_radius,
    "torus": cmd_torus,
    "selftest": cmd_selftest,
}


def _fail(code: int, msg: str) -> int:
    print(f"smalldiv: {msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # exact rationals can run past the default digit limit
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    if not argv or argv[0] in ("-h", "--help"):
        parser.print_help()
        return EXIT_OK if argv else EXIT_USAGE
    if argv[0] not in COMMANDS:
        return _fail(EXIT_USAGE, f"unknown command {argv[0]!r} (expected one of {', '.join(COMMANDS)})")
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    except SystemExit as exc:  # --help inside a subcommand
        return int(exc.code or 0)
    try:
        prec = args.precision if args.precision is not None else default_precision()
        cfg = JobConfig(prec, getattr(args, "depth", None), getattr(args, "order", None),
                        getattr(args, "fmt", None) or "json", args.out, args.threads)
        return HANDLERS[args.command](args, cfg)
    except _Usage as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    except MalformedSpec as exc:
        return _fail(EXIT_MALFORMED, str(exc))
    except (PreconditionError, OrbitEscaped) as exc:
        return _fail(EXIT_PRECONDITION, str(exc))
    except (DepthInsufficient, PrecisionExhausted, ToleranceUnreachable) as exc:
        return _fail(EXIT_EXHAUSTED, str(exc))
    except InvariantViolation as exc:
        return _fail(EXIT_INVARIANT, f"invariant violated: {exc}")
    except ValueError as exc:  # bad numbers in options (SMALLDIV_PRECISION included)
        return _fail(EXIT_MALFORMED, str(exc))


if __name__ == "__main__":
    sys.exit(main())
