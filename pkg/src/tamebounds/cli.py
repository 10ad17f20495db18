"""Command-line front end.

Commands: ``degree`` (weight degree with its partial-sum enclosure),
``constants`` (amplification constants for a weight on a body), ``check``
(one bound against the oracle), ``suite`` (the randomized verification
suite), ``compare`` (classical degree comparisons).

Exit codes: 0 success (including inconclusive unless ``--strict``),
1 a bound was violated, 2 parse or argument error, 3 the instance could
not be decided or certified. ``TAMEBOUNDS_PRECISION_BITS`` overrides the
default enclosure precision.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Optional

from . import __version__
from .bang import BangProfile
from .degrees import (analytic_degree_bound, analytic_weight, comtet_bracket,
                      compare_polynomial_degrees)
from .enclosure import working_precision
from .errors import (BoundaryUndecidable, ChainInvalid, ConditionFails,
                     DomainError, EmptySet, Inconclusive, InvalidRange,
                     OutsideDomain, ParseError, ShapeUnsupported,
                     TailUndecidable, TameBoundsError, ZeroInBall)
from .geometry import ConvexBody, Shape
from .parsing import (build_function, format_body, format_function, format_number,
                      format_set, parse_body, parse_function, parse_number,
                      parse_set, parse_weight)
from .remez import remez_constants
from .report import CheckRecord, Report, decimal_string, enclosure_string
from .suite import (CHECK_NAMES, SuiteConfig, _Tols, eval_bang_chain, eval_critical,
                    eval_lp, eval_mo, eval_rearrange, eval_remez_1d, eval_remez_nd,
                    eval_sublevel, eval_zero_bound, run_suite)
from .weights import INF, FullWeight, degree, is_inf, j0, sigma

DEFAULT_BITS = 128


def _env_bits() -> int:
    raw = os.environ.get("TAMEBOUNDS_PRECISION_BITS")
    if raw is None:
        return DEFAULT_BITS
    try:
        bits = int(raw)
    except ValueError as ex:
        raise ParseError(f"TAMEBOUNDS_PRECISION_BITS={raw!r} is not an integer") from ex
    if not 16 <= bits <= 16384:
        raise ParseError("TAMEBOUNDS_PRECISION_BITS out of the supported range [16, 16384]")
    return bits


def _emit(args, payload: dict, lines) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for key, val in lines:
            print(f"{key:12s} {val}")


# -- degree --------------------------------------------------------------------


def cmd_degree(args, bits: int) -> int:
    mu = parse_weight(args.weight)
    scale = parse_number(args.scale)
    b = parse_number(args.b)
    try:
        res = degree(mu, scale=scale, b=b)
    except BoundaryUndecidable as ex:
        enc = ex.enclosure
        extra = ""
        if enc is not None:
            extra = f" (partial sum enclosure {enclosure_string(enc.lo_fraction(), enc.hi_fraction())})"
        print(f"undecidable: {ex}{extra}", file=sys.stderr)
        return 3
    enc = res.partial_sum_enclosure
    sum_str = enclosure_string(enc.lo_fraction(), enc.hi_fraction())
    payload = {"weight": args.weight, "scale": format_number(scale),
               "b": format_number(b), "j0": res.j0,
               "degree": decimal_string(res.degree), "partial_sum": sum_str,
               "decided_at": res.decided_at}
    _emit(args, payload, [("weight", args.weight), ("scale", format_number(scale)),
                          ("b", format_number(b)), ("j0", res.j0),
                          ("degree", decimal_string(res.degree)),
                          ("partial_sum", sum_str), ("decided_at", res.decided_at)])
    return 0


# -- constants -----------------------------------------------------------------


def cmd_constants(args, bits: int) -> int:
    mu = parse_weight(args.weight)
    m0 = parse_number(args.m0)
    body = parse_body(args.body)
    with working_precision(bits):
        delta = body.diameter().enclose().hi_fraction()
    b = parse_number(args.b) if args.b is not None else m0
    w = FullWeight(mu, m0)
    try:
        c = remez_constants(w, delta, b, smooth=args.smooth, bits=bits)
    except ConditionFails as ex:
        k0 = j0(b / m0)
        with working_precision(bits):
            tail = sigma(mu.scaled(delta), k0 + 1, INF).enclose()
        print(f"admissibility fails: {ex}", file=sys.stderr)
        print(f"certified tail sum {enclosure_string(tail.lo_fraction(), tail.hi_fraction())}"
              f" from index {k0 + 1} must exceed e", file=sys.stderr)
        return 3
    except BoundaryUndecidable as ex:
        print(f"undecidable: {ex}", file=sys.stderr)
        return 3
    if is_inf(c.c_n):
        cn_str = "inf"
        pow_str = "inf"
    else:
        cn_str = enclosure_string(c.c_n.lo_fraction(), c.c_n.hi_fraction())
        with working_precision(bits):
            amp = c.c_n.pow_int(c.power)
        pow_str = enclosure_string(amp.lo_fraction(), amp.hi_fraction()) \
            if c.power else "[1,1]"
    payload = {"weight": args.weight, "M0": format_number(m0),
               "body": args.body, "delta": format_number(delta),
               "b": format_number(b), "N": c.N, "j0": c.j0,
               "gamma": decimal_string(c.gamma), "C_N": cn_str,
               "power": c.power, "amplification": pow_str,
               "degenerate": c.degenerate}
    lines = [("weight", args.weight), ("M0", format_number(m0)),
             ("delta", format_number(delta)), ("b", format_number(b)),
             ("N", c.N), ("j0", c.j0), ("gamma", decimal_string(c.gamma)),
             ("C_N", cn_str), ("power", c.power), ("amplification", pow_str)]
    if c.degenerate:
        lines.append(("degenerate", "true (N-1 = 0: upper bounds are inf, lower bounds 0)"))
    _emit(args, payload, lines)
    return 0


# -- single checks -------------------------------------------------------------


def _require(value, flag: str, check: str):
    if value is None:
        raise ParseError(f"check {check} needs {flag}")
    return value


def _build_instance(args):
    fspec = parse_function(args.function)
    body = None
    if args.body is not None:
        body = parse_body(args.body)
    elif fspec.kind == "cheb":
        body = ConvexBody.interval(-1, 1)
    else:
        raise ParseError("a body is needed (-I/-K)")
    f = build_function(fspec, body)
    return f, body


def _profile_for(args, f):
    if args.weight is not None:
        mu = parse_weight(args.weight)
        return BangProfile(f, weight=FullWeight(mu, f.weight.M0))
    return BangProfile(f)


def cmd_check(args, bits: int) -> int:
    tols = _Tols()
    f, body = _build_instance(args)
    inputs = {"function": format_function(parse_function(args.function)),
              "body": format_body(body)}
    if args.weight is not None:
        inputs["weight"] = args.weight
    e_set = parse_set(args.set) if args.set is not None else None
    if e_set is not None:
        inputs["set"] = format_set(e_set)
    name = args.name

    if name == "zero-bound":
        prof = _profile_for(args, f)
        if args.base is not None:
            candidates = [parse_number(args.base)]
        else:
            a, b = body.data
            candidates = [(a + b) / 2, a, b, a + (b - a) / 4, a + 3 * (b - a) / 4]
        last = None
        rec = None
        for x in candidates:
            try:
                rec = eval_zero_bound(f, prof, x, {**inputs, "base": format_number(x)})
                break
            except (ConditionFails, BoundaryUndecidable, TailUndecidable) as ex:
                last = ex
        if rec is None:
            raise last
    elif name == "bang-chain":
        pts = [parse_number(p) for p in
               _require(args.points, "--points", name).split(",")]
        if len(pts) < 2:
            raise ParseError("--points needs at least x0,x1")
        prof = _profile_for(args, f)
        rec = eval_bang_chain(f, prof, pts,
                              {**inputs, "points": ",".join(format_number(p) for p in pts)})
    elif name == "remez-1d":
        rec = eval_remez_1d(f, _require(e_set, "-E", name), inputs, tols, bits)
    elif name == "remez-nd":
        rec = eval_remez_nd(f, body, _require(e_set, "-E", name), inputs, tols, bits)
    elif name == "sublevel":
        t = parse_number(_require(args.level, "-t", name))
        rec = eval_sublevel(f, body, t, {**inputs, "t": format_number(t)}, tols, bits)
    elif name == "rearrange":
        lam = parse_number(_require(args.lam, "--lam", name))
        rec = eval_rearrange(f, body, _require(e_set, "-E", name), lam,
                             {**inputs, "lam": format_number(lam)}, tols, bits)
    elif name == "lp":
        p_raw = _require(args.p, "-p", name)
        p = INF if p_raw == "inf" else parse_number(p_raw)
        q = parse_number(_require(args.q, "-q", name))
        rec = eval_lp(f, body, _require(e_set, "-E", name), p, q,
                      {**inputs, "p": p_raw if p_raw == "inf" else format_number(p),
                       "q": format_number(q)}, tols, bits)
    elif name == "mo":
        if args.same_sup and e_set is not None:
            raise ParseError("--same-sup and -E are mutually exclusive")
        base = None if e_set is None else e_set
        rec = eval_mo(f, body, base,
                      {**inputs, "same_sup": str(base is None).lower()}, tols, bits)
    elif name == "critical":
        prof = _profile_for(args, f)
        if args.threshold is not None:
            thr = parse_number(args.threshold)
        else:
            from .oracle import sup_norm
            thr, _ = sup_norm(f, body, rel_tol=tols.sup)
            if thr <= 0:
                raise ConditionFails("sup is not certified positive; pass --threshold")
        rec = eval_critical(f, prof, thr, {**inputs, "threshold": format_number(thr)})
    else:
        raise ParseError(f"unknown check {name!r}")

    if args.json:
        print(json.dumps(rec.as_dict(), indent=2))
    else:
        print(f"check        {rec.check}")
        for key in sorted(rec.inputs):
            print(f"  {key:10s} {rec.inputs[key]}")
        print(f"bound        {rec.bound}")
        print(f"oracle       {rec.oracle}")
        print(f"verdict      {rec.verdict}")
        if rec.detail:
            print(f"detail       {rec.detail}")
    if rec.verdict == "violated":
        return 1
    if rec.verdict == "skipped":
        return 3
    if rec.verdict == "inconclusive" and args.strict:
        return 1
    return 0


# -- suite ---------------------------------------------------------------------


def cmd_suite(args, bits: int) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = SuiteConfig.from_json(fh.read())
    report = run_suite(cfg, with_timing=args.timing)
    text = report.to_json()
    if args.out is not None:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        counts = report.summary()
        print(f"wrote {args.out}: " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    else:
        sys.stdout.write(text)
    return report.exit_code


# -- compare -------------------------------------------------------------------


def cmd_compare(args, bits: int) -> int:
    mode = args.mode
    if mode == "polynomial":
        n = args.n
        conv = parse_number(args.conversion)
        cmp_res = compare_polynomial_degrees(n, conversion=conv)
        payload = {"n": n, "conversion": format_number(conv),
                   "markov_mu": f"const:{format_number(cmp_res.mu_markov.params[0])}",
                   "bernstein_mu": f"const:{format_number(cmp_res.mu_bernstein.params[0])}",
                   "degree_markov": decimal_string(cmp_res.degree_markov),
                   "degree_bernstein": decimal_string(cmp_res.degree_bernstein)}
        lines = list(payload.items())
    elif mode == "analytic":
        eps = parse_number(args.eps)
        conv = parse_number(args.conversion)
        sup_d = parse_number(args.sup_d)
        w = analytic_weight(eps, conversion=conv, sup_d=sup_d)
        bound = analytic_degree_bound(eps, conversion=conv, sup_d=sup_d)
        payload = {"eps": format_number(eps),
                   "mu": f"linear:{format_number(w.mu.params[0])}",
                   "M0": format_number(w.M0),
                   "zero_bound": decimal_string(bound)}
        lines = list(payload.items())
    elif mode == "comtet":
        x = parse_number(args.x)
        lo, hi = comtet_bracket(x)
        payload = {"x": format_number(x), "bracket": enclosure_string(lo, hi),
                   "width": format_number(hi - lo)}
        lines = list(payload.items())
    else:
        raise ParseError(f"unknown comparison {mode!r}")
    _emit(args, payload, lines)
    return 0


# -- parser --------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="tamebounds",
        description="Certified degree, zero-count, and amplification bounds, "
                    "checked against brute-force oracles.")
    top.add_argument("--version", action="version", version=f"tamebounds {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("degree", help="weight degree with its partial-sum enclosure")
    p.add_argument("-w", "--weight", required=True, help="weight spec, e.g. linear:1")
    p.add_argument("-s", "--scale", default="1", help="interval-length scaling of the weight")
    p.add_argument("-b", default="1", help="threshold b")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_degree)

    p = sub.add_parser("constants", help="amplification constants on a body")
    p.add_argument("-w", "--weight", required=True)
    p.add_argument("--m0", default="1", help="M0, the zeroth derivative bound")
    p.add_argument("-K", "--body", required=True, help="body spec, e.g. interval:0,1")
    p.add_argument("-b", default=None, help="sup-norm threshold (default M0)")
    p.add_argument("--smooth", action="store_true",
                   help="use the closed-form extension instead of the piecewise one")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_constants)

    p = sub.add_parser("check", help="one bound against the oracle")
    p.add_argument("name", choices=CHECK_NAMES)
    p.add_argument("-f", "--function", required=True, help="function spec, e.g. cheb:5")
    p.add_argument("-I", "-K", "--body", dest="body", default=None,
                   help="body spec (defaults to interval:-1,1 for cheb)")
    p.add_argument("-E", "--set", dest="set", default=None,
                   help="measurable subset, e.g. 0,1/2;3/4,1")
    p.add_argument("-w", "--weight", default=None,
                   help="replacement weight for profile checks (must dominate)")
    p.add_argument("--base", default=None, help="zero-bound base point")
    p.add_argument("--points", default=None, help="bang-chain points x0,x1,...")
    p.add_argument("-t", "--level", default=None, help="sublevel threshold t")
    p.add_argument("--lam", default=None, help="rearrangement fraction in (0,1)")
    p.add_argument("-p", default=None, help="target exponent (number or inf)")
    p.add_argument("-q", default=None, help="source exponent")
    p.add_argument("--same-sup", action="store_true",
                   help="mo: compare over the body itself")
    p.add_argument("--threshold", default=None, help="critical: threshold b")
    p.add_argument("--strict", action="store_true",
                   help="exit 1 on inconclusive verdicts")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("suite", help="run the randomized verification suite")
    p.add_argument("-c", "--config", required=True, help="SuiteConfig JSON path")
    p.add_argument("-o", "--out", default=None, help="report path (default stdout)")
    p.add_argument("--timing", action="store_true", help="record per-trial seconds")
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("compare", help="classical degree comparisons")
    p.add_argument("mode", choices=("polynomial", "analytic", "comtet"))
    p.add_argument("-n", type=int, default=3, help="polynomial degree")
    p.add_argument("--conversion", default="1", help="norm conversion constant")
    p.add_argument("--eps", default="1/2", help="analytic: closeness parameter")
    p.add_argument("--sup-d", dest="sup_d", default="1", help="analytic: sup bound on D")
    p.add_argument("-x", default="2", help="comtet: harmonic threshold")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_compare)
    return top


def main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        bits = _env_bits()
        return args.fn(args, bits)
    except ParseError as ex:
        print(f"parse error: {ex}", file=sys.stderr)
        return 2
    except (InvalidRange, DomainError, EmptySet, OutsideDomain,
            ShapeUnsupported) as ex:
        print(f"invalid argument: {ex}", file=sys.stderr)
        return 2
    except (BoundaryUndecidable, ConditionFails, TailUndecidable, ZeroInBall,
            ChainInvalid, Inconclusive) as ex:
        print(f"undecidable: {ex}", file=sys.stderr)
        return 3
    except TameBoundsError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 3
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
