"""Randomized cross-checks of certified bounds against brute-force oracles.

Every check draws instances from a seeded generator, computes a certified
bound, measures the same quantity with an oracle enclosure, and records a
verdict. A bound is an upper (or lower) estimate with directed rounding, so
the verdicts are asymmetric:

* ``violated``   the oracle enclosure lies strictly on the wrong side;
* ``holds``      the enclosure lies entirely on the right side;
* ``inconclusive``  the enclosure straddles the bound;
* ``skipped``    the instance could not be certified (no positive minimum,
  weight tail too short, no derivative root found) and was set aside.

Determinism: trial k of check c under seed s uses a generator keyed by
SHA256(f"{s}:{c}:{k}"), so reports are byte-identical across runs and
insensitive to check ordering or subsets.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import __version__
from .bang import BangProfile, critical_point_bound, verify_bang_chain, zero_count_bound
from .enclosure import Enc, enc_pow_frac, working_precision
from .errors import (BoundaryUndecidable, ChainInvalid, ConditionFails, EmptySet,
                     Inconclusive, InvalidRange, OutsideDomain, ParseError,
                     ShapeUnsupported, TailUndecidable, ZeroInBall)
from .functions import CertifiedFunction, Poly1D
from .geometry import ConvexBody, MeasurableSet, Shape
from .oracle import (INF_P, count_zeros, derivative_root, lp_norm, mean_oscillation,
                     measure_sublevel, rearrangement_value, sup_norm)
from .parsing import (FunctionSpec, build_function, format_body, format_number,
                      format_set, format_weight, parse_body, parse_function,
                      parse_weight)
from .remez import (lp_comparison_bound, mean_oscillation_bound, remez_body_factor,
                    remez_constants, remez_univariate, rearrangement_lower_bound,
                    sublevel_volume_bound)
from .report import CheckRecord, Report, decimal_string, enclosure_string
from .weights import INF, FullWeight, WeightKind, is_inf

CHECK_NAMES = ("zero-bound", "bang-chain", "remez-1d", "remez-nd",
               "sublevel", "rearrange", "lp", "mo", "critical")

_TOL_KEYS = ("sup_rel_tol", "sublevel_rel_tol", "lp_rel_tol",
             "mo_avg_tol", "mo_osc_tol")


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class SuiteConfig:
    """Suite parameters. ``trials`` applies per check.

    ``functions`` / ``bodies`` are optional spec-string menus; when non-empty,
    draws pick from them (falling back to synthetic instances when nothing in
    the menu fits a check's shape). ``weights`` are candidate replacement
    envelopes tried on profile checks; a candidate is only adopted when it
    provably dominates the canonical one.
    """

    seed: int = 0
    trials: int = 12
    checks: Tuple[str, ...] = CHECK_NAMES
    functions: Tuple[str, ...] = ()
    bodies: Tuple[str, ...] = ()
    weights: Tuple[str, ...] = ()
    tolerances: Mapping[str, str] = field(default_factory=dict)
    precision_bits: int = 128

    def validate(self) -> None:
        for name in self.checks:
            if name not in CHECK_NAMES:
                raise ParseError(f"unknown check {name!r}; known: {', '.join(CHECK_NAMES)}")
        if self.trials < 0:
            raise ParseError("trials must be >= 0")
        if not 16 <= self.precision_bits <= 16384:
            raise ParseError("precision_bits out of the supported range [16, 16384]")
        for key in self.tolerances:
            if key not in _TOL_KEYS:
                raise ParseError(f"unknown tolerance {key!r}; known: {', '.join(_TOL_KEYS)}")
        for s in self.functions:
            parse_function(s)
        for s in self.bodies:
            parse_body(s)
        for s in self.weights:
            parse_weight(s)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "checks": list(self.checks),
            "functions": list(self.functions),
            "bodies": list(self.bodies),
            "weights": list(self.weights),
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
            "precision_bits": self.precision_bits,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @staticmethod
    def from_dict(data: Mapping) -> "SuiteConfig":
        if not isinstance(data, Mapping):
            raise ParseError("suite config must be a JSON object")
        known = {"seed", "trials", "checks", "functions", "bodies", "weights",
                 "tolerances", "precision_bits"}
        extra = set(data) - known
        if extra:
            raise ParseError(f"unknown config keys: {', '.join(sorted(extra))}")

        def ints(key, default):
            v = data.get(key, default)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ParseError(f"{key} must be an integer")
            return v

        def strings(key):
            v = data.get(key, ())
            if isinstance(v, str) or not isinstance(v, Sequence):
                raise ParseError(f"{key} must be a list of strings")
            out = tuple(v)
            if not all(isinstance(s, str) for s in out):
                raise ParseError(f"{key} must be a list of strings")
            return out

        tol = data.get("tolerances", {})
        if not isinstance(tol, Mapping):
            raise ParseError("tolerances must be an object")
        cfg = SuiteConfig(
            seed=ints("seed", 0),
            trials=ints("trials", 12),
            checks=strings("checks") or CHECK_NAMES,
            functions=strings("functions"),
            bodies=strings("bodies"),
            weights=strings("weights"),
            tolerances=dict(tol),
            precision_bits=ints("precision_bits", 128),
        )
        cfg.validate()
        return cfg

    @staticmethod
    def from_json(text: str) -> "SuiteConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as ex:
            raise ParseError(f"config is not valid JSON: {ex}") from ex
        return SuiteConfig.from_dict(data)


@dataclass(frozen=True)
class _Tols:
    sup: Fraction = Fraction(1, 100)
    sublevel: Fraction = Fraction(1, 500)
    lp: Fraction = Fraction(1, 10)
    mo_avg: Fraction = Fraction(1, 20)
    mo_osc: Fraction = Fraction(1, 8)


def _resolve_tols(overrides: Mapping[str, str]) -> _Tols:
    base = _Tols()
    vals = {}
    names = {"sup_rel_tol": "sup", "sublevel_rel_tol": "sublevel",
             "lp_rel_tol": "lp", "mo_avg_tol": "mo_avg", "mo_osc_tol": "mo_osc"}
    for key, attr in names.items():
        if key in overrides:
            try:
                q = Fraction(overrides[key])
            except (ValueError, ZeroDivisionError) as ex:
                raise ParseError(f"tolerance {key}={overrides[key]!r} is not a rational") from ex
            if q <= 0:
                raise ParseError(f"tolerance {key} must be positive")
            vals[attr] = q
    return _Tols(**{**base.__dict__, **vals}) if vals else base


def trial_rng(seed: int, check: str, trial: int) -> random.Random:
    """Independent substream for one trial; stable across check subsets."""
    digest = hashlib.sha256(f"{seed}:{check}:{trial}".encode()).digest()
    return random.Random(int.from_bytes(digest, "big"))


# -- rational draws ------------------------------------------------------------

_DENS = (1, 2, 3, 4, 6, 8)


def _frac(rng: random.Random, lo, hi) -> Fraction:
    lo, hi = Fraction(lo), Fraction(hi)
    den = rng.choice(_DENS)
    a, b = ceil(lo * den), floor(hi * den)
    if a > b:
        den = (hi - lo).denominator * 2
        a, b = ceil(lo * den), floor(hi * den)
    return Fraction(rng.randint(a, b), den)


def _nonzero_frac(rng: random.Random, lo, hi) -> Fraction:
    for _ in range(64):
        q = _frac(rng, lo, hi)
        if q != 0:
            return q
    return Fraction(1)


def _distinct_fracs(rng: random.Random, k: int, lo, hi, den: int = 16) -> List[Fraction]:
    lo, hi = Fraction(lo), Fraction(hi)
    grid = [lo + Fraction(i, den) * (hi - lo) for i in range(1, den)]
    rng.shuffle(grid)
    return sorted(grid[:k])


def _poly_from_roots(lead: Fraction, roots: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    coeffs = [lead]
    for r in roots:
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] -= r * c
            nxt[i + 1] += c
        coeffs = nxt
    return tuple(coeffs)


def _rand_interval(rng: random.Random, min_len=Fraction(3, 4), max_len=Fraction(2)) -> ConvexBody:
    a = _frac(rng, -2, 1)
    return ConvexBody.interval(a, a + _frac(rng, min_len, max_len))


def _rand_body(rng: random.Random, d: int) -> ConvexBody:
    if d == 1 and rng.random() < 2 / 3:
        return _rand_interval(rng)
    if rng.random() < 1 / 2:
        center = tuple(_frac(rng, Fraction(-1, 2), Fraction(1, 2)) for _ in range(d))
        return ConvexBody.ball(center, _frac(rng, Fraction(1, 2), 1))
    lo = tuple(_frac(rng, Fraction(-3, 2), Fraction(1, 2)) for _ in range(d))
    hi = tuple(c + _frac(rng, Fraction(1, 2), Fraction(3, 2)) for c in lo)
    return ConvexBody.box(lo, hi)


def _inner_box(body: ConvexBody) -> Tuple[Tuple[Fraction, ...], Tuple[Fraction, ...]]:
    """A rational box provably inside the body.

    Balls use half-width 7r/10 per axis; 2 * (7/10)^2 = 98/100 < 1, so every
    corner is strictly inside for d <= 2.
    """
    if body.shape is Shape.BALL:
        center, r = body.data
        h = r * Fraction(7, 10) if len(center) > 1 else r * Fraction(9, 10)
        return (tuple(c - h for c in center), tuple(c + h for c in center))
    return body.bounding_box()


def _rand_subset(rng: random.Random, body: ConvexBody, max_parts: int,
                 grid: int = 16) -> MeasurableSet:
    """Disjoint union of grid cells (shrunk by a margin) inside the body."""
    lo, hi = _inner_box(body)
    d = len(lo)
    if d == 1:
        n_parts = rng.randint(1, max_parts)
        cuts = sorted(rng.sample(range(grid), min(2 * n_parts, grid - 1) // 2 * 2))
        if len(cuts) < 2:
            cuts = [4, 11]
        step = (hi[0] - lo[0]) / grid
        parts = []
        for i in range(0, len(cuts) - 1, 2):
            a = lo[0] + (cuts[i] + Fraction(1, 4)) * step
            b = lo[0] + (cuts[i + 1] + Fraction(3, 4)) * step
            parts.append(((a,), (b,)))
        return MeasurableSet.from_parts(parts)
    side = 4
    n_parts = rng.randint(1, min(max_parts, 3))
    cells = rng.sample(range(side * side), n_parts)
    steps = tuple((h - l) / side for l, h in zip(lo, hi))
    parts = []
    for cell in cells:
        idx = (cell % side, cell // side)
        a = tuple(l + (i + Fraction(1, 8)) * s for l, i, s in zip(lo, idx, steps))
        b = tuple(l + (i + Fraction(7, 8)) * s for l, i, s in zip(lo, idx, steps))
        parts.append((a, b))
    return MeasurableSet.from_parts(parts)


# -- function corpus -----------------------------------------------------------


def _spec_poly_roots(rng: random.Random, a: Fraction, b: Fraction,
                     k_lo: int = 1, k_hi: int = 4) -> FunctionSpec:
    pad = (b - a) / 8
    roots = _distinct_fracs(rng, rng.randint(k_lo, k_hi), a + pad, b - pad)
    lead = _nonzero_frac(rng, -2, 2)
    return FunctionSpec("poly", _poly_from_roots(lead, roots))


def _spec_poly_plain(rng: random.Random) -> FunctionSpec:
    k = rng.randint(2, 6)
    coeffs = [_frac(rng, -3, 3) for _ in range(k)]
    coeffs.append(_nonzero_frac(rng, -2, 2))
    return FunctionSpec("poly", tuple(coeffs))


def _spec_waves(rng: random.Random, d: int, offset: Optional[Fraction] = None) -> FunctionSpec:
    """Random plane-wave sum; with ``offset`` the term c sin(3/2) at zero
    frequency floors |f| at roughly c/4 after the oscillating budget."""
    terms = []
    budget = offset * Fraction(1, 2) if offset is not None else None
    for _ in range(rng.randint(1, 2)):
        amp = _nonzero_frac(rng, -2, 2)
        if budget is not None:
            amp = Fraction(amp.numerator % 3 + 1, 8) * (1 if amp > 0 else -1)
            if abs(amp) > budget:
                break
            budget -= abs(amp)
        freq = tuple(rng.randint(-2, 2) for _ in range(d))
        if not any(freq):
            freq = (1,) + freq[1:]
        phase = Fraction(rng.randint(0, 7), 8)
        terms.append((amp, freq, phase))
    if offset is not None:
        terms.append((offset, (0,) * d, Fraction(3, 2)))
    if not terms:
        terms = [(Fraction(1), (1,) + (0,) * (d - 1), Fraction(0))]
    return FunctionSpec("waves", tuple(terms))


def _menu_function(cfg: SuiteConfig, rng: random.Random,
                   body: ConvexBody) -> Optional[CertifiedFunction]:
    if not cfg.functions:
        return None
    order = list(cfg.functions)
    rng.shuffle(order)
    for s in order:
        try:
            return build_function(parse_function(s), body)
        except (ParseError, ShapeUnsupported):
            continue
    return None


def _menu_body(cfg: SuiteConfig, rng: random.Random, d: int) -> Optional[ConvexBody]:
    candidates = []
    for s in cfg.bodies:
        body = parse_body(s)
        if body.dimension == d and body.shape is not Shape.SIMPLEX:
            candidates.append(body)
    return rng.choice(candidates) if candidates else None


def _draw_univariate(cfg: SuiteConfig, rng: random.Random,
                     want_roots: bool = False,
                     allow_exp: bool = True) -> Tuple[CertifiedFunction, ConvexBody]:
    body = _menu_body(cfg, rng, 1)
    if body is None or body.shape is not Shape.INTERVAL:
        body = _rand_interval(rng)
    menu = _menu_function(cfg, rng, body)
    if menu is not None and menu.dimension == 1:
        return menu, menu.domain
    a, b = body.data
    roll = rng.random()
    if roll < 0.40:
        spec = _spec_poly_roots(rng, a, b) if want_roots else _spec_poly_plain(rng)
    elif roll < 0.60:
        body = ConvexBody.interval(-1, 1)
        spec = FunctionSpec("cheb", (rng.randint(1, 8),))
    elif roll < 0.90 or not allow_exp:
        spec = _spec_waves(rng, 1)
    else:
        spec = FunctionSpec("exp", (_frac(rng, Fraction(-3, 2), Fraction(3, 2)),))
        if spec.data[0] == 0:
            spec = FunctionSpec("exp", (Fraction(1, 2),))
    return build_function(spec, body), body


def _draw_nd(cfg: SuiteConfig, rng: random.Random,
             offset: Optional[Fraction] = None,
             d: Optional[int] = None) -> Tuple[CertifiedFunction, ConvexBody]:
    if d is None:
        d = rng.choice((1, 2))
    body = _menu_body(cfg, rng, d) or _rand_body(rng, d)
    menu = _menu_function(cfg, rng, body)
    if menu is not None and offset is None:
        return menu, body
    if d == 1 and body.shape is Shape.INTERVAL and rng.random() < 0.4:
        a, b = body.data
        spec = _spec_poly_roots(rng, a, b) if offset is None else \
            FunctionSpec("poly", (offset + abs(_frac(rng, 0, 1)), _frac(rng, -1, 1) * offset / 4))
    else:
        spec = _spec_waves(rng, d, offset=offset)
    return build_function(spec, body), body


# -- verdicts ------------------------------------------------------------------


def _verdict_upper(lhs_lo: Fraction, lhs_hi: Fraction, bound) -> str:
    if is_inf(bound):
        return "holds"
    if lhs_lo > bound:
        return "violated"
    if lhs_hi <= bound:
        return "holds"
    return "inconclusive"


def _verdict_lower(lhs_lo: Fraction, lhs_hi: Fraction, bound) -> str:
    if lhs_hi < bound:
        return "violated"
    if lhs_lo >= bound:
        return "holds"
    return "inconclusive"


def _verdict_count(count: int, bound) -> str:
    if is_inf(bound):
        return "holds"
    return "holds" if count <= bound else "violated"


def _bound_str(value) -> str:
    return decimal_string(value)


def _skip(check: str, trial: int, inputs: Dict[str, str], why: str) -> CheckRecord:
    return CheckRecord(check, trial, inputs, "", "", "skipped", detail=why)


# -- profile weights -----------------------------------------------------------


def _profile(cfg: SuiteConfig, rng: random.Random, f: CertifiedFunction,
             bits: int) -> Tuple[BangProfile, Optional[str]]:
    """Profile for f, occasionally under a menu weight that provably dominates.

    Adoption rule: the canonical weight must be a constant sequence c and the
    candidate's first entry must be a rational >= c; an increasing candidate
    then dominates termwise, so every certified claim stays certified.
    """
    mu = f.weight.mu
    if cfg.weights and mu.kind is WeightKind.CONST and rng.random() < 0.5:
        cand = parse_weight(rng.choice(cfg.weights))
        first = cand.entry_exact(1)
        if isinstance(first, Fraction) and first >= mu.params[0]:
            w = FullWeight(cand, f.weight.M0)
            return BangProfile(f, weight=w, bits=bits), format_weight(cand)
    return BangProfile(f, bits=bits), None


# -- check evaluators ----------------------------------------------------------


def eval_zero_bound(f: CertifiedFunction, prof: BangProfile, base: Fraction,
                    inputs: Dict[str, str], trial: int = 0) -> CheckRecord:
    rep = zero_count_bound(prof, base)
    n = count_zeros(f)
    detail = f"j0={rep.j0} one_sided={decimal_string(rep.one_sided)} b0>={decimal_string(rep.b0_lower)}"
    return CheckRecord("zero-bound", trial, inputs, _bound_str(rep.total), str(n),
                       _verdict_count(n, rep.total), detail=detail)


def _run_zero_bound(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
                    trial: int, bits: int) -> CheckRecord:
    f, body = _draw_univariate(cfg, rng, want_roots=rng.random() < 0.5)
    a, b = f.domain.data
    prof, wstr = _profile(cfg, rng, f, bits)
    inputs = {"function": f.label, "body": format_body(f.domain)}
    if wstr is not None:
        inputs["weight"] = wstr
    candidates = [_frac(rng, a, b) for _ in range(4)] + [a, b]
    last = "no base point with a certified positive profile"
    for x in candidates:
        try:
            return eval_zero_bound(f, prof, x, {**inputs, "base": format_number(x)}, trial)
        except (ConditionFails, BoundaryUndecidable, TailUndecidable, OutsideDomain) as ex:
            last = str(ex)
    return _skip("zero-bound", trial, inputs, last)


def eval_bang_chain(f: CertifiedFunction, prof: BangProfile,
                    points: Sequence[Fraction], inputs: Dict[str, str],
                    trial: int = 0) -> CheckRecord:
    try:
        rep = verify_bang_chain(prof, points)
    except Inconclusive as ex:
        return CheckRecord("bang-chain", trial, inputs, "", "", "inconclusive",
                           detail=str(ex))
    bound = enclosure_string(rep.lower_bound.lo_fraction(), rep.lower_bound.hi_fraction())
    detail = f"j0={rep.j0} b0>={decimal_string(rep.b0_lower)} strict_expected={rep.strict_expected}"
    return CheckRecord("bang-chain", trial, inputs, bound,
                       decimal_string(rep.total_length),
                       "holds" if rep.holds else "violated", detail=detail)


def _run_bang_chain(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
                    trial: int, bits: int) -> CheckRecord:
    last = "no derivative root could be certified"
    for _ in range(3):
        f, body = _draw_univariate(cfg, rng, want_roots=True, allow_exp=False)
        if isinstance(f.family, Poly1D) and len(f.family.coeffs) < 4:
            continue
        a, b = f.domain.data
        m = rng.randint(1, 2)
        pts = [_frac(rng, a, b)]
        try:
            for order in range(1, m + 1):
                pts.append(derivative_root(f, order, rng))
        except (Inconclusive, InvalidRange, ShapeUnsupported) as ex:
            last = str(ex)
            continue
        prof, wstr = _profile(cfg, rng, f, bits)
        inputs = {"function": f.label, "body": format_body(f.domain),
                  "points": ",".join(format_number(x) for x in pts)}
        if wstr is not None:
            inputs["weight"] = wstr
        try:
            return eval_bang_chain(f, prof, pts, inputs, trial)
        except ChainInvalid as ex:
            last = str(ex)
    return _skip("bang-chain", trial, {}, last)


def eval_remez_1d(f: CertifiedFunction, e_set: MeasurableSet,
                  inputs: Dict[str, str], tols: _Tols, bits: int,
                  trial: int = 0) -> CheckRecord:
    body = f.domain
    a, b = body.data
    sup_lo, sup_hi = sup_norm(f, body, rel_tol=tols.sup)
    if sup_lo <= 0:
        raise ConditionFails("sup over the interval is not certified positive")
    c = remez_constants(f.weight, b - a, sup_lo, bits=bits)
    _, e_hi = sup_norm(f, e_set, rel_tol=tols.sup)
    bound = remez_univariate(c, body, e_set, e_hi, bits=bits)
    detail = f"N={c.N} gamma={decimal_string(c.gamma)} supE<={decimal_string(e_hi)}"
    return CheckRecord("remez-1d", trial, inputs, _bound_str(bound),
                       enclosure_string(sup_lo, sup_hi),
                       _verdict_upper(sup_lo, sup_hi, bound), detail=detail)


def _run_remez_1d(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
                  trial: int, bits: int) -> CheckRecord:
    last = "admissibility failed for every draw"
    for _ in range(4):
        f, body = _draw_univariate(cfg, rng)
        e_set = _rand_subset(rng, f.domain, max_parts=8, grid=24)
        inputs = {"function": f.label, "body": format_body(f.domain),
                  "set": format_set(e_set)}
        try:
            return eval_remez_1d(f, e_set, inputs, tols, bits, trial)
        except (ConditionFails, EmptySet) as ex:
            last = str(ex)
        except BoundaryUndecidable as ex:
            return _skip("remez-1d", trial, inputs, str(ex))
    return _skip("remez-1d", trial, {}, last)


def eval_remez_nd(f: CertifiedFunction, body: ConvexBody, e_set: MeasurableSet,
                  inputs: Dict[str, str], tols: _Tols, bits: int,
                  trial: int = 0) -> CheckRecord:
    c, factor = remez_body_factor(f.weight, body, e_set, bits=bits)
    sup_lo, sup_hi = sup_norm(f, body, rel_tol=tols.sup)
    _, e_hi = sup_norm(f, e_set, rel_tol=tols.sup)
    bound = INF if is_inf(factor) else factor * e_hi
    detail = f"N={c.N} gamma={decimal_string(c.gamma)} factor={decimal_string(factor)}"
    return CheckRecord("remez-nd", trial, inputs, _bound_str(bound),
                       enclosure_string(sup_lo, sup_hi),
                       _verdict_upper(sup_lo, sup_hi, bound), detail=detail)


def _run_remez_nd(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
                  trial: int, bits: int) -> CheckRecord:
    for _ in range(4):
        f, body = _draw_nd(cfg, rng)
        e_set = _rand_subset(rng, body, max_parts=3)
        inputs = {"function": f.label, "body": format_body(body),
                  "set": format_set(e_set)}
        try:
            return eval_remez_nd(f, body, e_set, inputs, tols, bits, trial)
        except (ConditionFails, EmptySet) as ex:
            last = str(ex)
        except BoundaryUndecidable as ex:
            return _skip("remez-nd", trial, inputs, str(ex))
    return _skip("remez-nd", trial, {}, last)


def _body_constants(f: CertifiedFunction, body: ConvexBody, bits: int):
    with working_precision(bits):
        diam = body.diameter().enclose().hi_fraction()
    return remez_constants(f.weight, diam, f.weight.M0, bits=bits)


def eval_sublevel(f: CertifiedFunction, body: ConvexBody, t: Fraction,
                  inputs: Dict[str, str], tols: _Tols, bits: int,
                  trial: int = 0) -> CheckRecord:
    if t <= 0:
        raise InvalidRange("need a positive level")
    sup_lo, _ = sup_norm(f, body, rel_tol=tols.sup)
    if sup_lo <= 0:
        raise ConditionFails("sup over the body is not certified positive")
    c = _body_constants(f, body, bits)
    bound = sublevel_volume_bound(c, body, t, sup_lo, bits=bits)
    kwargs = {}
    if not is_inf(bound):
        kwargs = {"stop_upper_below": bound, "stop_lower_above": bound}
    m_lo, m_hi = measure_sublevel(f, body, t, rel_tol=tols.sublevel, **kwargs)
    detail = f"N={c.N} t={decimal_string(t)} sup>={decimal_string(sup_lo)}"
    return CheckRecord("sublevel", trial, inputs, _bound_str(bound),
                       enclosure_string(m_lo, m_hi),
                       _verdict_upper(m_lo, m_hi, bound), detail=detail)


def _run_sublevel(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
                  trial: int, bits: int) -> CheckRecord:
    last = "no draw produced a certified positive sup"
    for _ in range(4):
        f, body = _draw_nd(cfg, rng)
        theta = rng.choice((Fraction(1, 10), Fraction(1, 5), Fraction(1, 4),
                            Fraction(1, 3), Fraction(1, 2)))
        try:
            sup_lo, _ = sup_norm(f, body, rel_tol=tols.sup)
            if sup_lo <= 0:
                last = "sup over the body is not certified positive"
                continue
            t = theta * sup_lo
            inputs = {"function": f.label, "body": format_body(body),
                      "t": format_number(t)}
            return eval_sublevel(f, body, t, inputs, tols, bits, trial)
        except (ConditionFails, EmptySet) as ex:
            last = str(ex)
        except BoundaryUndecidable as ex:
            return _skip("sublevel", trial, inputs, str(ex))
    return _skip("sublevel", trial, {}, last)


def eval_rearrange(f: CertifiedFunction, body: ConvexBody, e_set: MeasurableSet,
                   lam: Fraction, inputs: Dict[str, str], tols: _Tols, bits: int,
                   trial: int = 0) -> CheckRecord:
    sup_lo, _ = sup_norm(f, body, rel_tol=tols.sup)
    if sup_lo <= 0:
        raise ConditionFails("sup over the body is not certified positive")
    c = _body_constants(f, body, bits)
    e_measure = e_set.measure()
    bound = rearrangement_lower_bound(c, body, e_measure, lam, sup_lo, bits=bits)
    v_lo, v_hi = rearrangement_value(f, body, lam * e_measure, iters=28)
    detail = f"N={c.N} |E|={format_number(e_measure)} sup>={decimal_string(sup_lo)}"
    return CheckRecord("rearrange", trial, inputs, _bound_str(bound),
                       enclosure_string(v_lo, v_hi),
                       _verdict_lower(v_lo, v_hi, bound), detail=detail)


def _run_rearrange(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
                   trial: int, bits: int) -> CheckRecord:
    last = "no draw produced a certified positive sup"
    for _ in range(4):
        f, body = _draw_nd(cfg, rng)
        e_set = _rand_subset(rng, body, max_parts=4)
        lam = rng.choice((Fraction(1, 4), Fraction(1, 2), Fraction(2, 3),
                          Fraction(5, 6)))
        inputs = {"function": f.label, "body": format_body(body),
                  "set": format_set(e_set), "lam": format_number(lam)}
        try:
            return eval_rearrange(f, body, e_set, lam, inputs, tols, bits, trial)
        except (ConditionFails, EmptySet, InvalidRange) as ex:
            last = str(ex)
        except BoundaryUndecidable as ex:
            return _skip("rearrange", trial, inputs, str(ex))
    return _skip("rearrange", trial, {}, last)


_LP_MENU = ((Fraction(2), Fraction(1)), (Fraction(4), Fraction(2)),
            (INF, Fraction(1)), (Fraction(3), Fraction(3, 2)),
            (INF, Fraction(2)), (Fraction(2), Fraction(1, 2)))


def _pow_hi(base: Fraction, expo: Fraction, bits: int) -> Fraction:
    if expo == 0:
        return Fraction(1)
    if base == 0:
        return Fraction(0)
    with working_precision(bits):
        return enc_pow_frac(Enc.from_fraction(base), expo).hi_fraction()


def eval_lp(f: CertifiedFunction, body: ConvexBody, e_set: MeasurableSet,
            p, q: Fraction, inputs: Dict[str, str], tols: _Tols, bits: int,
            trial: int = 0) -> CheckRecord:
    c = _body_constants(f, body, bits)
    e_measure = e_set.measure()
    m_master, m_k, m_e = lp_comparison_bound(c, body, e_measure, p, q, bits=bits)
    oracle_p = INF_P if is_inf(p) else p
    lhs_lo, lhs_hi = lp_norm(f, body, oracle_p, rel_tol=tols.lp)
    _, qk_hi = lp_norm(f, body, q, rel_tol=tols.lp)
    _, qe_hi = lp_norm(f, e_set, q, rel_tol=tols.lp)
    q_over_p = Fraction(0) if is_inf(p) else q / p
    if is_inf(m_master):
        rhs_master = INF
    else:
        rhs_master = (m_master * _pow_hi(qk_hi, q_over_p, bits)
                      * _pow_hi(qe_hi, 1 - q_over_p, bits))
    rhs_k = INF if is_inf(m_k) else m_k * qk_hi
    rhs_e = INF if is_inf(m_e) else m_e * qe_hi
    verdicts = [_verdict_upper(lhs_lo, lhs_hi, rhs) for rhs in (rhs_master, rhs_k, rhs_e)]
    if "violated" in verdicts:
        verdict = "violated"
    elif "inconclusive" in verdicts:
        verdict = "inconclusive"
    else:
        verdict = "holds"
    detail = (f"same-set rhs={decimal_string(rhs_k)} {verdicts[1]}; "
              f"small-set rhs={decimal_string(rhs_e)} {verdicts[2]}; N={c.N}")
    return CheckRecord("lp", trial, inputs, _bound_str(rhs_master),
                       enclosure_string(lhs_lo, lhs_hi), verdict, detail=detail)


def _run_lp(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
            trial: int, bits: int) -> CheckRecord:
    last = "admissibility failed for every draw"
    for _ in range(4):
        f, body = _draw_nd(cfg, rng)
        e_set = _rand_subset(rng, body, max_parts=3)
        p, q = rng.choice(_LP_MENU)
        inputs = {"function": f.label, "body": format_body(body),
                  "set": format_set(e_set),
                  "p": "inf" if is_inf(p) else format_number(p),
                  "q": format_number(q)}
        try:
            return eval_lp(f, body, e_set, p, q, inputs, tols, bits, trial)
        except (ConditionFails, EmptySet) as ex:
            last = str(ex)
        except BoundaryUndecidable as ex:
            return _skip("lp", trial, inputs, str(ex))
    return _skip("lp", trial, {}, last)


def eval_mo(f: CertifiedFunction, body: ConvexBody,
            base_set: Optional[MeasurableSet], inputs: Dict[str, str],
            tols: _Tols, bits: int, trial: int = 0) -> CheckRecord:
    same_sup = base_set is None
    c = _body_constants(f, body, bits)
    if same_sup:
        bound = mean_oscillation_bound(c, body, Fraction(1), same_sup=True, bits=bits)
        region = body
    else:
        bound = mean_oscillation_bound(c, body, base_set.measure(), bits=bits)
        region = base_set
    try:
        # small budget: draws without a certified minimum must fail fast
        mo_lo, mo_hi = mean_oscillation(f, region, avg_tol=tols.mo_avg,
                                        osc_tol=tols.mo_osc, budget=2500)
    except ZeroInBall as ex:
        return _skip("mo", trial, inputs, f"no certified positive minimum: {ex}")
    detail = f"N={c.N} same_sup={str(same_sup).lower()}"
    return CheckRecord("mo", trial, inputs, _bound_str(bound),
                       enclosure_string(mo_lo, mo_hi),
                       _verdict_upper(mo_lo, mo_hi, bound), detail=detail)


def _run_mo(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
            trial: int, bits: int) -> CheckRecord:
    offset = _frac(rng, 1, 3) if rng.random() < 3 / 4 else None
    d = 1 if rng.random() < 2 / 3 else 2
    f, body = _draw_nd(cfg, rng, offset=offset, d=d)
    # oscillation over a full ball never resolves its boundary cells exactly;
    # keep the equal-sup variant on boxes and intervals
    same_sup = body.shape is not Shape.BALL and rng.random() < 1 / 3
    base_set = None if same_sup else _rand_subset(rng, body, max_parts=2 if d == 1 else 1)
    inputs = {"function": f.label, "body": format_body(body),
              "same_sup": str(same_sup).lower()}
    if base_set is not None:
        inputs["set"] = format_set(base_set)
    try:
        return eval_mo(f, body, base_set, inputs, tols, bits, trial)
    except (ConditionFails, EmptySet) as ex:
        return _skip("mo", trial, inputs, str(ex))
    except BoundaryUndecidable as ex:
        return _skip("mo", trial, inputs, str(ex))


def eval_critical(f: CertifiedFunction, prof: BangProfile, threshold: Fraction,
                  inputs: Dict[str, str], trial: int = 0) -> CheckRecord:
    has_zero = count_zeros(f) >= 1
    bound = critical_point_bound(prof, threshold, has_zero)
    n_crit = count_zeros(f.derivative())
    detail = f"zeros={count_zeros(f)} b={decimal_string(threshold)}"
    return CheckRecord("critical", trial, inputs, _bound_str(bound), str(n_crit),
                       _verdict_count(n_crit, bound), detail=detail)


def _run_critical(cfg: SuiteConfig, tols: _Tols, rng: random.Random,
                  trial: int, bits: int) -> CheckRecord:
    last = "no admissible draw"
    for _ in range(4):
        if rng.random() < 0.5:
            spec = FunctionSpec("cheb", (rng.randint(2, 8),))
        else:
            spec = _spec_poly_roots(rng, Fraction(-1), Fraction(1), k_lo=2, k_hi=5)
        f = build_function(spec, ConvexBody.interval(-1, 1))
        sup_lo, _ = sup_norm(f, f.domain, rel_tol=tols.sup)
        if sup_lo <= 0 or count_zeros(f) < 1:
            continue
        prof, wstr = _profile(cfg, rng, f, bits)
        inputs = {"function": f.label, "body": format_body(f.domain),
                  "threshold": format_number(sup_lo)}
        if wstr is not None:
            inputs["weight_floor"] = wstr
        try:
            return eval_critical(f, prof, sup_lo, inputs, trial)
        except (ConditionFails, TailUndecidable) as ex:
            last = str(ex)
        except BoundaryUndecidable as ex:
            return _skip("critical", trial, inputs, str(ex))
    return _skip("critical", trial, {}, last)


_RUNNERS = {
    "zero-bound": _run_zero_bound,
    "bang-chain": _run_bang_chain,
    "remez-1d": _run_remez_1d,
    "remez-nd": _run_remez_nd,
    "sublevel": _run_sublevel,
    "rearrange": _run_rearrange,
    "lp": _run_lp,
    "mo": _run_mo,
    "critical": _run_critical,
}


def run_trial(check: str, cfg: SuiteConfig, trial: int,
              with_timing: bool = False) -> CheckRecord:
    """One deterministic trial; the generator depends only on (seed, check, trial)."""
    if check not in _RUNNERS:
        raise ParseError(f"unknown check {check!r}")
    tols = _resolve_tols(cfg.tolerances)
    rng = trial_rng(cfg.seed, check, trial)
    start = time.perf_counter()
    rec = _RUNNERS[check](cfg, tols, rng, trial, cfg.precision_bits)
    if with_timing:
        rec = CheckRecord(rec.check, rec.trial, rec.inputs, rec.bound, rec.oracle,
                          rec.verdict, rec.detail,
                          round(time.perf_counter() - start, 6))
    return rec


def run_suite(cfg: SuiteConfig, with_timing: bool = False) -> Report:
    cfg.validate()
    report = Report(seed=cfg.seed, version=__version__)
    for check in cfg.checks:
        for trial in range(cfg.trials):
            report.add(run_trial(check, cfg, trial, with_timing=with_timing))
    return report
