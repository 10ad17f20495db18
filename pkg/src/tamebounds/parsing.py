"""Spec-string grammar for weights, functions, bodies, and sets.

Numbers are exact rationals: `3`, `-7/2`, and `0.25` all parse (decimals
exactly). Canonical formatting emits `p/q` or a bare integer, so every
string printed in a report re-parses to an equal value.

    weight    const:c | linear:c | power:c,s | geom:c,r | table:v1,v2,...
    function  poly:c0,c1,... | cheb:n | waves:c@a1;...;ad@phi[+...] | exp:a
    body      interval:a,b | box:lo|hi | ball:center|r | simplex:v0|v1|...
    set       part[;part...]   part = a,b (1-D) or lo|hi (corner lists)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .errors import ParseError
from .functions import (
    CertifiedFunction,
    make_chebyshev,
    make_plane_waves,
    make_polynomial,
    make_scaled_exp,
)
from .geometry import ConvexBody, MeasurableSet, Shape
from .weights import WeightKind, WeightSpec


def parse_number(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as ex:
        raise ParseError(f"not a rational number: {s!r}") from ex


def format_number(q) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _split_tag(s: str, what: str) -> Tuple[str, str]:
    if ":" not in s:
        raise ParseError(f"{what} spec needs 'kind:args', got {s!r}")
    tag, _, rest = s.partition(":")
    return tag.strip(), rest.strip()


def _numbers(csv: str, what: str) -> Tuple[Fraction, ...]:
    parts = [p for p in csv.split(",") if p.strip()]
    if not parts:
        raise ParseError(f"{what}: expected at least one number in {csv!r}")
    return tuple(parse_number(p) for p in parts)


# -- weights -------------------------------------------------------------------


def parse_weight(s: str) -> WeightSpec:
    tag, rest = _split_tag(s, "weight")
    try:
        if tag == "const":
            (c,) = _numbers(rest, "const")
            return WeightSpec.const(c)
        if tag == "linear":
            (c,) = _numbers(rest, "linear")
            return WeightSpec.linear(c)
        if tag == "power":
            c, e = _numbers(rest, "power")
            return WeightSpec.power(c, e)
        if tag == "geom":
            c, r = _numbers(rest, "geom")
            return WeightSpec.geometric(c, r)
        if tag == "table":
            return WeightSpec.table(_numbers(rest, "table"))
    except ParseError:
        raise
    except ValueError as ex:
        raise ParseError(f"weight {tag}: wrong number of arguments in {s!r}") from ex
    except Exception as ex:
        raise ParseError(f"invalid weight spec {s!r}: {ex}") from ex
    raise ParseError(f"unknown weight kind {tag!r}")


def format_weight(mu: WeightSpec) -> str:
    vals = ",".join(format_number(p) for p in mu.params)
    tags = {WeightKind.CONST: "const", WeightKind.LINEAR: "linear",
            WeightKind.POWER: "power", WeightKind.GEOM: "geom",
            WeightKind.TABLE: "table"}
    return f"{tags[mu.kind]}:{vals}"


# -- functions -----------------------------------------------------------------


@dataclass(frozen=True)
class FunctionSpec:
    kind: str  # poly | cheb | waves | exp
    data: tuple


def parse_function(s: str) -> FunctionSpec:
    tag, rest = _split_tag(s, "function")
    if tag == "poly":
        return FunctionSpec("poly", _numbers(rest, "poly"))
    if tag == "cheb":
        try:
            n = int(rest)
        except ValueError as ex:
            raise ParseError(f"cheb: expected an integer degree, got {rest!r}") from ex
        if n < 1:
            raise ParseError("cheb: degree must be >= 1")
        return FunctionSpec("cheb", (n,))
    if tag == "exp":
        (a,) = _numbers(rest, "exp")
        return FunctionSpec("exp", (a,))
    if tag == "waves":
        terms = []
        for chunk in rest.split("+"):
            bits = chunk.split("@")
            if len(bits) != 3:
                raise ParseError(
                    f"waves: each term is c@a1;...;ad@phi, got {chunk!r}")
            amp = parse_number(bits[0])
            freq = tuple(parse_number(a) for a in bits[1].split(";") if a.strip())
            if not freq:
                raise ParseError("waves: empty frequency vector")
            phase = parse_number(bits[2])
            terms.append((amp, freq, phase))
        dims = {len(f) for _, f, _ in terms}
        if len(dims) != 1:
            raise ParseError("waves: terms disagree in dimension")
        return FunctionSpec("waves", tuple(terms))
    raise ParseError(f"unknown function kind {tag!r}")


def format_function(spec: FunctionSpec) -> str:
    if spec.kind == "poly":
        return "poly:" + ",".join(format_number(c) for c in spec.data)
    if spec.kind == "cheb":
        return f"cheb:{spec.data[0]}"
    if spec.kind == "exp":
        return "exp:" + format_number(spec.data[0])
    terms = []
    for amp, freq, phase in spec.data:
        terms.append(format_number(amp) + "@"
                     + ";".join(format_number(a) for a in freq)
                     + "@" + format_number(phase))
    return "waves:" + "+".join(terms)


def build_function(spec: FunctionSpec,
                   body: Optional[ConvexBody] = None) -> CertifiedFunction:
    """Attach a domain and derive the canonical certified weight."""
    label = format_function(spec)
    if spec.kind == "cheb":
        f = make_chebyshev(spec.data[0], label=label)
        if body is not None and body.data != f.domain.data:
            raise ParseError("cheb functions live on interval:-1,1")
        return f
    if body is None:
        raise ParseError(f"{spec.kind} spec needs a body")
    if spec.kind == "poly":
        if body.shape is not Shape.INTERVAL:
            raise ParseError("poly needs an interval body")
        a, b = body.data
        return make_polynomial(spec.data, a, b, label=label)
    if spec.kind == "exp":
        if body.shape is not Shape.INTERVAL:
            raise ParseError("exp needs an interval body")
        a, b = body.data
        return make_scaled_exp(spec.data[0], a, b, label=label)
    if len(spec.data[0][1]) != body.dimension:
        raise ParseError("waves dimension does not match the body")
    return make_plane_waves(spec.data, body, label=label)


# -- bodies ---------------------------------------------------------------------


def parse_body(s: str) -> ConvexBody:
    tag, rest = _split_tag(s, "body")
    try:
        if tag == "interval":
            a, b = _numbers(rest, "interval")
            return ConvexBody.interval(a, b)
        if tag == "box":
            lo, hi = (s_ for s_ in rest.split("|"))
            return ConvexBody.box(_numbers(lo, "box"), _numbers(hi, "box"))
        if tag == "ball":
            center, r = rest.split("|")
            return ConvexBody.ball(_numbers(center, "ball"),
                                   parse_number(r))
        if tag == "simplex":
            verts = [_numbers(v, "simplex") for v in rest.split("|")]
            return ConvexBody.simplex(verts)
    except ParseError:
        raise
    except Exception as ex:
        raise ParseError(f"invalid body spec {s!r}: {ex}") from ex
    raise ParseError(f"unknown body kind {tag!r}")


def format_body(body: ConvexBody) -> str:
    if body.shape is Shape.INTERVAL:
        a, b = body.data
        return f"interval:{format_number(a)},{format_number(b)}"
    if body.shape is Shape.BOX:
        lo, hi = body.data
        return ("box:" + ",".join(map(format_number, lo))
                + "|" + ",".join(map(format_number, hi)))
    if body.shape is Shape.BALL:
        center, r = body.data
        return ("ball:" + ",".join(map(format_number, center))
                + "|" + format_number(r))
    verts = "|".join(",".join(map(format_number, v)) for v in body.data[0])
    return "simplex:" + verts


# -- measurable sets --------------------------------------------------------------


def parse_set(s: str) -> MeasurableSet:
    parts = []
    for chunk in s.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "|" in chunk:
            lo, hi = chunk.split("|")
            parts.append((_numbers(lo, "set"), _numbers(hi, "set")))
        else:
            nums = _numbers(chunk, "set")
            if len(nums) != 2:
                raise ParseError(f"1-D set part needs a,b, got {chunk!r}")
            parts.append(((nums[0],), (nums[1],)))
    if not parts:
        raise ParseError("empty set spec")
    try:
        return MeasurableSet.from_parts(parts)
    except Exception as ex:
        raise ParseError(f"invalid set spec {s!r}: {ex}") from ex


def format_set(ms: MeasurableSet) -> str:
    out = []
    for lo, hi in ms.parts:
        if ms.dimension == 1:
            out.append(f"{format_number(lo[0])},{format_number(hi[0])}")
        else:
            out.append(",".join(map(format_number, lo)) + "|"
                       + ",".join(map(format_number, hi)))
    return ";".join(out)
