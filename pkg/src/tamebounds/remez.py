"""Continuous weight extensions and the constants driving sup-norm recovery.

A sequence weight extends to a function on [1, inf) (canonically: piecewise
linear through the integer knots). Its logarithmic growth gamma(n) =
sup_{1 <= s <= n} s mu~'(s)/mu~(s) feeds the master constant
C_N = 4 e^{4 + gamma(2(N-1))}, and every bound here is some arrangement of
(C_N x measure ratio)^{2(N-1)} around a sup norm. Degenerate data (N = 1)
makes the powered constant infinite and every upper bound trivially true.

Rounding discipline: upper bounds are returned as the upper endpoint of an
outward enclosure, lower bounds as the lower endpoint; validity never
depends on rounding direction luck.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from .enclosure import (
    Enc,
    as_creal,
    enc_log,
    enc_pow_frac,
    enc_rootn,
    working_precision,
)
from .errors import (
    BadExponents,
    BoundaryUndecidable,
    ConditionFails,
    EmptySet,
    InvalidRange,
)
from .geometry import ConvexBody, MeasurableSet
from .weights import INF, FullWeight, WeightKind, WeightSpec, admissible_data, is_inf, j0

DEFAULT_BITS = 128

ExtFraction = Union[Fraction, float]  # a rational or INF


# -- the extension and its growth constant ------------------------------------


@dataclass(frozen=True)
class WeightExtension:
    """Piecewise-linear interpolant through (s_j, mu~(s_j)) knots.

    Knot values may be INF past a truncation; any piece touching INF makes
    the growth constant INF. Derivatives at knots follow the left piece.
    """

    knots: Tuple[Tuple[Fraction, ExtFraction], ...]

    def __post_init__(self):
        ss = [s for s, _ in self.knots]
        if len(ss) < 2 or ss != sorted(ss) or len(set(ss)) != len(ss):
            raise InvalidRange("need at least two strictly increasing knots")
        vals = [v for _, v in self.knots]
        finite = [v for v in vals if not is_inf(v)]
        if any(v <= 0 for v in finite):
            raise InvalidRange("extension values must be positive")
        if any(b < a for a, b in zip(finite, finite[1:])):
            raise InvalidRange("extension must be nondecreasing")

    @staticmethod
    def canonical(mu: WeightSpec, n: int) -> "WeightExtension":
        """Knots (1, mu_1), ..., (n, mu_n); INF past a truncation."""
        if n < 2:
            n = 2
        knots = []
        for k in range(1, n + 1):
            v = mu.entry_exact(k)
            if v is None:
                raise InvalidRange(
                    "irrational weight entries have no exact piecewise extension; "
                    "use the smooth closed form")
            knots.append((Fraction(k), v))
        return WeightExtension(tuple(knots))


def gamma_of(ext: WeightExtension, n: int) -> ExtFraction:
    """sup_{1 <= s <= n} s mu~'(s) / mu~(s), exact over the knot pieces.

    On a linear piece the ratio is monotone, so the endpoints carry the sup.
    """
    if n < 1:
        raise InvalidRange(f"extension range end {n} < 1")
    if ext.knots[-1][0] < n:
        raise InvalidRange(f"extension covers [1, {ext.knots[-1][0]}], need {n}")
    best = Fraction(0)
    for (s0, v0), (s1, v1) in zip(ext.knots, ext.knots[1:]):
        if s0 >= n:
            break
        if is_inf(v1) or is_inf(v0):
            return INF
        beta = (v1 - v0) / (s1 - s0)
        hi = min(s1, Fraction(n))
        best = max(best, beta * s0 / v0, beta * hi / (v0 + beta * (hi - s0)))
    return best


def smooth_gamma(mu: WeightSpec) -> Fraction:
    """Growth constant of the closed-form extension, when one exists."""
    if mu.kind is WeightKind.CONST:
        return Fraction(0)
    if mu.kind is WeightKind.LINEAR:
        return Fraction(1)
    if mu.kind is WeightKind.POWER:
        return mu.params[1]
    raise InvalidRange("no finite smooth extension for this weight kind")


# -- the constant bundle --------------------------------------------------------


@dataclass(frozen=True)
class RemezConstants:
    """(N, j0, gamma, C_N) for certified admissible data.

    c_n encloses C_N = 4 e^{4 + gamma(2(N-1))} from above (or is INF).
    When N = 1 the powered constant C_N^{2(N-1)} is infinite by convention
    and every consumer returns the trivial bound.
    """

    N: int
    j0: int
    gamma: ExtFraction
    c_n: Union[Enc, float]

    @property
    def degenerate(self) -> bool:
        return self.N <= 1

    @property
    def power(self) -> int:
        return 2 * (self.N - 1)


def remez_constants(w: FullWeight, delta, b,
                    smooth: bool = False,
                    bits: int = DEFAULT_BITS) -> RemezConstants:
    """Certify admissibility of (w, delta, b) and assemble the constants.

    Requires the weight tail past j0(b / M0) to exceed delta * e; then
    N = degree(delta-scaled weight at that threshold) + 1.
    """
    ok, n_val = admissible_data(w, delta, b, halving=False)
    if not ok:
        raise ConditionFails(
            "weight tail does not exceed delta * e at threshold b / M0")
    if is_inf(n_val):
        raise BoundaryUndecidable("admissible data produced an infinite index", None)
    k0 = j0(as_creal(b).scale(Fraction(1) / w.M0))
    if n_val <= 1:
        gamma = Fraction(0)
    elif smooth:
        gamma = smooth_gamma(w.mu)
    else:
        gamma = gamma_of(WeightExtension.canonical(w.mu, 2 * (n_val - 1)),
                         2 * (n_val - 1))
    if is_inf(gamma):
        c_n = INF
    else:
        with working_precision(bits):
            c_n = _exp_enc(Fraction(4) + gamma).scale(4)
    return RemezConstants(n_val, k0, gamma, c_n)


def _exp_enc(x: Fraction) -> Enc:
    from .enclosure import enc_exp
    return enc_exp(Enc.from_fraction(x))


# -- measures ----------------------------------------------------------------


def _measure_enc(region, bits: int) -> Tuple[Enc, Fraction]:
    """(enclosure, exact-or-upper Fraction) of the region's volume."""
    if isinstance(region, MeasurableSet):
        m = region.measure()
        return Enc.from_fraction(m), m
    with working_precision(bits):
        enc = region.volume().enclose()
    return enc, enc.hi_fraction()


def _inside(inner_bbox, outer_bbox) -> bool:
    (ilo, ihi), (olo, ohi) = inner_bbox, outer_bbox
    return all(a >= x and b <= y for a, b, x, y in zip(ilo, ihi, olo, ohi))


# -- the bounds ---------------------------------------------------------------


def remez_univariate(c: RemezConstants, interval: ConvexBody,
                     e_set: MeasurableSet, sup_e,
                     bits: int = DEFAULT_BITS) -> ExtFraction:
    """Upper bound for sup over the interval: (C_N |I| / |E|)^{2(N-1)} sup_E."""
    if interval.dimension != 1:
        raise InvalidRange("univariate bound needs an interval")
    a, b = interval.data
    m = e_set.measure()
    if m == 0:
        raise EmptySet("the comparison set has measure zero")
    if not _inside(e_set.bounding_box(), interval.bounding_box()):
        raise InvalidRange("comparison set must sit inside the interval")
    sup_e = Fraction(sup_e)
    if c.degenerate or c.c_n is INF:
        return INF
    with working_precision(bits):
        factor = c.c_n.scale((b - a) / m).pow_int(c.power)
        if not factor.is_finite:
            return INF
        return factor.hi_fraction() * sup_e


def remez_multivariate(c: RemezConstants, body: ConvexBody, e_set,
                       bits: int = DEFAULT_BITS) -> ExtFraction:
    """Amplification factor (C_N |L|^{1/d} / (|L|^{1/d} - (|L|-|E|)^{1/d}))^{2(N-1)}."""
    d = body.dimension
    e_enc, e_hi = _measure_enc(e_set, bits)
    if e_hi == 0:
        raise EmptySet("the comparison set has measure zero")
    if not _inside(e_set.bounding_box(), body.bounding_box()):
        raise InvalidRange("comparison set must sit inside the body")
    if c.degenerate or c.c_n is INF:
        return INF
    with working_precision(bits):
        vol = body.volume().enclose()
        root = enc_rootn(vol, d)
        rem = vol - e_enc
        if rem.lo < 0:
            rem = Enc.hull(Enc.zero(), rem)
        den = root - enc_rootn(rem, d)
        if den.lo <= 0:
            return INF
        factor = (c.c_n * root / den).pow_int(c.power)
        if not factor.is_finite:
            return INF
        return factor.hi_fraction()


def remez_body_factor(w: FullWeight, body: ConvexBody, e_set,
                      smooth: bool = False,
                      bits: int = DEFAULT_BITS):
    """Scaling-invariant special case: threshold at b = M0, delta = diam.

    Returns (constants, factor). The diameter enters through a rational
    upper bound, which weakens N soundly.
    """
    with working_precision(bits):
        diam = body.diameter().enclose().hi_fraction()
    c = remez_constants(w, diam, w.M0, smooth=smooth, bits=bits)
    return c, remez_multivariate(c, body, e_set, bits=bits)


def sublevel_volume_bound(c: RemezConstants, body: ConvexBody, t, sup_k,
                          bits: int = DEFAULT_BITS) -> ExtFraction:
    """Upper bound C_N d |K| (t / sup)^{1/(2(N-1))} for |{|f| <= t}|."""
    t, sup_k = Fraction(t), Fraction(sup_k)
    if t <= 0 or sup_k <= 0:
        raise InvalidRange("need t > 0 and a positive certified sup")
    if c.degenerate or c.c_n is INF:
        return INF
    d = body.dimension
    with working_precision(bits):
        vol = body.volume().enclose()
        ratio = enc_pow_frac(Enc.from_fraction(t / sup_k),
                             Fraction(1, c.power))
        out = c.c_n.scale(d) * vol * ratio
        return out.hi_fraction()


def rearrangement_lower_bound(c: RemezConstants, body: ConvexBody,
                              e_measure, lam, sup_k,
                              bits: int = DEFAULT_BITS) -> Fraction:
    """Lower bound sup_K (|E|/|K| (1-lambda) / (C_N d))^{2(N-1)} for f*(lambda |E|)."""
    e_measure, lam, sup_k = Fraction(e_measure), Fraction(lam), Fraction(sup_k)
    if not 0 < lam < 1:
        raise InvalidRange("need 0 < lambda < 1")
    if e_measure <= 0:
        raise EmptySet("need a positive-measure set")
    if c.degenerate or c.c_n is INF:
        return Fraction(0)
    d = body.dimension
    with working_precision(bits):
        vol = body.volume().enclose()
        base = Enc.from_fraction(e_measure * (1 - lam)) / (vol * c.c_n.scale(d))
        out = base.pow_int(c.power)
        return max(Fraction(0), out.lo_fraction() * sup_k)


def lp_comparison_bound(c: RemezConstants, body: ConvexBody, e_measure,
                        p, q, bits: int = DEFAULT_BITS):
    """The three norm-comparison factors (master, same-set, small-set).

    master = (C_N d |K| / |E|)^{2(N-1)(1-q/p)} (2q(N-1)+1)^{1/q-1/p};
    the same-set variant replaces |E| by |K|; the small-set variant uses
    the full power 2(N-1) and tail exponent 1/q. p may be infinite; the
    exponents are formed symbolically so no 1/inf is ever evaluated.
    """
    q = Fraction(q)
    if q <= 0:
        raise BadExponents("need q > 0")
    if is_inf(p):
        q_over_p, inv_p = Fraction(0), Fraction(0)
    else:
        p = Fraction(p)
        if q >= p:
            raise BadExponents("need q < p")
        q_over_p, inv_p = q / p, 1 / p
    e_measure = Fraction(e_measure)
    if e_measure <= 0:
        raise EmptySet("need a positive-measure set")
    if c.degenerate or c.c_n is INF:
        return INF, INF, INF
    d = body.dimension
    exp_main = c.power * (1 - q_over_p)
    exp_tail = 1 / q - inv_p
    tail = Enc.from_fraction(Fraction(q * c.power + 1))
    with working_precision(bits):
        vol = body.volume().enclose()
        base_e = c.c_n.scale(d) * vol / Enc.from_fraction(e_measure)
        base_k = c.c_n.scale(d)
        master = enc_pow_frac(base_e, exp_main) * enc_pow_frac(tail, exp_tail)
        same = enc_pow_frac(base_k, exp_main) * enc_pow_frac(tail, exp_tail)
        small = enc_pow_frac(base_e, Fraction(c.power)) * \
            enc_pow_frac(tail, 1 / q)
        vals = []
        for v in (master, same, small):
            vals.append(INF if not v.is_finite else v.hi_fraction())
    return tuple(vals)


def mean_oscillation_bound(c: RemezConstants, body: ConvexBody, b_measure,
                           same_sup: bool = False,
                           bits: int = DEFAULT_BITS) -> ExtFraction:
    """Upper bound 4(N-1)(ln(C_N d |K| / |B|) + 1) for the mean oscillation
    of ln |f| over B; with same_sup the measure ratio drops out."""
    b_measure = Fraction(b_measure)
    if b_measure <= 0:
        raise EmptySet("need a positive-measure base set")
    if c.degenerate or c.c_n is INF:
        return INF
    d = body.dimension
    with working_precision(bits):
        arg = c.c_n.scale(d)
        if not same_sup:
            vol = body.volume().enclose()
            arg = arg * vol / Enc.from_fraction(b_measure)
        out = (enc_log(arg) + Enc.one()).scale(4 * (c.N - 1))
        return out.hi_fraction()
