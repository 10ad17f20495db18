"""Certified profiles b_n(t) = sup_{j >= n} |f^(j)(t)| / (e^j M_j).

The profile compresses all higher derivatives at a point into one decreasing
sequence; everything downstream (zero counts, separation radii, critical
point counts) is phrased in terms of b_0 at a single well-chosen point.

Enclosure strategy: evaluate the ratio for j up to a horizon J and take the
max. The lower endpoint is unconditionally sound. The upper endpoint adds
e^{-(J+1)} for the unseen tail, which is valid because the attached weight is
a true derivative envelope (|f^(j)| <= M_j), as the canonical constructors in
functions.py guarantee. The tail term is dropped exactly when it vanishes:
polynomials past their degree, and truncated weights past N (where M_j is
infinite and the ratio is zero).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .enclosure import (
    CReal,
    Enc,
    as_creal,
    certified_less,
    enc_e,
    enc_exp,
    enc_exp_int,
    enc_cos,
    enc_sin,
    working_precision,
)
from .errors import (
    BoundaryUndecidable,
    ChainInvalid,
    ConditionFails,
    DerivativeUnavailable,
    Inconclusive,
    InvalidRange,
    OutsideDomain,
)
from .functions import CertifiedFunction, PlaneWaveSum, Poly1D, ScaledExp
from .weights import (
    CREAL_E,
    INF,
    DegreeResult,
    FullWeight,
    NatOrInf,
    admissible_data,
    degree,
    is_inf,
    j0,
    sigma,
)

DEFAULT_BITS = 128
_STREAM_CACHE_CAP = 4096
CHAIN_ZERO_TOL = Fraction(1, 10**12)


# -- numerator streams: |f^(j)(t)| for j = 0, 1, 2, ... ----------------------


class _PolyNums:
    """Exact values; reports None once every further derivative is zero."""

    def __init__(self, fam: Poly1D, t: Fraction):
        self._c: List[Fraction] = list(fam.coeffs)
        self._t = t

    def next(self) -> Optional[Enc]:
        if not self._c:
            return None
        acc = Fraction(0)
        for c in reversed(self._c):
            acc = acc * self._t + c
        self._c = [i * c for i, c in enumerate(self._c)][1:]
        return Enc.from_fraction(abs(acc))


class _WaveNums:
    """Two trig evaluations per term up front, then exact rational updates.

    The j-th derivative of c sin(bt + phi + q pi/2) is c b^j shifted by j
    quarter turns, so each step multiplies the coefficient by b and rotates
    through (sin, cos, -sin, -cos) of the fixed base angle.
    """

    def __init__(self, fam: PlaneWaveSum, t: Fraction):
        self._rows = []
        for w in fam.terms:
            b = w.freq[0]
            theta = Enc.from_fraction(b * t + w.phase)
            s, c = enc_sin(theta), enc_cos(theta)
            self._rows.append([w.amp, b, w.quarter % 4, (s, c, -s, -c)])

    def next(self) -> Optional[Enc]:
        total = Enc.zero()
        for row in self._rows:
            total = total + row[3][row[2]].scale(row[0])
            row[0] = row[0] * row[1]
            row[2] = (row[2] + 1) % 4
        return total.abs()


class _ExpNums:
    def __init__(self, fam: ScaledExp, t: Fraction):
        base = CReal.e_power(fam.a * t).enclose()
        self._cur = base.scale(abs(fam.amp))
        self._rate = abs(fam.a)

    def next(self) -> Optional[Enc]:
        val = self._cur
        self._cur = self._cur.scale(self._rate)
        return val


def _numerators(fam, t: Fraction):
    if isinstance(fam, Poly1D):
        return _PolyNums(fam, t)
    if isinstance(fam, PlaneWaveSum):
        return _WaveNums(fam, t)
    if isinstance(fam, ScaledExp):
        return _ExpNums(fam, t)
    raise DerivativeUnavailable(f"no derivative stream for {type(fam).__name__}")


class _RatioStream:
    """Lazily extended ratios |f^(j)(t)| / (e^j M_j), j from 0."""

    __slots__ = ("ratios", "exhausted_at", "_nums", "_inv", "_e_inv", "_mu", "_bits")

    def __init__(self, f: CertifiedFunction, w: FullWeight, t: Fraction, bits: int):
        self._mu = w.mu
        self._bits = bits
        with working_precision(bits):
            self._nums = _numerators(f.family, t)
            self._e_inv = enc_exp_int(-1)
            self._inv = Enc.from_fraction(Fraction(1, 1) / w.M0)
        self.ratios: List[Enc] = []
        self.exhausted_at: Optional[int] = None

    def upto(self, J: int) -> List[Enc]:
        if len(self.ratios) <= J:
            with working_precision(self._bits):
                while len(self.ratios) <= J:
                    self._advance()
        return self.ratios

    def _advance(self):
        j = len(self.ratios)
        if j > 0:
            # 1/(e^j M_j) picks up one factor 1/(e mu_j) per step; past a
            # truncation recip_enc is the exact zero interval.
            self._inv = self._inv * self._e_inv * self._mu.recip_enc(j)
        if self.exhausted_at is not None:
            self.ratios.append(Enc.zero())
            return
        num = self._nums.next()
        if num is None:
            self.exhausted_at = j
            self.ratios.append(Enc.zero())
            return
        self.ratios.append(num * self._inv)


class BangProfile:
    """Evaluator for one function against one derivative envelope.

    The weight defaults to the function's own. Passing a different weight is
    allowed (e.g. a rescaled one); the upper enclosure endpoint is only sound
    if that weight still dominates the derivatives.
    """

    def __init__(self, f: CertifiedFunction, weight: Optional[FullWeight] = None,
                 bits: int = DEFAULT_BITS, horizon: Optional[int] = None):
        if f.dimension != 1:
            raise DerivativeUnavailable("profiles are univariate; restrict to a line first")
        self.f = f
        self.w = weight if weight is not None else f.weight
        self.bits = bits
        self.horizon = horizon
        self._streams: Dict[Fraction, _RatioStream] = {}

    def _stream(self, t: Fraction) -> _RatioStream:
        s = self._streams.get(t)
        if s is None:
            if len(self._streams) >= _STREAM_CACHE_CAP:
                self._streams.clear()
            s = _RatioStream(self.f, self.w, t, self.bits)
            self._streams[t] = s
        return s

    def _horizon_for(self, n: int) -> int:
        if self.horizon is not None:
            return max(n, self.horizon)
        N = self.w.mu.N
        if not is_inf(N):
            return max(n, int(N))
        if isinstance(self.f.family, Poly1D):
            return max(n, self.f.family.degree)
        return n + 64

    def value(self, n: int, t) -> Enc:
        """Enclosure of b_n(t)."""
        if n < 0:
            raise InvalidRange(f"profile index {n} < 0")
        t = Fraction(t)
        J = self._horizon_for(n)
        stream = self._stream(t)
        ratios = stream.upto(J)
        window = ratios[n:J + 1]
        lo = window[0].lo
        hi = window[0].hi
        for r in window[1:]:
            if r.lo > lo:
                lo = r.lo
            if r.hi > hi:
                hi = r.hi
        fam = self.f.family
        tail_zero = (not is_inf(self.w.mu.N) and J >= self.w.mu.N) or (
            isinstance(fam, Poly1D) and J >= fam.degree)
        if not tail_zero:
            with working_precision(self.bits):
                tail = enc_exp_int(-(J + 1))
            if tail.hi > hi:
                hi = tail.hi
        return Enc(lo, hi)


# -- propagation between nearby points ---------------------------------------


def check_bang_lemma(prof: BangProfile, n: int, k: int, t, s) -> bool:
    """Decide b_n(s) <= max(b_n(t), e^{-k}) * exp(e |t - s| mu_k), k > n.

    True when certified, False when certifiably violated, Inconclusive when
    the enclosures overlap (expected at s = t, where the bound is an
    equality).
    """
    if k <= n:
        raise InvalidRange(f"need k > n, got k={k} n={n}")
    t, s = Fraction(t), Fraction(s)
    mu_k = prof.w.mu.entry_creal(k)
    if mu_k is INF:
        return True
    lhs = prof.value(n, s)
    bt = prof.value(n, t)
    with working_precision(prof.bits):
        ek = enc_exp_int(-k)
        base = Enc(max(bt.lo, ek.lo), max(bt.hi, ek.hi))
        factor = enc_exp(enc_e() * Enc.from_fraction(abs(t - s)) * mu_k.enclose())
        rhs = base * factor
    if lhs.hi <= rhs.lo:
        return True
    if lhs.lo > rhs.hi:
        return False
    raise Inconclusive(
        f"b_{n}({s}) in {lhs!r} vs bound {rhs!r}: enclosures overlap")


# -- chains of derivative zeros ----------------------------------------------


@dataclass(frozen=True)
class ChainReport:
    points: Tuple[Fraction, ...]
    total_length: Fraction
    lower_bound: Enc
    b0_lower: Fraction
    j0: Optional[int]
    holds: bool
    strict_expected: bool
    strict_holds: bool


def _zero_claim_ok(prof: BangProfile, order: int, x: Fraction) -> bool:
    m_j = prof.w.m_exact(order)
    if m_j is INF:
        return True
    with working_precision(prof.bits):
        val = prof.f.deriv_abs_enc(order, x)
    if m_j is not None:
        return val.hi_fraction() <= CHAIN_ZERO_TOL * m_j
    tol = prof.w.m_creal(order).scale(CHAIN_ZERO_TOL)
    return not certified_less(tol, as_creal(val.hi_fraction()))


def verify_bang_chain(prof: BangProfile, points) -> ChainReport:
    """Check sum |x_{j-1} - x_j| >= (1/e) Sigma_mu(j0 + 1, m + 1).

    points = (x_0, ..., x_m) where f^(j)(x_j) = 0 for j = 1..m and j0 is
    taken at b_0(x_0). Claimed zeros are validated against a relative
    tolerance of CHAIN_ZERO_TOL * M_j; a violation raises ChainInvalid.
    """
    xs = tuple(Fraction(x) for x in points)
    m = len(xs) - 1
    if m < 1:
        raise InvalidRange("a chain needs at least two points")
    for order in range(1, m + 1):
        if not _zero_claim_ok(prof, order, xs[order]):
            raise ChainInvalid(
                f"derivative {order} at {xs[order]} is not a certified zero")
    total = sum(abs(xs[i] - xs[i + 1]) for i in range(m))
    b0 = prof.value(0, xs[0])
    b0_lo = b0.lo_fraction()
    if b0_lo <= 0:
        return ChainReport(xs, total, Enc.zero(), b0_lo, None,
                           holds=True, strict_expected=False, strict_holds=total > 0)
    j0_val = j0(b0_lo)
    with working_precision(prof.bits):
        bound = sigma(prof.w.mu, j0_val + 1, m + 1).enclose() * enc_exp_int(-1)
        bound_hi = bound.hi_fraction()
        bound_lo = bound.lo_fraction()
    if total < bound_lo:
        return ChainReport(xs, total, bound, b0_lo, j0_val,
                           holds=False, strict_expected=j0_val <= m, strict_holds=False)
    if total < bound_hi:
        raise Inconclusive(
            f"chain length {float(total):.6g} inside bound enclosure {bound!r}")
    return ChainReport(xs, total, bound, b0_lo, j0_val,
                       holds=True, strict_expected=j0_val <= m,
                       strict_holds=total > bound_hi)


# -- zero counting on the domain interval ------------------------------------


@dataclass(frozen=True)
class ZeroBoundReport:
    base_point: Fraction
    scale: Fraction
    b0_lower: Fraction
    j0: int
    degree_result: DegreeResult
    one_sided: NatOrInf
    total: NatOrInf
    bootstrap_degree: NatOrInf


def zero_count_bound(prof: BangProfile, base_point) -> ZeroBoundReport:
    """Bound the number of zeros of f on its interval domain.

    One side of the base point carries at most d = degree(|I| mu at b_0)
    zeros, so the whole interval carries at most 2d (d when the base point
    is an endpoint). Requires Sigma_mu(j0 + 1, inf) > |I| e; otherwise the
    weight cannot certify anything on an interval this long and
    ConditionFails is raised. bootstrap_degree = d + 1 is the index from
    which b_{d+1} controls sup |f| back upward.
    """
    (a,), (b,) = prof.f.domain.bounding_box()
    x = Fraction(base_point)
    if not a <= x <= b:
        raise OutsideDomain(f"base point {x} outside [{a}, {b}]")
    scale = b - a
    if scale <= 0:
        raise InvalidRange("domain interval is degenerate")
    b0_lo = prof.value(0, x).lo_fraction()
    if b0_lo <= 0:
        raise ConditionFails("b_0 at the base point is not certified positive")
    j0_val = j0(b0_lo)
    tail = sigma(prof.w.mu, j0_val + 1, INF)
    if not certified_less(as_creal(scale) * CREAL_E, tail):
        raise ConditionFails(
            "weight tail does not exceed |I| e; interval too long for this weight")
    res = degree(prof.w.mu, scale=scale, b=b0_lo)
    if res.unresolved:
        raise BoundaryUndecidable("degree march unresolved", res.partial_sum_enclosure)
    d = res.degree
    at_end = x == a or x == b
    total = d if at_end else (INF if is_inf(d) else 2 * d)
    boot = INF if is_inf(d) else d + 1
    return ZeroBoundReport(x, scale, b0_lo, j0_val, res, d, total, boot)


def distance_to_m_fold_zero(prof: BangProfile, x, m: int) -> Fraction:
    """Certified lower bound on |x - y| over points y where f vanishes to
    order m (f and its first m-1 derivatives all zero).

    Needs |f(x)| certifiably positive; the radius is
    (1/e) Sigma_mu(k0 + 1, m) at k0 = j0(|f(x)| / M_0). Returns 0 when the
    sum is empty (k0 >= m), which is sound but uninformative.
    """
    if m < 1:
        raise InvalidRange(f"vanishing order {m} < 1")
    x = Fraction(x)
    with working_precision(prof.bits):
        fx = prof.f.deriv_abs_enc(0, x)
    fx_lo = fx.lo_fraction()
    if fx_lo <= 0:
        raise InvalidRange("|f(x)| must be certifiably positive")
    k0 = j0(fx_lo / prof.w.M0)
    with working_precision(prof.bits):
        radius = sigma(prof.w.mu, k0 + 1, m).enclose() * enc_exp_int(-1)
        return max(Fraction(0), radius.lo_fraction())


def critical_point_bound(prof: BangProfile, b, has_zero_on_line: bool,
                         oscillation=None) -> NatOrInf:
    """Bound the number of critical points on the line through the profile.

    Precondition: either f vanishes somewhere on the line, or its
    oscillation along it is at least 2b (so every value level crossed twice
    supplies the needed derivative zeros). The weight must satisfy
    Sigma(j0 + 1, inf) > 2e at threshold b / (2 M_0); the count is then
    2 (N - 1) with N the associated bootstrap integer.
    """
    b = Fraction(b)
    if b <= 0:
        raise InvalidRange("threshold b must be positive")
    if not has_zero_on_line:
        if oscillation is None or Fraction(oscillation) < 2 * b:
            raise ConditionFails(
                "need a zero on the line or oscillation at least 2b")
    ok, n_val = admissible_data(prof.w, 2, b, halving=True)
    if not ok:
        raise ConditionFails("weight tail does not exceed 2e at threshold b / (2 M_0)")
    return INF if is_inf(n_val) else 2 * (n_val - 1)
