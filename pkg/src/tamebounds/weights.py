"""Weight sequences, partial sums, and degrees.

A weight is a positive increasing sequence mu_1 <= mu_2 <= ... which may turn
infinite after index N (truncation). The partial sums

    Sigma(m, n) = sum_{j=m}^{n} 1/mu_j

use the conventions 1/inf = 0, empty sum = 0. The degree of a weight at
threshold b is the largest n for which Sigma(k0+1, n) stays strictly below e,
where k0 = max(0, ceil(ln(1/b))). All strict comparisons against multiples of
e are decided by adaptive-precision enclosures; a tie that survives the
precision cap raises instead of guessing.

Everything here is a pure function of immutable values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple, Union

import gmpy2

from .enclosure import (
    CReal,
    Enc,
    PRECISION_CAP_BITS,
    RationalLike,
    as_creal,
    ceil_to_nat,
    certified_less,
    current_bits,
    enc_e,
    enc_euler_gamma,
    enc_log,
    enc_pow_frac,
    floor_to_int,
    working_precision,
)
from .errors import BoundaryUndecidable, InvalidRange, TailUndecidable

INF = float("inf")

NatOrInf = Union[int, float]

ITERATION_CAP = 10**7
_EXACT_HARMONIC_CAP = 10**4
_MARCH_HARMONIC_CAP = 10**7


def is_inf(x) -> bool:
    return x == INF


class WeightKind(enum.Enum):
    CONST = "const"
    LINEAR = "linear"
    POWER = "power"
    GEOM = "geom"
    TABLE = "table"


@dataclass(frozen=True)
class WeightSpec:
    """Increasing positive sequence, infinite from index N+1 on.

    params holds the family constants as exact Fractions; for TABLE it holds
    the finite entries themselves and N equals the table length.
    """

    kind: WeightKind
    params: Tuple[Fraction, ...]
    N: NatOrInf = INF

    def __post_init__(self):
        k, p = self.kind, self.params
        if k is WeightKind.TABLE:
            if not p:
                raise ValueError("empty table weight")
            if any(v <= 0 for v in p):
                raise ValueError("table entries must be positive")
            if any(p[i] > p[i + 1] for i in range(len(p) - 1)):
                raise ValueError("table entries must be nondecreasing")
            if self.N != len(p):
                raise ValueError("table N must equal the number of entries")
        elif k is WeightKind.CONST:
            if p[0] <= 0:
                raise ValueError("const weight needs c > 0")
        elif k is WeightKind.LINEAR:
            if p[0] <= 0:
                raise ValueError("linear weight needs c > 0")
        elif k is WeightKind.POWER:
            if p[0] <= 0 or p[1] <= 0:
                raise ValueError("power weight needs c > 0, s > 0")
        elif k is WeightKind.GEOM:
            if p[0] <= 0 or p[1] <= 1:
                raise ValueError("geometric weight needs c > 0, r > 1")
        if not (self.N == INF or (isinstance(self.N, int) and self.N >= 1)):
            raise ValueError("N must be a positive integer or INF")

    # -- constructors --------------------------------------------------------

    @staticmethod
    def const(c: RationalLike) -> "WeightSpec":
        return WeightSpec(WeightKind.CONST, (Fraction(c),))

    @staticmethod
    def linear(c: RationalLike) -> "WeightSpec":
        return WeightSpec(WeightKind.LINEAR, (Fraction(c),))

    @staticmethod
    def power(c: RationalLike, s: RationalLike) -> "WeightSpec":
        return WeightSpec(WeightKind.POWER, (Fraction(c), Fraction(s)))

    @staticmethod
    def geometric(c: RationalLike, r: RationalLike) -> "WeightSpec":
        return WeightSpec(WeightKind.GEOM, (Fraction(c), Fraction(r)))

    @staticmethod
    def table(values) -> "WeightSpec":
        vals = tuple(Fraction(v) for v in values)
        return WeightSpec(WeightKind.TABLE, vals, N=len(vals))

    # -- entries -------------------------------------------------------------

    def entry_exact(self, j: int):
        """mu_j as a Fraction, INF past the truncation index, or None if the
        entry is irrational (POWER with fractional exponent)."""
        if j < 1:
            raise InvalidRange(f"weight index {j} < 1")
        if j > self.N:
            return INF
        k, p = self.kind, self.params
        if k is WeightKind.TABLE:
            return p[j - 1]
        if k is WeightKind.CONST:
            return p[0]
        if k is WeightKind.LINEAR:
            return p[0] * j
        if k is WeightKind.GEOM:
            return p[0] * p[1] ** j
        # POWER
        c, s = p
        if s.denominator == 1:
            return c * Fraction(j) ** s.numerator
        return None

    def entry_creal(self, j: int):
        ex = self.entry_exact(j)
        if ex is INF:
            return INF
        if ex is not None:
            return CReal.from_fraction(ex)
        c, s = self.params
        return CReal(lambda: enc_pow_frac(Enc.exact_int(j), s).scale(c))

    def recip_enc(self, j: int) -> Enc:
        """Enclosure of 1/mu_j (the zero interval past the truncation)."""
        ex = self.entry_exact(j)
        if ex is INF:
            return Enc.zero()
        if ex is not None:
            return Enc.from_fraction(Fraction(1) / ex)
        c, s = self.params
        return Enc.one() / enc_pow_frac(Enc.exact_int(j), s).scale(c)

    # -- transforms ----------------------------------------------------------

    def scaled(self, a: RationalLike) -> "WeightSpec":
        """The weight a*mu (each finite entry multiplied by a > 0)."""
        a = Fraction(a)
        if a <= 0:
            raise ValueError("scale must be positive")
        k, p = self.kind, self.params
        if k is WeightKind.TABLE:
            return WeightSpec(k, tuple(a * v for v in p), N=self.N)
        if k in (WeightKind.CONST, WeightKind.LINEAR):
            return WeightSpec(k, (a * p[0],), N=self.N)
        return WeightSpec(k, (a * p[0], p[1]), N=self.N)

    def truncated(self, n: int) -> "WeightSpec":
        if n < 1:
            raise InvalidRange("truncation index must be >= 1")
        if n >= self.N:
            return self
        if self.kind is WeightKind.TABLE:
            return WeightSpec.table(self.params[:n])
        return WeightSpec(self.kind, self.params, N=n)

    def head(self, n: int) -> Tuple[Fraction, ...]:
        """First min(n, N) entries as Fractions (POWER with fractional s not
        supported here)."""
        out = []
        for j in range(1, min(n, self.N if self.N != INF else n) + 1):
            e = self.entry_exact(j)
            if e is INF:
                break
            if e is None:
                raise ValueError("irrational entries have no exact head")
            out.append(e)
        return tuple(out)


@dataclass(frozen=True)
class FullWeight:
    """(mu, M0): derivative bounds M_j = M0 * mu_1 * ... * mu_j."""

    mu: WeightSpec
    M0: Fraction

    def __post_init__(self):
        object.__setattr__(self, "M0", Fraction(self.M0))
        if self.M0 <= 0:
            raise ValueError("M0 must be positive")

    def m_exact(self, j: int):
        """M_j as Fraction, INF past truncation, None if irrational."""
        if j < 0:
            raise InvalidRange("derivative order < 0")
        acc = self.M0
        for i in range(1, j + 1):
            e = self.mu.entry_exact(i)
            if e is INF:
                return INF
            if e is None:
                return None
            acc *= e
        return acc

    def m_creal(self, j: int):
        ex = self.m_exact(j)
        if ex is INF:
            return INF
        if ex is not None:
            return CReal.from_fraction(ex)

        def fn():
            acc = Enc.from_fraction(self.M0)
            for i in range(1, j + 1):
                entry = self.mu.entry_creal(i)
                acc = acc * entry.enclose()
            return acc

        return CReal(fn)

    def scaled(self, a: RationalLike) -> "FullWeight":
        return FullWeight(self.mu.scaled(a), self.M0)

    def truncated(self, n: int) -> "FullWeight":
        return FullWeight(self.mu.truncated(n), self.M0)


@dataclass(frozen=True)
class DegreeResult:
    j0: int
    degree: NatOrInf
    partial_sum_enclosure: Enc
    decided_at: int
    unresolved: bool = False


# -- Sigma ------------------------------------------------------------------


def sigma(mu: WeightSpec, m: NatOrInf, n: NatOrInf) -> CReal:
    """Certified value of Sigma(m, n) = sum_{j=m}^{n} 1/mu_j.

    Edge conventions: 0 if n == 0, if m == INF, or if m > n. Entries past the
    truncation index contribute nothing, so n is clamped to N.
    """
    if not is_inf(m):
        if m < 1:
            raise InvalidRange("sigma needs m >= 1")
    if is_inf(m) or n == 0 or (not is_inf(n) and m > n):
        return CReal.from_fraction(0)
    if is_inf(n) and is_inf(mu.N):
        return _sigma_tail(mu, m)
    n_eff = mu.N if is_inf(n) else min(n, mu.N)
    if m > n_eff:
        return CReal.from_fraction(0)
    return _sigma_finite(mu, m, int(n_eff))


def _sigma_finite(mu: WeightSpec, m: int, n: int) -> CReal:
    k = mu.kind
    if k is WeightKind.GEOM:
        c, r = mu.params
        # sum_{j=m}^{n} r^{-j} = (r^{1-m} - r^{-n}) / (r - 1)
        return CReal.from_fraction((r ** (1 - m) - r ** (-n)) / (c * (r - 1)))
    if k is WeightKind.POWER and mu.params[1].denominator != 1:
        def fn():
            acc = Enc.zero()
            for j in range(m, n + 1):
                acc = acc + mu.recip_enc(j)
            return acc

        return CReal(fn)
    total = Fraction(0)
    for j in range(m, n + 1):
        total += Fraction(1) / mu.entry_exact(j)
    return CReal.from_fraction(total)


def _sigma_tail(mu: WeightSpec, m: int) -> CReal:
    """Sigma(m, infinity) for an untruncated weight."""
    k = mu.kind
    if k is WeightKind.TABLE:
        raise TailUndecidable("a finite table cannot certify an infinite tail")
    if k in (WeightKind.CONST, WeightKind.LINEAR):
        return CREAL_INF  # harmonic or worse: divergent
    if k is WeightKind.GEOM:
        c, r = mu.params
        # sum_{j=m}^inf r^{-j} = r^{1-m} / (r - 1)
        return CReal.from_fraction(r ** (1 - m) / (c * (r - 1)))
    c, s = mu.params
    if s <= 1:
        return CREAL_INF
    return CReal(lambda: _power_tail_enc(c, s, m))


def _power_tail_enc(c: Fraction, s: Fraction, m: int) -> Enc:
    # head exactly (or by enclosure), then integral comparison for the rest:
    # int_{K+1}^inf x^-s dx <= sum_{j>K} j^-s <= int_K^inf x^-s dx
    K = m + min(20000, 8 * current_bits())
    if s.denominator == 1:
        head_f = sum((Fraction(1) / (c * Fraction(j) ** s.numerator) for j in range(m, K + 1)),
                     Fraction(0))
        head = Enc.from_fraction(head_f)
    else:
        head = Enc.zero()
        spec = WeightSpec.power(c, s)
        for j in range(m, K + 1):
            head = head + spec.recip_enc(j)
    expo = s - 1
    inv_c_em1 = Enc.from_fraction(Fraction(1) / (c * expo))
    tail_lo = inv_c_em1 / enc_pow_frac(Enc.exact_int(K + 1), expo)
    tail_hi = inv_c_em1 / enc_pow_frac(Enc.exact_int(K), expo)
    return Enc(
        (head + tail_lo).lo,
        (head + tail_hi).hi,
    )


CREAL_INF = CReal(lambda: Enc.pos_inf())
CREAL_E = CReal.e_power(1)


# -- j0 ---------------------------------------------------------------------


def j0(b) -> int:
    """max(0, ceil(ln(1/b))) for b > 0."""
    x = as_creal(b)
    if not x.is_positive():
        raise InvalidRange("threshold b must be positive")
    if x.exact is not None and x.exact >= 1:
        return 0
    return ceil_to_nat(x.ln().scale(-1))


# -- degree -----------------------------------------------------------------


def degree(mu: WeightSpec, scale=1, b=1, iteration_cap: int = ITERATION_CAP) -> DegreeResult:
    """Largest n with Sigma_{scale*mu}(j0(b)+1, n) < e, possibly INF.

    The comparison against e is strict and certified. A sum that provably
    never reaches e (convergent tail, or a truncated weight whose finite head
    stays below e) gives degree INF. A march that exceeds iteration_cap
    without resolution returns degree = last index with unresolved=True.
    """
    scale = scale if isinstance(scale, CReal) else Fraction(scale)
    k0 = j0(b)
    m = k0 + 1
    smu = mu if scale == 1 else (mu.scaled(scale) if isinstance(scale, Fraction) else None)
    if smu is None:
        # CReal scale: fold it into the target instead (Sigma_{a mu} = Sigma_mu / a)
        return _degree_march_scaled_target(mu, scale, k0, iteration_cap)

    if not is_inf(smu.N) and m > smu.N:
        return DegreeResult(k0, INF, Enc.zero(), decided_at=int(smu.N))

    kind = smu.kind
    if kind is WeightKind.POWER and smu.params[1] == 1:
        smu = WeightSpec(WeightKind.LINEAR, (smu.params[0],), N=smu.N)
        kind = WeightKind.LINEAR
    if kind in (WeightKind.CONST, WeightKind.LINEAR, WeightKind.GEOM):
        base = smu if is_inf(smu.N) else WeightSpec(kind, smu.params)
        if kind is WeightKind.CONST:
            res = _degree_const(base, k0)
        elif kind is WeightKind.LINEAR:
            res = _degree_linear(base, k0)
        else:
            res = _degree_geometric(base, k0)
        if is_inf(smu.N) or is_inf(res.degree) or res.degree + 1 <= smu.N:
            # truncating at or past the crossing changes nothing
            return res
        # the crossing got cut off: the sum stalls below e forever
        n_last = int(smu.N)
        if kind is WeightKind.CONST:
            stalled = Enc.from_fraction(Fraction(n_last - k0) / smu.params[0])
        elif kind is WeightKind.LINEAR:
            stalled = (_harmonic_enclosure(n_last) - _harmonic_enclosure(k0)) \
                * Enc.from_fraction(Fraction(1) / smu.params[0])
        else:
            stalled = sigma(smu, m, INF).enclose()  # geometric: closed form
        return DegreeResult(k0, INF, stalled, decided_at=n_last)
    return _degree_march(smu, k0, iteration_cap)


def _decide_against_e(S: Fraction, target_bits: int):
    """-1 if S < e certified, +1 if S >= e certified, 0 if straddling."""
    with working_precision(target_bits):
        t = enc_e()
    q = gmpy2.mpq(S.numerator, S.denominator)
    if q < t.lo:
        return -1
    if q >= t.hi:
        return 1
    return 0


def _degree_const(mu: WeightSpec, k0: int) -> DegreeResult:
    c = mu.params[0]
    # Sigma(k0+1, n) = (n - k0)/c < e  <=>  n < k0 + c*e
    crossing = floor_to_int(CREAL_E.scale(c))  # c*e is irrational, floor is safe
    d = k0 + crossing
    enc = Enc.from_fraction(Fraction(crossing) / c)
    return DegreeResult(k0, d, enc, decided_at=d + 1)


_H_FRACS = [Fraction(0)]


def _harmonic_exact(n: int) -> Fraction:
    while len(_H_FRACS) <= n:
        _H_FRACS.append(_H_FRACS[-1] + Fraction(1, len(_H_FRACS)))
    return _H_FRACS[n]


def _harmonic_enclosure(n: int) -> Enc:
    """Enclosure of H_n, exact for small n, Euler-Maclaurin envelope beyond.

    For all n >= 1:  ln n + g + 1/(2n) - 1/(12 n^2) < H_n
                     H_n < ln n + g + 1/(2n) - 1/(12 n^2) + 1/(120 n^4)
    (alternating Euler-Maclaurin envelope for the totally monotone 1/x;
    exercised against exact rationals in the test suite).
    """
    if n <= _EXACT_HARMONIC_CAP:
        return Enc.from_fraction(_harmonic_exact(n))
    base = enc_log(Enc.exact_int(n)) + enc_euler_gamma() \
        + Enc.from_fraction(Fraction(1, 2 * n) - Fraction(1, 12 * n * n))
    upper = base + Enc.from_fraction(Fraction(1, 120 * n ** 4))
    return Enc(base.lo, upper.hi)


def _degree_linear(mu: WeightSpec, k0: int) -> DegreeResult:
    c = mu.params[0]
    # Sigma(k0+1, n) = (H_n - H_{k0})/c < e  <=>  H_n < H_{k0} + c*e
    if k0 > _EXACT_HARMONIC_CAP:
        # enormous j0: fall back to the generic march (never hit at desk scale)
        return _degree_march(mu, k0, ITERATION_CAP)
    h_k0 = _harmonic_exact(k0)
    target = CReal.from_fraction(h_k0) + CREAL_E.scale(c)

    def below(n: int) -> bool:
        for bits in _bit_schedule():
            with working_precision(bits):
                h = _harmonic_enclosure(n)
                t = target.enclose()
            if h.lt(t):
                return True
            if t.lt(h) or t.hi <= h.lo:
                return False
        raise BoundaryUndecidable(f"harmonic sum vs target tie at n={n}", None)

    hi = max(k0 + 1, 2)
    while below(hi):
        hi *= 2
    lo = k0  # H_{k0} < target always (c*e > 0)
    # invariant: below(lo) true or lo == k0, below(hi) false
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if below(mid):
            lo = mid
        else:
            hi = mid
    with working_precision(current_bits()):
        s_enc = (_harmonic_enclosure(lo) - Enc.from_fraction(h_k0)) * \
            Enc.from_fraction(Fraction(1) / c)
    return DegreeResult(k0, lo, s_enc, decided_at=hi)


def _degree_geometric(mu: WeightSpec, k0: int) -> DegreeResult:
    c, r = mu.params
    m = k0 + 1
    # Sigma(m, n) < e  <=>  r^{-n} > r^{1-m} - c (r-1) e =: R
    R = CReal.from_fraction(r ** (1 - m)) - CREAL_E.scale(c * (r - 1))
    total = sigma(mu, m, INF)
    if not certified_less(CREAL_E, total):
        # total <= e; equality impossible (rational vs e), so degree is INF
        with working_precision(current_bits()):
            return DegreeResult(k0, INF, total.enclose(), decided_at=m)
    # R > 0 here since total > e
    y = CReal(lambda: enc_log(R.enclose()).scale(-1) / enc_log(Enc.from_fraction(r)))
    d = max(k0, floor_to_int(y))  # y irrational: r^{-n} = R is impossible
    s_enc = sigma(mu, m, d).enclose()
    return DegreeResult(k0, d, s_enc, decided_at=d + 1)


def _bit_schedule():
    bits = max(current_bits(), 64)
    while bits <= PRECISION_CAP_BITS:
        yield bits
        bits *= 2


def _degree_march(mu: WeightSpec, k0: int, iteration_cap: int) -> DegreeResult:
    """Generic march for truncated weights and POWER kinds."""
    m = k0 + 1
    convergent_tail = (
        mu.kind is WeightKind.POWER and is_inf(mu.N) and mu.params[1] > 1
    )
    if convergent_tail:
        total = sigma(mu, m, INF)
        try:
            if not certified_less(CREAL_E, total):
                with working_precision(current_bits()):
                    return DegreeResult(k0, INF, total.enclose(), decided_at=m)
        except BoundaryUndecidable:
            raise
    exact_terms = mu.kind is not WeightKind.POWER or mu.params[1].denominator == 1

    for bits in _bit_schedule():
        with working_precision(bits):
            t = enc_e()
            S_f = Fraction(0)
            S_e = Enc.zero()
            n = m - 1
            last = m
            straddled = False
            while True:
                n += 1
                last = n
                if not is_inf(mu.N) and n > mu.N:
                    # stalled below e: every later n also qualifies
                    enc = Enc.from_fraction(S_f) if exact_terms else S_e
                    return DegreeResult(k0, INF, enc, decided_at=int(mu.N))
                if exact_terms:
                    ent = mu.entry_exact(n)
                    if ent == INF:
                        enc = Enc.from_fraction(S_f)
                        return DegreeResult(k0, INF, enc, decided_at=n - 1)
                    S_f += Fraction(1) / ent
                    q = gmpy2.mpq(S_f.numerator, S_f.denominator)
                    if q < t.lo:
                        pass  # n still qualifies
                    elif q >= t.hi:
                        return DegreeResult(k0, n - 1, Enc.from_fraction(S_f),
                                            decided_at=n)
                    else:
                        straddled = True
                        break
                else:
                    S_e = S_e + mu.recip_enc(n)
                    if S_e.hi < t.lo:
                        pass
                    elif S_e.lo >= t.hi:
                        return DegreeResult(k0, n - 1, S_e, decided_at=n)
                    else:
                        straddled = True
                        break
                if n - m + 1 >= iteration_cap:
                    enc = Enc.from_fraction(S_f) if exact_terms else S_e
                    return DegreeResult(k0, n, enc, decided_at=n, unresolved=True)
        # only a straddle falls through to the next precision
        assert straddled
    raise BoundaryUndecidable(
        f"partial sum straddles e at index {last} up to the precision cap", None)


def _degree_march_scaled_target(mu: WeightSpec, scale: CReal, k0: int,
                                iteration_cap: int) -> DegreeResult:
    """degree for an irrational scale: compare Sigma_mu against scale*e."""
    m = k0 + 1
    if not is_inf(mu.N) and m > mu.N:
        return DegreeResult(k0, INF, Enc.zero(), decided_at=int(mu.N))
    target = scale * CREAL_E
    for bits in _bit_schedule():
        with working_precision(bits):
            t = target.enclose()
            S = Enc.zero()
            n = m - 1
            straddled = False
            while True:
                n += 1
                if not is_inf(mu.N) and n > mu.N:
                    return DegreeResult(k0, INF, S, decided_at=int(mu.N))
                S = S + mu.recip_enc(n)
                if S.hi < t.lo:
                    pass
                elif S.lo >= t.hi:
                    return DegreeResult(k0, n - 1, S, decided_at=n)
                else:
                    straddled = True
                    break
                if n - m + 1 >= iteration_cap:
                    return DegreeResult(k0, n, S, decided_at=n, unresolved=True)
        assert straddled
    raise BoundaryUndecidable("scaled partial sum straddles the target", None)


# -- truncation and admissibility -------------------------------------------


def truncate(w: FullWeight, n: int) -> FullWeight:
    """Set all entries with index >= n+1 to infinity."""
    return w.truncated(n)


def admissible_data(w: FullWeight, delta, b, halving: bool = True):
    """Check Sigma(j0+1, inf) > delta*e and produce the associated integer.

    j0 is computed at threshold b/(2*M0) when halving is set (the factor-two
    convention) and at b/M0 otherwise. On success the second component is
    N = degree(delta*mu at that threshold) + 1.
    """
    ratio = _threshold_ratio(w, b, halving)
    k0 = j0(ratio)
    tail = sigma(w.mu, k0 + 1, INF)
    target = as_creal(delta) * CREAL_E
    if not certified_less(target, tail):
        return (False, None)
    res = degree(w.mu, scale=delta, b=ratio)
    if res.unresolved:
        raise BoundaryUndecidable("degree march hit the iteration cap", None)
    return (True, res.degree + 1 if not is_inf(res.degree) else INF)


def _threshold_ratio(w: FullWeight, b, halving: bool):
    denom = 2 * w.M0 if halving else w.M0
    return as_creal(b).scale(Fraction(1) / denom)


def is_quasianalytic(mu: WeightSpec) -> bool:
    """Whether sum 1/mu_j diverges (meaningful only for untruncated weights)."""
    if not is_inf(mu.N):
        return False
    k = mu.kind
    if k in (WeightKind.CONST, WeightKind.LINEAR):
        return True
    if k is WeightKind.GEOM:
        return False
    if k is WeightKind.POWER:
        return mu.params[1] <= 1
    return False  # TABLE always has a finite sum


def bump_necessary_condition(w: FullWeight, delta, b) -> bool:
    """Sigma(j0+1, inf) <= delta*e with j0 at threshold b/(2*M0).

    This must hold for a function with the given derivative control and sup
    norm >= b to vanish identically near the boundary of a body of diameter
    delta. Returns False when the tail certifiably exceeds delta*e.
    """
    ratio = _threshold_ratio(w, b, halving=True)
    k0 = j0(ratio)
    tail = sigma(w.mu, k0 + 1, INF)
    target = as_creal(delta) * CREAL_E
    # condition is tail <= target; certified_less treats an exact tie as False
    return not certified_less(target, tail)
