"""Function families with certified derivative growth.

Each family knows three things: how to evaluate itself over a rational box
(returning a directed-rounded enclosure), how to differentiate itself exactly
within the family, and which weight sequence controls all of its derivative
sup-norms on a given domain. Weights are derived analytically per family, so
every instance is born with a certificate rather than acquiring one by
estimation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .enclosure import CReal, Enc, current_bits, enc_cos, enc_sin
from .errors import DerivativeUnavailable, ShapeUnsupported
from .geometry import ConvexBody, Shape
from .weights import FullWeight, WeightSpec

Cell = Tuple[Tuple[Fraction, Fraction], ...]


def _enc_of(lo: Fraction, hi: Fraction) -> Enc:
    if lo == hi:
        return Enc.from_fraction(lo)
    return Enc.hull(Enc.from_fraction(lo), Enc.from_fraction(hi))


def _instance_cache(obj, bits: int, builder):
    # per-instance memo keyed by precision; cheaper than hashing coefficient
    # tuples through functools caches
    store = obj.__dict__.get("_enc_cache")
    if store is None:
        store = {}
        object.__setattr__(obj, "_enc_cache", store)
    val = store.get(bits)
    if val is None:
        val = builder()
        store[bits] = val
    return val


def _poly_consts(p: "Poly1D", bits: int) -> Tuple[Enc, ...]:
    return _instance_cache(
        p, bits, lambda: tuple(Enc.from_fraction(c) for c in p.coeffs))


def _wave_consts(f: "PlaneWaveSum", bits: int):
    def build():
        out = []
        for w in f.terms:
            freq = tuple(Enc.from_fraction(a) if a else None for a in w.freq)
            out.append((Enc.from_fraction(w.amp), freq,
                        Enc.from_fraction(w.phase)))
        return tuple(out)
    return _instance_cache(f, bits, build)


def as_cell(point_or_cell, dim: int) -> Cell:
    """Normalize a rational point or per-axis bounds into a cell."""
    out = []
    for item in point_or_cell:
        if isinstance(item, tuple) and len(item) == 2:
            out.append((Fraction(item[0]), Fraction(item[1])))
        else:
            q = Fraction(item)
            out.append((q, q))
    if len(out) != dim:
        raise ShapeUnsupported(f"expected {dim} coordinates, got {len(out)}")
    return tuple(out)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class Poly1D:
    """c0 + c1 t + ... with exact rational coefficients."""

    coeffs: Tuple[Fraction, ...]

    dimension = 1

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        while len(cs) > 1 and cs[-1] == 0:
            cs = cs[:-1]
        object.__setattr__(self, "coeffs", cs or (Fraction(0),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def eval_exact(self, t: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def eval_enc(self, cell: Cell) -> Enc:
        lo, hi = cell[0]
        if lo == hi:
            return Enc.from_fraction(self.eval_exact(lo))
        t = _enc_of(lo, hi)
        consts = _poly_consts(self, current_bits())
        acc = consts[-1]
        for c in reversed(consts[:-1]):
            acc = acc * t + c
        return acc

    def derivative(self, order: int = 1) -> "Poly1D":
        cs = self.coeffs
        for _ in range(order):
            cs = tuple(c * k for k, c in enumerate(cs) if k)
            if not cs:
                cs = (Fraction(0),)
        return Poly1D(cs)

    def compose_affine(self, shift: Fraction, scale: Fraction) -> "Poly1D":
        """Coefficients of p(shift + scale * t)."""
        acc = [Fraction(0)]
        for c in reversed(self.coeffs):
            # acc <- acc * (shift + scale t) + c
            nxt = [Fraction(0)] * (len(acc) + 1)
            for i, a in enumerate(acc):
                nxt[i] += a * shift
                nxt[i + 1] += a * scale
            nxt[0] += c
            acc = nxt
        return Poly1D(tuple(acc))

    def __mul__(self, other: "Poly1D") -> "Poly1D":
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly1D(tuple(out))

    def scale_amplitude(self, c: Fraction) -> "Poly1D":
        return Poly1D(tuple(q * c for q in self.coeffs))


@dataclass(frozen=True)
class TensorPoly:
    """Product p_1(x_1) * ... * p_d(x_d) of univariate rational polynomials."""

    axes: Tuple[Poly1D, ...]

    @property
    def dimension(self) -> int:
        return len(self.axes)

    def eval_enc(self, cell: Cell) -> Enc:
        acc = Enc.one()
        for p, iv in zip(self.axes, cell):
            acc = acc * p.eval_enc((iv,))
        return acc

    def scale_amplitude(self, c: Fraction) -> "TensorPoly":
        first = self.axes[0].scale_amplitude(c)
        return TensorPoly((first,) + self.axes[1:])


@dataclass(frozen=True)
class Wave:
    amp: Fraction
    freq: Tuple[Fraction, ...]
    phase: Fraction
    quarter: int = 0  # evaluate sin(<freq,x> + phase + quarter * pi/2)


@dataclass(frozen=True)
class PlaneWaveSum:
    """Finite sum of plane waves sum_k c_k sin(<a_k, x> + phi_k)."""

    terms: Tuple[Wave, ...]
    dim: int

    @property
    def dimension(self) -> int:
        return self.dim

    def eval_enc(self, cell: Cell) -> Enc:
        consts = _wave_consts(self, current_bits())
        axis = [_enc_of(lo, hi) for lo, hi in cell]
        acc = Enc.zero()
        for w, (amp_e, freq_e, phase_e) in zip(self.terms, consts):
            arg = phase_e
            for a, x in zip(freq_e, axis):
                if a is not None:
                    arg = arg + x * a
            q = w.quarter % 4
            val = enc_sin(arg) if q % 2 == 0 else enc_cos(arg)
            if q >= 2:
                val = -val
            acc = acc + val * amp_e
        return acc

    def derivative(self, order: int = 1) -> "PlaneWaveSum":
        if self.dim != 1:
            raise DerivativeUnavailable("total derivative only in dimension 1")
        terms = []
        for w in self.terms:
            b = w.freq[0]
            terms.append(Wave(w.amp * b ** order, w.freq, w.phase,
                              w.quarter + order))
        return PlaneWaveSum(tuple(terms), 1)

    def scale_amplitude(self, c: Fraction) -> "PlaneWaveSum":
        return PlaneWaveSum(
            tuple(replace(w, amp=w.amp * c) for w in self.terms), self.dim)


@dataclass(frozen=True)
class ScaledExp:
    """amp * e^{a t} in one variable."""

    a: Fraction
    amp: Fraction = Fraction(1)

    dimension = 1

    def eval_enc(self, cell: Cell) -> Enc:
        lo, hi = cell[0]
        lo_v = CReal.e_power(self.a * lo).enclose()
        hi_v = CReal.e_power(self.a * hi).enclose() if hi != lo else lo_v
        return Enc.hull(lo_v, hi_v).scale(self.amp)

    def derivative(self, order: int = 1) -> "ScaledExp":
        return ScaledExp(self.a, self.amp * self.a ** order)

    def scale_amplitude(self, c: Fraction) -> "ScaledExp":
        return ScaledExp(self.a, self.amp * c)


# ---------------------------------------------------------------------------
# canonical weights


def _poly_sup_upper(p: Poly1D, a: Fraction, b: Fraction,
                    rel_tol: Fraction = Fraction(1, 1000)) -> Fraction:
    """Rational upper bound for sup |p| on [a, b] by interval subdivision."""
    best_lo = abs(p.eval_exact(a))
    best_lo = max(best_lo, abs(p.eval_exact(b)))
    cells = [(a, b)]
    for _ in range(40):
        mids = [(lo + hi) / 2 for lo, hi in cells]
        for m in mids:
            best_lo = max(best_lo, abs(p.eval_exact(m)))
        ranges = [(abs(p.eval_enc((c,))), c) for c in cells]
        hi_bound = max(r.hi_fraction() for r, _ in ranges)
        if best_lo > 0 and hi_bound - best_lo <= rel_tol * best_lo:
            return hi_bound
        cutoff = best_lo
        keep = []
        for r, c in ranges:
            if r.hi_fraction() > cutoff:
                lo, hi = c
                m = (lo + hi) / 2
                keep.append((lo, m))
                keep.append((m, hi))
        if not keep:
            return hi_bound
        cells = keep
        if len(cells) > 4096:
            return max(abs(p.eval_enc((c,))).hi_fraction()
                       for c in cells)
    return max(abs(p.eval_enc((c,))).hi_fraction() for c in cells)


def _markov_rate(n: int, width: Fraction) -> Fraction:
    # derivative growth constant for a degree-n polynomial on a width-w interval
    return Fraction(2 * n * n, 1) / width if n else Fraction(1)


def poly_weight(p: Poly1D, a: Fraction, b: Fraction,
                sup_upper: Optional[Fraction] = None) -> FullWeight:
    m0 = sup_upper if sup_upper is not None else _poly_sup_upper(p, a, b)
    if m0 <= 0:
        raise DerivativeUnavailable("zero polynomial has no positive sup bound")
    return FullWeight(WeightSpec.const(_markov_rate(p.degree, b - a)), m0)


def tensor_poly_weight(f: TensorPoly, box: ConvexBody) -> FullWeight:
    lo, hi = box.bounding_box()
    rate = Fraction(0)
    m0 = Fraction(1)
    for p, x, y in zip(f.axes, lo, hi):
        rate += _markov_rate(p.degree, y - x) if p.degree else 0
        m0 *= _poly_sup_upper(p, x, y)
    if rate == 0:
        rate = Fraction(1)
    if m0 <= 0:
        raise DerivativeUnavailable("zero factor in tensor polynomial")
    return FullWeight(WeightSpec.const(rate), m0)


def wave_weight(f: PlaneWaveSum) -> FullWeight:
    m0 = sum(abs(w.amp) for w in f.terms)
    rate = max((sum(abs(a) for a in w.freq) for w in f.terms),
               default=Fraction(0))
    if m0 <= 0:
        raise DerivativeUnavailable("empty wave sum")
    if rate == 0:
        rate = Fraction(1)
    return FullWeight(WeightSpec.const(rate), m0)


def exp_weight(f: ScaledExp, a: Fraction, b: Fraction) -> FullWeight:
    peak = b if f.a >= 0 else a
    m0 = CReal.e_power(f.a * peak).enclose().hi_fraction() * abs(f.amp)
    rate = abs(f.a) if f.a else Fraction(1)
    return FullWeight(WeightSpec.const(rate), m0)


# ---------------------------------------------------------------------------
# wrapper


@dataclass(frozen=True)
class CertifiedFunction:
    family: object
    domain: ConvexBody
    weight: FullWeight
    exact_sup: Optional[Fraction] = None
    label: str = ""

    @property
    def dimension(self) -> int:
        return self.family.dimension

    def eval_enc(self, point_or_cell) -> Enc:
        return self.family.eval_enc(as_cell(point_or_cell, self.dimension))

    def eval_interval(self, lo, hi) -> Enc:
        return self.family.eval_enc(((Fraction(lo), Fraction(hi)),))

    def derivative(self, order: int = 1) -> "CertifiedFunction":
        """Same-domain derivative; the attached weight is NOT re-derived."""
        if self.dimension != 1:
            raise DerivativeUnavailable("derivative requires dimension 1")
        fam = self.family.derivative(order)
        return replace(self, family=fam, exact_sup=None,
                       label=f"{self.label}'" if self.label else "")

    def deriv_abs_enc(self, order: int, t) -> Enc:
        """Enclosure of |f^(order)(t)| at a rational point, dimension 1."""
        if self.dimension != 1:
            raise DerivativeUnavailable("derivative requires dimension 1")
        t = Fraction(t)
        fam = self.family
        if isinstance(fam, Poly1D):
            if order > fam.degree:
                return Enc.zero()
            return Enc.from_fraction(abs(fam.derivative(order).eval_exact(t)))
        return abs(fam.derivative(order).eval_enc(((t, t),)))

    def scaled_by(self, c) -> "CertifiedFunction":
        c = Fraction(c)
        if c == 0:
            raise DerivativeUnavailable("scaling by zero destroys the weight")
        fam = self.family.scale_amplitude(c)
        w = FullWeight(self.weight.mu, self.weight.M0 * abs(c))
        sup = self.exact_sup * abs(c) if self.exact_sup is not None else None
        return CertifiedFunction(fam, self.domain, w, sup, self.label)

    def restrict_to_line(self, x0, x1,
                         weight: Optional[FullWeight] = None) -> "CertifiedFunction":
        """Restriction to the segment x0 -> x1, parametrized over [0, 1].

        The restricted weight is re-derived canonically from the restricted
        family (exact and at least as tight as scaling the ambient weight by
        the segment length); pass ``weight`` to override.
        """
        x0 = tuple(Fraction(c) for c in x0)
        x1 = tuple(Fraction(c) for c in x1)
        v = tuple(b - a for a, b in zip(x0, x1))
        seg = ConvexBody.interval(0, 1)
        fam = self.family
        if isinstance(fam, PlaneWaveSum):
            terms = []
            for w in fam.terms:
                freq = sum(a * vi for a, vi in zip(w.freq, v))
                phase = w.phase + sum(a * ci for a, ci in zip(w.freq, x0))
                terms.append(Wave(w.amp, (freq,), phase, w.quarter))
            g = PlaneWaveSum(tuple(terms), 1)
            fw = weight or FullWeight(wave_weight(g).mu, self.weight.M0)
            return CertifiedFunction(g, seg, fw, None, self.label)
        if isinstance(fam, TensorPoly):
            prod = Poly1D((Fraction(1),))
            for p, c0, vi in zip(fam.axes, x0, v):
                prod = prod * p.compose_affine(c0, vi)
            fw = weight or poly_weight(prod, Fraction(0), Fraction(1))
            return CertifiedFunction(prod, seg, fw, None, self.label)
        if isinstance(fam, Poly1D):
            g = fam.compose_affine(x0[0], v[0])
            fw = weight or poly_weight(g, Fraction(0), Fraction(1))
            return CertifiedFunction(g, seg, fw, None, self.label)
        raise ShapeUnsupported("restriction not available for this family")


# ---------------------------------------------------------------------------
# constructors


def make_polynomial(coeffs: Sequence, a, b, label: str = "") -> CertifiedFunction:
    p = Poly1D(tuple(Fraction(c) for c in coeffs))
    a, b = Fraction(a), Fraction(b)
    dom = ConvexBody.interval(a, b)
    return CertifiedFunction(p, dom, poly_weight(p, a, b), None, label)


def chebyshev_coeffs(n: int) -> Tuple[Fraction, ...]:
    prev, cur = [Fraction(1)], [Fraction(0), Fraction(1)]
    if n == 0:
        return tuple(prev)
    for _ in range(n - 1):
        nxt = [Fraction(0)] + [2 * c for c in cur]
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return tuple(cur)


def make_chebyshev(n: int, label: str = "") -> CertifiedFunction:
    if n < 1:
        raise ValueError("need n >= 1")
    p = Poly1D(chebyshev_coeffs(n))
    dom = ConvexBody.interval(-1, 1)
    w = FullWeight(WeightSpec.const(Fraction(n * n)), Fraction(1))
    return CertifiedFunction(p, dom, w, Fraction(1), label or f"T{n}")


def make_plane_waves(terms: Sequence[Tuple], domain: ConvexBody,
                     label: str = "") -> CertifiedFunction:
    waves = tuple(Wave(Fraction(c), tuple(Fraction(a) for a in freq),
                       Fraction(phi)) for c, freq, phi in terms)
    d = domain.dimension
    if any(len(w.freq) != d for w in waves):
        raise ShapeUnsupported("frequency dimension mismatch")
    f = PlaneWaveSum(waves, d)
    return CertifiedFunction(f, domain, wave_weight(f), None, label)


def make_scaled_exp(a, lo, hi, amplitude=1, label: str = "") -> CertifiedFunction:
    f = ScaledExp(Fraction(a), Fraction(amplitude))
    lo, hi = Fraction(lo), Fraction(hi)
    dom = ConvexBody.interval(lo, hi)
    return CertifiedFunction(f, dom, exp_weight(f, lo, hi), None, label)


def make_tensor_poly(axes: Sequence[Sequence], box: ConvexBody,
                     label: str = "") -> CertifiedFunction:
    f = TensorPoly(tuple(Poly1D(tuple(Fraction(c) for c in cs)) for cs in axes))
    if f.dimension != box.dimension:
        raise ShapeUnsupported("axis count must match box dimension")
    if box.shape not in (Shape.INTERVAL, Shape.BOX):
        raise ShapeUnsupported("tensor polynomials live on boxes")
    return CertifiedFunction(f, box, tensor_poly_weight(f, box), None, label)
