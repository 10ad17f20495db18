"""Directed-rounding enclosure arithmetic.

Two layers:

* ``Enc`` -- a closed interval [lo, hi] of MPFR numbers computed with outward
  rounding. Every operation returns an interval that contains the exact image
  of its operand intervals. Endpoints may be infinite (an infinite upper
  endpoint is a valid, if useless, upper bound).

* ``CReal`` -- a certified real: a recipe that produces an ``Enc`` at any
  requested precision, plus optional exactness facts (an exact rational value,
  or an exact natural logarithm for values of the form e^q). The exactness
  facts are what make integer-boundary decisions (ceilings of logarithms)
  decidable; pure enclosures can never certify that a value *is* an integer.

Soundness conventions used throughout the package:

* upper bounds are rounded up, lower bounds are rounded down;
* a strict comparison is decided only when the enclosures are disjoint;
* precision escalates by doubling up to a cap, then ``BoundaryUndecidable``.

The working precision is a module-level context variable so that adaptive
loops can rerun whole computations at higher precision without threading a
``bits`` argument through every call.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import os
from fractions import Fraction
from typing import Callable, Optional, Union

import gmpy2

from .errors import BoundaryUndecidable

DEFAULT_BITS = int(os.environ.get("TAMEBOUNDS_PRECISION_BITS", "128"))
PRECISION_CAP_BITS = 4096

_BITS: contextvars.ContextVar[int] = contextvars.ContextVar("tamebounds_bits", default=DEFAULT_BITS)

RationalLike = Union[int, Fraction]


def current_bits() -> int:
    return _BITS.get()


@contextlib.contextmanager
def working_precision(bits: int):
    """Run the enclosed block at the given working precision."""
    token = _BITS.set(int(bits))
    try:
        yield
    finally:
        _BITS.reset(token)


_CTX_CACHE = {}


def _ctx_pair(bits: int):
    pair = _CTX_CACHE.get(bits)
    if pair is None:
        pair = (gmpy2.context(precision=bits, round=gmpy2.RoundDown),
                gmpy2.context(precision=bits, round=gmpy2.RoundUp))
        _CTX_CACHE[bits] = pair
    return pair


def _dn():
    return _ctx_pair(_BITS.get())[0]


def _up():
    return _ctx_pair(_BITS.get())[1]


def _mpq(q: RationalLike):
    if isinstance(q, int):
        return gmpy2.mpq(q)
    return gmpy2.mpq(q.numerator, q.denominator)


def mpfr_to_fraction(x) -> Fraction:
    """Exact conversion of a finite MPFR number to a Fraction (dyadic)."""
    if not gmpy2.is_finite(x):
        raise ValueError("cannot convert non-finite mpfr to Fraction")
    q = gmpy2.mpq(x)
    return Fraction(int(q.numerator), int(q.denominator))


def _exact_neg(x):
    # bare "-x" would round through the active (default 53-bit!) context;
    # negation at the operand's own precision is exact
    with gmpy2.context(precision=max(x.precision, 2)):
        return -x


class Enc:
    """Closed interval [lo, hi], endpoints MPFR (possibly infinite)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi
        if not (lo <= hi):
            raise ValueError(f"malformed enclosure [{lo}, {hi}]")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_fraction(q: RationalLike) -> "Enc":
        m = _mpq(q)
        with _dn():
            lo = gmpy2.mpfr(m)
        with _up():
            hi = gmpy2.mpfr(m)
        return Enc(lo, hi)

    @staticmethod
    def exact_int(n: int) -> "Enc":
        # ints up to the working precision are representable; go through mpq
        # anyway so huge ints still round outward correctly
        return Enc.from_fraction(n)

    @staticmethod
    def zero() -> "Enc":
        z = gmpy2.mpfr(0)
        return Enc(z, z)

    @staticmethod
    def one() -> "Enc":
        o = gmpy2.mpfr(1)
        return Enc(o, o)

    @staticmethod
    def pos_inf() -> "Enc":
        return Enc(gmpy2.mpfr("inf"), gmpy2.mpfr("inf"))

    @staticmethod
    def hull(*encs: "Enc") -> "Enc":
        return Enc(min(e.lo for e in encs), max(e.hi for e in encs))

    # -- predicates --------------------------------------------------------

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def is_finite(self) -> bool:
        return gmpy2.is_finite(self.lo) and gmpy2.is_finite(self.hi)

    def width(self):
        with _up():
            return gmpy2.sub(self.hi, self.lo)

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def __repr__(self) -> str:
        return f"Enc[{self.lo}, {self.hi}]"

    # certified order against another enclosure or an exact rational;
    # mpfr/mpq comparisons in gmpy2 are exact (no rounding)
    def lt(self, other: "Enc") -> bool:
        return self.hi < other.lo

    def gt(self, other: "Enc") -> bool:
        return self.lo > other.hi

    def le_frac(self, q: RationalLike) -> bool:
        return self.hi <= _mpq(q)

    def ge_frac(self, q: RationalLike) -> bool:
        return self.lo >= _mpq(q)

    def lt_frac(self, q: RationalLike) -> bool:
        return self.hi < _mpq(q)

    def gt_frac(self, q: RationalLike) -> bool:
        return self.lo > _mpq(q)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "Enc":
        return Enc(_exact_neg(self.hi), _exact_neg(self.lo))

    def __add__(self, other: "Enc") -> "Enc":
        with _dn():
            lo = gmpy2.add(self.lo, other.lo)
        with _up():
            hi = gmpy2.add(self.hi, other.hi)
        return Enc(lo, hi)

    def __sub__(self, other: "Enc") -> "Enc":
        with _dn():
            lo = gmpy2.sub(self.lo, other.hi)
        with _up():
            hi = gmpy2.sub(self.hi, other.lo)
        return Enc(lo, hi)

    def __mul__(self, other: "Enc") -> "Enc":
        # endpoint products with 0 * inf := 0, which is the sound convention
        # for interval endpoints (the zero factor is an exact endpoint)
        a, b = self.lo, self.hi
        c, d = other.lo, other.hi
        if a >= 0:
            if c >= 0:
                pairs_lo, pairs_hi = ((a, c),), ((b, d),)
            elif d <= 0:
                pairs_lo, pairs_hi = ((b, c),), ((a, d),)
            else:
                pairs_lo, pairs_hi = ((b, c),), ((b, d),)
        elif b <= 0:
            if c >= 0:
                pairs_lo, pairs_hi = ((a, d),), ((b, c),)
            elif d <= 0:
                pairs_lo, pairs_hi = ((b, d),), ((a, c),)
            else:
                pairs_lo, pairs_hi = ((a, d),), ((a, c),)
        else:
            if c >= 0:
                pairs_lo, pairs_hi = ((a, d),), ((b, d),)
            elif d <= 0:
                pairs_lo, pairs_hi = ((b, c),), ((a, c),)
            else:
                pairs_lo, pairs_hi = ((a, d), (b, c)), ((a, c), (b, d))

        def prod(x, y, ctx):
            if x == 0 or y == 0:
                return gmpy2.mpfr(0)
            with ctx:
                return gmpy2.mul(x, y)

        lo = min(prod(x, y, _dn()) for x, y in pairs_lo)
        hi = max(prod(x, y, _up()) for x, y in pairs_hi)
        return Enc(lo, hi)

    def __truediv__(self, other: "Enc") -> "Enc":
        if other.contains_zero():
            raise ZeroDivisionError("enclosure division by interval containing zero")

        def quot(a, b, ctx):
            if a == 0:
                return gmpy2.mpfr(0)
            with ctx:
                return gmpy2.div(a, b)

        pairs = ((self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi))
        lo = min(quot(a, b, _dn()) for a, b in pairs)
        hi = max(quot(a, b, _up()) for a, b in pairs)
        return Enc(lo, hi)

    def abs(self) -> "Enc":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Enc(gmpy2.mpfr(0), max(_exact_neg(self.lo), self.hi))

    __abs__ = abs

    def lo_fraction(self) -> Fraction:
        return mpfr_to_fraction(self.lo)

    def hi_fraction(self) -> Fraction:
        return mpfr_to_fraction(self.hi)

    def scale(self, q: RationalLike) -> "Enc":
        return self * Enc.from_fraction(q)

    def pow_int(self, n: int) -> "Enc":
        if n < 0:
            return Enc.one() / self.pow_int(-n)
        if n == 0:
            return Enc.one()
        if n == 1:
            return self
        if self.lo >= 0:
            with _dn():
                lo = gmpy2.mpfr(self.lo) ** n
            with _up():
                hi = gmpy2.mpfr(self.hi) ** n
            return Enc(lo, hi)
        if self.hi <= 0:
            m = (-self).pow_int(n)
            return -m if n % 2 else m
        # straddles zero
        m = self.abs().pow_int(n)
        if n % 2 == 0:
            return Enc(gmpy2.mpfr(0), m.hi)
        with _dn():
            lo = gmpy2.mpfr(self.lo) ** n
        with _up():
            hi = gmpy2.mpfr(self.hi) ** n
        return Enc(lo, hi)


# -- monotone elementary functions ----------------------------------------


def enc_exp(x: Enc) -> Enc:
    with _dn():
        lo = gmpy2.exp(x.lo)
    with _up():
        hi = gmpy2.exp(x.hi)
    return Enc(lo, hi)


def enc_log(x: Enc) -> Enc:
    if x.hi <= 0:
        raise ValueError("log of non-positive enclosure")
    if x.lo <= 0:
        with _up():
            hi = gmpy2.log(x.hi)
        return Enc(gmpy2.mpfr("-inf"), hi)
    with _dn():
        lo = gmpy2.log(x.lo)
    with _up():
        hi = gmpy2.log(x.hi)
    return Enc(lo, hi)


def enc_sqrt(x: Enc) -> Enc:
    if x.lo < 0:
        raise ValueError("sqrt of partially negative enclosure")
    with _dn():
        lo = gmpy2.sqrt(x.lo)
    with _up():
        hi = gmpy2.sqrt(x.hi)
    return Enc(lo, hi)


def enc_rootn(x: Enc, n: int) -> Enc:
    if n == 1:
        return x
    if x.lo < 0:
        raise ValueError("rootn of partially negative enclosure")
    with _dn():
        lo = gmpy2.rootn(x.lo, n)
    with _up():
        hi = gmpy2.rootn(x.hi, n)
    return Enc(lo, hi)


def enc_pow_frac(x: Enc, e: Fraction) -> Enc:
    """x^e for x >= 0 (x.lo may be 0 when e > 0)."""
    e = Fraction(e)
    if e.denominator == 1:
        return x.pow_int(e.numerator)
    if x.lo < 0:
        raise ValueError("fractional power of partially negative enclosure")
    if x.lo == 0:
        if e <= 0:
            raise ValueError("nonpositive fractional power at zero")
        if x.hi == 0:
            return Enc.zero()
        upper = enc_pow_frac(Enc(x.hi, x.hi), e)
        return Enc(gmpy2.mpfr(0), upper.hi)
    # moderate denominators: exact integer root; otherwise exp(e log x)
    if abs(e.numerator) <= 4096 and e.denominator <= 4096:
        return enc_rootn(x.pow_int(e.numerator), e.denominator)
    return enc_exp(enc_log(x) * Enc.from_fraction(e))


# -- constants (cached per precision) ---------------------------------------

_CONST_CACHE: dict = {}


def _cached_const(name: str, fn) -> Enc:
    key = (name, _BITS.get())
    got = _CONST_CACHE.get(key)
    if got is None:
        with _dn():
            lo = fn()
        with _up():
            hi = fn()
        got = Enc(lo, hi)
        _CONST_CACHE[key] = got
    return got


def enc_e() -> Enc:
    return _cached_const("e", lambda: gmpy2.exp(gmpy2.mpfr(1)))


def enc_pi() -> Enc:
    return _cached_const("pi", gmpy2.const_pi)


def enc_euler_gamma() -> Enc:
    return _cached_const("euler", gmpy2.const_euler)


def enc_exp_int(n: int) -> Enc:
    """Enclosure of e^n for integer n (used for the ubiquitous e^{-k})."""
    with _dn():
        lo = gmpy2.exp(gmpy2.mpfr(n))
    with _up():
        hi = gmpy2.exp(gmpy2.mpfr(n))
    return Enc(lo, hi)


# -- trigonometric range evaluation -----------------------------------------
#
# sin/cos over an interval: evaluate at the endpoints (each correctly rounded,
# so the point images are enclosed) and check whether any critical point of
# the function can lie inside. Over-inclusion of critical points is sound; it
# can only widen the result.


def _grid_range(x: Enc, step: Enc):
    # integers k with k*step possibly in [x.lo, x.hi]; None when the argument
    # is too large for exact index extraction (caller falls back to [-1, 1])
    q = x / step
    if q.lo <= -(1 << 40) or q.hi >= (1 << 40):
        return None
    k_lo = int(gmpy2.floor(q.lo)) - 1
    k_hi = int(gmpy2.ceil(q.hi)) + 1
    return range(k_lo, k_hi + 1)


def _point_sin(x) -> Enc:
    with _dn():
        lo = gmpy2.sin(x)
    with _up():
        hi = gmpy2.sin(x)
    return Enc(lo, hi)


def _point_cos(x) -> Enc:
    with _dn():
        lo = gmpy2.cos(x)
    with _up():
        hi = gmpy2.cos(x)
    return Enc(lo, hi)


def enc_sin(x: Enc) -> Enc:
    full = Enc(gmpy2.mpfr(-1), gmpy2.mpfr(1))
    if not x.is_finite or x.width() >= 7:  # wider than a full period
        return full
    half_pi = enc_pi() * Enc.from_fraction(Fraction(1, 2))
    grid = _grid_range(x, half_pi)
    if grid is None:
        return full
    lo_cand = [_point_sin(x.lo).lo, _point_sin(x.hi).lo]
    hi_cand = [_point_sin(x.lo).hi, _point_sin(x.hi).hi]
    for k in grid:
        if k % 2 == 0:
            continue  # even multiples of pi/2 are zeros of sin, not extremes
        g = half_pi.scale(k)
        if g.hi >= x.lo and g.lo <= x.hi:
            if k % 4 == 1:
                hi_cand.append(gmpy2.mpfr(1))
            else:
                lo_cand.append(gmpy2.mpfr(-1))
    return Enc(max(min(lo_cand), full.lo), min(max(hi_cand), full.hi))


def enc_cos(x: Enc) -> Enc:
    full = Enc(gmpy2.mpfr(-1), gmpy2.mpfr(1))
    if not x.is_finite or x.width() >= 7:
        return full
    pi = enc_pi()
    grid = _grid_range(x, pi)
    if grid is None:
        return full
    lo_cand = [_point_cos(x.lo).lo, _point_cos(x.hi).lo]
    hi_cand = [_point_cos(x.lo).hi, _point_cos(x.hi).hi]
    for k in grid:
        g = pi.scale(k)
        if g.hi >= x.lo and g.lo <= x.hi:
            if k % 2 == 0:
                hi_cand.append(gmpy2.mpfr(1))
            else:
                lo_cand.append(gmpy2.mpfr(-1))
    return Enc(max(min(lo_cand), full.lo), min(max(hi_cand), full.hi))


# -- certified reals ---------------------------------------------------------


class CReal:
    """A real number given by an arbitrary-precision enclosure recipe.

    ``exact`` is set when the value is a known rational; ``ln_exact`` is set
    when the natural logarithm of the value is a known rational (i.e. the
    value is exactly e^q). Either fact makes otherwise-undecidable integer
    boundary questions decidable.
    """

    __slots__ = ("_fn", "exact", "ln_exact")

    def __init__(self, fn: Callable[[], Enc], exact: Optional[Fraction] = None,
                 ln_exact: Optional[Fraction] = None):
        self._fn = fn
        self.exact = exact
        self.ln_exact = ln_exact

    def enclose(self) -> Enc:
        """Enclosure at the current working precision."""
        return self._fn()

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_fraction(q: RationalLike) -> "CReal":
        q = Fraction(q)
        ln = Fraction(0) if q == 1 else None
        return CReal(lambda: Enc.from_fraction(q), exact=q, ln_exact=ln)

    @staticmethod
    def e_power(p: RationalLike) -> "CReal":
        """The value e^p, with its logarithm known exactly."""
        p = Fraction(p)
        if p == 0:
            return CReal.from_fraction(1)

        def fn():
            return enc_pow_frac(enc_e(), p)

        return CReal(fn, exact=None, ln_exact=p)

    @staticmethod
    def sqrt_fraction(q: RationalLike) -> "CReal":
        q = Fraction(q)
        if q < 0:
            raise ValueError("sqrt of negative rational")
        root = _exact_sqrt(q)
        if root is not None:
            return CReal.from_fraction(root)
        return CReal(lambda: enc_sqrt(Enc.from_fraction(q)))

    # -- arithmetic (only what the package needs) ---------------------------

    def __mul__(self, other: "CReal") -> "CReal":
        if self.exact is not None and other.exact is not None:
            return CReal.from_fraction(self.exact * other.exact)
        ln = None
        if self.ln_exact is not None and other.ln_exact is not None:
            ln = self.ln_exact + other.ln_exact
        exact = None
        fn = lambda: self.enclose() * other.enclose()
        return CReal(fn, exact=exact, ln_exact=ln)

    def __truediv__(self, other: "CReal") -> "CReal":
        if self.exact is not None and other.exact is not None:
            if other.exact == 0:
                raise ZeroDivisionError
            return CReal.from_fraction(self.exact / other.exact)
        ln = None
        if self.ln_exact is not None and other.ln_exact is not None:
            ln = self.ln_exact - other.ln_exact
        return CReal(lambda: self.enclose() / other.enclose(), ln_exact=ln)

    def __add__(self, other: "CReal") -> "CReal":
        if self.exact is not None and other.exact is not None:
            return CReal.from_fraction(self.exact + other.exact)
        return CReal(lambda: self.enclose() + other.enclose())

    def __sub__(self, other: "CReal") -> "CReal":
        if self.exact is not None and other.exact is not None:
            return CReal.from_fraction(self.exact - other.exact)
        return CReal(lambda: self.enclose() - other.enclose())

    def scale(self, q: RationalLike) -> "CReal":
        return self * CReal.from_fraction(q)

    def reciprocal(self) -> "CReal":
        return CReal.from_fraction(1) / self

    def ln(self) -> "CReal":
        if self.ln_exact is not None:
            return CReal.from_fraction(self.ln_exact)
        if self.exact is not None and self.exact <= 0:
            raise ValueError("log of nonpositive value")
        return CReal(lambda: enc_log(self.enclose()))

    def is_positive(self) -> bool:
        if self.exact is not None:
            return self.exact > 0
        if self.ln_exact is not None:
            return True
        return self.enclose().lo > 0


def _exact_sqrt(q: Fraction) -> Optional[Fraction]:
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def as_creal(x: Union[CReal, RationalLike]) -> CReal:
    if isinstance(x, CReal):
        return x
    return CReal.from_fraction(x)


# -- adaptive decisions ------------------------------------------------------


def _escalation_schedule(cap: Optional[int] = None):
    cap = cap or PRECISION_CAP_BITS
    bits = max(_BITS.get(), 64)
    while True:
        yield min(bits, cap)
        if bits >= cap:
            return
        bits *= 2


def certified_less(x: CReal, y: CReal, cap: Optional[int] = None) -> bool:
    """Decide x < y, escalating precision; equality counts as False.

    Raises BoundaryUndecidable if the enclosures still overlap at the cap and
    no exactness fact resolves the tie.
    """
    if x.exact is not None and y.exact is not None:
        return x.exact < y.exact
    if x.ln_exact is not None and y.ln_exact is not None:
        return x.ln_exact < y.ln_exact
    last = None
    for bits in _escalation_schedule(cap):
        with working_precision(bits):
            a, b = x.enclose(), y.enclose()
        if a.lt(b):
            return True
        if b.lt(a) or (a.is_point and b.is_point and a.lo == b.lo):
            return False
        last = (a, b)
    raise BoundaryUndecidable(f"cannot decide order of {last[0]} vs {last[1]}", last)


def floor_to_int(x: CReal, cap: Optional[int] = None) -> int:
    """floor(x) for a certified real; decidable unless x sits on an integer."""
    if x.exact is not None:
        return math.floor(x.exact)
    last = None
    for bits in _escalation_schedule(cap):
        with working_precision(bits):
            e = x.enclose()
        if not e.is_finite or e.hi >= (1 << max(bits - 8, 16)) or e.lo <= -(1 << max(bits - 8, 16)):
            last = e  # escalate: transient infinity, or too big for exact floor
            continue
        fl = int(gmpy2.floor(e.lo))
        fh = int(gmpy2.floor(e.hi))
        if fl == fh:
            return fl
        last = e
    raise BoundaryUndecidable(f"floor straddles an integer: {last}", last)


def ceil_to_nat(x: CReal, cap: Optional[int] = None) -> int:
    """max(0, ceil(x)) for a certified real."""
    if x.exact is not None:
        return max(0, math.ceil(x.exact))
    last = None
    for bits in _escalation_schedule(cap):
        with working_precision(bits):
            e = x.enclose()
        if e.hi <= 0:
            return 0
        if not e.is_finite or e.hi >= (1 << max(bits - 8, 16)):
            last = e
            continue
        cl = int(gmpy2.ceil(e.lo))
        ch = int(gmpy2.ceil(e.hi))
        if cl == ch:
            return max(0, cl)
        # the exact value may sit on the integer e.lo..e.hi straddles
        last = e
    raise BoundaryUndecidable(f"ceiling straddles an integer: {last}", last)


def format_enc(e: Enc, digits: int = 17) -> str:
    """Stable decimal rendering '[lo,hi]' for reports."""

    def one(v) -> str:
        if gmpy2.is_nan(v):
            return "nan"
        if not gmpy2.is_finite(v):
            return "inf" if v > 0 else "-inf"
        return format(v, f".{digits}g")

    return f"[{one(e.lo)},{one(e.hi)}]"
