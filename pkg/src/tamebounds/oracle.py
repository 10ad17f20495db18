"""Independent brute-force verification: zero counts, sup norms, measures.

Everything here is deliberately naive. Quantities are computed by exact
symbolic algebra (polynomial root counting) or by certified subdivision of
rational cells, never by reusing the bound machinery under test. All numeric
answers come back as rational enclosure pairs (lower, upper).
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Callable, Optional, Tuple, Union

from .enclosure import Enc, enc_log, enc_pow_frac, working_precision
from .errors import (Inconclusive, InvalidRange, ShapeUnsupported, ZeroInBall)
from .functions import CertifiedFunction, Poly1D, ScaledExp
from .geometry import ConvexBody, MeasurableSet, Shape
from .weights import FullWeight

QUAD_BITS = 64  # quadrature runs at reduced precision; rounding stays outward

Region = Union[ConvexBody, MeasurableSet]

DEPTH_CAP = 24
CELL_BUDGET = 120_000

INF_P = Fraction(-1)  # sentinel exponent meaning p = infinity


def _region_bbox(region: Region):
    return region.bounding_box()


def _region_volume_bounds(region: Region) -> Tuple[Fraction, Fraction]:
    if isinstance(region, MeasurableSet):
        v = region.measure()
        return v, v
    vol = region.volume()
    if vol.exact is not None:
        return vol.exact, vol.exact
    e = vol.enclose()
    return e.lo_fraction(), e.hi_fraction()


def _cell_volume(lo, hi) -> Fraction:
    v = Fraction(1)
    for a, b in zip(lo, hi):
        v *= b - a
    return v


def _split_cell(lo, hi):
    widths = [b - a for a, b in zip(lo, hi)]
    ax = widths.index(max(widths))
    mid = (lo[ax] + hi[ax]) / 2
    left_hi = tuple(mid if i == ax else c for i, c in enumerate(hi))
    right_lo = tuple(mid if i == ax else c for i, c in enumerate(lo))
    return (lo, left_hi), (right_lo, hi)


def _cell_mid(lo, hi):
    return tuple((a + b) / 2 for a, b in zip(lo, hi))


def _contains_point(region: Region, p) -> bool:
    if isinstance(region, MeasurableSet):
        return any(all(a < x < b for a, x, b in zip(plo, p, phi))
                   for plo, phi in region.parts)
    return region.contains(p)


def _as_cell(lo, hi):
    return tuple(zip(lo, hi))


# ---------------------------------------------------------------------------
# zero counting


def count_zeros(f: CertifiedFunction, interval=None,
                with_multiplicity: bool = False) -> int:
    """Number of zeros of f on a closed subinterval of its domain."""
    if f.dimension != 1:
        raise ShapeUnsupported("zero counting is univariate")
    if interval is None:
        a, b = f.domain.data
    else:
        a, b = Fraction(interval[0]), Fraction(interval[1])
    fam = f.family
    if isinstance(fam, Poly1D):
        return _poly_count(fam, a, b, with_multiplicity)
    if with_multiplicity:
        raise ShapeUnsupported("multiplicity counting needs polynomial algebra")
    if isinstance(fam, ScaledExp):
        if fam.amp == 0:
            raise InvalidRange("identically zero")
        return 0
    return _grid_count(f, a, b)


def _poly_count(p: Poly1D, a: Fraction, b: Fraction,
                with_multiplicity: bool) -> int:
    import sympy

    if all(c == 0 for c in p.coeffs):
        raise InvalidRange("identically zero on the interval")
    x = sympy.Symbol("x")
    coeffs = [sympy.Rational(c.numerator, c.denominator)
              for c in reversed(p.coeffs)]
    poly = sympy.Poly(coeffs, x)
    ra = sympy.Rational(a.numerator, a.denominator)
    rb = sympy.Rational(b.numerator, b.denominator)
    if not with_multiplicity:
        return int(poly.count_roots(ra, rb))
    total = 0
    for fac, mult in poly.sqf_list()[1]:
        total += mult * int(fac.count_roots(ra, rb))
    return total


def _grid_count(f: CertifiedFunction, a: Fraction, b: Fraction) -> int:
    """Certified distinct-zero count by sign brackets with monotone cells."""
    df = f.derivative(1)
    mu1 = f.weight.mu.entry_exact(1)
    m1 = f.weight.M0 * mu1 if mu1 is not None else None

    def excluded(lo, hi):
        # cheap center test via the global derivative bound, then range image
        mid = (lo + hi) / 2
        center = f.eval_enc((mid,)).abs()
        if m1 is not None and center.lo_fraction() > m1 * (hi - lo) / 2:
            return True
        r = f.eval_interval(lo, hi)
        return r.gt_frac(0) or r.lt_frac(0)

    def sign_at(t) -> int:
        v = f.eval_enc((t,))
        if v.gt_frac(0):
            return 1
        if v.lt_frac(0):
            return -1
        return 0

    segments = [(a, b)]
    count = 0
    for _ in range(DEPTH_CAP):
        pending = []
        for lo, hi in segments:
            if excluded(lo, hi):
                continue
            sa, sb = sign_at(lo), sign_at(hi)
            if sa and sb and sa != sb:
                dr = df.eval_interval(lo, hi)
                if dr.gt_frac(0) or dr.lt_frac(0):
                    count += 1
                    continue
            mid = (lo + hi) / 2
            pending.append((lo, mid))
            pending.append((mid, hi))
        if not pending:
            return count
        if len(pending) > CELL_BUDGET:
            break
        segments = pending
    raise Inconclusive("zero count refinement cap reached with undecided cells")


def certified_root(f: CertifiedFunction, a, b,
                   value_target: Optional[Fraction] = None,
                   tol: Optional[Fraction] = None) -> Fraction:
    """A point where f vanishes to within tolerance, from a sign bracket."""
    a, b = Fraction(a), Fraction(b)
    if tol is None:
        tol = (b - a) / 10 ** 14
    sa = f.eval_enc((a,))
    sb = f.eval_enc((b,))
    if not ((sa.gt_frac(0) and sb.lt_frac(0)) or (sa.lt_frac(0) and sb.gt_frac(0))):
        raise Inconclusive("endpoints do not certify a sign bracket")
    pos_left = sa.gt_frac(0)
    while True:
        mid = None
        for num, den in ((1, 2), (7, 16), (9, 16), (13, 32), (19, 32)):
            cand = a + Fraction(num, den) * (b - a)
            v = f.eval_enc((cand,))
            if v.gt_frac(0) or v.lt_frac(0):
                mid = cand
                break
        if mid is None:
            mid = (a + b) / 2
            if value_target is not None and \
                    f.eval_enc((mid,)).abs().hi_fraction() < value_target:
                return mid
            raise Inconclusive("cannot certify signs near the root")
        if v.gt_frac(0) == pos_left:
            a = mid
        else:
            b = mid
        done = b - a <= tol
        if value_target is not None:
            cand = (a + b) / 2
            done = f.eval_enc((cand,)).abs().hi_fraction() < value_target
        if done:
            return (a + b) / 2


def derivative_root(f: CertifiedFunction, order: int, rng,
                    probes: int = 64) -> Fraction:
    """A certified zero of f^(order) inside the domain interval."""
    g = f.derivative(order) if order else f
    a, b = f.domain.data
    offset = Fraction(rng.randrange(1, 2 ** 20), 2 ** 20) / probes
    pts = [a + (b - a) * (Fraction(k, probes) + (offset if 0 < k < probes else 0))
           for k in range(probes + 1)]
    signs = []
    for t in pts:
        v = g.eval_enc((t,))
        signs.append(1 if v.gt_frac(0) else (-1 if v.lt_frac(0) else 0))
    brackets = [k for k in range(probes)
                if signs[k] and signs[k + 1] and signs[k] != signs[k + 1]]
    if not brackets:
        raise Inconclusive(f"no sign bracket for derivative order {order}")
    k = brackets[rng.randrange(len(brackets))]
    target = None
    mj = f.weight.m_creal(order)
    if mj.exact is not None:
        target = mj.exact / 10 ** 13
    return certified_root(g, pts[k], pts[k + 1], value_target=target)


# ---------------------------------------------------------------------------
# sup / min over a region


def sup_norm(f: CertifiedFunction, region: Optional[Region] = None,
             rel_tol: Fraction = Fraction(1, 10 ** 6),
             budget: int = CELL_BUDGET) -> Tuple[Fraction, Fraction]:
    """Enclosure (lower, upper) of sup |f| over the region."""
    region = region if region is not None else f.domain
    blo, bhi = _region_bbox(region)
    tol = rel_tol * f.weight.M0
    cells = [(blo, bhi)]
    lower = Fraction(0)
    upper = None
    for _ in range(2 * DEPTH_CAP):
        scored = []
        for lo, hi in cells:
            cls = region.classify_cell(lo, hi)
            if cls == "outside":
                continue
            r = f.family.eval_enc(_as_cell(lo, hi)).abs()
            hi_val = r.hi_fraction()
            mid = _cell_mid(lo, hi)
            if cls == "inside" or _contains_point(region, mid):
                lower = max(lower, f.eval_enc(mid).abs().lo_fraction())
            scored.append((hi_val, lo, hi))
        upper = max((s[0] for s in scored), default=lower)
        upper = max(upper, lower)
        live = [(lo, hi) for hv, lo, hi in scored if hv > lower + tol]
        if not live:
            return lower, upper
        if 2 * len(live) > budget:
            return lower, upper
        cells = []
        for lo, hi in live:
            c1, c2 = _split_cell(lo, hi)
            cells.extend((c1, c2))
    return lower, upper


def min_abs_lower(f: CertifiedFunction, region: Region,
                  budget: int = CELL_BUDGET) -> Fraction:
    """Certified positive lower bound for min |f| over the region.

    Raises ZeroInBall when no positive bound emerges within the budget.
    """
    blo, bhi = _region_bbox(region)
    cells = [(blo, bhi)]
    for _ in range(2 * DEPTH_CAP):
        floor_vals = []
        live = []
        for lo, hi in cells:
            cls = region.classify_cell(lo, hi)
            if cls == "outside":
                continue
            r = f.family.eval_enc(_as_cell(lo, hi)).abs()
            floor_vals.append(r.lo_fraction())
            if r.contains_zero():
                live.append((lo, hi))
        if not floor_vals:
            raise ZeroInBall("region misses the refinement grid")
        if not live:
            return min(floor_vals)
        if 2 * len(live) > budget:
            raise ZeroInBall("could not certify |f| > 0 on the region")
        cells = []
        for lo, hi in live:
            c1, c2 = _split_cell(lo, hi)
            cells.extend((c1, c2))
    raise ZeroInBall("could not certify |f| > 0 on the region")


# ---------------------------------------------------------------------------
# measures and integrals


def measure_sublevel(f: CertifiedFunction, region: Region, t,
                     stop_upper_below: Optional[Fraction] = None,
                     stop_lower_above: Optional[Fraction] = None,
                     rel_tol: Fraction = Fraction(1, 1000),
                     budget: int = CELL_BUDGET) -> Tuple[Fraction, Fraction]:
    """Enclosure of |{x in region : |f(x)| <= t}|."""
    t = Fraction(t)
    blo, bhi = _region_bbox(region)
    vol_lo, vol_hi = _region_volume_bounds(region)
    tol = rel_tol * vol_hi
    cells = [(blo, bhi)]
    resolved = Fraction(0)
    boundary_slack = vol_hi - vol_lo  # partial-region cells never resolve for balls
    for _ in range(2 * DEPTH_CAP):
        live = []
        pending_vol = Fraction(0)
        for lo, hi in cells:
            cls = region.classify_cell(lo, hi)
            if cls == "outside":
                continue
            r = f.family.eval_enc(_as_cell(lo, hi)).abs()
            if r.lo_fraction() > t:
                continue
            if cls == "inside" and r.hi_fraction() <= t:
                resolved += _cell_volume(lo, hi)
                continue
            live.append((lo, hi))
            pending_vol += _cell_volume(lo, hi)
        upper = min(resolved + pending_vol, vol_hi)
        if stop_upper_below is not None and upper <= stop_upper_below:
            return resolved, upper
        if stop_lower_above is not None and resolved >= stop_lower_above:
            return resolved, upper
        if pending_vol <= max(tol, boundary_slack) or not live:
            return resolved, upper
        if 2 * len(live) > budget:
            return resolved, upper
        cells = []
        for lo, hi in live:
            c1, c2 = _split_cell(lo, hi)
            cells.extend((c1, c2))
    return resolved, min(resolved + pending_vol, vol_hi)


def _pow_abs(r: Enc, p: Fraction) -> Enc:
    if p.denominator == 1:
        return r.pow_int(p.numerator)
    return enc_pow_frac(r, p)


def _refine_integral(region: Region,
                     cell_enc: Callable,
                     abs_tol: Fraction,
                     budget: int,
                     rel_stop: Optional[Fraction] = None) -> Tuple[Fraction, Fraction]:
    """Certified integral of a cellwise enclosure over the region.

    Partial cells contribute their value hulled with zero, which is sound
    when the integrand enclosure is valid on the whole cell. Refinement pops
    the widest contribution first and touches each cell once. rel_stop, when
    given, also stops once the width is small against the running totals
    (useful when no a-priori magnitude estimate exists).
    """
    blo, bhi = _region_bbox(region)

    def contribution(lo, hi, cls):
        c = cell_enc(lo, hi).scale(_cell_volume(lo, hi))
        if cls == "partial":
            c = Enc.hull(Enc.zero(), c)
        return c.lo_fraction(), c.hi_fraction()

    def converged(width):
        if width <= abs_tol:
            return True
        return rel_stop is not None and width <= rel_stop * max(
            abs(total_lo), abs(total_hi), Fraction(1, 10 ** 9))

    with working_precision(QUAD_BITS):
        cls0 = region.classify_cell(blo, bhi)
        c_lo, c_hi = contribution(blo, bhi, cls0)
        total_lo, total_hi = c_lo, c_hi
        heap = [(-(c_hi - c_lo), 0, blo, bhi, c_lo, c_hi)]
        counter = 1
        spent = 1
        while heap and not converged(total_hi - total_lo) and spent < budget:
            _, _, lo, hi, c_lo, c_hi = heapq.heappop(heap)
            total_lo -= c_lo
            total_hi -= c_hi
            for nlo, nhi in _split_cell(lo, hi):
                cls = region.classify_cell(nlo, nhi)
                if cls == "outside":
                    continue
                d_lo, d_hi = contribution(nlo, nhi, cls)
                total_lo += d_lo
                total_hi += d_hi
                heapq.heappush(heap, (-(d_hi - d_lo), counter, nlo, nhi,
                                      d_lo, d_hi))
                counter += 1
                spent += 1
    return total_lo, total_hi


def _poly_power_integral(p: Poly1D, power: int, pieces) -> Fraction:
    """Exact integral of p(t)^power (power even) over a union of intervals."""
    acc = Poly1D((Fraction(1),))
    for _ in range(power):
        acc = acc * p
    anti = tuple(c / (k + 1) for k, c in enumerate(acc.coeffs))
    anti_p = Poly1D((Fraction(0),) + anti)
    return sum(anti_p.eval_exact(b) - anti_p.eval_exact(a) for a, b in pieces)


def lp_norm(f: CertifiedFunction, region: Region, p,
            normalized: bool = True,
            rel_tol: Fraction = Fraction(1, 25),
            budget: int = 12_000) -> Tuple[Fraction, Fraction]:
    """Enclosure of the (normalized) L^p norm of f over the region."""
    if p == INF_P:
        return sup_norm(f, region)
    p = Fraction(p)
    if p <= 0:
        raise InvalidRange("need p > 0")
    vlo, vhi = _region_volume_bounds(region)

    even_int = p.denominator == 1 and p.numerator % 2 == 0
    if isinstance(region, MeasurableSet) and region.dimension == 1:
        pieces = [(lo[0], hi[0]) for lo, hi in region.parts]
    elif isinstance(region, ConvexBody) and region.shape is Shape.INTERVAL:
        pieces = [region.data]
    else:
        pieces = None
    if isinstance(f.family, Poly1D) and even_int and pieces is not None:
        exact = _poly_power_integral(f.family, p.numerator, pieces)
        total = (exact / vlo) if normalized else exact
        out = _pow_abs(Enc.from_fraction(total), 1 / p)
        return out.lo_fraction(), out.hi_fraction()

    def cell_enc(lo, hi):
        return _pow_abs(f.family.eval_enc(_as_cell(lo, hi)).abs(), p)

    # no a-priori magnitude is reliable here (a whole-box hull overshoots
    # badly for polynomials and p amplifies the overshoot), so stop on the
    # running totals instead
    total_lo, total_hi = _refine_integral(
        region, cell_enc, rel_tol * Fraction(1, 10 ** 9), budget,
        rel_stop=rel_tol)
    total = Enc.hull(Enc.from_fraction(max(Fraction(0), total_lo)),
                     Enc.from_fraction(total_hi))
    if normalized:
        total = total / Enc.hull(Enc.from_fraction(vlo), Enc.from_fraction(vhi))
    out = _pow_abs(total, 1 / p)
    return max(Fraction(0), out.lo_fraction()), out.hi_fraction()


def rearrangement_value(f: CertifiedFunction, region: Region, y,
                        iters: int = 48) -> Tuple[Fraction, Fraction]:
    """Enclosure of the decreasing-rearrangement value (f|region)*(y)."""
    y = Fraction(y)
    vol_lo, vol_hi = _region_volume_bounds(region)
    if not 0 < y < vol_lo:
        raise InvalidRange("need 0 < y < |region|")
    _, sup_hi = sup_norm(f, region, rel_tol=Fraction(1, 100))
    lo_t, hi_t = Fraction(0), sup_hi
    # superlevel mass d(t) <= y iff sublevel measure >= |region| - y
    cut_hi = vol_hi - y
    cut_lo = vol_lo - y
    for _ in range(iters):
        if hi_t - lo_t <= sup_hi / 10 ** 12:
            break
        mid = (lo_t + hi_t) / 2
        slo, shi = measure_sublevel(f, region, mid,
                                    stop_upper_below=cut_lo,
                                    stop_lower_above=cut_hi,
                                    rel_tol=Fraction(1, 200), budget=16_000)
        if shi < cut_lo:
            lo_t = mid  # superlevel still bigger than y, so f*(y) > mid
        elif slo >= cut_hi:
            hi_t = mid
        else:
            break
    return lo_t, hi_t


def mean_oscillation(f: CertifiedFunction, region: Region,
                     avg_tol: Fraction = Fraction(1, 50),
                     osc_tol: Fraction = Fraction(1, 20),
                     budget: int = CELL_BUDGET) -> Tuple[Fraction, Fraction]:
    """Enclosure of the mean oscillation of ln |f| over the region.

    Requires a certified positive minimum of |f|; raises ZeroInBall otherwise.
    """
    floor_val = min_abs_lower(f, region, budget=budget)
    vlo, vhi = _region_volume_bounds(region)
    vol_enc = Enc.hull(Enc.from_fraction(vlo), Enc.from_fraction(vhi))
    ln_floor = enc_log(Enc.from_fraction(floor_val)).lo

    def log_abs(lo, hi):
        # |f| >= floor_val on cell ∩ region, so the log range may be clamped;
        # without this, partial cells touching outside zeros diverge to -inf
        g = enc_log(f.family.eval_enc(_as_cell(lo, hi)).abs())
        if g.lo < ln_floor:
            g = Enc(ln_floor, max(g.hi, ln_floor))
        return g

    a_lo, a_hi = _refine_integral(region, log_abs, avg_tol * vlo, budget)
    avg = Enc.hull(Enc.from_fraction(a_lo), Enc.from_fraction(a_hi)) / vol_enc

    def osc(lo, hi):
        return (log_abs(lo, hi) - avg).abs()

    o_lo, o_hi = _refine_integral(region, osc, osc_tol * vlo, budget)
    out = Enc.hull(Enc.from_fraction(max(Fraction(0), o_lo)),
                   Enc.from_fraction(o_hi)) / vol_enc
    return max(Fraction(0), out.lo_fraction()), out.hi_fraction()


# ---------------------------------------------------------------------------
# misc certified helpers


def ball_radius_bound(f: CertifiedFunction, b) -> Fraction:
    """Radius around the ball center where |f| stays comparable to b."""
    if f.domain.shape is not Shape.BALL:
        raise ShapeUnsupported("radius bound needs a ball domain")
    b = Fraction(b)
    if b <= 0:
        raise InvalidRange("need b > 0")
    r = f.domain.data[1]
    mu1 = f.weight.mu.entry_exact(1)
    if mu1 is None:
        raise InvalidRange("first weight entry must be finite")
    m1 = f.weight.M0 * mu1
    return min(b / (3 * m1), r) / 2


def weight_spot_check(f: CertifiedFunction, rng, samples: int = 6,
                      max_order: int = 12) -> bool:
    """Sampled validity of the derivative bounds |f^(j)| <= M_j (1 + 1e-9)."""
    slack = Fraction(10 ** 9 + 1, 10 ** 9)
    n = f.weight.mu.N
    top = min(max_order, n if isinstance(n, int) else max_order)
    if f.dimension == 1:
        g = f
    else:
        units = [(Fraction(3, 5), Fraction(4, 5)), (Fraction(1), Fraction(0)),
                 (Fraction(0), Fraction(1)), (Fraction(-4, 5), Fraction(3, 5))]
        u = units[rng.randrange(len(units))]
        if f.dimension != 2:
            u = tuple([Fraction(1)] + [Fraction(0)] * (f.dimension - 1))
        blo, bhi = f.domain.bounding_box()
        x0 = tuple(lo + (hi - lo) * Fraction(rng.randrange(1, 7), 8)
                   for lo, hi in zip(blo, bhi))
        # clip the unit segment at the bounding box: derivative bounds for
        # polynomial families are only claimed on the domain itself
        tmax = min((bhi[i] - x0[i]) / ui if ui > 0 else (blo[i] - x0[i]) / ui
                   for i, ui in enumerate(u) if ui)
        tmax = min(tmax, Fraction(1))
        x1 = tuple(a + tmax * ui for a, ui in zip(x0, u))
        w = FullWeight(f.weight.mu.scaled(tmax), f.weight.M0)
        g = f.restrict_to_line(x0, x1, weight=w)
    a, b = g.domain.data
    pts = [a, b] + [a + (b - a) * Fraction(rng.randrange(1, 2 ** 16), 2 ** 16)
                    for _ in range(samples)]
    for j in range(top + 1):
        mj = g.weight.m_creal(j)
        cap = mj.exact if mj.exact is not None else mj.enclose().hi_fraction()
        for t in pts:
            if g.deriv_abs_enc(j, t).lo_fraction() > cap * slack:
                return False
    return True
