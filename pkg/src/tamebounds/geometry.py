"""Convex bodies and finite box unions with exact measures.

Bodies carry exact rational volume where possible (interval, box, simplex)
and enclosure-valued volume where a transcendental factor appears (balls in
even dimension carry pi). Diameters are exact rationals or certified square
roots of rationals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from .enclosure import CReal, Enc, enc_pi
from .errors import DegenerateBody, InvalidRange

Point = Tuple[Fraction, ...]


def _pt(p) -> Point:
    return tuple(Fraction(c) for c in p)


class Shape(enum.Enum):
    INTERVAL = "interval"
    BOX = "box"
    BALL = "ball"
    SIMPLEX = "simplex"


@dataclass(frozen=True)
class ConvexBody:
    shape: Shape
    data: tuple

    # -- constructors --------------------------------------------------------

    @staticmethod
    def interval(a, b) -> "ConvexBody":
        a, b = Fraction(a), Fraction(b)
        if not a < b:
            raise DegenerateBody("interval needs a < b")
        return ConvexBody(Shape.INTERVAL, (a, b))

    @staticmethod
    def box(lo, hi) -> "ConvexBody":
        lo, hi = _pt(lo), _pt(hi)
        if len(lo) != len(hi) or not lo:
            raise DegenerateBody("box corners must share a positive dimension")
        if not all(a < b for a, b in zip(lo, hi)):
            raise DegenerateBody("box needs lo < hi in every coordinate")
        return ConvexBody(Shape.BOX, (lo, hi))

    @staticmethod
    def ball(center, r) -> "ConvexBody":
        center = _pt(center)
        r = Fraction(r)
        if r <= 0:
            raise DegenerateBody("ball needs r > 0")
        return ConvexBody(Shape.BALL, (center, r))

    @staticmethod
    def simplex(vertices) -> "ConvexBody":
        vs = tuple(_pt(v) for v in vertices)
        d = len(vs[0])
        if len(vs) != d + 1:
            raise DegenerateBody("simplex needs d+1 vertices in dimension d")
        body = ConvexBody(Shape.SIMPLEX, (vs,))
        if body.volume().exact == 0:
            raise DegenerateBody("simplex has empty interior")
        return body

    # -- basic quantities -----------------------------------------------------

    @property
    def dimension(self) -> int:
        if self.shape is Shape.INTERVAL:
            return 1
        if self.shape is Shape.BOX:
            return len(self.data[0])
        if self.shape is Shape.BALL:
            return len(self.data[0])
        return len(self.data[0][0])

    def volume(self) -> CReal:
        if self.shape is Shape.INTERVAL:
            a, b = self.data
            return CReal.from_fraction(b - a)
        if self.shape is Shape.BOX:
            lo, hi = self.data
            v = Fraction(1)
            for a, b in zip(lo, hi):
                v *= b - a
            return CReal.from_fraction(v)
        if self.shape is Shape.BALL:
            center, r = self.data
            d = len(center)
            # V_d = V_{d-2} * 2 pi r^2 / d, V_0 = 1, V_1 = 2r
            coeff = Fraction(2) * r if d % 2 else Fraction(1)
            k = d // 2
            for i in range(1, k + 1):
                dim = 2 * i + (d % 2)
                coeff *= 2 * r * r / Fraction(dim)
            if k == 0:
                return CReal.from_fraction(coeff)
            return CReal(lambda: enc_pi().pow_int(k).scale(coeff))
        vs = self.data[0]
        d = len(vs[0])
        rows = [[vs[i + 1][j] - vs[0][j] for j in range(d)] for i in range(d)]
        return CReal.from_fraction(abs(_det(rows)) / math.factorial(d))

    def diameter(self) -> CReal:
        if self.shape is Shape.INTERVAL:
            a, b = self.data
            return CReal.from_fraction(b - a)
        if self.shape is Shape.BOX:
            lo, hi = self.data
            return CReal.sqrt_fraction(sum((b - a) ** 2 for a, b in zip(lo, hi)))
        if self.shape is Shape.BALL:
            return CReal.from_fraction(2 * self.data[1])
        vs = self.data[0]
        best = max(
            sum((p[i] - q[i]) ** 2 for i in range(len(p)))
            for idx, p in enumerate(vs) for q in vs[idx + 1:]
        )
        return CReal.sqrt_fraction(best)

    def bounding_box(self) -> Tuple[Point, Point]:
        if self.shape is Shape.INTERVAL:
            a, b = self.data
            return ((a,), (b,))
        if self.shape is Shape.BOX:
            return self.data
        if self.shape is Shape.BALL:
            c, r = self.data
            return (tuple(x - r for x in c), tuple(x + r for x in c))
        vs = self.data[0]
        d = len(vs[0])
        return (tuple(min(v[i] for v in vs) for i in range(d)),
                tuple(max(v[i] for v in vs) for i in range(d)))

    def contains(self, p) -> bool:
        p = _pt(p)
        if self.shape is Shape.INTERVAL:
            a, b = self.data
            return a <= p[0] <= b
        if self.shape is Shape.BOX:
            lo, hi = self.data
            return all(a <= x <= b for a, x, b in zip(lo, p, hi))
        if self.shape is Shape.BALL:
            c, r = self.data
            return sum((x - y) ** 2 for x, y in zip(p, c)) <= r * r
        vs = self.data[0]
        lam = _barycentric(vs, p)
        return lam is not None and all(t >= 0 for t in lam)

    def classify_cell(self, lo: Point, hi: Point) -> str:
        """'inside', 'outside', or 'partial' for an axis box vs this body."""
        if self.shape in (Shape.INTERVAL, Shape.BOX):
            blo, bhi = self.bounding_box()
            if all(a >= x and b <= y for a, b, x, y in zip(lo, hi, blo, bhi)):
                return "inside"
            if any(b <= x or a >= y for a, b, x, y in zip(lo, hi, blo, bhi)):
                return "outside"
            return "partial"
        if self.shape is Shape.BALL:
            c, r = self.data
            near = far = Fraction(0)
            for a, b, x in zip(lo, hi, c):
                lo_d, hi_d = a - x, b - x
                far += max(lo_d * lo_d, hi_d * hi_d)
                if lo_d > 0:
                    near += lo_d * lo_d
                elif hi_d < 0:
                    near += hi_d * hi_d
            if far <= r * r:
                return "inside"
            if near > r * r:
                return "outside"
            return "partial"
        corners = _corners(lo, hi)
        planes = self._halfspaces()
        inside_all = True
        for normal, offset in planes:
            vals = [sum(n * c for n, c in zip(normal, pt)) for pt in corners]
            if all(v < offset for v in vals):
                return "outside"  # cell strictly beyond one facet
            if any(v < offset for v in vals):
                inside_all = False
        return "inside" if inside_all else "partial"

    def _halfspaces(self):
        """Facet inequalities <normal, x> >= offset describing a simplex."""
        vs = self.data[0]
        d = len(vs[0])
        planes = []
        for skip in range(d + 1):
            face = [v for i, v in enumerate(vs) if i != skip]
            base = face[0]
            rows = [[p[j] - base[j] for j in range(d)] for p in face[1:]]
            normal = _null_vector(rows, d)
            offset = sum(n * c for n, c in zip(normal, base))
            inside = sum(n * c for n, c in zip(normal, vs[skip]))
            if inside < offset:
                normal = tuple(-n for n in normal)
                offset = -offset
            planes.append((normal, offset))
        return planes


def _corners(lo: Point, hi: Point):
    pts = [()]
    for a, b in zip(lo, hi):
        pts = [p + (v,) for p in pts for v in (a, b)]
    return pts


def _det(rows) -> Fraction:
    n = len(rows)
    m = [list(map(Fraction, r)) for r in rows]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for cc in range(col, n):
                    m[r][cc] -= f * m[col][cc]
    return det


def _null_vector(rows, d) -> Tuple[Fraction, ...]:
    """A nonzero rational vector orthogonal to d-1 independent rows."""
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    pivots = []
    col = 0
    r = 0
    while r < n and col < d:
        piv = next((k for k in range(r, n) if m[k][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][col]
        m[r] = [x / pv for x in m[r]]
        for k in range(n):
            if k != r and m[k][col]:
                f = m[k][col]
                m[k] = [x - f * y for x, y in zip(m[k], m[r])]
        pivots.append(col)
        r += 1
        col += 1
    free = next(c for c in range(d) if c not in pivots)
    vec = [Fraction(0)] * d
    vec[free] = Fraction(1)
    for row, pc in zip(m, pivots):
        vec[pc] = -row[free]
    return tuple(vec)


def _barycentric(vs, p) -> Optional[Tuple[Fraction, ...]]:
    d = len(p)
    # solve sum lam_i (v_i - v_0) = p - v_0, lam_0 = 1 - sum
    a = [[vs[j + 1][i] - vs[0][i] for j in range(d)] for i in range(d)]
    rhs = [p[i] - vs[0][i] for i in range(d)]
    sol = _solve(a, rhs)
    if sol is None:
        return None
    lam0 = Fraction(1) - sum(sol)
    return (lam0, *sol)


def _solve(a, rhs):
    n = len(rhs)
    m = [row[:] + [rhs[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        m[col] = [x / pv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[i][n] for i in range(n))


@dataclass(frozen=True)
class MeasurableSet:
    """Finite union of pairwise-disjoint open axis boxes with exact measure."""

    dimension: int
    parts: Tuple[Tuple[Point, Point], ...]

    @staticmethod
    def from_parts(parts: Sequence[Tuple[Sequence, Sequence]]) -> "MeasurableSet":
        norm = []
        for lo, hi in parts:
            lo, hi = _pt(lo), _pt(hi)
            if len(lo) != len(hi):
                raise InvalidRange("part corners disagree in dimension")
            if not all(a < b for a, b in zip(lo, hi)):
                raise InvalidRange("degenerate part")
            norm.append((lo, hi))
        if not norm:
            raise InvalidRange("empty set")
        d = len(norm[0][0])
        if any(len(lo) != d for lo, _ in norm):
            raise InvalidRange("mixed dimensions")
        for i, (lo1, hi1) in enumerate(norm):
            for lo2, hi2 in norm[i + 1:]:
                if not any(h1 <= l2 or h2 <= l1
                           for l1, h1, l2, h2 in zip(lo1, hi1, lo2, hi2)):
                    raise InvalidRange("overlapping parts")
        return MeasurableSet(d, tuple(sorted(norm)))

    @staticmethod
    def intervals(pairs) -> "MeasurableSet":
        return MeasurableSet.from_parts([((a,), (b,)) for a, b in pairs])

    def measure(self) -> Fraction:
        total = Fraction(0)
        for lo, hi in self.parts:
            v = Fraction(1)
            for a, b in zip(lo, hi):
                v *= b - a
            total += v
        return total

    def bounding_box(self) -> Tuple[Point, Point]:
        d = self.dimension
        lo = tuple(min(p[0][i] for p in self.parts) for i in range(d))
        hi = tuple(max(p[1][i] for p in self.parts) for i in range(d))
        return (lo, hi)

    def classify_cell(self, lo: Point, hi: Point) -> str:
        inside_any = False
        touch = 0
        for plo, phi in self.parts:
            if all(a >= x and b <= y for a, b, x, y in zip(lo, hi, plo, phi)):
                inside_any = True
                break
            if not any(b <= x or a >= y for a, b, x, y in zip(lo, hi, plo, phi)):
                touch += 1
        if inside_any:
            return "inside"
        return "partial" if touch else "outside"
