"""Bodies, exact measures, and cell classification."""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tamebounds.enclosure import working_precision
from tamebounds.errors import DegenerateBody, InvalidRange
from tamebounds.geometry import ConvexBody, MeasurableSet, Shape

mp.mp.dps = 50


def creal_equals(cr, decimal: str, tol="1e-35") -> bool:
    with working_precision(192):
        enc = cr.enclose()
    v, t = mp.mpf(decimal), mp.mpf(tol)
    return mp.mpf(str(enc.lo)) - t <= v <= mp.mpf(str(enc.hi)) + t


# -- volumes -------------------------------------------------------------------


def test_interval_volume_and_diameter():
    body = ConvexBody.interval(Fraction(-1, 2), Fraction(3, 2))
    assert body.volume().exact == 2
    assert body.diameter().exact == 2
    assert body.dimension == 1


def test_box_volume_exact():
    body = ConvexBody.box((0, -1, Fraction(1, 2)), (2, 1, 1))
    assert body.volume().exact == Fraction(2) * 2 * Fraction(1, 2)


def test_box_diameter_sqrt():
    body = ConvexBody.box((0, 0), (1, 1))
    assert creal_equals(body.diameter(), mp.nstr(mp.sqrt(2), 40))


@pytest.mark.parametrize("d,r,expected", [
    (1, Fraction(3, 4), "1.5"),                                            # 2r
    (2, Fraction(1, 2), "0.785398163397448309615660845819875721049292"),   # pi/4
    (3, Fraction(1), "4.18879020478639098461685784437267051226289"),       # 4 pi/3
    (4, Fraction(1), "4.93480220054467930941724549993807556765685"),       # pi^2/2
])
def test_ball_volume(d, r, expected):
    body = ConvexBody.ball((Fraction(0),) * d, r)
    assert creal_equals(body.volume(), expected)
    assert body.diameter().exact == 2 * r


def test_simplex_volume_exact():
    unit2 = ConvexBody.simplex([(0, 0), (1, 0), (0, 1)])
    assert unit2.volume().exact == Fraction(1, 2)
    unit3 = ConvexBody.simplex([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert unit3.volume().exact == Fraction(1, 6)
    # shear does not change the determinant
    sheared = ConvexBody.simplex([(0, 0), (1, 0), (5, 1)])
    assert sheared.volume().exact == Fraction(1, 2)


def test_simplex_diameter():
    body = ConvexBody.simplex([(0, 0), (1, 0), (0, 2)])
    assert creal_equals(body.diameter(), mp.nstr(mp.sqrt(5), 40))


def test_degenerate_bodies_rejected():
    with pytest.raises(DegenerateBody):
        ConvexBody.interval(1, 1)
    with pytest.raises(DegenerateBody):
        ConvexBody.box((0, 0), (1, 0))
    with pytest.raises(DegenerateBody):
        ConvexBody.ball((0, 0), 0)
    with pytest.raises(DegenerateBody):
        ConvexBody.simplex([(0, 0), (1, 1), (2, 2)])  # collinear
    with pytest.raises(DegenerateBody):
        ConvexBody.simplex([(0, 0), (1, 0)])  # wrong count


# -- membership and classification ---------------------------------------------


def test_ball_contains_is_exact_on_boundary():
    ball = ConvexBody.ball((0, 0), Fraction(5, 8))
    assert ball.contains((Fraction(3, 8), Fraction(1, 2)))  # 9+16 = 25: on the sphere
    assert not ball.contains((Fraction(3, 8), Fraction(33, 64)))


def test_simplex_contains():
    spx = ConvexBody.simplex([(0, 0), (1, 0), (0, 1)])
    assert spx.contains((Fraction(1, 4), Fraction(1, 4)))
    assert spx.contains((Fraction(1, 2), Fraction(1, 2)))  # hypotenuse edge
    assert not spx.contains((Fraction(3, 4), Fraction(1, 2)))


def test_classify_cell_three_ways():
    ball = ConvexBody.ball((0, 0), 1)
    assert ball.classify_cell((Fraction(-1, 4),) * 2, (Fraction(1, 4),) * 2) == "inside"
    assert ball.classify_cell((2, 2), (3, 3)) == "outside"
    assert ball.classify_cell((Fraction(1, 2),) * 2, (1, 1)) == "partial"
    spx = ConvexBody.simplex([(0, 0), (1, 0), (0, 1)])
    assert spx.classify_cell((Fraction(1, 8),) * 2, (Fraction(1, 4),) * 2) == "inside"
    assert spx.classify_cell((Fraction(3, 4),) * 2, (1, 1)) == "outside"
    assert spx.classify_cell((0, 0), (1, 1)) == "partial"


@settings(max_examples=80, deadline=None)
@given(x=st.fractions(min_value=-2, max_value=2, max_denominator=64),
       y=st.fractions(min_value=-2, max_value=2, max_denominator=64))
def test_classification_consistent_with_membership(x, y):
    # a point cell classifies "inside" exactly when the body contains it
    for body in (ConvexBody.ball((0, 0), 1),
                 ConvexBody.simplex([(0, 0), (2, 0), (0, 2)]),
                 ConvexBody.box((-1, -1), (1, 1))):
        cls = body.classify_cell((x, y), (x, y))
        if body.contains((x, y)):
            assert cls in ("inside", "partial")
        else:
            assert cls in ("outside", "partial")


# -- finite unions of boxes ------------------------------------------------------


def test_measurable_set_measure():
    s = MeasurableSet.intervals([(0, Fraction(1, 4)), (Fraction(1, 2), 1)])
    assert s.measure() == Fraction(3, 4)
    assert s.dimension == 1
    assert s.bounding_box() == ((Fraction(0),), (Fraction(1),))


def test_measurable_set_rejects_overlap():
    with pytest.raises(InvalidRange):
        MeasurableSet.intervals([(0, Fraction(1, 2)), (Fraction(1, 4), 1)])


def test_measurable_set_allows_shared_endpoint():
    s = MeasurableSet.intervals([(0, Fraction(1, 2)), (Fraction(1, 2), 1)])
    assert s.measure() == 1


def test_measurable_set_classify():
    s = MeasurableSet.intervals([(0, 1), (2, 3)])
    assert s.classify_cell((Fraction(1, 4),), (Fraction(1, 2),)) == "inside"
    assert s.classify_cell((Fraction(3, 2),), (Fraction(7, 4),)) == "outside"
    assert s.classify_cell((Fraction(1, 2),), (Fraction(5, 2),)) == "partial"


def test_measurable_set_boxes_2d():
    s = MeasurableSet.from_parts([(((0, 0)), ((1, 1))), (((2, 0)), ((3, 2)))])
    assert s.measure() == 1 + 2
