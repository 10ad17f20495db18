"""Function families, canonical derivative envelopes, and restrictions.

Sup-norm expectations come from dense mpmath grid maxima; the canonical M0
must sit above the grid value and within the advertised relative slack.
"""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce as bf
from tamebounds.enclosure import working_precision
from tamebounds.errors import DerivativeUnavailable, ShapeUnsupported
from tamebounds.functions import (
    CertifiedFunction,
    Poly1D,
    chebyshev_coeffs,
    make_chebyshev,
    make_plane_waves,
    make_polynomial,
    make_scaled_exp,
    make_tensor_poly,
)
from tamebounds.geometry import ConvexBody
from tamebounds.weights import WeightKind

mp.mp.dps = 50


def mpf_in(enc, v, slack="1e-25"):
    s = mp.mpf(slack)
    return mp.mpf(str(enc.lo)) - s <= v <= mp.mpf(str(enc.hi)) + s


# -- polynomials ---------------------------------------------------------------


def test_chebyshev_coeffs_frozen():
    assert chebyshev_coeffs(1) == (0, 1)
    assert chebyshev_coeffs(2) == (-1, 0, 2)
    assert chebyshev_coeffs(5) == (0, 5, 0, -20, 0, 16)
    assert chebyshev_coeffs(10)[-1] == 512  # leading coefficient 2^(n-1)


@settings(max_examples=50, deadline=None)
@given(t=st.fractions(min_value=-1, max_value=1, max_denominator=128),
       n=st.integers(1, 12))
def test_chebyshev_is_cos_n_theta(t, n):
    f = make_chebyshev(n)
    exact = f.family.eval_exact(t)
    via_cos = mp.cos(n * mp.acos(mp.mpf(t.numerator) / t.denominator))
    assert abs(mp.mpf(exact.numerator) / exact.denominator - via_cos) < mp.mpf("1e-40")


def test_poly_eval_enc_contains_exact():
    p = make_polynomial([1, -3, Fraction(1, 7)], 0, 2)
    t = Fraction(5, 4)
    exact = p.family.eval_exact(t)
    enc = p.eval_enc((t,))
    assert enc.lo_fraction() <= exact <= enc.hi_fraction()
    rng = p.eval_interval(0, 2)
    for u in (Fraction(0), Fraction(1, 3), Fraction(2)):
        v = p.family.eval_exact(u)
        assert rng.lo_fraction() <= v <= rng.hi_fraction()


def test_poly_derivative_exact():
    p = Poly1D((Fraction(1), Fraction(0), Fraction(-2), Fraction(5)))
    assert p.derivative().coeffs == (0, -4, 15)
    assert p.derivative(2).coeffs == (-4, 30)
    assert p.derivative(5).coeffs == (0,)
    assert p.degree == 3


def test_compose_affine_exact():
    # p(1 + 2t) for p = t^2 - t: 4t^2 + 2t
    p = Poly1D((Fraction(0), Fraction(-1), Fraction(1)))
    q = p.compose_affine(Fraction(1), Fraction(2))
    assert q.coeffs == (0, 2, 4)


# -- canonical envelopes ---------------------------------------------------------


def test_chebyshev_weight_is_n_squared():
    f = make_chebyshev(7)
    assert f.weight.mu.kind is WeightKind.CONST
    assert f.weight.mu.params[0] == 49
    assert f.weight.M0 == 1 and f.exact_sup == 1


def test_generic_poly_weight_rate():
    # rate 2 n^2 / width on [0, 3]: 2 * 9 / 3 = 6
    f = make_polynomial([0, 0, 0, 1], 0, 3)
    assert f.weight.mu.params[0] == 6


def test_poly_m0_brackets_grid_max():
    f = make_polynomial([1, -2, 0, 1], -1, 2)
    grid = max(abs(mp.mpf(1) - 2 * x + x ** 3)
               for x in mp.linspace(-1, 2, 3001))
    m0 = mp.mpf(f.weight.M0.numerator) / f.weight.M0.denominator
    assert grid <= m0 <= grid * mp.mpf("1.01")


def test_wave_weight_l1_frequency():
    f = make_plane_waves([(2, (3, -4), 0), (-1, (1, 1), Fraction(1, 2))],
                         ConvexBody.box((0, 0), (1, 1)))
    assert f.weight.mu.params[0] == 7  # max(|3| + |-4|, 2)
    assert f.weight.M0 == 3            # sum |amplitudes|


def test_exp_weight():
    f = make_scaled_exp(-2, 0, 1)
    assert f.weight.mu.params[0] == 2
    assert f.weight.M0 == 1  # peak of e^{-2t} on [0, 1] is at t = 0


def test_tensor_weight_adds_rates():
    f = make_tensor_poly([[0, 0, 0, 1], [0, 0, 1]],
                         ConvexBody.box((0, 0), (2, 2)))
    # 2*9/2 + 2*4/2
    assert f.weight.mu.params[0] == 13


def test_scaled_by():
    f = make_chebyshev(4).scaled_by(Fraction(-73, 10))
    assert f.weight.M0 == Fraction(73, 10)
    assert f.exact_sup == Fraction(73, 10)
    assert f.family.eval_exact(Fraction(1)) == Fraction(-73, 10)
    with pytest.raises(DerivativeUnavailable):
        f.scaled_by(0)


# -- waves and exp ----------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(t=st.fractions(min_value=-2, max_value=2, max_denominator=64),
       order=st.integers(0, 5))
def test_wave_derivative_cycle(t, order):
    f = make_plane_waves([(1, (3,), Fraction(1, 7)), (Fraction(-1, 2), (1,), 0)],
                         ConvexBody.interval(-2, 2))
    enc = f.deriv_abs_enc(order, t)
    dv = bf.bf_wave_derivs([(1, 3, Fraction(1, 7), 0), (Fraction(-1, 2), 1, 0, 0)],
                           t, order + 1)[order]
    assert mpf_in(enc, dv)


@settings(max_examples=30, deadline=None)
@given(t=st.fractions(min_value=0, max_value=1, max_denominator=64))
def test_exp_eval(t):
    f = make_scaled_exp(Fraction(3, 2), 0, 1, amplitude=-2)
    v = -2 * mp.exp(mp.mpf(3) / 2 * mp.mpf(t.numerator) / t.denominator)
    assert mpf_in(f.eval_enc((t,)), v)


def test_tensor_eval_contains_product():
    f = make_tensor_poly([[0, 1], [-1, 0, 2]], ConvexBody.box((-1, -1), (1, 1)))
    x, y = Fraction(1, 3), Fraction(-1, 2)
    exact = x * (2 * y * y - 1)
    enc = f.eval_enc((x, y))
    assert enc.lo_fraction() <= exact <= enc.hi_fraction()


# -- restrictions ------------------------------------------------------------------


def test_restrict_tensor_to_axis_line():
    # T3(x) T2(y) along y = 1/2 from (0,1/2) to (1,1/2): T3(s) * (-1/2)
    f = make_tensor_poly([chebyshev_coeffs(3), chebyshev_coeffs(2)],
                         ConvexBody.box((-1, -1), (1, 1)))
    g = f.restrict_to_line((0, Fraction(1, 2)), (1, Fraction(1, 2)))
    assert g.family.coeffs == (0, Fraction(3, 2), 0, -2)
    assert g.dimension == 1
    assert g.domain.data == (0, 1)


def test_restrict_wave_exact_frequency():
    f = make_plane_waves([(1, (3, -4), Fraction(1, 7))],
                         ConvexBody.box((0, 0), (1, 1)))
    g = f.restrict_to_line((Fraction(1, 2), 0), (1, 1))
    w = g.family.terms[0]
    # freq . v = 3/2 - 4, phase shift = freq . x0 = 3/2
    assert w.freq == (Fraction(-5, 2),)
    assert w.phase == Fraction(1, 7) + Fraction(3, 2)
    # canonical restricted envelope: rate |freq.v|, M0 kept from the ambient sum
    assert g.weight.mu.params[0] == Fraction(5, 2)
    assert g.weight.M0 == 1


def test_restrict_with_weight_override():
    from tamebounds.weights import FullWeight, WeightSpec
    f = make_tensor_poly([[0, 1], [0, 1]], ConvexBody.box((0, 0), (1, 1)))
    override = FullWeight(WeightSpec.const(Fraction(99)), Fraction(2))
    g = f.restrict_to_line((0, 0), (1, 1), weight=override)
    assert g.weight is override


@settings(max_examples=40, deadline=None)
@given(s=st.fractions(min_value=0, max_value=1, max_denominator=64))
def test_restriction_agrees_pointwise(s):
    f = make_tensor_poly([[0, 0, 1], [1, -1]], ConvexBody.box((-1, 0), (1, 2)))
    x0, x1 = (Fraction(-1, 2), Fraction(1, 2)), (Fraction(1), Fraction(2))
    g = f.restrict_to_line(x0, x1)
    pt = tuple(a + s * (b - a) for a, b in zip(x0, x1))
    exact_f = pt[0] ** 2 * (1 - pt[1])
    assert g.family.eval_exact(s) == exact_f


def test_restriction_unavailable_for_exp():
    f = make_scaled_exp(1, 0, 1)
    with pytest.raises(ShapeUnsupported):
        f.restrict_to_line((0,), (1,))


def test_derivative_keeps_weight():
    f = make_chebyshev(5)
    g = f.derivative()
    assert g.weight is f.weight
    assert g.family.coeffs == (5, 0, -60, 0, 80)
