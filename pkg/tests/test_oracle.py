"""Reference machinery: roots, sup norms, measures, integrals.

The oracle itself is under test here, against sympy root isolation and
mpmath quadrature values frozen from independent runs (45 digits). These
routines are what the acceptance sweeps later trust for ground truth, so
every code path gets at least one exact or near-exact pin.
"""

import random
from fractions import Fraction

import mpmath as mp
import pytest

from tamebounds.errors import Inconclusive, InvalidRange, ZeroInBall
from tamebounds.functions import (
    chebyshev_coeffs,
    make_chebyshev,
    make_plane_waves,
    make_polynomial,
    make_scaled_exp,
    make_tensor_poly,
)
from tamebounds.geometry import ConvexBody, MeasurableSet
from tamebounds.oracle import (
    INF_P,
    ball_radius_bound,
    certified_root,
    count_zeros,
    derivative_root,
    lp_norm,
    mean_oscillation,
    measure_sublevel,
    min_abs_lower,
    rearrangement_value,
    sup_norm,
    weight_spot_check,
)

mp.mp.dps = 50

T5 = make_chebyshev(5)
WAVE1 = make_plane_waves([(1, (3,), Fraction(1, 7))], ConvexBody.interval(-2, 2))


def as_mpf(q: Fraction):
    return mp.mpf(q.numerator) / q.denominator


def band_contains(pair, decimal, max_width=None):
    lo, hi = as_mpf(pair[0]), as_mpf(pair[1])
    v = mp.mpf(decimal)
    if not lo - mp.mpf("1e-30") <= v <= hi + mp.mpf("1e-30"):
        return False
    return max_width is None or hi - lo <= mp.mpf(max_width)


# -- zero counting --------------------------------------------------------------


def test_count_zeros_chebyshev():
    assert count_zeros(T5) == 5
    assert count_zeros(T5, (0, 1)) == 3  # 0, cos(3pi/10), cos(pi/10)
    assert count_zeros(make_chebyshev(8)) == 8


def test_count_zeros_multiplicity():
    # t^2 (t - 1): two distinct zeros, total multiplicity three
    f = make_polynomial([0, 0, -1, 1], -1, 2)
    assert count_zeros(f) == 2
    assert count_zeros(f, with_multiplicity=True) == 3


def test_count_zeros_wave_grid():
    # sin(3t + 1/7) = 0 at t = (k pi - 1/7)/3; exactly 3 hits in [-2, 2]
    assert count_zeros(WAVE1) == 3


def test_count_zeros_exp():
    assert count_zeros(make_scaled_exp(-2, 0, 1)) == 0


# -- root localization ------------------------------------------------------------


def test_certified_root_frozen():
    r = certified_root(T5, Fraction(1, 2), Fraction(7, 10))
    # cos(3 pi / 10)
    assert abs(as_mpf(r) - mp.mpf("0.587785252292473129168705954639")) < mp.mpf("1e-13")


def test_certified_root_needs_bracket():
    with pytest.raises(Inconclusive):
        certified_root(T5, Fraction(3, 5), Fraction(7, 10))  # same sign ends


def test_derivative_root_lands_on_extremum():
    rng = random.Random(20260814)
    r = derivative_root(T5, 1, rng)
    val = T5.deriv_abs_enc(1, r)
    assert val.hi_fraction() < Fraction(25, 10 ** 12)  # well under M_1 / 1e13 slack


# -- sup and min -------------------------------------------------------------------


def test_sup_norm_chebyshev():
    lo, hi = sup_norm(T5)
    assert lo <= 1 <= hi
    assert hi - lo <= Fraction(3, 10 ** 6)


def test_sup_norm_sees_interior_extremum():
    # T5 on [0, 1/2] peaks at cos(2 pi/5) ~ 0.309 with value exactly 1
    f = make_polynomial(chebyshev_coeffs(5), 0, Fraction(1, 2))
    lo, hi = sup_norm(f)
    assert lo <= 1 <= hi and hi - lo <= Fraction(1, 10 ** 4)


def test_sup_norm_wave_on_ball():
    f = make_plane_waves([(1, (3, -4), 0)], ConvexBody.ball((0, 0), 1))
    lo, hi = sup_norm(f, rel_tol=Fraction(1, 1000))
    # |sin| reaches 1 inside: 3x - 4y sweeps [-5, 5] over the ball
    assert lo <= 1 <= hi and hi - lo <= Fraction(1, 50)


def test_min_abs_lower():
    f = make_polynomial([3] + list(chebyshev_coeffs(5))[1:], -1, 1)  # T5 + 3
    m = min_abs_lower(f, f.domain)
    assert Fraction(0) < m <= 2  # true minimum is 2


def test_min_abs_lower_rejects_vanishing():
    with pytest.raises(ZeroInBall):
        min_abs_lower(T5, T5.domain)


# -- measures ----------------------------------------------------------------------


def test_sublevel_measure_frozen():
    lo, hi = measure_sublevel(T5, T5.domain, Fraction(1, 2))
    assert band_contains((lo, hi), "0.676522425435432855305093322747", "0.01")


def test_sublevel_early_exit():
    lo, hi = measure_sublevel(T5, T5.domain, Fraction(1, 2),
                              stop_upper_below=Fraction(7, 10))
    assert hi <= Fraction(7, 10)
    assert lo <= Fraction(6766, 10000)


def test_rearrangement_frozen():
    lo, hi = rearrangement_value(T5, T5.domain, Fraction(1, 2))
    assert band_contains((lo, hi), "0.9205346590484241764591744", "0.1")


def test_rearrangement_domain_check():
    with pytest.raises(InvalidRange):
        rearrangement_value(T5, T5.domain, Fraction(5, 2))  # y >= |region|


# -- integral norms ----------------------------------------------------------------


def test_l2_exact_path():
    lo, hi = lp_norm(T5, T5.domain, 2)
    # sqrt(49/99), from the exact antiderivative of T5^2
    assert band_contains((lo, hi), "0.703526470681448452842561489597", "1e-20")


def test_l4_exact_path():
    lo, hi = lp_norm(T5, T5.domain, 4)
    assert band_contains((lo, hi), "0.779728893516353889714806481998", "1e-20")


def test_l3_refined_path():
    lo, hi = lp_norm(T5, T5.domain, 3)
    assert band_contains((lo, hi), "0.748348546952360306960223676436", "0.15")


def test_l2_wave_refined():
    lo, hi = lp_norm(WAVE1, WAVE1.domain, 2)
    assert band_contains((lo, hi), "0.72211554257016280083125716078", "0.15")


def test_lp_inf_sentinel_is_sup():
    lo, hi = lp_norm(T5, T5.domain, INF_P)
    assert lo <= 1 <= hi


def test_lp_over_measurable_set():
    # integral of T5^2 over [0,1] is half of the symmetric one: 49/99
    s = MeasurableSet.intervals([(0, 1)])
    lo, hi = lp_norm(T5, s, 2)
    v = mp.sqrt(mp.mpf(49) / 99)
    assert band_contains((lo, hi), mp.nstr(v, 30), "1e-20")


def test_lp_rejects_bad_exponent():
    with pytest.raises(InvalidRange):
        lp_norm(T5, T5.domain, 0)


def test_mean_oscillation_frozen():
    f = make_polynomial([3] + list(chebyshev_coeffs(5))[1:], -1, 1)  # T5 + 3
    lo, hi = mean_oscillation(f, f.domain)
    assert band_contains((lo, hi), "0.2171002679596762694098935", "0.45")


# -- misc helpers -------------------------------------------------------------------


def test_ball_radius_bound_frozen():
    f = make_plane_waves([(1, (3, -4), 0)], ConvexBody.ball((0, 0), 1))
    # M1 = 7, so min(b / 21, 1) / 2 with b = 1/10
    assert ball_radius_bound(f, Fraction(1, 10)) == Fraction(1, 420)


@pytest.mark.parametrize("maker", [
    lambda: T5,
    lambda: WAVE1,
    lambda: make_scaled_exp(-2, 0, 1),
    lambda: make_tensor_poly([chebyshev_coeffs(3), chebyshev_coeffs(2)],
                             ConvexBody.box((-1, -1), (1, 1))),
    lambda: make_plane_waves([(1, (3, -4), 0), (Fraction(1, 2), (1, 2), 1)],
                             ConvexBody.box((0, 0), (1, 1))),
])
def test_weight_spot_check(maker):
    rng = random.Random(7)
    assert weight_spot_check(maker(), rng) is True
