"""Constant assembly and the measure-ratio bounds built on it.

Closed-form references were computed independently with mpmath at 45
digits and frozen as strings. The piecewise extension's growth constant
is cross-checked against a dense exact-rational sampling oracle.
"""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tamebounds.enclosure import Enc, enc_exp, working_precision
from tamebounds.errors import (
    BadExponents,
    ConditionFails,
    EmptySet,
    InvalidRange,
)
from tamebounds.functions import make_chebyshev
from tamebounds.geometry import ConvexBody, MeasurableSet
from tamebounds.remez import (
    RemezConstants,
    WeightExtension,
    gamma_of,
    lp_comparison_bound,
    mean_oscillation_bound,
    rearrangement_lower_bound,
    remez_body_factor,
    remez_constants,
    remez_multivariate,
    remez_univariate,
    smooth_gamma,
    sublevel_volume_bound,
)
from tamebounds.weights import INF, FullWeight, WeightSpec, is_inf

mp.mp.dps = 45

FOUR_E5 = mp.mpf("593.65263641030641368446232016220911849395067")
FOUR_E4 = mp.mpf("218.392600132576956312441044811443513611162948")
FOUR_E9 = mp.mpf("32412.3357103015360308399867577310398600459044")
SIXTYFOUR_E10 = mp.mpf("1409693.81086762985708530564129819163944662481")
INV_64_E10 = mp.mpf("7.09373902538825805243617430633603284967470139e-7")
FORTYEIGHT_E10 = mp.mpf("1057270.35815072239281397923097364372958496861")
MO_RATIO_TEN = mp.mpf("38.755517816455745211409822790402869375008407")
MO_SAME_SUP = mp.mpf("29.5451774444795624753378569716654125446040011")

UNIT_INTERVAL = ConvexBody.interval(0, 1)
UNIT_BOX = ConvexBody.box((0, 0), (1, 1))
HALF_SET = MeasurableSet.intervals([(0, Fraction(1, 2))])


def enc_contains(enc, ref, width=mp.mpf("1e-30")):
    lo, hi = mp.mpf(str(enc.lo)), mp.mpf(str(enc.hi))
    assert lo <= ref <= hi, f"{ref} outside [{lo}, {hi}]"
    assert hi - lo < width


def synthetic(n, gamma_plus_4):
    """Constants record with a directly chosen C_N = 4 e^{gamma+4}."""
    with working_precision(128):
        cn = enc_exp(Enc.from_fraction(gamma_plus_4)).scale(4)
    return RemezConstants(n, 0, Fraction(gamma_plus_4 - 4), cn)


SYN = synthetic(2, 5)  # N = 2, C_N = 4 e^5


def bf_gamma(knots, n):
    # exact-rational sampling; piecewise-monotone ratio makes the grid max
    # coincide with the true sup
    best = Fraction(0)
    for (s0, v0), (s1, v1) in zip(knots, knots[1:]):
        if s0 >= n:
            break
        beta = (v1 - v0) / (s1 - s0)
        hi = min(s1, Fraction(n))
        best = max(best, beta * s0 / v0)
        for i in range(1, 33):
            s = s0 + (hi - s0) * Fraction(i, 32)
            best = max(best, beta * s / (v0 + beta * (s - s0)))
    return best


# -- extension and growth constant --------------------------------------------


class TestExtension:
    def test_knot_validation(self):
        with pytest.raises(InvalidRange):
            WeightExtension(((Fraction(1), Fraction(1)),))
        with pytest.raises(InvalidRange):
            WeightExtension(((Fraction(1), Fraction(2)),
                             (Fraction(2), Fraction(1))))
        with pytest.raises(InvalidRange):
            WeightExtension(((Fraction(1), Fraction(0)),
                             (Fraction(2), Fraction(1))))

    def test_canonical_knots(self):
        ext = WeightExtension.canonical(WeightSpec.linear(1), 4)
        assert ext.knots == tuple(
            (Fraction(k), Fraction(k)) for k in range(1, 5))

    def test_canonical_past_truncation(self):
        ext = WeightExtension.canonical(WeightSpec.table([1, 2, 4]), 5)
        assert [v for _, v in ext.knots[:3]] == [1, 2, 4]
        assert all(is_inf(v) for _, v in ext.knots[3:])

    def test_canonical_irrational_entries(self):
        with pytest.raises(InvalidRange):
            WeightExtension.canonical(WeightSpec.power(1, Fraction(1, 2)), 4)

    def test_gamma_linear_is_one(self):
        for c in (1, 3, Fraction(1, 2)):
            ext = WeightExtension.canonical(WeightSpec.linear(c), 16)
            assert gamma_of(ext, 16) == 1

    def test_gamma_const_is_zero(self):
        ext = WeightExtension.canonical(WeightSpec.const(5), 8)
        assert gamma_of(ext, 8) == 0

    def test_gamma_geometric(self):
        # entries 2^k: piece [k, k+1] peaks at the left limit with value k
        ext = WeightExtension.canonical(WeightSpec.geometric(1, 2), 6)
        assert gamma_of(ext, 6) == 5

    def test_gamma_square_entries(self):
        # secant slope out of s = 1 is 3, above the smooth ratio 2
        ext = WeightExtension.canonical(WeightSpec.power(1, 2), 4)
        assert gamma_of(ext, 4) == 3

    def test_gamma_matches_sampling_oracle(self):
        for mu, n in ((WeightSpec.linear(2), 10),
                      (WeightSpec.geometric(1, 2), 6),
                      (WeightSpec.power(1, 2), 8),
                      (WeightSpec.table([1, 3, 4, 10, 11]), 5)):
            ext = WeightExtension.canonical(mu, n)
            assert gamma_of(ext, n) == bf_gamma(ext.knots, n)

    def test_gamma_truncation_becomes_inf(self):
        ext = WeightExtension.canonical(WeightSpec.table([1, 1, 1]), 4)
        assert is_inf(gamma_of(ext, 4))

    def test_gamma_range_errors(self):
        ext = WeightExtension.canonical(WeightSpec.linear(1), 4)
        assert gamma_of(ext, 1) == 0
        with pytest.raises(InvalidRange):
            gamma_of(ext, 5)
        with pytest.raises(InvalidRange):
            gamma_of(ext, 0)

    @given(st.lists(st.integers(1, 50), min_size=2, max_size=8),
           st.integers(2, 8))
    @settings(max_examples=60, deadline=None)
    def test_gamma_sampling_agreement(self, steps, n):
        vals, acc = [], Fraction(0)
        for s in steps:
            acc += s
            vals.append(acc)
        knots = tuple((Fraction(k + 1), v) for k, v in enumerate(vals))
        n = min(n, len(vals))
        if n < 2:
            return
        ext = WeightExtension(knots)
        assert gamma_of(ext, n) == bf_gamma(knots, n)

    def test_smooth_gamma_values(self):
        assert smooth_gamma(WeightSpec.const(7)) == 0
        assert smooth_gamma(WeightSpec.linear(3)) == 1
        assert smooth_gamma(WeightSpec.power(2, Fraction(3, 2))) == Fraction(3, 2)
        with pytest.raises(InvalidRange):
            smooth_gamma(WeightSpec.geometric(1, 2))
        with pytest.raises(InvalidRange):
            smooth_gamma(WeightSpec.table([1, 2]))


# -- the constants record ------------------------------------------------------


class TestConstants:
    def test_linear_unit_weight(self):
        # largest n with 1 + 1/2 + ... + 1/n < e is 8, hence N = 9
        w = FullWeight(WeightSpec.linear(1), Fraction(1))
        c = remez_constants(w, Fraction(1), Fraction(1))
        assert (c.N, c.j0, c.gamma) == (9, 0, 1)
        assert c.power == 16
        assert not c.degenerate
        enc_contains(c.c_n, FOUR_E5)

    def test_const_weight(self):
        w = FullWeight(WeightSpec.const(3), Fraction(2))
        c = remez_constants(w, Fraction(1), Fraction(1))
        assert (c.N, c.j0, c.gamma) == (10, 1, 0)
        enc_contains(c.c_n, FOUR_E4)

    def test_geometric_weight(self):
        w = FullWeight(WeightSpec.geometric(1, 2), Fraction(1))
        c = remez_constants(w, Fraction(1, 3), Fraction(1))
        assert (c.N, c.gamma) == (4, 5)
        enc_contains(c.c_n, FOUR_E9)

    def test_truncated_weight_goes_inf(self):
        w = FullWeight(WeightSpec.table([1, 1, 1]), Fraction(1))
        c = remez_constants(w, Fraction(1), Fraction(1))
        assert c.N == 3 and is_inf(c.gamma) and c.c_n is INF
        assert remez_univariate(c, UNIT_INTERVAL, HALF_SET, 1) is INF
        assert rearrangement_lower_bound(
            c, UNIT_INTERVAL, Fraction(1, 2), Fraction(1, 2), 1) == 0

    def test_condition_fails(self):
        for w, delta in (
                (FullWeight(WeightSpec.geometric(1, 2), Fraction(1)), 1),
                (FullWeight(WeightSpec.power(1, 2), Fraction(1)), 1),
                (FullWeight(WeightSpec.table([1, 2, 4]), Fraction(1)), 2)):
            with pytest.raises(ConditionFails):
                remez_constants(w, Fraction(delta), Fraction(1))

    def test_smooth_flag(self):
        lin = FullWeight(WeightSpec.linear(2), Fraction(1))
        a = remez_constants(lin, Fraction(1), Fraction(1))
        b = remez_constants(lin, Fraction(1), Fraction(1), smooth=True)
        assert a.gamma == b.gamma == 1 and a.N == b.N

        sq = FullWeight(WeightSpec.power(1, 2), Fraction(1))
        pw = remez_constants(sq, Fraction(1, 2), Fraction(1))
        sm = remez_constants(sq, Fraction(1, 2), Fraction(1), smooth=True)
        assert pw.N == sm.N
        assert (pw.gamma, sm.gamma) == (3, 2)

        frac = FullWeight(WeightSpec.power(1, Fraction(1, 2)), Fraction(1))
        with pytest.raises(InvalidRange):
            remez_constants(frac, Fraction(1), Fraction(1))
        c = remez_constants(frac, Fraction(1), Fraction(1), smooth=True)
        assert (c.N, c.gamma) == (4, Fraction(1, 2))


# -- the bounds ----------------------------------------------------------------


class TestUnivariate:
    def test_formula_value(self):
        u = remez_univariate(SYN, UNIT_INTERVAL, HALF_SET, 1)
        val = mp.mpf(str(u))
        assert val >= SIXTYFOUR_E10  # upper-rounded
        assert val - SIXTYFOUR_E10 < mp.mpf("1e-20")

    def test_sup_scales_through(self):
        u1 = remez_univariate(SYN, UNIT_INTERVAL, HALF_SET, 1)
        u2 = remez_univariate(SYN, UNIT_INTERVAL, HALF_SET, Fraction(3, 7))
        assert u2 == u1 * Fraction(3, 7)

    def test_degenerate_is_inf(self):
        deg = RemezConstants(1, 0, Fraction(0), SYN.c_n)
        assert remez_univariate(deg, UNIT_INTERVAL, HALF_SET, 1) is INF

    def test_shape_and_containment_errors(self):
        with pytest.raises(InvalidRange):
            remez_univariate(SYN, UNIT_BOX, HALF_SET, 1)
        outside = MeasurableSet.intervals([(Fraction(1, 2), 2)])
        with pytest.raises(InvalidRange):
            remez_univariate(SYN, UNIT_INTERVAL, outside, 1)


class TestMultivariate:
    def test_formula_value(self):
        e = MeasurableSet.from_parts([((0, 0), (Fraction(3, 4), 1))])
        f = remez_multivariate(SYN, UNIT_BOX, e)
        # |L| = 1, |E| = 3/4: denominator 1 - (1/4)^{1/2} = 1/2
        val = mp.mpf(str(f))
        assert val >= SIXTYFOUR_E10
        assert val - SIXTYFOUR_E10 < mp.mpf("1e-20")

    def test_full_set_gives_cn_power(self):
        full = MeasurableSet.from_parts([((0, 0), (1, 1))])
        f = remez_multivariate(SYN, UNIT_BOX, full)
        ref = FOUR_E5 ** 2
        val = mp.mpf(str(f))
        assert val >= ref and val - ref < mp.mpf("1e-25")

    def test_monotone_in_measure(self):
        prev = None
        for num in (1, 2, 3, 4):
            e = MeasurableSet.from_parts([((0, 0), (Fraction(num, 4), 1))])
            f = remez_multivariate(SYN, UNIT_BOX, e)
            assert prev is None or f <= prev
            prev = f

    def test_containment_error(self):
        e = MeasurableSet.from_parts([((0, 0), (2, 1))])
        with pytest.raises(InvalidRange):
            remez_multivariate(SYN, UNIT_BOX, e)

    def test_ball_body(self):
        ball = ConvexBody.ball((0, 0), 1)
        e = MeasurableSet.from_parts(
            [((-Fraction(1, 2), -Fraction(1, 2)),
              (Fraction(1, 2), Fraction(1, 2)))])
        f = remez_multivariate(SYN, ball, e)
        assert f is not INF and f > 0

    def test_body_factor_scale_invariance(self):
        t5 = make_chebyshev(5)
        w = t5.weight
        w_scaled = t5.scaled_by(Fraction(73, 10)).weight
        body = ConvexBody.interval(-1, 1)
        e = MeasurableSet.intervals([(-Fraction(1, 2), Fraction(1, 2))])
        c1, f1 = remez_body_factor(w, body, e)
        c2, f2 = remez_body_factor(w_scaled, body, e)
        assert (c1.N, c1.gamma) == (c2.N, c2.gamma)
        assert f1 == f2


class TestSublevel:
    def test_formula_value(self):
        s = sublevel_volume_bound(SYN, UNIT_INTERVAL, Fraction(1, 10000), 1)
        ref = FOUR_E5 / 100
        val = mp.mpf(str(s))
        assert val >= ref and val - ref < mp.mpf("1e-25")

    def test_errors(self):
        with pytest.raises(InvalidRange):
            sublevel_volume_bound(SYN, UNIT_INTERVAL, 0, 1)
        with pytest.raises(InvalidRange):
            sublevel_volume_bound(SYN, UNIT_INTERVAL, Fraction(1, 2), 0)
        deg = RemezConstants(1, 0, Fraction(0), SYN.c_n)
        assert sublevel_volume_bound(deg, UNIT_INTERVAL, 1, 1) is INF


class TestRearrangement:
    def test_formula_value(self):
        r = rearrangement_lower_bound(SYN, UNIT_INTERVAL, 1, Fraction(1, 2), 1)
        val = mp.mpf(str(r))
        assert val <= INV_64_E10  # lower-rounded
        assert INV_64_E10 - val < mp.mpf("1e-30")

    def test_errors(self):
        with pytest.raises(InvalidRange):
            rearrangement_lower_bound(SYN, UNIT_INTERVAL, 1, 1, 1)
        with pytest.raises(InvalidRange):
            rearrangement_lower_bound(SYN, UNIT_INTERVAL, 1, 0, 1)
        with pytest.raises(EmptySet):
            rearrangement_lower_bound(SYN, UNIT_INTERVAL, 0, Fraction(1, 2), 1)
        deg = RemezConstants(1, 0, Fraction(0), SYN.c_n)
        assert rearrangement_lower_bound(
            deg, UNIT_INTERVAL, 1, Fraction(1, 2), 1) == 0


class TestLpComparison:
    def test_sup_vs_l1_same_set(self):
        trip = lp_comparison_bound(SYN, UNIT_INTERVAL, 1, INF, 1)
        for v in trip:
            val = mp.mpf(str(v))
            assert val >= FORTYEIGHT_E10
            assert val - FORTYEIGHT_E10 < mp.mpf("1e-20")

    def test_finite_p(self):
        # p = 2, q = 1, |E| = 1/2: master (8e^5)^1 sqrt(3), small (8e^5)^2 3
        m, k, s = lp_comparison_bound(
            SYN, UNIT_INTERVAL, Fraction(1, 2), 2, 1)
        base = 2 * FOUR_E5
        assert abs(mp.mpf(str(m)) - base * mp.sqrt(3)) < mp.mpf("1e-22")
        assert abs(mp.mpf(str(k)) - FOUR_E5 * mp.sqrt(3)) < mp.mpf("1e-22")
        assert abs(mp.mpf(str(s)) - base ** 2 * 3) < mp.mpf("1e-18")

    def test_q_to_p_limit(self):
        q = Fraction(2) * (1 - Fraction(1, 10 ** 6))
        m, _, _ = lp_comparison_bound(SYN, UNIT_INTERVAL, Fraction(1, 2), 2, q)
        assert abs(m - 1) < Fraction(1, 1000)

    def test_bad_exponents(self):
        for p, q in ((1, 1), (1, 2), (2, 0), (INF, 0)):
            with pytest.raises(BadExponents):
                lp_comparison_bound(SYN, UNIT_INTERVAL, 1, p, q)

    def test_degenerate(self):
        deg = RemezConstants(1, 0, Fraction(0), SYN.c_n)
        assert lp_comparison_bound(deg, UNIT_INTERVAL, 1, INF, 1) == (INF, INF, INF)


class TestMeanOscillation:
    def test_measure_ratio_ten(self):
        b = mean_oscillation_bound(SYN, UNIT_INTERVAL, Fraction(1, 10))
        val = mp.mpf(str(b))
        assert val >= MO_RATIO_TEN
        assert val - MO_RATIO_TEN < mp.mpf("1e-25")

    def test_same_sup_drops_ratio(self):
        b = mean_oscillation_bound(
            SYN, UNIT_INTERVAL, Fraction(1, 10), same_sup=True)
        val = mp.mpf(str(b))
        assert val >= MO_SAME_SUP
        assert val - MO_SAME_SUP < mp.mpf("1e-25")

    def test_errors(self):
        with pytest.raises(EmptySet):
            mean_oscillation_bound(SYN, UNIT_INTERVAL, 0)
        deg = RemezConstants(1, 0, Fraction(0), SYN.c_n)
        assert mean_oscillation_bound(deg, UNIT_INTERVAL, 1) is INF
