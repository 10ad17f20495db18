"""Profile values b_n and their consequences, against naive mpmath tables.

Expected decimals below were produced by bruteforce.bf_bang on the raw
derivative tables at 45 digits and frozen; containment is asserted with a
margin far above the enclosure widths (~1e-38 at 128 bits).
"""

from fractions import Fraction

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import bruteforce as bf
from tamebounds.bang import (
    BangProfile,
    ChainReport,
    check_bang_lemma,
    critical_point_bound,
    distance_to_m_fold_zero,
    verify_bang_chain,
    zero_count_bound,
)
from tamebounds.enclosure import Enc
from tamebounds.errors import (
    ChainInvalid,
    ConditionFails,
    DerivativeUnavailable,
    Inconclusive,
    InvalidRange,
    OutsideDomain,
)
from tamebounds.functions import (
    make_chebyshev,
    make_plane_waves,
    make_scaled_exp,
    make_tensor_poly,
)
from tamebounds.geometry import ConvexBody
from tamebounds.weights import INF, FullWeight

T5 = make_chebyshev(5)
WAVE = make_plane_waves([(1, (3,), Fraction(1, 7))], ConvexBody.interval(-2, 2))
EXP = make_scaled_exp(-2, 0, 1)


def enc_contains(enc: Enc, decimal: str, slack="1e-30") -> bool:
    v, s = mp.mpf(decimal), mp.mpf(slack)
    lo, hi = mp.mpf(str(enc.lo)), mp.mpf(str(enc.hi))
    return lo - s <= v <= hi + s and hi - lo < mp.mpf("1e-15") + s


# frozen from bf_bang over bf_poly_derivs(T5) with entry_const(25), M0 = 1
T5_VALUES = [
    (0, Fraction(1, 3), "0.991769547325102880658436213992"),
    (0, Fraction(-7, 8), "0.81689453125"),
    (1, Fraction(-7, 8), "0.0876587730916327406926833983588"),
    (2, Fraction(0), "0.000382364685065195082081349752192"),
    (3, Fraction(1, 3), "0.0000424849650072438980090388613547"),
    (5, Fraction(0), "0.00000132473428359619551493542020838"),
]

# frozen from bf_wave_derivs((1, 3, 1/7, 0)) with entry_const(3), tail on
WAVE_VALUES = [
    (0, Fraction(1, 3), "0.909822912941123932263245558337"),
    (1, Fraction(1, 3), "0.152668756777263034663841830971"),
    (4, Fraction(-1, 2), "0.0178991923098925802549831981096"),
]


@pytest.mark.parametrize("n,t,expected", T5_VALUES)
def test_poly_profile_frozen(n, t, expected):
    enc = BangProfile(T5).value(n, t)
    assert enc_contains(enc, expected)


def test_poly_profile_exact_rational_point():
    # j = 0 dominates at t = -7/8 and |T5(-7/8)| = 1673/2048 exactly
    enc = BangProfile(T5).value(0, Fraction(-7, 8))
    assert enc.lo_fraction() == enc.hi_fraction() == Fraction(1673, 2048)


def test_poly_profile_past_degree_is_zero():
    enc = BangProfile(T5).value(6, Fraction(1, 3))
    assert enc.lo_fraction() == enc.hi_fraction() == 0


@pytest.mark.parametrize("n,t,expected", WAVE_VALUES)
def test_wave_profile_frozen(n, t, expected):
    enc = BangProfile(WAVE).value(n, t)
    # the unseen-tail allowance sits at e^{-(n+65)}, far below the slack
    assert enc_contains(enc, expected)


@pytest.mark.parametrize("n", [0, 2, 5])
@pytest.mark.parametrize("t", [Fraction(0), Fraction(1, 4), Fraction(1)])
def test_exp_profile_closed_form(n, t):
    # for amp e^{-2t} with mu = 2 the ratio is e^{-2t-j}, decreasing in j,
    # so b_n(t) = e^{-2t-n} on the nose
    enc = BangProfile(EXP).value(n, t)
    exact = mp.exp(-2 * mp.mpf(t.numerator) / t.denominator - n)
    lo, hi = mp.mpf(str(enc.lo)), mp.mpf(str(enc.hi))
    assert lo <= exact <= hi
    assert hi - lo < mp.mpf("1e-30")


def test_truncated_weight_profile():
    # M_j infinite past N = 3 kills those ratios exactly
    w = FullWeight(T5.weight.mu.truncated(3), T5.weight.M0)
    prof = BangProfile(T5, weight=w)
    assert prof.value(4, Fraction(1, 3)).hi_fraction() == 0
    dv = bf.bf_poly_derivs([0, 5, 0, -20, 0, 16], Fraction(1, 3), 6)
    ref = bf.bf_bang(dv, bf.truncated(bf.entry_const(25), 3), 1, 2, tail=False)
    assert enc_contains(prof.value(2, Fraction(1, 3)), mp.nstr(ref, 30))


def test_profile_rejects_multivariate():
    f = make_tensor_poly([[0, 1], [0, 1]], ConvexBody.box((0, 0), (1, 1)))
    with pytest.raises(DerivativeUnavailable):
        BangProfile(f)


def test_profile_rejects_negative_index():
    with pytest.raises(InvalidRange):
        BangProfile(T5).value(-1, Fraction(0))


# -- the three lemma clauses --------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(n=st.integers(0, 6),
       u=st.fractions(min_value=0, max_value=1, max_denominator=64))
def test_profile_below_exp_minus_n(n, u):
    # the bound needs |f| <= M_0, which only holds on each function's domain
    for f, t in ((T5, 2 * u - 1), (WAVE, 2 * u - 1), (EXP, u)):
        enc = BangProfile(f).value(n, t)
        assert mp.mpf(str(enc.lo)) <= mp.exp(-n) + mp.mpf("1e-30")


@settings(max_examples=60, deadline=None)
@given(n=st.integers(0, 5),
       t=st.fractions(min_value=-1, max_value=1, max_denominator=64))
def test_profile_monotone_in_n(n, t):
    for f in (T5, WAVE):
        p = BangProfile(f)
        assert p.value(n + 1, t).lo <= p.value(n, t).hi


@settings(max_examples=120, deadline=None)
@given(n=st.integers(0, 4), dk=st.integers(1, 5),
       t=st.fractions(min_value=-1, max_value=1, max_denominator=512),
       s=st.fractions(min_value=-1, max_value=1, max_denominator=512))
def test_propagation_lemma_never_violated(n, dk, t, s):
    for f in (T5, WAVE):
        try:
            verdict = check_bang_lemma(BangProfile(f), n, n + dk, t, s)
        except Inconclusive:
            continue
        assert verdict is True


def test_propagation_lemma_argument_order():
    with pytest.raises(InvalidRange):
        check_bang_lemma(BangProfile(T5), 3, 3, Fraction(0), Fraction(1, 2))


def test_propagation_lemma_infinite_mu_is_trivial():
    w = FullWeight(T5.weight.mu.truncated(2), T5.weight.M0)
    assert check_bang_lemma(BangProfile(T5, weight=w), 1, 5,
                            Fraction(0), Fraction(1, 2)) is True


# -- chains -------------------------------------------------------------------


def chebyshev_chain():
    # x1 near cos(pi/5) (zero of T5'), x2 = 0 (exact zero of T5'')
    x1 = Fraction(round(mp.cos(mp.pi / 5) * 2**80), 2**80)
    return (Fraction(1), x1, Fraction(0))


def test_chain_frozen():
    rep = verify_bang_chain(BangProfile(T5), chebyshev_chain())
    assert isinstance(rep, ChainReport)
    assert rep.holds and rep.strict_holds and rep.strict_expected
    assert rep.total_length == Fraction(1)
    assert rep.j0 == 0
    assert rep.b0_lower == 1
    # bound = (1/e) * 3/25
    assert enc_contains(rep.lower_bound, "0.0441455329405730785914628524194")


def test_chain_rejects_fake_zero():
    x0, x1, x2 = chebyshev_chain()
    with pytest.raises(ChainInvalid):
        verify_bang_chain(BangProfile(T5), (x0, x1 + Fraction(1, 10**6), x2))


def test_chain_needs_two_points():
    with pytest.raises(InvalidRange):
        verify_bang_chain(BangProfile(T5), (Fraction(1),))


# -- zero counting ------------------------------------------------------------


def test_zero_count_frozen_endpoint():
    # b_0(1) = 1, j0 = 0, sum_{2 mu}(1, n) = n/50 < e up to n = 135
    rep = zero_count_bound(BangProfile(T5), Fraction(1))
    assert (rep.j0, rep.one_sided, rep.total, rep.bootstrap_degree) == (0, 135, 135, 136)
    assert rep.scale == 2 and rep.b0_lower == 1


def test_zero_count_frozen_interior():
    rep = zero_count_bound(BangProfile(T5), Fraction(1, 3))
    assert (rep.j0, rep.one_sided, rep.total) == (1, 136, 272)
    assert rep.total >= 5  # dominates the true zero count


def test_zero_count_dominates_truth():
    # T5 has exactly 5 real zeros in [-1, 1]
    assert zero_count_bound(BangProfile(T5), Fraction(1)).total >= 5


def test_zero_count_outside_domain():
    with pytest.raises(OutsideDomain):
        zero_count_bound(BangProfile(T5), Fraction(3, 2))


def test_zero_count_needs_long_tail():
    w = FullWeight(T5.weight.mu.truncated(3), T5.weight.M0)
    with pytest.raises(ConditionFails):
        zero_count_bound(BangProfile(T5, weight=w), Fraction(1))


# -- separation and critical points -------------------------------------------


def test_distance_frozen():
    d = distance_to_m_fold_zero(BangProfile(T5), Fraction(1), 1)
    # exact radius is 1/(25 e); returned value is its certified lower endpoint
    exact = 1 / (25 * mp.e)
    assert mp.mpf(0) < mp.mpf(d.numerator) / d.denominator <= exact
    assert exact - (mp.mpf(d.numerator) / d.denominator) < mp.mpf("1e-30")
    # and the true nearest zero, cos(pi/10), is farther away than the radius
    assert d < 1 - Fraction(round(mp.cos(mp.pi / 10) * 2**80), 2**80)


def test_distance_needs_nonzero_value():
    with pytest.raises(InvalidRange):
        distance_to_m_fold_zero(BangProfile(T5), Fraction(0), 1)  # T5(0) = 0


def test_distance_empty_sum_is_zero():
    # k0 = j0(small value) can exceed m; the bound degrades to 0 but stays sound
    d = distance_to_m_fold_zero(BangProfile(EXP), Fraction(1), 1)
    assert d >= 0


def test_critical_points_frozen():
    # j0(1/4) = 2, sum_{2 mu}(3, n) = (n - 2)/50 < e up to n = 137, N = 138
    assert critical_point_bound(BangProfile(T5), Fraction(1, 2), True) == 274
    assert critical_point_bound(BangProfile(T5), Fraction(1, 2), False,
                                oscillation=Fraction(3, 2)) == 274


def test_critical_points_precondition():
    with pytest.raises(ConditionFails):
        critical_point_bound(BangProfile(T5), Fraction(1, 2), False,
                             oscillation=Fraction(1, 2))
    with pytest.raises(ConditionFails):
        critical_point_bound(BangProfile(T5), Fraction(1, 2), False)


def test_critical_points_need_divergent_tail():
    w = FullWeight(T5.weight.mu.truncated(3), T5.weight.M0)
    with pytest.raises(ConditionFails):
        critical_point_bound(BangProfile(T5, weight=w), Fraction(1, 2), True)
