"""Degree arithmetic for the classical weight families.

Polynomials of degree n sit in the class of Const(n^2) (sharp factor table
included for oracle use) or Const(C n) after a complex-to-real conversion;
an eps-analytic function sits in a linear weight class scaled by 1/eps.
The harmonic crossing index n(x) = max{n : H_n <= x}, which governs
linear-weight degrees, admits a two-integer bracket through the
Euler-Mascheroni constant. The doubling comparison 2 d_mu <= d_{2mu} is
checkable for any weight; the matching upper bound d_{2mu} <= 2 d_mu + 1
is only claimed for constant weights and is reported, never asserted,
elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import floor
from typing import Optional, Tuple

from .enclosure import (
    Enc,
    enc_euler_gamma,
    enc_exp,
    mpfr_to_fraction,
    working_precision,
)
from .errors import BoundaryUndecidable, DomainError, InvalidRange
from .weights import (
    INF,
    FullWeight,
    WeightKind,
    WeightSpec,
    degree,
    is_inf,
)

GAMMA_BITS = 256


# -- polynomial weights --------------------------------------------------------


def markov_weight(n: int) -> FullWeight:
    """Const(n^2) envelope for degree-n polynomials with sup norm 1."""
    if n < 1:
        raise InvalidRange("polynomial degree must be >= 1")
    return FullWeight(WeightSpec.const(Fraction(n * n)), Fraction(1))


def markov_factor_table(n: int) -> Tuple[Fraction, ...]:
    """Sharp k-th derivative factors n^2(n^2-1)...(n^2-(k-1)^2)/(1*3*...*(2k-1)).

    Entry k-1 bounds sup|p^(k)| / sup|p| on [-1, 1]; the Const(n^2) envelope
    dominates every consecutive ratio of this table.
    """
    if n < 1:
        raise InvalidRange("polynomial degree must be >= 1")
    out = []
    num, den = 1, 1
    for k in range(1, n + 1):
        num *= n * n - (k - 1) ** 2
        den *= 2 * k - 1
        out.append(Fraction(num, den))
    return tuple(out)


def bernstein_weight(n: int, conversion=Fraction(1)) -> FullWeight:
    """Const(C n) envelope from the trigonometric-side derivative bound."""
    if n < 1:
        raise InvalidRange("polynomial degree must be >= 1")
    conversion = Fraction(conversion)
    if conversion <= 0:
        raise InvalidRange("conversion constant must be positive")
    return FullWeight(WeightSpec.const(conversion * n), Fraction(1))


@dataclass(frozen=True)
class PolyDegreeComparison:
    n: int
    mu_markov: WeightSpec
    mu_bernstein: WeightSpec
    degree_markov: int
    degree_bernstein: int


def compare_polynomial_degrees(n: int,
                               conversion=Fraction(1)) -> PolyDegreeComparison:
    """Certified degrees of both polynomial envelopes at threshold 1."""
    wm = markov_weight(n)
    wb = bernstein_weight(n, conversion)
    dm = degree(wm.mu).degree
    db = degree(wb.mu).degree
    return PolyDegreeComparison(n, wm.mu, wb.mu, dm, db)


# -- analytic functions ----------------------------------------------------------


def analytic_weight(eps, conversion=Fraction(1), sup_d=Fraction(1)) -> FullWeight:
    """Linear(C/eps) with M0 = sup|D|/eps, from Cauchy estimates on an
    eps-neighborhood."""
    eps, conversion, sup_d = Fraction(eps), Fraction(conversion), Fraction(sup_d)
    if eps <= 0 or conversion <= 0 or sup_d <= 0:
        raise InvalidRange("eps, conversion, and sup must be positive")
    return FullWeight(WeightSpec.linear(conversion / eps), sup_d / eps)


def analytic_degree_bound(eps, conversion=Fraction(1), sup_d=Fraction(1)):
    """10 * degree of the doubled analytic weight at threshold eps.

    One-sided: an upper bound for the best approximation degree at 2 eps
    with no matching lower bound.
    """
    w = analytic_weight(eps, conversion, sup_d)
    res = degree(w.mu, scale=2, b=Fraction(eps))
    if res.unresolved:
        raise BoundaryUndecidable("degree march hit the iteration cap",
                                  res.partial_sum_enclosure)
    if is_inf(res.degree):
        return INF
    return 10 * res.degree


# -- harmonic crossing index -----------------------------------------------------


def comtet_bracket(x) -> Tuple[int, int]:
    """Integer bracket for n(x) = max{n : H_n <= x}, valid for x >= 2.

    n(x) lies in [floor(c - (3/2)/w), floor(c + (1/12)/w)] where
    c = e^{x - gamma} - 1/2 and w = e^{x-1} - 1; endpoints are floored
    outward from certified enclosures.
    """
    x = Fraction(x)
    if x < 2:
        raise DomainError("the harmonic bracket is proved only for x >= 2")
    with working_precision(GAMMA_BITS):
        center = enc_exp(Enc.from_fraction(x) - enc_euler_gamma()) \
            - Enc.from_fraction(Fraction(1, 2))
        den = enc_exp(Enc.from_fraction(x - 1)) - Enc.one()
        lo_expr = center - Enc.from_fraction(Fraction(3, 2)) / den
        hi_expr = center + Enc.from_fraction(Fraction(1, 12)) / den
        return (floor(mpfr_to_fraction(lo_expr.lo)),
                floor(mpfr_to_fraction(hi_expr.hi)))


# -- weight doubling ---------------------------------------------------------------


def _const_like(mu: WeightSpec) -> bool:
    if mu.kind is WeightKind.CONST:
        return True
    return mu.kind is WeightKind.TABLE and len(set(mu.params)) == 1


def bracket_2mu(mu: WeightSpec, b=1) -> Tuple[bool, Optional[bool]]:
    """(2 d_mu(b) <= d_{2mu}(b), d_{2mu}(b) <= 2 d_mu(b) + 1 or None).

    The second entry is only meaningful for constant-entry weights; for
    every other family it is None, reported but never asserted.
    """
    results = []
    for scale in (1, 2):
        res = degree(mu, scale=scale, b=b)
        if res.unresolved:
            raise BoundaryUndecidable("degree march hit the iteration cap",
                                      res.partial_sum_enclosure)
        if is_inf(res.degree):
            raise InvalidRange("doubling comparison needs finite degrees")
        results.append(res.degree)
    d1, d2 = results
    lhs_ok = 2 * d1 <= d2
    upper_ok = (d2 <= 2 * d1 + 1) if _const_like(mu) else None
    return lhs_ok, upper_ok
