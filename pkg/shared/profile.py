# shared/profile.py
"""Approximate profile, weights and the profile-only certificate builders.

The profile is f0~ = 2 arctan(g0) with g0 = scale * sum f_n T_{2n+1}(y / sqrt(2+y^2)).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from shared.exact_arith import DEFAULT_PRECISION, Interval, Precision, iv_arctan_pi, iv_sqrt
from shared.expr import Chart, NamedExpression, named
from shared.polyrat import (
    BernsteinForm,
    Polynomial,
    RationalFunction,
    cheb_odd_factor,
    cheb_series,
    denom_positive,
    to_bernstein,
)
from shared.tower import R2, S2, RadicalError, TowerElement

logger = logging.getLogger(__name__)

PROFILE_SCALE = Fraction(1, 2)
EXISTENCE_RADIUS = Fraction(5, 10**4)
GAP_TARGET = Fraction(56, 100)
GAUGE_BERNSTEIN_DEGREE = 59

Y = RationalFunction.x()
T_OF_Y = RationalFunction.from_coefficients([0, 0, 1], [2, 0, 1])  # y^2/(2+y^2)


def _sqrt2() -> TowerElement:
    return TowerElement.generator(R2)


def _s2() -> TowerElement:
    return TowerElement.generator(S2)


@dataclass(frozen=True)
class WeightFamily:
    p1: TowerElement
    p2: TowerElement
    p3: TowerElement

    @classmethod
    def standard(cls) -> "WeightFamily":
        radicals = _s2() * _sqrt2()
        two_plus = RationalFunction.from_coefficients([2, 0, 1])
        four_plus = RationalFunction.from_coefficients([4, 0, 1])
        p1 = radicals * RationalFunction.from_coefficients([1], [0, 2])
        p2 = radicals * (two_plus * two_plus / (Y * four_plus * 6))
        p3 = radicals * (two_plus / 4)
        return cls(p1, p2, p3)

    def identities(self) -> dict[str, bool]:
        """Exact checks of (1/p1)' = 1/p3 and L0(1/p1) = 1/p2."""
        inv_p1 = self.p1.inverse()
        return {
            "derivative_of_inverse_p1_is_inverse_p3": (inv_p1.derivative() - self.p3.inverse()).is_zero,
            "free_operator_of_inverse_p1_is_inverse_p2": (free_operator(inv_p1) - self.p2.inverse()).is_zero,
        }


def free_operator(phi: TowerElement) -> TowerElement:
    """L0 phi = -phi'' - (2/y - y/2) phi' + (2/y^2) phi."""
    drift = RationalFunction.from_coefficients([4, 0, -1], [0, 2])  # 2/y - y/2
    d1 = phi.derivative()
    return -d1.derivative() - d1 * drift + phi * RationalFunction.from_coefficients([2], [0, 0, 1])


@dataclass(frozen=True, eq=False)
class ProfileAnsatz:
    coefficients: tuple[Fraction, ...]
    q: Polynomial  # g0 = (y / S2) q(t), scale included
    g0: TowerElement
    g0_squared: RationalFunction
    sin2: TowerElement
    cos2: RationalFunction
    sin_sq: RationalFunction

    @property
    def far_field_value(self) -> Fraction:
        """g0(oo) = scale * sum f_n, since T_{2n+1}(1) = 1."""
        return PROFILE_SCALE * sum(self.coefficients, Fraction(0))

    @property
    def slope_at_origin_over_sqrt2(self) -> Fraction:
        """q(0); the profile slope is f0~'(0) = sqrt(2) q(0)."""
        return self.q(0)

    def derivative(self) -> TowerElement:
        """f0~' = 2 g0' / (1 + g0^2)."""
        return self.g0.derivative() * (2 / (1 + self.g0_squared))


def build_profile(coefficients: Sequence[Fraction], scale: Fraction = PROFILE_SCALE) -> ProfileAnsatz:
    coeffs = tuple(Fraction(c) for c in coefficients)
    q = cheb_series(coeffs, cheb_odd_factor).scale(scale)
    q_of_y = RationalFunction.from_polynomial(q).compose(T_OF_Y)
    # y / S2 = y S2 / (2 + y^2)
    g0 = _s2() * (Y * q_of_y / RationalFunction.from_coefficients([2, 0, 1]))
    g_sq = (g0 * g0).as_rational()
    one_plus = 1 + g_sq
    cos2 = (g_sq * g_sq - g_sq * 6 + 1) / (one_plus * one_plus)
    sin2 = g0 * ((1 - g_sq) * 4 / (one_plus * one_plus))
    sin_sq = g_sq * 4 / (one_plus * one_plus)
    logger.info("Profile built", extra={"terms": len(coeffs), "q_degree": q.degree})
    return ProfileAnsatz(coeffs, q, g0, g_sq, sin2, cos2, sin_sq)


def residual(profile: ProfileAnsatz) -> TowerElement:
    """R(f0~) written through g0; lives in the S2 component."""
    g = profile.g0
    g_sq = profile.g0_squared
    dg = g.derivative()
    d2g = dg.derivative()
    one_plus = 1 + g_sq
    drift = RationalFunction.from_coefficients([4, 0, -1], [0, 2])
    inner = (
        d2g
        + dg * drift
        - (g * dg * dg) * (2 / one_plus)
        - g * ((1 - g_sq) * 2 / (Y * Y * one_plus))
    )
    return inner * (2 / one_plus)


def build_residual(profile: ProfileAnsatz, weights: WeightFamily) -> NamedExpression:
    r = residual(profile)
    mask, component = r.as_single_term()
    if mask != S2 or not component.is_odd():
        raise RadicalError("residual does not have the odd S2 structure")
    weighted = weights.p2 * r
    mask, body = weighted.as_single_term()
    if mask != R2:
        raise RadicalError("S2 survives in p2 R(f0~)")
    in_t = body.square_variable_form().compose(RationalFunction.from_coefficients([0, 2], [1, -1]))
    # sign of the reduced denominator is only fixed up to a constant
    den = in_t.den
    den_positive = denom_positive(to_bernstein(den)) or denom_positive(to_bernstein(-den))
    return named(
        "C1:residual",
        weighted,
        Chart.T,
        notes={
            "num_degree": str(in_t.num.degree),
            "den_degree": str(in_t.den.degree),
            "den_bernstein_positive": str(den_positive),
        },
    )


def nonlinearity_factors(profile: ProfileAnsatz, weights: WeightFamily) -> tuple[TowerElement, TowerElement]:
    y_sq = RationalFunction.from_coefficients([0, 0, 1])
    p1_sq = weights.p1 * weights.p1
    sin_factor = weights.p2 * 2 / (p1_sq * y_sq) * profile.sin2
    weight_factor = weights.p2 * 4 / (p1_sq * weights.p1 * y_sq * 3)
    return sin_factor, weight_factor


WEIGHT_FACTOR_CLOSED_FORM = RationalFunction.from_coefficients([16, 0, 8], [36, 0, 9])


def build_nonlinearity_factors(
    profile: ProfileAnsatz, weights: WeightFamily
) -> tuple[NamedExpression, NamedExpression]:
    sin_factor, weight_factor = nonlinearity_factors(profile, weights)
    if weight_factor.as_rational() != WEIGHT_FACTOR_CLOSED_FORM:
        raise ValueError("weight factor differs from 8(2+y^2)/(9(4+y^2))")
    return (
        named("C2:sinfactor", sin_factor, Chart.T),
        named("C3:weightfactor", WEIGHT_FACTOR_CLOSED_FORM, Chart.T),
    )


# --- gauge mode ----------------------------------------------------------------


@dataclass(frozen=True)
class GaugeForms:
    """y f0~' - r y/p3 = x(1-x^2) N(x^2)/D(x^2) with N, D in Bernstein form on [0,1]."""

    numerator: BernsteinForm
    denominator: BernsteinForm
    numerator_poly: Polynomial
    denominator_poly: Polynomial
    sqrt2_upper: Fraction

    @property
    def all_positive(self) -> bool:
        return all(c > 0 for c in self.numerator.coefficients) and all(c > 0 for c in self.denominator.coefficients)


def build_gauge_positivity(
    profile: ProfileAnsatz,
    weights: WeightFamily,
    degree: int = GAUGE_BERNSTEIN_DEGREE,
    radius: Fraction = EXISTENCE_RADIUS,
    precision: Precision = DEFAULT_PRECISION,
) -> GaugeForms:
    """Gauge positivity forms in u = x^2, x = y/sqrt(2+y^2).

    With G(x) = x q(x^2): y f0~' = x(1-x^2) 2G'(x)/(1+G^2) and y/p3 = sqrt(2) x(1-x^2).
    """
    # y/p3 must be exactly sqrt(2) x (1-x^2) = R2 S2 2y/(2+y^2)^2
    two_plus = RationalFunction.from_coefficients([2, 0, 1])
    expected = _sqrt2() * _s2() * (Y * 2 / (two_plus * two_plus))
    if not (weights.p3.inverse() * Y - expected).is_zero:
        raise ValueError("prefactor of y/p3 is not sqrt(2) x(1-x^2)")

    q = profile.q
    u = Polynomial.x()
    sqrt2_upper = iv_sqrt(Interval.point(2), precision.sqrt_bits).hi
    slope = radius * sqrt2_upper
    denominator = 1 + u * q * q
    # G'(x) = q(u) + 2u q'(u)
    numerator = (q + u * q.derivative() * 2) * 2 - denominator.scale(slope)
    return GaugeForms(
        numerator=to_bernstein(numerator, degree),
        denominator=to_bernstein(denominator, degree),
        numerator_poly=numerator,
        denominator_poly=denominator,
        sqrt2_upper=sqrt2_upper,
    )


# --- far field -----------------------------------------------------------------


@dataclass(frozen=True)
class FarFieldGap:
    s: Fraction
    gap: Interval  # 2 arctan(s) - pi/2
    threshold: Fraction

    @property
    def holds(self) -> bool:
        return self.gap.lo > self.threshold


def build_farfield_gap(
    s: Fraction,
    radius: Fraction = EXISTENCE_RADIUS,
    target: Fraction = GAP_TARGET,
    precision: Precision = DEFAULT_PRECISION,
) -> FarFieldGap:
    """Certify |f0(oo) - pi/2| > target, with slack sqrt(2) * radius from p1(oo) = 1/sqrt(2)."""
    atan, pi = iv_arctan_pi(Interval.point(s), precision.arctan_terms)
    gap = atan * 2 - pi / 2
    sqrt2_upper = iv_sqrt(Interval.point(2), precision.sqrt_bits).hi
    return FarFieldGap(s=s, gap=gap, threshold=target + sqrt2_upper * radius)


# --- oracles -------------------------------------------------------------------


def profile_value_mp(coefficients: Sequence[Fraction], y, scale: Fraction = PROFILE_SCALE):
    """f0~(y) straight from the Chebyshev definition, in mpmath."""
    x = y / mpmath.sqrt(2 + y * y)
    g = sum(
        (mpmath.mpf(c.numerator) / c.denominator) * mpmath.chebyt(2 * n + 1, x)
        for n, c in enumerate(coefficients)
    )
    return 2 * mpmath.atan(mpmath.mpf(scale.numerator) / scale.denominator * g)


def residual_mp(coefficients: Sequence[Fraction], y, scale: Fraction = PROFILE_SCALE):
    """R(f0~)(y) by numerical differentiation of the direct definition."""
    f = lambda s: profile_value_mp(coefficients, s, scale)  # noqa: E731
    return mpmath.diff(f, y, 2) + (2 / y - y / 2) * mpmath.diff(f, y) - mpmath.sin(2 * f(y)) / (y * y)
