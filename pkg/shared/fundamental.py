# shared/fundamental.py
"""Free solutions, the approximate fundamental system and the operator-dependent builders.

v0 is replaced by v0~ built from a truncated continued fraction for the Dawson integral;
w0~ = v0~ * S0 and w1~ = v1 * S1 with S0, S1 the Chebyshev sums of the coefficient tables.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import mpmath

from shared.expr import Atom, Chart, NamedExpression, lower, named
from shared.exact_arith import Interval
from shared.polyrat import (
    RationalFunction,
    cheb_even_factor,
    cheb_generate,
    cheb_series,
    denom_positive,
    to_bernstein,
)
from shared.profile import ProfileAnsatz, WeightFamily
from shared.tower import ExpTowerElement, TowerElement

logger = logging.getLogger(__name__)

DAWSON_PARTIAL_NUMERATORS = 12
DAWSON_EPS = Fraction(1, 500)
ZERO_COUNT_RADIUS = Fraction(3, 100)
W1_STORED = 36
W1_TOTAL = 38

Y = RationalFunction.x()
V1 = RationalFunction.from_coefficients([2, 0, 1], [0, 0, 1])  # 1 + 2/y^2
FREE_WRONSKIAN = ExpTowerElement.lift(RationalFunction.from_coefficients([-6], [0, 0, 1]), 1)
DRIFT = RationalFunction.from_coefficients([4, 0, -1], [0, 2])  # 2/y - y/2


class SingularSystemError(ArithmeticError):
    """The tail coefficient system is singular."""


@lru_cache(maxsize=4)
def dawson_convergent(partial_numerators: int = DAWSON_PARTIAL_NUMERATORS) -> RationalFunction:
    """D~(y/2) as a rational function of y.

    D(z) = z/(1+2z^2 - 4z^2/(3+2z^2 - 8z^2/(5+2z^2 - ...))) keeping partial_numerators
    terms 4k z^2, so partial_numerators + 1 denominators (2k-1) + 2z^2. With z = y/2:
    (2k-1) + y^2/2 and 4k z^2 = k y^2.
    """
    depth = partial_numerators + 1
    tail = RationalFunction.from_coefficients([2 * depth - 1, 0, Fraction(1, 2)])
    for k in range(depth - 1, 0, -1):
        tail = RationalFunction.from_coefficients([2 * k - 1, 0, Fraction(1, 2)]) - RationalFunction.from_coefficients([0, 0, k]) / tail
    return RationalFunction.from_coefficients([0, Fraction(1, 2)]) / tail


def free_amplitude(dawson: RationalFunction) -> RationalFunction:
    """A with v0~ = e^{y^2/4} A, A = (3/y^2)(-y + (2+y^2) D~(y/2))."""
    two_plus = RationalFunction.from_coefficients([2, 0, 1])
    return (two_plus * dawson - Y) * RationalFunction.from_coefficients([3], [0, 0, 1])


def operator(profile: ProfileAnsatz, delta: ExpTowerElement) -> ExpTowerElement:
    """L delta = -delta'' - (2/y - y/2) delta' + (2 cos(2 f0~)/y^2) delta."""
    potential = profile.cos2 * RationalFunction.from_coefficients([2], [0, 0, 1])
    d1 = delta.derivative()
    return -d1.derivative() - d1 * DRIFT + delta * potential


def wronskian(a: ExpTowerElement, b: ExpTowerElement) -> ExpTowerElement:
    return a * b.derivative() - a.derivative() * b


def solve_tails(stored: Sequence[Fraction]) -> tuple[Fraction, Fraction]:
    """Coefficients 36 and 37 of S1 making d/dy S1 vanish at y = 0 and d/du S1 vanish at u = 1/y = 0.

    z = (y-2)/(y+2): dz/dy = 1 at y = 0 (z = -1); dz/du = -4 at u = 0 (z = 1).
    Both conditions reduce to sum w_n T_n'(z_endpoint) = 0.
    """
    if len(stored) != W1_STORED:
        raise ValueError(f"expected {W1_STORED} stored coefficients, got {len(stored)}")
    derivs = {n: cheb_generate(n).derivative() for n in range(W1_TOTAL)}
    rows = []
    for endpoint in (Fraction(-1), Fraction(1)):
        known = sum((c * derivs[n](endpoint) for n, c in enumerate(stored)), Fraction(0))
        rows.append((derivs[36](endpoint), derivs[37](endpoint), -known))
    (a11, a12, b1), (a21, a22, b2) = rows
    det = a11 * a22 - a12 * a21
    if det == 0:
        raise SingularSystemError("tail coefficient system is singular")
    return (b1 * a22 - a12 * b2) / det, (a11 * b2 - b1 * a21) / det


@dataclass(frozen=True, eq=False)
class FundamentalSystem:
    dawson: RationalFunction
    amplitude: RationalFunction  # v0~ = e^{y^2/4} amplitude
    v0_approx: ExpTowerElement
    v1: RationalFunction
    s0: RationalFunction
    s1: RationalFunction
    w0: ExpTowerElement
    w1: ExpTowerElement
    w1_coefficients: tuple[Fraction, ...]  # including the two solved tails

    @property
    def tails(self) -> tuple[Fraction, Fraction]:
        return self.w1_coefficients[36], self.w1_coefficients[37]

    def tail_conditions(self) -> tuple[Fraction, Fraction]:
        """(d/dy S1 at y = 0, d/du S1 at u = 0); both exactly 0 after the solve."""
        ds1 = self.s1.derivative()
        at_infinity = self.s1.invert_variable().derivative()
        return ds1(0), at_infinity(0)

    def w0_slope_at_origin(self) -> Fraction:
        """w0~'(0), exact from the built expression."""
        return self.w0.derivative().tower.as_rational()(0)


def s0_series(w0_coefficients: Sequence[Fraction]) -> RationalFunction:
    """sum w0_n T_{2n}(y/sqrt(y^2+4)) = sum w0_n E_n(y^2/(y^2+4))."""
    poly = cheb_series([Fraction(c) for c in w0_coefficients], cheb_even_factor)
    return RationalFunction.from_polynomial(poly).compose(RationalFunction.from_coefficients([0, 0, 1], [4, 0, 1]))


def s1_series(w1_coefficients: Sequence[Fraction]) -> RationalFunction:
    """sum w1_n T_n((y-2)/(y+2))."""
    poly = cheb_series([Fraction(c) for c in w1_coefficients], cheb_generate)
    return RationalFunction.from_polynomial(poly).compose(RationalFunction.from_coefficients([-2, 1], [2, 1]))


def build_fundamental_system(
    w0_coefficients: Sequence[Fraction],
    w1_stored: Sequence[Fraction],
    partial_numerators: int = DAWSON_PARTIAL_NUMERATORS,
) -> FundamentalSystem:
    dawson = dawson_convergent(partial_numerators)
    amplitude = free_amplitude(dawson)
    v0_approx = ExpTowerElement.lift(amplitude, 1)
    a36, a37 = solve_tails(w1_stored)
    w1_coefficients = tuple(Fraction(c) for c in w1_stored) + (a36, a37)
    s0 = s0_series(w0_coefficients)
    s1 = s1_series(w1_coefficients)
    logger.info(
        "Fundamental system built",
        extra={"w0_terms": len(w0_coefficients), "w1_terms": len(w1_coefficients), "tail_36": str(a36), "tail_37": str(a37)},
    )
    return FundamentalSystem(
        dawson=dawson,
        amplitude=amplitude,
        v0_approx=v0_approx,
        v1=V1,
        s0=s0,
        s1=s1,
        w0=v0_approx * s0,
        w1=ExpTowerElement.lift(V1 * s1),
        w1_coefficients=w1_coefficients,
    )


# --- Dawson truncation ----------------------------------------------------------------


def epsilon(system: FundamentalSystem) -> RationalFunction:
    """eps = 1 - (v0~/v1)' v1^2 y^2 e^{-y^2/4} / 6."""
    ratio = (system.v0_approx / system.v1).derivative()
    scaled = ratio * (system.v1 * system.v1 * Y * Y / 6)
    return 1 - (scaled / ExpTowerElement.lift(1, 1)).require_cancelled().as_rational()


def build_epsilon_check(system: FundamentalSystem) -> NamedExpression:
    return named("C10:dawson-eps", epsilon(system), Chart.T)


# --- P and Q ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PerturbationCoefficients:
    p: RationalFunction
    q: RationalFunction
    residual_w0: ExpTowerElement  # L w0~
    residual_w1: ExpTowerElement  # L w1~


def perturbation_coefficients(profile: ProfileAnsatz, system: FundamentalSystem) -> PerturbationCoefficients:
    lw0 = operator(profile, system.w0)
    lw1 = operator(profile, system.w1)
    w = wronskian(system.w0, system.w1)
    p = -(lw1 * system.w0 - lw0 * system.w1) / w
    q = (lw1 * system.w0.derivative() - lw0 * system.w1.derivative()) / w
    return PerturbationCoefficients(
        p=p.require_cancelled().as_rational(),
        q=q.require_cancelled().as_rational(),
        residual_w0=lw0,
        residual_w1=lw1,
    )


def build_PQ(
    profile: ProfileAnsatz, system: FundamentalSystem, weights: WeightFamily
) -> tuple[NamedExpression, NamedExpression]:
    coeffs = perturbation_coefficients(profile, system)
    p_weight = (weights.p2 / weights.p3).as_rational()
    q_weight = (weights.p2 / weights.p1).as_rational()
    return (
        named("C8:P-weighted", p_weight * coeffs.p, Chart.T),
        named("C8:Q-weighted", q_weight * coeffs.q, Chart.T),
    )


# --- ratio factors ------------------------------------------------------------------


def _normalized_v0_derivative(system: FundamentalSystem) -> RationalFunction:
    """e^{-y^2/4} v0~' = A' + y A / 2."""
    return (system.v0_approx.derivative() / ExpTowerElement.lift(1, 1)).require_cancelled().as_rational()


def derivative_correction(system: FundamentalSystem, eps: Fraction = DAWSON_EPS) -> RationalFunction:
    """1 / (1 + (eps/(1-eps)) (v1'/v1) (v0~/v0~'))."""
    v0_over_dv0 = system.amplitude / _normalized_v0_derivative(system)
    log_dv1 = system.v1.derivative() / system.v1
    return 1 / (1 + log_dv1 * v0_over_dv0 * (eps / (1 - eps)))


def ratio_factors(system: FundamentalSystem, eps: Fraction = DAWSON_EPS) -> dict[str, RationalFunction]:
    """h0, dh0, h1, dh1 and the Wronskian ratio W(v0,v1)/W(w0~,w1~)."""
    dw0 = (system.w0.derivative() / ExpTowerElement.lift(1, 1)).require_cancelled().as_rational()
    dh0 = dw0 / _normalized_v0_derivative(system) * derivative_correction(system, eps)
    ds1 = system.s1.derivative()
    dh1 = system.s1 - Y * (Y * Y + 2) * ds1 / 4
    ratio = (FREE_WRONSKIAN / wronskian(system.w0, system.w1)).require_cancelled().as_rational()
    return {"h0": system.s0, "dh0": dh0, "h1": system.s1, "dh1": dh1, "wronskian-ratio": ratio}


def build_ratio_factors(system: FundamentalSystem, eps: Fraction = DAWSON_EPS) -> list[NamedExpression]:
    factors = ratio_factors(system, eps)
    unit = Interval(0, 1)
    return [
        named("C6:h0", factors["h0"], Chart.T),
        named("C6:dh0", factors["dh0"], Chart.T),
        named("C6:h1", factors["h1"], Chart.Y, unit),
        named("C6:h1", factors["h1"], Chart.U, unit),
        named("C6:dh1", factors["dh1"], Chart.Y, unit),
        named("C6:dh1", factors["dh1"], Chart.U, unit),
        named("C7:wronskian-ratio", factors["wronskian-ratio"], Chart.T),
    ]


def build_nonnegativity_checks(system: FundamentalSystem, eps: Fraction = DAWSON_EPS) -> list[NamedExpression]:
    """Sign prerequisites of the ratio bounds, all even and hence on the t chart."""
    dv0 = _normalized_v0_derivative(system)
    lower_dv0 = dv0 + system.v1.derivative() / system.v1 * system.amplitude * (eps / (1 - eps))
    return [
        named("C6:v0-nonneg", system.amplitude / Y, Chart.T),
        named("C6:dv0-nonneg", dv0, Chart.T),
        named("C6:dv0-lower-nonneg", lower_dv0, Chart.T),
        named("C6:v1-nonneg", 1 / system.v1, Chart.T),
    ]


def v1_positive(system: FundamentalSystem) -> bool:
    """v1 > 0 for all y > 0, read off the Bernstein signs of v1 written in t = y^2/(2+y^2)."""
    in_t = system.v1.square_variable_form().compose(RationalFunction.from_coefficients([0, 2], [1, -1]))
    num, den = in_t.num, in_t.den
    return (denom_positive(to_bernstein(num)) and denom_positive(to_bernstein(den))) or (
        denom_positive(to_bernstein(-num)) and denom_positive(to_bernstein(-den))
    )


# --- zero counting ------------------------------------------------------------------


def build_zero_count_exprs(
    system: FundamentalSystem, weights: WeightFamily, radius: Fraction = ZERO_COUNT_RADIUS
) -> dict[str, list[NamedExpression]]:
    """Envelope expressions for the zero count of W0 on (0, 3]."""
    w0 = system.w0
    dw0 = w0.derivative()
    inv_p1 = weights.p1.inverse()
    inv_p3 = weights.p3.inverse()
    y_inv = RationalFunction.from_coefficients([1], [0, 1])
    near = Interval(0, 1)
    far = Interval(Fraction(1, 3), 1)
    at_three = Interval(3, 3)

    def envelope(expr_id: str, chart: Chart, domain: Interval, exp_part: ExpTowerElement, plain: TowerElement):
        body = lower(exp_part, chart, domain, materialize_exp=True) + lower(plain, chart, domain)
        return NamedExpression(expr_id, chart, body, domain)

    p3_dw0 = weights.p3 * dw0.tower
    p1_w0 = weights.p1 * w0.tower
    sup_pieces = {
        "C11:p3w0'": [
            named("C11:p3w0'", ExpTowerElement(1, p3_dw0), Chart.Y, near, materialize_exp=True),
            named("C11:p3w0'", ExpTowerElement(1, p3_dw0), Chart.U, far, materialize_exp=True),
        ],
        "C11:p1w0": [
            named("C11:p1w0", ExpTowerElement(1, p1_w0), Chart.Y, near, materialize_exp=True),
            named("C11:p1w0", ExpTowerElement(1, p1_w0), Chart.U, far, materialize_exp=True),
        ],
    }

    # W0/c0 in [w0~ - r/p1, w0~ + r/p1], W0'/c0 in [w0~' - r/p3, w0~' + r/p3] on [0, 3]
    q3 = envelope("C14:q3", Chart.Y, at_three, w0 * Fraction(1, 3), inv_p1 * (radius / 3))
    dq3 = NamedExpression(
        "C14:dq3",
        Chart.Y,
        lower(dw0 * Fraction(1, 3), Chart.Y, at_three, materialize_exp=True)
        + lower(inv_p3 * (radius / 3), Chart.Y, at_three)
        - lower(w0 * Fraction(1, 9), Chart.Y, at_three, materialize_exp=True)
        + lower(inv_p1 * (radius / 9), Chart.Y, at_three),
        at_three,
    )

    q_lower = lower(w0 * y_inv, Chart.Y, near, materialize_exp=True) - lower(inv_p1 * y_inv * radius, Chart.Y, near)
    q_upper = lower(w0 * y_inv, Chart.Y, near, materialize_exp=True) + lower(inv_p1 * y_inv * radius, Chart.Y, near)
    q_pos = NamedExpression("C15:q-pos", Chart.Y, Atom("W0/(c0 y)", q_lower, q_upper), near)

    y_inv_sq = y_inv * y_inv

    def dq_bound(sign: int):
        return (
            lower(dw0 * y_inv, Chart.U, far, materialize_exp=True)
            + lower(inv_p3 * y_inv * (sign * radius), Chart.U, far)
            - lower(w0 * y_inv_sq, Chart.U, far, materialize_exp=True)
            + lower(inv_p1 * y_inv_sq * (sign * radius), Chart.U, far)
        )

    dq_neg = NamedExpression("C15:dq-neg", Chart.U, Atom("(W0/(c0 y))'", dq_bound(-1), dq_bound(1)), far)

    return {
        **sup_pieces,
        "C14:q3": [q3],
        "C14:dq3": [dq3],
        "C15:q-pos": [q_pos],
        "C15:dq-neg": [dq_neg],
    }


# --- exact identity checks -------------------------------------------------------------


def wronskian_identity_defect(v1: RationalFunction = V1) -> tuple[RationalFunction, RationalFunction]:
    """Exact check of v0 v1' - v0' v1 = -6 y^-2 e^{y^2/4}.

    Writing v0 = e^{y^2/4}(a + b D) with D = D+(y/2), dD/dy = (1 - y D)/2:
    returns (D coefficient, remainder + 6/y^2) of the normalized Wronskian; both vanish.
    """
    a = RationalFunction.from_coefficients([-3], [0, 1])
    b = RationalFunction.from_coefficients([6, 0, 3], [0, 0, 1])
    # e^{-y^2/4} v0' = (a' + y a/2 + b/2) + b' D
    rest_dv0 = a.derivative() + Y * a / 2 + b / 2
    dv1 = v1.derivative()
    d_coefficient = b * dv1 - b.derivative() * v1
    remainder = a * dv1 - rest_dv0 * v1
    return d_coefficient, remainder + RationalFunction.from_coefficients([6], [0, 0, 1])


# --- oracles ---------------------------------------------------------------------


def dawson_mp(z, terms: int = 200):
    """Taylor series of D+(z) = sum (-1)^n 2^n z^(2n+1) / (2n+1)!!."""
    total = mpmath.mpf(0)
    term = mpmath.mpf(z)
    for n in range(terms):
        total += term
        term *= -2 * z * z / (2 * n + 3)
    return total


def v0_mp(y, terms: int = 200):
    return 3 / (y * y) * mpmath.exp(y * y / 4) * (-y + (2 + y * y) * dawson_mp(y / 2, terms))
