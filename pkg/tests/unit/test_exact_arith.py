import random
from fractions import Fraction

import mpmath
import pytest

from shared.exact_arith import (
    DomainError,
    Interval,
    StraddlingDivisionError,
    format_rational,
    iv_ops,
    iv_arctan_pi,
    iv_exp,
    iv_sqrt,
    pi_enclosure,
    round_down,
    round_up,
    to_rational,
)


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def test_to_rational_refuses_floats():
    """Binary floats never enter the exact layer."""
    with pytest.raises(TypeError):
        to_rational(0.1)
    with pytest.raises(TypeError):
        to_rational(True)


def test_to_rational_parses_fractions_and_decimals():
    assert to_rational("3/4") == Fraction(3, 4)
    assert to_rational(" -268245/72878 ") == Fraction(-268245, 72878)
    assert to_rational("0.0072") == Fraction(72, 10**4)
    with pytest.raises(ValueError):
        to_rational("1/0")
    with pytest.raises(ValueError):
        to_rational("abc")


def test_format_rational_always_has_a_denominator():
    assert format_rational(Fraction(3)) == "3/1"
    assert format_rational(Fraction(-6, 4)) == "-3/2"


def test_rounding_brackets_the_value():
    x = Fraction(1, 3)
    assert round_down(x, 10) <= x <= round_up(x, 10)
    assert round_up(x, 10) - round_down(x, 10) == Fraction(1, 1024)
    assert round_down(Fraction(5), 10) == 5


def test_interval_rejects_empty_and_prints_exactly():
    with pytest.raises(ValueError):
        Interval(1, 0)
    box = Interval(Fraction(1, 2), Fraction(3, 4))
    assert str(box) == "[1/2, 3/4]"
    assert Interval.parse(str(box)) == box


def test_interval_arithmetic_is_exact_on_rationals():
    a = Interval(-1, 2)
    b = Interval(3, 4)
    assert a + b == Interval(2, 6)
    assert a - b == Interval(-5, -1)
    assert a * b == Interval(-4, 8)
    assert b / Interval(1, 2) == Interval(Fraction(3, 2), 4)
    assert 1 - Interval(0, 1) == Interval(0, 1)


def test_naive_product_overestimates_x_times_one_minus_x():
    """x(1 - x) on [0, 1] evaluates to [0, 1] naively; halving tightens each half to [0, 1/2]."""
    x = Interval(0, 1)
    assert x * (1 - x) == Interval(0, 1)
    left, right = x.split()
    assert left * (1 - left) == Interval(0, Fraction(1, 2))
    assert right * (1 - right) == Interval(0, Fraction(1, 2))


def test_division_by_straddling_interval_raises():
    with pytest.raises(StraddlingDivisionError):
        Interval(1, 2) / Interval(-1, 1)
    # also a ZeroDivisionError for callers that only know the builtin
    with pytest.raises(ZeroDivisionError):
        Interval(1, 2) / Interval(0, 1)


def test_sqrt_is_exact_on_perfect_squares():
    assert iv_sqrt(Interval.point(Fraction(9, 4))) == Interval.point(Fraction(3, 2))


def test_sqrt_encloses_root_two():
    box = iv_sqrt(Interval.point(2))
    assert box.lo < Fraction(141421357, 10**8)
    assert box.hi > Fraction(141421356, 10**8)
    assert box.width <= Fraction(1, 2**96)
    with mpmath.workdps(50):
        assert _mp(box.lo) <= mpmath.sqrt(2) <= _mp(box.hi)


def test_sqrt_of_negative_endpoint_is_a_domain_error():
    with pytest.raises(DomainError):
        iv_sqrt(Interval(-1, 1))


def test_exp_encloses_mpmath_values():
    with mpmath.workdps(60):
        for x in (Fraction(0), Fraction(1), Fraction(-3, 2), Fraction(9, 4), Fraction(5)):
            box = iv_exp(Interval.point(x))
            assert _mp(box.lo) <= mpmath.exp(_mp(x)) <= _mp(box.hi)
            assert box.width <= Fraction(1, 10**20) * max(1, box.hi)


def test_exp_of_zero_is_exactly_one():
    assert iv_exp(Interval.point(0)) == Interval.point(1)


def test_exp_is_monotone_over_a_box():
    box = iv_exp(Interval(0, 1))
    assert box.lo == 1
    assert box.contains(Fraction(271828, 10**5))


def test_pi_enclosure_is_tight():
    box = pi_enclosure()
    with mpmath.workdps(60):
        assert _mp(box.lo) <= mpmath.pi <= _mp(box.hi)
    assert box.width < Fraction(1, 10**30)


def test_arctan_encloses_reference_values():
    with mpmath.workdps(60):
        for s in (Fraction(0), Fraction(1, 3), Fraction(1), Fraction(-2), Fraction(1835, 1000), Fraction(7)):
            atan, pi = iv_arctan_pi(Interval.point(s))
            assert _mp(atan.lo) <= mpmath.atan(_mp(s)) <= _mp(atan.hi)
            assert atan.width < Fraction(1, 10**25)
            assert pi == pi_enclosure()


def test_arctan_rejects_nonpositive_term_counts():
    with pytest.raises(ValueError):
        iv_arctan_pi(Interval.point(1), terms=0)


OPS = ("add", "sub", "mul", "div")


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-1000, 1000), rng.randint(1, 97))


def _random_interval(rng: random.Random, avoid_zero: bool = False) -> Interval:
    if avoid_zero:
        lo = Fraction(rng.randint(1, 1000), rng.randint(1, 97))
        box = Interval(lo, lo + Fraction(rng.randint(0, 1000), rng.randint(1, 97)))
        return -box if rng.random() < 0.5 else box
    a, b = _random_rational(rng), _random_rational(rng)
    return Interval(min(a, b), max(a, b))


def _point_in(rng: random.Random, box: Interval) -> Fraction:
    return box.lo + box.width * Fraction(rng.randint(0, 1000), 1000)


def _subinterval(rng: random.Random, box: Interval) -> Interval:
    a, b = _point_in(rng, box), _point_in(rng, box)
    return Interval(min(a, b), max(a, b))


def _apply(op: str, x: Fraction, y: Fraction) -> Fraction:
    match op:
        case "add":
            return x + y
        case "sub":
            return x - y
        case "mul":
            return x * y
        case _:
            return x / y


@pytest.mark.parametrize("op", OPS)
def test_interval_ops_contain_every_pointwise_result(op):
    """10^4 random point pairs: x in X and y in Y give x op y in X op Y."""
    rng = random.Random(f"soundness-{op}")
    for _ in range(2500):
        xs, ys = _random_interval(rng), _random_interval(rng, avoid_zero=op == "div")
        x, y = _point_in(rng, xs), _point_in(rng, ys)
        assert iv_ops(op, xs, ys).contains(_apply(op, x, y))


@pytest.mark.parametrize("op", OPS)
def test_interval_ops_are_inclusion_monotone(op):
    """Shrinking either argument never widens the result."""
    rng = random.Random(f"monotone-{op}")
    for _ in range(250):
        xs, ys = _random_interval(rng), _random_interval(rng, avoid_zero=op == "div")
        inner = iv_ops(op, _subinterval(rng, xs), _subinterval(rng, ys))
        assert iv_ops(op, xs, ys).contains(inner)
