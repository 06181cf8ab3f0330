from fractions import Fraction

import mpmath
import pytest

from shared.exact_arith import Interval, StraddlingDivisionError
from shared.expr import (
    Atom,
    Chart,
    Const,
    NamedExpression,
    Var,
    contains_atom,
    enclose,
    evaluate_point,
    lower,
    named,
    node_from_json,
    node_to_json,
)
from shared.polyrat import RationalFunction
from shared.tower import S2, ExpTowerElement, LedgerError, RadicalError, TowerElement

Y = RationalFunction.x()


def _mp(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def test_chart_coordinates():
    assert Chart.T.from_y(1) == Fraction(1, 3)
    assert Chart.Y.from_y(Fraction(1, 2)) == Fraction(1, 2)
    assert Chart.U.from_y(4) == Fraction(1, 4)
    with pytest.raises(ZeroDivisionError):
        Chart.U.from_y(0)


def test_even_rational_function_on_t_chart():
    """(8y^2 + 16)/(9y^2 + 36) is 4/9 at the origin and 8/9 at infinity."""
    rf = RationalFunction.from_coefficients([16, 0, 8], [36, 0, 9])
    expr = named("weight", rf, Chart.T)
    assert expr.chart is Chart.T
    assert evaluate_point(expr.body, 0) == Interval.point(Fraction(4, 9))
    assert evaluate_point(expr.body, 1) == Interval.point(Fraction(8, 9))
    assert evaluate_point(expr.body, Chart.T.from_y(2)) == Interval.point(rf(2))


def test_t_chart_refuses_odd_and_radical_parts():
    with pytest.raises(RadicalError):
        named("odd", Y / (Y * Y + 1), Chart.T)
    with pytest.raises(RadicalError):
        named("radical", TowerElement.generator(S2), Chart.T)


def test_radical_on_y_chart():
    expr = named("s2", TowerElement.generator(S2) * Y, Chart.Y)
    box = evaluate_point(expr.body, 1)
    with mpmath.workdps(40):
        assert _mp(box.lo) <= mpmath.sqrt(3) <= _mp(box.hi)


def test_radical_on_u_chart():
    """sqrt(2 + y^2) at y = 2 is sqrt(6), written in u = 1/y."""
    expr = named("s2", TowerElement.generator(S2), Chart.U)
    box = evaluate_point(expr.body, Fraction(1, 2))
    with mpmath.workdps(40):
        assert _mp(box.lo) <= mpmath.sqrt(6) <= _mp(box.hi)
    assert box.width < Fraction(1, 10**20)


def test_exponential_ledger_is_carried_not_materialized():
    value = ExpTowerElement.lift(TowerElement.one(), 1)
    expr = named("grows", value, Chart.T)
    assert expr.exp_ledger == 1
    with pytest.raises(LedgerError):
        expr.require_bounded()


def test_materialized_exponential_on_y_chart():
    value = ExpTowerElement.lift(TowerElement.one(), 1)
    expr = named("grows", value, Chart.Y, materialize_exp=True)
    assert expr.exp_ledger == 0
    box = evaluate_point(expr.body, 1)
    with mpmath.workdps(40):
        assert _mp(box.lo) <= mpmath.exp(mpmath.mpf(1) / 4) <= _mp(box.hi)


def test_materialized_exponential_needs_u_away_from_zero():
    value = ExpTowerElement.lift(TowerElement.one(), -1)
    with pytest.raises(LedgerError):
        named("decays", value, Chart.U, materialize_exp=True)
    expr = named("decays", value, Chart.U, Interval(Fraction(1, 3), 1), materialize_exp=True)
    assert expr.exp_ledger == 0


def test_exponential_cannot_be_materialized_on_t_chart():
    with pytest.raises(LedgerError):
        named("grows", ExpTowerElement.lift(TowerElement.one(), 1), Chart.T, materialize_exp=True)


def test_lower_refuses_leftover_ledger():
    with pytest.raises(LedgerError):
        lower(ExpTowerElement.lift(TowerElement.one(), 2), Chart.Y)
    node = lower(ExpTowerElement.lift(TowerElement.generator(S2), 0), Chart.Y)
    box = evaluate_point(node, 0)
    with mpmath.workdps(40):
        assert _mp(box.lo) <= mpmath.sqrt(2) <= _mp(box.hi)


def test_enclose_atom_uses_lower_and_upper_brackets():
    atom = Atom("a", Const(1) - Var(), Const(2) + Var())
    assert enclose(atom, Interval(0, 1)) == Interval(0, 3)
    assert contains_atom(Const(3) * atom)
    assert not contains_atom(Const(3) * Var())


def test_enclose_raises_on_straddling_denominator():
    with pytest.raises(StraddlingDivisionError):
        enclose(Const(1) / Var(), Interval(-1, 1))


def test_enclose_is_inclusion_monotone():
    node = (Var() * Var() - 3 * Var() + 1) / (Var() + 2)
    parent = enclose(node, Interval(0, 1))
    for child in Interval(0, 1).split():
        assert parent.contains(enclose(node, child))


def test_named_expression_json_round_trip():
    value = TowerElement.generator(S2) * (Y + 1) + TowerElement.rational(Y * Y)
    expr = named("mixed", value, Chart.Y, notes={"source": "test"})
    restored = NamedExpression.from_json(expr.to_json())
    assert restored.id == "mixed"
    assert restored.chart is Chart.Y
    assert restored.domain == expr.domain
    point = Fraction(3, 7)
    assert evaluate_point(restored.body, point) == evaluate_point(expr.body, point)
    assert node_to_json(node_from_json(node_to_json(expr.body))) == node_to_json(expr.body)


def test_node_from_json_rejects_unknown_ops():
    with pytest.raises(ValueError):
        node_from_json({"op": "sin", "args": []})
