# shared/expr.py
"""Expression trees over one chart variable, lowering from the tower, and interval enclosure."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Union

from shared.exact_arith import (
    DEFAULT_PRECISION,
    Interval,
    Precision,
    RationalLike,
    format_rational,
    iv_exp,
    iv_sqrt,
    to_rational,
)
from shared.polyrat import Polynomial, RationalFunction, bernstein_range
from shared.tower import R2, Y_RADICALS, ExpTowerElement, LedgerError, RadicalError, TowerElement, radicand

logger = logging.getLogger(__name__)


class Chart(str, Enum):
    """Coordinate a NamedExpression is written in."""

    T = "t"  # t = y^2/(2+y^2), t in [0,1]
    Y = "y"  # y in [0,1]
    U = "u"  # u = 1/y, u in (0,1]

    def from_y(self, y: RationalLike) -> Fraction:
        y = to_rational(y)
        if self is Chart.T:
            return y * y / (2 + y * y)
        if self is Chart.Y:
            return y
        if y == 0:
            raise ZeroDivisionError("y = 0 is not on the u chart")
        return 1 / y


# --- nodes -------------------------------------------------------------------------


class ExprNode:
    """Base class; operators build new trees."""

    def __add__(self, other: "ExprNode | RationalLike") -> "ExprNode":
        return Add(self, as_node(other))

    def __radd__(self, other: RationalLike) -> "ExprNode":
        return Add(as_node(other), self)

    def __sub__(self, other: "ExprNode | RationalLike") -> "ExprNode":
        return Sub(self, as_node(other))

    def __rsub__(self, other: RationalLike) -> "ExprNode":
        return Sub(as_node(other), self)

    def __mul__(self, other: "ExprNode | RationalLike") -> "ExprNode":
        return Mul(self, as_node(other))

    def __rmul__(self, other: RationalLike) -> "ExprNode":
        return Mul(as_node(other), self)

    def __truediv__(self, other: "ExprNode | RationalLike") -> "ExprNode":
        return Div(self, as_node(other))

    def __rtruediv__(self, other: RationalLike) -> "ExprNode":
        return Div(as_node(other), self)

    def __neg__(self) -> "ExprNode":
        return Mul(Const(Fraction(-1)), self)


@dataclass(frozen=True, eq=False)
class Const(ExprNode):
    value: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", to_rational(self.value))


@dataclass(frozen=True, eq=False)
class Var(ExprNode):
    pass


@dataclass(frozen=True, eq=False)
class Add(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, eq=False)
class Sub(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, eq=False)
class Mul(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, eq=False)
class Div(ExprNode):
    left: ExprNode
    right: ExprNode


@dataclass(frozen=True, eq=False)
class Exp(ExprNode):
    arg: ExprNode


@dataclass(frozen=True, eq=False)
class Sqrt(ExprNode):
    arg: ExprNode


@dataclass(frozen=True, eq=False)
class PolyLeaf(ExprNode):
    """Polynomial in the chart variable, enclosed in Bernstein form."""

    poly: Polynomial


@dataclass(frozen=True, eq=False)
class Atom(ExprNode):
    """A quantity known only through pointwise brackets lower <= atom <= upper."""

    name: str
    lower: ExprNode
    upper: ExprNode


def as_node(x: "ExprNode | RationalLike") -> ExprNode:
    if isinstance(x, ExprNode):
        return x
    return Const(to_rational(x))


def rational_node(rf: RationalFunction) -> ExprNode:
    if rf.den.degree == 0:
        if rf.num.degree <= 0:
            return Const(rf.num.coefficients[0] / rf.den.coefficients[0])
        return PolyLeaf(rf.num.scale(1 / rf.den.coefficients[0]))
    return Div(PolyLeaf(rf.num), PolyLeaf(rf.den))


# --- enclosure -----------------------------------------------------------------


def enclose(
    node: ExprNode,
    box: Interval,
    precision: Precision = DEFAULT_PRECISION,
    memo: dict[int, Interval] | None = None,
) -> Interval:
    """Interval containing the range of node over box.

    Raises StraddlingDivisionError / DomainError when the box is too wide to decide.
    """
    if memo is None:
        memo = {}
    key = id(node)
    cached = memo.get(key)
    if cached is not None:
        return cached

    match node:
        case Const(value=v):
            result = Interval(v, v)
        case Var():
            result = box
        case PolyLeaf(poly=p):
            if box.is_degenerate:
                v = p(box.lo)
                result = Interval(v, v)
            else:
                result = bernstein_range(p, box)
        case Add(left=a, right=b):
            result = enclose(a, box, precision, memo) + enclose(b, box, precision, memo)
        case Sub(left=a, right=b):
            result = enclose(a, box, precision, memo) - enclose(b, box, precision, memo)
        case Mul(left=a, right=b):
            result = enclose(a, box, precision, memo) * enclose(b, box, precision, memo)
        case Div(left=a, right=b):
            result = enclose(a, box, precision, memo) / enclose(b, box, precision, memo)
        case Exp(arg=a):
            result = iv_exp(enclose(a, box, precision, memo), precision.exp_terms)
        case Sqrt(arg=a):
            result = iv_sqrt(enclose(a, box, precision, memo), precision.sqrt_bits)
        case Atom(lower=lo, upper=hi):
            result = Interval(enclose(lo, box, precision, memo).lo, enclose(hi, box, precision, memo).hi)
        case _:
            raise TypeError(f"unknown expression node {type(node).__name__}")

    memo[key] = result
    return result


def evaluate_point(node: ExprNode, x: RationalLike, precision: Precision = DEFAULT_PRECISION) -> Interval:
    """Enclosure at a single chart point; exact for purely rational trees."""
    return enclose(node, Interval.point(x), precision)


def contains_atom(node: ExprNode) -> bool:
    match node:
        case Atom():
            return True
        case Add(left=a, right=b) | Sub(left=a, right=b) | Mul(left=a, right=b) | Div(left=a, right=b):
            return contains_atom(a) or contains_atom(b)
        case Exp(arg=a) | Sqrt(arg=a):
            return contains_atom(a)
        case _:
            return False


# --- serialization ---------------------------------------------------------------

_BINARY = {"add": Add, "sub": Sub, "mul": Mul, "div": Div}
_BINARY_NAMES = {cls: name for name, cls in _BINARY.items()}


def node_to_json(node: ExprNode) -> dict[str, Any]:
    match node:
        case Const(value=v):
            return {"op": "const", "value": format_rational(v)}
        case Var():
            return {"op": "var"}
        case PolyLeaf(poly=p):
            return {"op": "poly", "coefficients": p.to_json()}
        case Exp(arg=a):
            return {"op": "exp", "args": [node_to_json(a)]}
        case Sqrt(arg=a):
            return {"op": "sqrt", "args": [node_to_json(a)]}
        case Atom(name=n, lower=lo, upper=hi):
            return {"op": "atom", "name": n, "lower": node_to_json(lo), "upper": node_to_json(hi)}
        case Add() | Sub() | Mul() | Div():
            return {"op": _BINARY_NAMES[type(node)], "args": [node_to_json(node.left), node_to_json(node.right)]}
    raise TypeError(f"unknown expression node {type(node).__name__}")


def node_from_json(data: dict[str, Any]) -> ExprNode:
    op = data.get("op")
    if op == "const":
        return Const(to_rational(data["value"]))
    if op == "var":
        return Var()
    if op == "poly":
        return PolyLeaf(Polynomial.from_json(data["coefficients"]))
    if op == "exp":
        return Exp(node_from_json(data["args"][0]))
    if op == "sqrt":
        return Sqrt(node_from_json(data["args"][0]))
    if op == "atom":
        return Atom(data["name"], node_from_json(data["lower"]), node_from_json(data["upper"]))
    if op in _BINARY:
        left, right = data["args"]
        return _BINARY[op](node_from_json(left), node_from_json(right))
    raise ValueError(f"unknown expression op {op!r}")


# --- named expressions -------------------------------------------------------------


@dataclass(frozen=True)
class NamedExpression:
    id: str
    chart: Chart
    body: ExprNode
    domain: Interval
    exp_ledger: Fraction = Fraction(0)
    notes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "exp_ledger", to_rational(self.exp_ledger))

    def require_bounded(self) -> None:
        if self.exp_ledger != 0:
            raise LedgerError(f"{self.id}: nonzero exponential ledger {format_rational(self.exp_ledger)}")

    def to_json(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "chart": self.chart.value,
            "domain": str(self.domain),
            "exp_ledger": format_rational(self.exp_ledger),
            "body": node_to_json(self.body),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "NamedExpression":
        return cls(
            id=data["id"],
            chart=Chart(data["chart"]),
            body=node_from_json(data["body"]),
            domain=Interval.parse(data["domain"]),
            exp_ledger=to_rational(data.get("exp_ledger", "0")),
        )


# --- lowering from the tower ---------------------------------------------------------

_TO_T = RationalFunction.from_coefficients([0, 2], [1, -1])  # y^2 = 2t/(1-t)
_U_RADICANDS = {
    # (a + y^2) u^2 = 1 + a u^2
    1: Polynomial.from_coefficients([1, 0, 2]),
    2: Polynomial.from_coefficients([1, 0, 4]),
}


def _component_in_chart(mask: int, c: RationalFunction, chart: Chart) -> ExprNode:
    y_bits = [g for g in Y_RADICALS if mask & g]
    const_radical = Fraction(2) if mask & R2 else Fraction(1)

    if chart is Chart.T:
        if y_bits:
            raise RadicalError("y-dependent radical on the t chart")
        if not c.is_even():
            raise RadicalError("odd component cannot be written in t")
        body = rational_node(c.square_variable_form().compose(_TO_T))
        radical_poly = None
    elif chart is Chart.Y:
        body = rational_node(c)
        radical_poly = None
        for g in y_bits:
            r = radicand(g).num
            radical_poly = r if radical_poly is None else radical_poly * r
    else:
        cu = c.invert_variable()
        if y_bits:
            cu = cu / RationalFunction.from_polynomial(Polynomial.monomial(len(y_bits)))
        body = rational_node(cu)
        radical_poly = None
        for g in y_bits:
            r = _U_RADICANDS[g]
            radical_poly = r if radical_poly is None else radical_poly * r

    if radical_poly is None and const_radical == 1:
        return body
    if radical_poly is None:
        return body * Sqrt(Const(const_radical))
    return body * Sqrt(PolyLeaf(radical_poly.scale(const_radical)))


def lower_tower(t: TowerElement, chart: Chart) -> ExprNode:
    if t.is_zero:
        return Const(Fraction(0))
    node: ExprNode | None = None
    for mask, c in t.components:
        term = _component_in_chart(mask, c, chart)
        node = term if node is None else node + term
    return node


def exp_node(exponent: Fraction, chart: Chart) -> ExprNode:
    """e^{exponent y^2/4} written in the chart variable."""
    if chart is Chart.Y:
        return Exp(PolyLeaf(Polynomial.monomial(2, exponent / 4)))
    if chart is Chart.U:
        return Exp(Div(Const(exponent / 4), PolyLeaf(Polynomial.monomial(2))))
    raise LedgerError("exponential factors cannot be materialized on the t chart")


Lowerable = Union[ExpTowerElement, TowerElement, RationalFunction]


def _as_exp_tower(value: Lowerable) -> ExpTowerElement:
    if isinstance(value, RationalFunction):
        value = TowerElement.rational(value)
    if isinstance(value, TowerElement):
        value = ExpTowerElement(Fraction(0), value)
    return value


def _lower_with_ledger(
    value: Lowerable, chart: Chart, domain: Interval, materialize_exp: bool, label: str
) -> tuple[ExprNode, Fraction]:
    value = _as_exp_tower(value)
    body = lower_tower(value.tower, chart)
    ledger = value.exponent
    if ledger != 0 and materialize_exp:
        if chart is Chart.U and domain.lo <= 0:
            raise LedgerError(f"{label}: exponential on the u chart needs a domain away from u = 0")
        body = exp_node(ledger, chart) * body
        ledger = Fraction(0)
    return body, ledger


def lower(
    value: Lowerable,
    chart: Chart,
    domain: Interval | None = None,
    *,
    materialize_exp: bool = False,
) -> ExprNode:
    """Bounded node for value on chart; parts with different ledgers are combined at this level."""
    body, ledger = _lower_with_ledger(value, chart, domain or Interval(0, 1), materialize_exp, "expression")
    if ledger != 0:
        raise LedgerError(f"nonzero exponential ledger {format_rational(ledger)} left after lowering")
    return body


def named(
    expr_id: str,
    value: Lowerable,
    chart: Chart,
    domain: Interval | None = None,
    *,
    materialize_exp: bool = False,
    notes: dict[str, str] | None = None,
) -> NamedExpression:
    """Lower a symbolic value to a NamedExpression on chart."""
    if domain is None:
        domain = Interval(0, 1)
    body, ledger = _lower_with_ledger(value, chart, domain, materialize_exp, expr_id)

    logger.debug("Lowered expression", extra={"expression": expr_id, "chart": chart.value, "ledger": str(ledger)})
    return NamedExpression(expr_id, chart, body, domain, ledger, dict(notes or {}))
