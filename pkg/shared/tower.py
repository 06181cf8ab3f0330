# shared/tower.py
"""Quadratic-extension tower over Q(y).

Elements are sums c_M(y) * prod_{g in M} sqrt(r_g) over masks M of the generators
S2 = sqrt(2+y^2), S4 = sqrt(4+y^2) and R2 = sqrt(2). ExpTowerElement adds a symbolic
e^{k y^2/4} factor so exponential growth can be tracked and cancelled exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import mpmath

from shared.exact_arith import RationalLike, format_rational, to_rational
from shared.polyrat import Polynomial, RationalFunction

logger = logging.getLogger(__name__)

S2 = 1
S4 = 2
R2 = 4

GENERATORS = (S2, S4, R2)
GENERATOR_NAMES = {S2: "S2", S4: "S4", R2: "R2"}

# radicands and r'/(2r) for each generator
_RADICANDS = {
    S2: RationalFunction.from_coefficients([2, 0, 1]),
    S4: RationalFunction.from_coefficients([4, 0, 1]),
    R2: RationalFunction.constant(2),
}
_LOG_DERIVATIVES = {
    S2: RationalFunction.from_coefficients([0, 1], [2, 0, 1]),
    S4: RationalFunction.from_coefficients([0, 1], [4, 0, 1]),
    R2: RationalFunction.constant(0),
}

# generators that depend on y (each contributes a factor 1/u in the u = 1/y chart)
Y_RADICALS = (S2, S4)


class ZeroNormError(ZeroDivisionError):
    """Division by a tower element whose conjugate norm is zero."""


class RadicalError(ValueError):
    """A radical survived where the expression must be rational."""


class LedgerError(ValueError):
    """Exponential ledgers do not match or do not cancel."""


def radicand(generator: int) -> RationalFunction:
    return _RADICANDS[generator]


def _bits(mask: int) -> list[int]:
    return [g for g in GENERATORS if mask & g]


def mask_name(mask: int) -> str:
    return "*".join(GENERATOR_NAMES[g] for g in _bits(mask)) or "1"


Scalar = Union[RationalFunction, Polynomial, int, Fraction, str]


def _as_rf(x: Scalar) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction.from_polynomial(x)
    return RationalFunction.constant(to_rational(x))


@dataclass(frozen=True, eq=False)
class TowerElement:
    """sum over masks of component(mask) * radicals(mask); zero components dropped."""

    components: tuple[tuple[int, RationalFunction], ...]

    def __post_init__(self) -> None:
        merged: dict[int, RationalFunction] = {}
        for mask, c in self.components:
            if mask not in merged:
                merged[mask] = c
            else:
                merged[mask] = merged[mask] + c
        cleaned = tuple(sorted((m, c) for m, c in merged.items() if not c.is_zero))
        object.__setattr__(self, "components", cleaned)

    # construction

    @classmethod
    def from_mapping(cls, parts: Mapping[int, Scalar]) -> "TowerElement":
        return cls(tuple((m, _as_rf(c)) for m, c in parts.items()))

    @classmethod
    def rational(cls, c: Scalar) -> "TowerElement":
        return cls(((0, _as_rf(c)),))

    @classmethod
    def generator(cls, g: int) -> "TowerElement":
        return cls(((g, RationalFunction.constant(1)),))

    @classmethod
    def zero(cls) -> "TowerElement":
        return cls(())

    @classmethod
    def one(cls) -> "TowerElement":
        return cls.rational(1)

    # components

    def component(self, mask: int) -> RationalFunction:
        for m, c in self.components:
            if m == mask:
                return c
        return RationalFunction.constant(0)

    @property
    def c1(self) -> RationalFunction:
        return self.component(0)

    @property
    def c2(self) -> RationalFunction:
        return self.component(S2)

    @property
    def c4(self) -> RationalFunction:
        return self.component(S4)

    @property
    def c24(self) -> RationalFunction:
        return self.component(S2 | S4)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.components)

    @property
    def is_zero(self) -> bool:
        return not self.components

    def is_rational(self) -> bool:
        return all(m == 0 for m in self.masks)

    def as_rational(self) -> RationalFunction:
        if not self.is_rational():
            raise RadicalError(f"radicals {[mask_name(m) for m in self.masks if m]} survive")
        return self.c1

    def as_single_term(self) -> tuple[int, RationalFunction]:
        """(mask, component) for elements with exactly one radical monomial."""
        if len(self.components) > 1:
            raise RadicalError(f"expected a single radical monomial, got {[mask_name(m) for m in self.masks]}")
        if not self.components:
            return 0, RationalFunction.constant(0)
        return self.components[0]

    # arithmetic

    def __add__(self, other: "TowerElement | Scalar") -> "TowerElement":
        other = _as_tower(other)
        return TowerElement(self.components + other.components)

    __radd__ = __add__

    def __neg__(self) -> "TowerElement":
        return TowerElement(tuple((m, -c) for m, c in self.components))

    def __sub__(self, other: "TowerElement | Scalar") -> "TowerElement":
        return self + (-_as_tower(other))

    def __rsub__(self, other: Scalar) -> "TowerElement":
        return _as_tower(other) - self

    def __mul__(self, other: "TowerElement | Scalar") -> "TowerElement":
        other = _as_tower(other)
        parts: list[tuple[int, RationalFunction]] = []
        for m1, c1 in self.components:
            for m2, c2 in other.components:
                c = c1 * c2
                for g in _bits(m1 & m2):
                    c = c * _RADICANDS[g]
                parts.append((m1 ^ m2, c))
        return TowerElement(tuple(parts))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "TowerElement":
        if k < 0:
            return self.inverse() ** (-k)
        result = TowerElement.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self, g: int) -> "TowerElement":
        """Flip the sign of sqrt(r_g)."""
        return TowerElement(tuple((m, -c if m & g else c) for m, c in self.components))

    def inverse(self) -> "TowerElement":
        # multiplying by the conjugate over g removes g from every mask
        numerator = TowerElement.one()
        current = self
        for g in GENERATORS:
            if any(m & g for m in current.masks):
                conj = current.conjugate(g)
                numerator = numerator * conj
                current = current * conj
        if current.is_zero:
            raise ZeroNormError("tower element has zero norm")
        norm = current.as_rational()
        return numerator * TowerElement.rational(RationalFunction.constant(1) / norm)

    def __truediv__(self, other: "TowerElement | Scalar") -> "TowerElement":
        other = _as_tower(other)
        if other.is_rational():
            if other.is_zero:
                raise ZeroNormError("division by the zero tower element")
            inv = RationalFunction.constant(1) / other.c1
            return TowerElement(tuple((m, c * inv) for m, c in self.components))
        return self * other.inverse()

    def __rtruediv__(self, other: Scalar) -> "TowerElement":
        return _as_tower(other) / self

    def derivative(self) -> "TowerElement":
        parts: list[tuple[int, RationalFunction]] = []
        for m, c in self.components:
            d = c.derivative()
            for g in _bits(m):
                d = d + c * _LOG_DERIVATIVES[g]
            parts.append((m, d))
        return TowerElement(tuple(parts))

    def map_components(self, fn) -> "TowerElement":
        return TowerElement(tuple((m, fn(c)) for m, c in self.components))

    # evaluation (oracle use only)

    def evaluate_mp(self, y):
        """High-precision value at an mpmath number y."""

        total = mpmath.mpf(0)
        for m, c in self.components:
            term = _rf_mp(c, y)
            for g in _bits(m):
                term *= mpmath.sqrt(_rf_mp(_RADICANDS[g], y))
            total += term
        return total

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TowerElement):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        body = " + ".join(f"[{c!r}]*{mask_name(m)}" for m, c in self.components) or "0"
        return f"TowerElement({body})"

    def to_json(self) -> dict:
        return {mask_name(m): c.to_json() for m, c in self.components}


def _rf_mp(c: RationalFunction, y):

    def horner(p: Polynomial):
        acc = mpmath.mpf(0)
        for coeff in reversed(p.coefficients):
            acc = acc * y + mpmath.mpf(coeff.numerator) / coeff.denominator
        return acc

    return horner(c.num) / horner(c.den)


def _as_tower(x: "TowerElement | Scalar") -> TowerElement:
    if isinstance(x, TowerElement):
        return x
    return TowerElement.rational(x)


@dataclass(frozen=True, eq=False)
class ExpTowerElement:
    """e^{exponent * y^2 / 4} * tower."""

    exponent: Fraction
    tower: TowerElement

    def __post_init__(self) -> None:
        object.__setattr__(self, "exponent", to_rational(self.exponent))
        if self.tower.is_zero:
            object.__setattr__(self, "exponent", Fraction(0))

    @classmethod
    def lift(cls, x: "TowerElement | Scalar", exponent: RationalLike = 0) -> "ExpTowerElement":
        return cls(to_rational(exponent), _as_tower(x))

    @property
    def is_zero(self) -> bool:
        return self.tower.is_zero

    def __add__(self, other: "ExpTowerElement") -> "ExpTowerElement":
        other = _as_exp(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.exponent != other.exponent:
            raise LedgerError(
                f"cannot add e^({format_rational(self.exponent)} y^2/4) and e^({format_rational(other.exponent)} y^2/4) terms"
            )
        return ExpTowerElement(self.exponent, self.tower + other.tower)

    __radd__ = __add__

    def __neg__(self) -> "ExpTowerElement":
        return ExpTowerElement(self.exponent, -self.tower)

    def __sub__(self, other: "ExpTowerElement") -> "ExpTowerElement":
        return self + (-_as_exp(other))

    def __mul__(self, other: "ExpTowerElement | TowerElement | Scalar") -> "ExpTowerElement":
        other = _as_exp(other)
        return ExpTowerElement(self.exponent + other.exponent, self.tower * other.tower)

    __rmul__ = __mul__

    def __truediv__(self, other: "ExpTowerElement | TowerElement | Scalar") -> "ExpTowerElement":
        other = _as_exp(other)
        return ExpTowerElement(self.exponent - other.exponent, self.tower / other.tower)

    def derivative(self) -> "ExpTowerElement":
        # (e^{k y^2/4} T)' = e^{k y^2/4} (T' + (k y / 2) T)
        shift = RationalFunction.from_coefficients([0, self.exponent / 2])
        return ExpTowerElement(self.exponent, self.tower.derivative() + self.tower * shift)

    def require_cancelled(self) -> TowerElement:
        if self.exponent != 0 and not self.is_zero:
            raise LedgerError(f"nonzero exponential ledger {format_rational(self.exponent)}")
        return self.tower

    def evaluate_mp(self, y):

        return mpmath.exp(mpmath.mpf(self.exponent.numerator) / self.exponent.denominator * y * y / 4) * self.tower.evaluate_mp(y)

    def __repr__(self) -> str:
        return f"ExpTowerElement(e^({format_rational(self.exponent)} y^2/4) * {self.tower!r})"


def _as_exp(x: "ExpTowerElement | TowerElement | Scalar") -> ExpTowerElement:
    if isinstance(x, ExpTowerElement):
        return x
    return ExpTowerElement(Fraction(0), _as_tower(x))


def tower_ops(op: str, a: TowerElement, b: TowerElement | None = None) -> TowerElement:
    """add / mul / div / differentiate in the tower."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "differentiate":
        return a.derivative()
    raise ValueError(f"unknown tower operation {op!r}")

