# shared/polyrat.py
"""Exact univariate polynomial and rational-function algebra over QQ.

Polynomials wrap a sympy ``Poly`` over ``QQ`` (gcd, cancel, compose come from sympy);
evaluation and Bernstein range enclosure are done here with Python integers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

from sympy import Poly, QQ, Rational, Symbol

from shared.exact_arith import Interval, RationalLike, format_rational, to_rational

logger = logging.getLogger(__name__)

_X = Symbol("x")

# Basis tag written next to every serialized Bernstein form.
BERNSTEIN_BASIS = "x^i(1-x)^(n-i)"


def _sym(c: Fraction) -> Rational:
    return Rational(c.numerator, c.denominator)


def _frac(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Power-basis polynomial with rational coefficients (trailing zeros stripped)."""

    poly: Poly

    def __post_init__(self) -> None:
        if not isinstance(self.poly, Poly):
            raise TypeError("Polynomial wraps a sympy Poly")
        if self.poly.domain != QQ or self.poly.gens != (_X,):
            object.__setattr__(self, "poly", Poly(self.poly.as_expr().subs(self.poly.gen, _X), _X, domain=QQ))

    # construction

    @classmethod
    def from_coefficients(cls, coefficients: Iterable[RationalLike]) -> "Polynomial":
        """Ascending coefficients c_0, c_1, ..."""
        coeffs = [to_rational(c) for c in coefficients]
        if not coeffs:
            coeffs = [Fraction(0)]
        return cls(Poly.from_list([_sym(c) for c in reversed(coeffs)], _X, domain=QQ))

    @classmethod
    def constant(cls, c: RationalLike) -> "Polynomial":
        return cls.from_coefficients([c])

    @classmethod
    def x(cls) -> "Polynomial":
        return cls.from_coefficients([0, 1])

    @classmethod
    def monomial(cls, degree: int, c: RationalLike = 1) -> "Polynomial":
        return cls.from_coefficients([0] * degree + [c])

    # views

    @cached_property
    def coefficients(self) -> tuple[Fraction, ...]:
        if self.poly.is_zero:
            return (Fraction(0),)
        return tuple(_frac(c) for c in reversed(self.poly.all_coeffs()))

    @cached_property
    def integer_form(self) -> tuple[tuple[int, ...], int]:
        """(integer coefficients, positive scale) with p = sum(ints[i] x^i) / scale."""
        scale = 1
        for c in self.coefficients:
            scale = math.lcm(scale, c.denominator)
        return tuple(int(c * scale) for c in self.coefficients), scale

    @property
    def degree(self) -> int:
        return -1 if self.poly.is_zero else int(self.poly.degree())

    @property
    def is_zero(self) -> bool:
        return bool(self.poly.is_zero)

    @property
    def is_constant(self) -> bool:
        return self.degree <= 0

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coefficients[-1]

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coefficients[1::2])

    def is_odd(self) -> bool:
        return all(c == 0 for c in self.coefficients[0::2])

    # arithmetic

    def __add__(self, other: "Polynomial | RationalLike") -> "Polynomial":
        return Polynomial(self.poly + _as_polynomial(other).poly)

    __radd__ = __add__

    def __sub__(self, other: "Polynomial | RationalLike") -> "Polynomial":
        return Polynomial(self.poly - _as_polynomial(other).poly)

    def __rsub__(self, other: RationalLike) -> "Polynomial":
        return Polynomial(_as_polynomial(other).poly - self.poly)

    def __mul__(self, other: "Polynomial | RationalLike") -> "Polynomial":
        if isinstance(other, Polynomial):
            return Polynomial(self.poly * other.poly)
        return self.scale(to_rational(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.poly)

    def __pow__(self, k: int) -> "Polynomial":
        return Polynomial(self.poly**k)

    def scale(self, c: RationalLike) -> "Polynomial":
        return Polynomial(self.poly.mul_ground(_sym(to_rational(c))))

    def derivative(self) -> "Polynomial":
        return Polynomial(self.poly.diff(_X))

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """self(inner(x))."""
        return Polynomial(self.poly.compose(inner.poly))

    def substitute_power(self, k: int) -> "Polynomial":
        """p(x^k)."""
        coeffs: list[Fraction] = []
        for i, c in enumerate(self.coefficients):
            coeffs.extend([Fraction(0)] * (k - 1) if i else [])
            coeffs.append(c)
        return Polynomial.from_coefficients(coeffs)

    def homogenize(self, a: "Polynomial", b: "Polynomial", degree: int | None = None) -> "Polynomial":
        """sum c_i a^i b^(n-i) for n = degree (defaults to deg self)."""
        n = self.degree if degree is None else degree
        if n < 0:
            return Polynomial.constant(0)
        coeffs = list(self.coefficients) + [Fraction(0)] * (n + 1 - len(self.coefficients))
        powers = [Polynomial.constant(1)]
        for _ in range(n):
            powers.append(powers[-1] * b)
        acc = Polynomial.constant(coeffs[n])
        for i in range(n - 1, -1, -1):
            acc = acc * a + powers[n - i].scale(coeffs[i])
        return acc

    # evaluation

    def __call__(self, x: RationalLike) -> Fraction:
        x = to_rational(x)
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def range_enclosure(self, box: Interval) -> Interval:
        return bernstein_range(self, box)

    # comparison / serialization

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        return f"Polynomial({self.poly.as_expr()})"

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coefficients]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "Polynomial":
        return cls.from_coefficients(to_rational(c) for c in data)


def _as_polynomial(x: "Polynomial | RationalLike") -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial.constant(to_rational(x))


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    if num.is_zero:
        return Poly(0, _X, domain=QQ), Poly(1, _X, domain=QQ)
    p, q = num.cancel(den, include=True)
    p, q = p.set_domain(QQ), q.set_domain(QQ)
    lc = q.LC()
    return p.quo_ground(lc), q.monic()


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """Reduced quotient num/den with den monic."""

    num: Polynomial
    den: Polynomial

    def __post_init__(self) -> None:
        if self.den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        p, q = _reduce(self.num.poly, self.den.poly)
        object.__setattr__(self, "num", Polynomial(p))
        object.__setattr__(self, "den", Polynomial(q))

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalFunction":
        return cls(p, Polynomial.constant(1))

    @classmethod
    def constant(cls, c: RationalLike) -> "RationalFunction":
        return cls.from_polynomial(Polynomial.constant(c))

    @classmethod
    def x(cls) -> "RationalFunction":
        return cls.from_polynomial(Polynomial.x())

    @classmethod
    def from_coefficients(
        cls, num: Iterable[RationalLike], den: Iterable[RationalLike] = (1,)
    ) -> "RationalFunction":
        return cls(Polynomial.from_coefficients(num), Polynomial.from_coefficients(den))

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    @property
    def degrees(self) -> tuple[int, int]:
        return self.num.degree, self.den.degree

    # arithmetic

    def __add__(self, other: "RationalFunction | RationalLike") -> "RationalFunction":
        other = _as_rational_function(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other: "RationalFunction | RationalLike") -> "RationalFunction":
        return self + (-_as_rational_function(other))

    def __rsub__(self, other: RationalLike) -> "RationalFunction":
        return _as_rational_function(other) - self

    def __mul__(self, other: "RationalFunction | RationalLike") -> "RationalFunction":
        if not isinstance(other, RationalFunction):
            return RationalFunction(self.num.scale(to_rational(other)), self.den)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalFunction | RationalLike") -> "RationalFunction":
        other = _as_rational_function(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: RationalLike) -> "RationalFunction":
        return _as_rational_function(other) / self

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return RationalFunction(self.den**-k, self.num**-k)
        return RationalFunction(self.num**k, self.den**k)

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def compose(self, inner: "RationalFunction") -> "RationalFunction":
        """self(inner(x)) by homogenization over inner = a/b."""
        a, b = inner.num, inner.den
        n, m = max(self.num.degree, 0), self.den.degree
        top = self.num.homogenize(a, b, n)
        bottom = self.den.homogenize(a, b, m)
        if m >= n:
            return RationalFunction(top * b ** (m - n), bottom)
        return RationalFunction(top, bottom * b ** (n - m))

    def invert_variable(self) -> "RationalFunction":
        """self(1/u) as a rational function of u."""
        n, m = max(self.num.degree, 0), self.den.degree
        top = Polynomial.from_coefficients(reversed(self.num.coefficients))
        bottom = Polynomial.from_coefficients(reversed(self.den.coefficients))
        if self.num.is_zero:
            return self
        if m >= n:
            return RationalFunction(top * Polynomial.monomial(m - n), bottom)
        return RationalFunction(top, bottom * Polynomial.monomial(n - m))

    def is_even(self) -> bool:
        return self.num.is_even() and self.den.is_even()

    def is_odd(self) -> bool:
        return self.num.is_odd() and self.den.is_even()

    def even_part(self) -> "RationalFunction":
        return (self + self.reflect()) * Fraction(1, 2)

    def reflect(self) -> "RationalFunction":
        """self(-x)."""
        return self.compose(RationalFunction.from_coefficients([0, -1]))

    def square_variable_form(self) -> "RationalFunction":
        """R~ with self(x) = R~(x^2); requires self even."""
        if not self.is_even():
            raise ValueError("rational function is not even")
        return RationalFunction(
            Polynomial.from_coefficients(self.num.coefficients[0::2]),
            Polynomial.from_coefficients(self.den.coefficients[0::2]),
        )

    # evaluation

    def __call__(self, x: RationalLike) -> Fraction:
        x = to_rational(x)
        d = self.den(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num(x) / d

    def value_at_infinity(self) -> Fraction:
        """Finite limit as x -> oo (raises if the function is unbounded there)."""
        return self.invert_variable()(0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        return f"RationalFunction(({self.num.poly.as_expr()}) / ({self.den.poly.as_expr()}))"

    def to_json(self) -> dict[str, list[str]]:
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def _as_rational_function(x: "RationalFunction | Polynomial | RationalLike") -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction.from_polynomial(x)
    return RationalFunction.constant(to_rational(x))


# --- Bernstein forms ---------------------------------------------------------


@dataclass(frozen=True)
class BernsteinForm:
    """sum a_i x^i (1-x)^(n-i) on [0,1], without binomial weights."""

    degree: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(to_rational(c) for c in self.coefficients)
        if len(coeffs) != self.degree + 1:
            raise ValueError(f"Bernstein form of degree {self.degree} needs {self.degree + 1} coefficients")
        object.__setattr__(self, "coefficients", coeffs)

    def to_dict(self) -> dict:
        return {
            "basis": BERNSTEIN_BASIS,
            "degree": self.degree,
            "coefficients": [format_rational(c) for c in self.coefficients],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BernsteinForm":
        if data.get("basis") != BERNSTEIN_BASIS:
            raise ValueError(f"unexpected Bernstein basis tag {data.get('basis')!r}")
        return cls(int(data["degree"]), tuple(to_rational(c) for c in data["coefficients"]))


@lru_cache(maxsize=8)
def _pascal(n: int) -> tuple[tuple[int, ...], ...]:
    rows = [(1,)]
    for r in range(1, n + 1):
        prev = rows[-1]
        rows.append(tuple(1 if j in (0, r) else prev[j - 1] + prev[j] for j in range(r + 1)))
    return tuple(rows)


def _bernstein_from_power(coeffs: Sequence, n: int) -> list:
    # a_k = sum_{i<=k} C(n-i, k-i) p_i
    rows = _pascal(n)
    padded = list(coeffs) + [0] * (n + 1 - len(coeffs))
    return [sum(rows[n - i][k - i] * padded[i] for i in range(k + 1)) for k in range(n + 1)]


def to_bernstein(p: Polynomial, degree: int | None = None) -> BernsteinForm:
    """Bernstein coefficients on [0,1]; degree defaults to deg p, larger degrees elevate."""
    n = max(p.degree, 0) if degree is None else degree
    if n < p.degree:
        raise ValueError(f"Bernstein degree {n} below polynomial degree {p.degree}")
    return BernsteinForm(n, tuple(_bernstein_from_power(p.coefficients, n)))


def from_bernstein(b: BernsteinForm) -> Polynomial:
    # p_k = sum_{i<=k} (-1)^(k-i) C(n-i, k-i) a_i
    n = b.degree
    rows = _pascal(n)
    coeffs = [
        sum((-1) ** (k - i) * rows[n - i][k - i] * b.coefficients[i] for i in range(k + 1))
        for k in range(n + 1)
    ]
    return Polynomial.from_coefficients(coeffs)


def denom_positive(b: BernsteinForm) -> bool:
    """All coefficients >= 0 and one > 0: sufficient for positivity on (0,1)."""
    return all(c >= 0 for c in b.coefficients) and any(c > 0 for c in b.coefficients)


def bernstein_range(p: Polynomial, box: Interval) -> Interval:
    """Range enclosure of p over box from the binomial Bernstein coefficients on that box.

    Works on integers: with box = [A/M, (A+H)/M] and p = P/scale,
    Q(s) = scale * M^n * p((A + H s)/M) has integer coefficients.
    """
    ints, scale = p.integer_form
    n = len(ints) - 1
    if n <= 0:
        value = Fraction(ints[0], scale)
        return Interval(value, value)

    m = math.lcm(box.lo.denominator, box.hi.denominator)
    a = box.lo.numerator * (m // box.lo.denominator)
    h = box.hi.numerator * (m // box.hi.denominator) - a

    q = [ints[n]]
    m_pow = 1
    for i in range(n - 1, -1, -1):
        m_pow *= m
        shifted = [0] * (len(q) + 1)
        for j, c in enumerate(q):
            shifted[j] += c * a
            shifted[j + 1] += c * h
        shifted[0] += ints[i] * m_pow
        q = shifted

    rows = _pascal(n)
    weights = rows[n]
    values = [Fraction(a_k, weights[k]) for k, a_k in enumerate(_bernstein_from_power(q, n))]
    denom = scale * m_pow
    return Interval(min(values) / denom, max(values) / denom)


# --- Chebyshev -----------------------------------------------------------------


@lru_cache(maxsize=None)
def cheb_generate(n: int) -> Polynomial:
    """T_n from T_{k+1} = 2x T_k - T_{k-1}."""
    if n < 0:
        raise ValueError("Chebyshev index must be nonnegative")
    if n == 0:
        return Polynomial.constant(1)
    if n == 1:
        return Polynomial.x()
    return Polynomial.x() * cheb_generate(n - 1) * 2 - cheb_generate(n - 2)


@lru_cache(maxsize=None)
def cheb_odd_factor(n: int) -> Polynomial:
    """P_n with T_{2n+1}(x) = x P_n(x^2)."""
    return Polynomial.from_coefficients(cheb_generate(2 * n + 1).coefficients[1::2])


@lru_cache(maxsize=None)
def cheb_even_factor(n: int) -> Polynomial:
    """E_n with T_{2n}(x) = E_n(x^2)."""
    return Polynomial.from_coefficients(cheb_generate(2 * n).coefficients[0::2])


def cheb_series(coefficients: Sequence[Fraction], basis) -> Polynomial:
    """sum c_n basis(n)."""
    total = Polynomial.constant(0)
    for n, c in enumerate(coefficients):
        if c:
            total = total + basis(n).scale(c)
    return total


# --- dispatcher ------------------------------------------------------------------

PolyLike = Union[Polynomial, RationalFunction]


def poly_ops(op: str, a: PolyLike, b: PolyLike | None = None) -> PolyLike:
    """add / mul / differentiate / compose / gcd_reduce over polynomials and rational functions."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "differentiate":
        return a.derivative()
    if op == "compose":
        if isinstance(a, Polynomial) and isinstance(b, Polynomial):
            return a.compose(b)
        return _as_rational_function(a).compose(_as_rational_function(b))
    if op == "gcd_reduce":
        if isinstance(a, RationalFunction):
            return a
        if b is None:
            raise ValueError("gcd_reduce needs a denominator")
        return RationalFunction(a, b)
    raise ValueError(f"unknown polynomial operation {op!r}")
