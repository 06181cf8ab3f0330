# shared/exact_arith.py
"""Exact rational scalars, rational-endpoint intervals and outward enclosures of exp, sqrt, arctan and pi."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

logger = logging.getLogger(__name__)

RationalLike = Union[int, Fraction, str]


class IntervalError(ArithmeticError):
    """Base class for failures of interval arithmetic."""


class StraddlingDivisionError(IntervalError, ZeroDivisionError):
    """Division by an interval that contains zero."""


class DomainError(IntervalError, ValueError):
    """Argument outside the domain of an enclosure (e.g. sqrt of a negative endpoint)."""


def to_rational(value: RationalLike) -> Fraction:
    """Parse an exact rational from an int, a Fraction or a "p/q" / decimal string.

    Floats are refused: a binary float is never an exact input here.
    """
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed rational {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to a rational")


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def round_down(x: Fraction, bits: int) -> Fraction:
    """Largest multiple of 2^-bits not above x."""
    if x.denominator == 1:
        return x
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


def round_up(x: Fraction, bits: int) -> Fraction:
    """Smallest multiple of 2^-bits not below x."""
    if x.denominator == 1:
        return x
    return Fraction(math.ceil(x * (1 << bits)), 1 << bits)


@dataclass(frozen=True)
class Precision:
    """Precision parameters of the transcendental enclosures; recorded in every certificate."""

    exp_terms: int = 24
    sqrt_bits: int = 96
    arctan_terms: int = 30

    def to_dict(self) -> dict[str, int]:
        return {"exp_terms": self.exp_terms, "sqrt_bits": self.sqrt_bits, "arctan_terms": self.arctan_terms}


DEFAULT_PRECISION = Precision()


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        lo = to_rational(self.lo)
        hi = to_rational(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: RationalLike) -> "Interval":
        x = to_rational(x)
        return cls(x, x)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"malformed interval {text!r}")
        parts = body[1:-1].split(",")
        if len(parts) != 2:
            raise ValueError(f"malformed interval {text!r}")
        return cls(to_rational(parts[0]), to_rational(parts[1]))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def magnitude(self) -> Fraction:
        return max(abs(self.lo), abs(self.hi))

    @property
    def is_degenerate(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: RationalLike | "Interval") -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = to_rational(x)
        return self.lo <= x <= self.hi

    def straddles_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def split(self) -> tuple["Interval", "Interval"]:
        mid = self.midpoint
        return Interval(self.lo, mid), Interval(mid, self.hi)

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __add__(self, other: "Interval | RationalLike") -> "Interval":
        return iv_ops("add", self, _as_interval(other))

    def __radd__(self, other: RationalLike) -> "Interval":
        return iv_ops("add", _as_interval(other), self)

    def __sub__(self, other: "Interval | RationalLike") -> "Interval":
        return iv_ops("sub", self, _as_interval(other))

    def __rsub__(self, other: RationalLike) -> "Interval":
        return iv_ops("sub", _as_interval(other), self)

    def __mul__(self, other: "Interval | RationalLike") -> "Interval":
        return iv_ops("mul", self, _as_interval(other))

    def __rmul__(self, other: RationalLike) -> "Interval":
        return iv_ops("mul", _as_interval(other), self)

    def __truediv__(self, other: "Interval | RationalLike") -> "Interval":
        return iv_ops("div", self, _as_interval(other))

    def __rtruediv__(self, other: RationalLike) -> "Interval":
        return iv_ops("div", _as_interval(other), self)


def _as_interval(x: "Interval | RationalLike") -> Interval:
    if isinstance(x, Interval):
        return x
    return Interval.point(x)


def iv_ops(op: str, x: Interval, y: Interval) -> Interval:
    """The four interval operations; scalars embed as degenerate intervals."""
    if op == "add":
        return Interval(x.lo + y.lo, x.hi + y.hi)
    if op == "sub":
        return Interval(x.lo - y.hi, x.hi - y.lo)
    if op == "mul":
        products = (x.lo * y.lo, x.lo * y.hi, x.hi * y.lo, x.hi * y.hi)
        return Interval(min(products), max(products))
    if op == "div":
        if y.straddles_zero():
            raise StraddlingDivisionError(f"division by zero-straddling interval {y}")
        return iv_ops("mul", x, Interval(1 / y.hi, 1 / y.lo))
    raise ValueError(f"unknown interval operation {op!r}")


# --- exp -------------------------------------------------------------------


def _exp_bounds(a: Fraction, terms: int, bits: int) -> tuple[Fraction, Fraction]:
    if a == 0:
        return Fraction(1), Fraction(1)

    # Halve until |r| <= 1/2, then square back up.
    k = 0
    r = a
    while abs(r) > Fraction(1, 2):
        r /= 2
        k += 1

    total = Fraction(0)
    term = Fraction(1)
    for n in range(terms):
        total += term
        term = term * r / (n + 1)
    # Lagrange remainder: |e^xi r^N / N!| <= e^(1/2) |r|^N / N! < 2 |term|
    remainder = 2 * abs(term)
    lo = max(total - remainder, Fraction(0))
    hi = total + remainder

    lo, hi = round_down(lo, bits), round_up(hi, bits)
    for _ in range(k):
        lo = round_down(lo * lo, bits)
        hi = round_up(hi * hi, bits)
    return lo, hi


def _exp_bits(terms: int) -> int:
    return max(64, 4 * terms)


def iv_exp(x: Interval, terms: int = DEFAULT_PRECISION.exp_terms) -> Interval:
    """Outward rational enclosure of exp over x (exp is monotone)."""
    if terms < 1:
        raise ValueError("terms must be positive")
    bits = _exp_bits(terms)
    lo, _ = _exp_bounds(x.lo, terms, bits)
    _, hi = _exp_bounds(x.hi, terms, bits)
    return Interval(lo, hi)


# --- sqrt ------------------------------------------------------------------


def _exact_sqrt(a: Fraction) -> Fraction | None:
    p, q = a.numerator, a.denominator
    rp, rq = math.isqrt(p), math.isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


def _sqrt_bounds(a: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    exact = _exact_sqrt(a)
    if exact is not None:
        return exact, exact
    # floor(sqrt(p/q) * 2^bits) = floor(isqrt(p q 4^bits) / q)
    scaled = a.numerator * a.denominator << (2 * bits)
    lo = Fraction(math.isqrt(scaled) // a.denominator, 1 << bits)
    return lo, lo + Fraction(1, 1 << bits)


def iv_sqrt(x: Interval, bits: int = DEFAULT_PRECISION.sqrt_bits) -> Interval:
    """Outward rational enclosure of sqrt over x at 2^-bits resolution."""
    if bits < 1:
        raise ValueError("bits must be positive")
    if x.lo < 0:
        raise DomainError(f"sqrt of interval with negative lower endpoint {x}")
    lo, _ = _sqrt_bounds(x.lo, bits)
    _, hi = _sqrt_bounds(x.hi, bits)
    return Interval(lo, hi)


# --- arctan and pi ---------------------------------------------------------


def _arctan_series(r: Fraction, terms: int, bits: int) -> tuple[Fraction, Fraction]:
    """Alternating series for |r| <= 1/2; the next term bounds the tail."""
    if r == 0:
        return Fraction(0), Fraction(0)
    total = Fraction(0)
    power = r
    r2 = r * r
    for k in range(terms):
        total += power / (2 * k + 1) if k % 2 == 0 else -power / (2 * k + 1)
        power *= r2
    tail = abs(power) / (2 * terms + 1)
    return round_down(total - tail, bits), round_up(total + tail, bits)


@lru_cache(maxsize=None)
def pi_enclosure(terms: int = DEFAULT_PRECISION.arctan_terms) -> Interval:
    """pi = 16 arctan(1/5) - 4 arctan(1/239), each arctan from the alternating series."""
    bits = _exp_bits(terms)
    a_lo, a_hi = _arctan_series(Fraction(1, 5), terms, bits)
    b_lo, b_hi = _arctan_series(Fraction(1, 239), terms, bits)
    return Interval(16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo)


def _arctan_bounds(s: Fraction, terms: int) -> tuple[Fraction, Fraction]:
    bits = _exp_bits(terms)
    if s == 0:
        return Fraction(0), Fraction(0)
    if s < 0:
        lo, hi = _arctan_bounds(-s, terms)
        return -hi, -lo
    pi = pi_enclosure(terms)
    if s > 2:
        lo, hi = _arctan_series(1 / s, terms, bits)
        return pi.lo / 2 - hi, pi.hi / 2 - lo
    if s > Fraction(1, 2):
        # arctan(s) = pi/4 + arctan((s-1)/(s+1)), |(s-1)/(s+1)| <= 1/3
        lo, hi = _arctan_series((s - 1) / (s + 1), terms, bits)
        return pi.lo / 4 + lo, pi.hi / 4 + hi
    return _arctan_series(s, terms, bits)


def iv_arctan_pi(x: Interval, terms: int = DEFAULT_PRECISION.arctan_terms) -> tuple[Interval, Interval]:
    """Enclosures of arctan over x and of pi, both from the same series."""
    if terms < 1:
        raise ValueError("terms must be positive")
    lo, _ = _arctan_bounds(x.lo, terms)
    _, hi = _arctan_bounds(x.hi, terms)
    return Interval(lo, hi), pi_enclosure(terms)
