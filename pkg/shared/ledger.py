# shared/ledger.py
"""Constants ledger and the exact scalar inequality chains of the contraction arguments."""

from __future__ import annotations

import logging
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from shared.exact_arith import format_rational

logger = logging.getLogger(__name__)

# targets of the bounded certificates
C_R = Fraction(1, 10**6)
SIN_FACTOR_BOUND = Fraction(39, 10)
WEIGHT_FACTOR_BOUND = Fraction(1)
RATIO_BOUND = Fraction(101, 100)
WRONSKIAN_RATIO_BOUND = Fraction(28)
H_BOUND = Fraction(30)
INTEGRAL_CONSTANT = Fraction(5)
C_P = Fraction(2, 10**5)
C_Q = Fraction(2, 10**5)
C_EPS = Fraction(1, 500)
SUP_P3_DW0 = Fraction(6, 5)
SUP_P1_W0 = Fraction(4)
C_N = Fraction(4)
# tails are of order 1e-12
TAIL_MAGNITUDE_RANGE = (Fraction(1, 10**13), Fraction(1, 10**11))
Q3_BOUND = Fraction(-6, 100)
DQ3_BOUND = Fraction(-5, 100)

EXISTENCE_RADIUS = Fraction(5, 10**4)
ZERO_COUNT_RADIUS = Fraction(3, 100)

_RELATIONS = {"<": operator.lt, "<=": operator.le, "=": operator.eq}


@dataclass(frozen=True)
class InequalityStep:
    label: str
    lhs: Fraction
    relation: str
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return _RELATIONS[self.relation](self.lhs, self.rhs)

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "lhs": format_rational(self.lhs),
            "relation": self.relation,
            "rhs": format_rational(self.rhs),
            "holds": self.holds,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "InequalityStep":
        return cls(data["label"], Fraction(data["lhs"]), data["relation"], Fraction(data["rhs"]))

    def __str__(self) -> str:
        mark = "ok" if self.holds else "FAILS"
        return f"{self.label}: {format_rational(self.lhs)} {self.relation} {format_rational(self.rhs)} [{mark}]"


@dataclass(frozen=True)
class ChainTranscript:
    chain_id: str
    steps: tuple[InequalityStep, ...]

    @property
    def holds(self) -> bool:
        return all(step.holds for step in self.steps)

    def to_dict(self) -> dict[str, Any]:
        return {"id": self.chain_id, "holds": self.holds, "steps": [s.to_dict() for s in self.steps]}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ChainTranscript":
        return cls(data["id"], tuple(InequalityStep.from_dict(s) for s in data["steps"]))


@dataclass(frozen=True)
class LedgerEntry:
    value: Fraction
    provenance: str


@dataclass
class ConstantsLedger:
    entries: dict[str, LedgerEntry] = field(default_factory=dict)
    radii: dict[str, Fraction] = field(
        default_factory=lambda: {"existence-ball": EXISTENCE_RADIUS, "zero-count-ball": ZERO_COUNT_RADIUS}
    )

    def record(self, name: str, value: Fraction, provenance: str) -> None:
        self.entries[name] = LedgerEntry(Fraction(value), provenance)
        logger.debug("Ledger entry", extra={"constant": name, "value": format_rational(Fraction(value)), "provenance": provenance})

    def get(self, name: str) -> Fraction:
        if name not in self.entries:
            raise KeyError(f"constant {name} has not been established")
        return self.entries[name].value

    def has(self, *names: str) -> bool:
        return all(n in self.entries for n in names)

    def copy(self) -> "ConstantsLedger":
        return ConstantsLedger(dict(self.entries), dict(self.radii))

    def merge_from(self, other: "ConstantsLedger") -> list[str]:
        """Take over entries other has and self lacks; returns their names."""
        added = sorted(set(other.entries) - set(self.entries))
        for name in added:
            self.entries[name] = other.entries[name]
        return added

    def to_dict(self) -> dict[str, Any]:
        return {
            "constants": {
                name: {"value": format_rational(e.value), "provenance": e.provenance}
                for name, e in sorted(self.entries.items())
            },
            "radii": {name: format_rational(r) for name, r in sorted(self.radii.items())},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ConstantsLedger":
        return cls(
            entries={
                name: LedgerEntry(Fraction(e["value"]), e["provenance"]) for name, e in data["constants"].items()
            },
            radii={name: Fraction(r) for name, r in data["radii"].items()},
        )


def assemble_c_l(ledger: ConstantsLedger) -> ChainTranscript:
    """Green's operator bound: ratio^2 * 28 < 30 and c_L = (1 + 5) * 30."""
    ratio = ledger.get("ratio_bound")
    wronskian = ledger.get("wronskian_ratio")
    c_l = (1 + INTEGRAL_CONSTANT) * H_BOUND
    steps = (
        InequalityStep("ratio^2 * wronskian ratio < H bound", ratio * ratio * wronskian, "<", H_BOUND),
        InequalityStep("c_L = (1 + 5) * 30", c_l, "=", Fraction(180)),
    )
    ledger.record("c_L", c_l, "C7")
    return ChainTranscript("C7", steps)


def assemble_c_lt(ledger: ConstantsLedger) -> ChainTranscript:
    c_lt = ledger.get("c_P") + ledger.get("c_Q")
    ledger.record("c_Lt", c_lt, "C8")
    return ChainTranscript("C8", (InequalityStep("c_Lt = c_P + c_Q", c_lt, "<=", Fraction(4, 10**5)),))


def assemble_c_n(ledger: ConstantsLedger) -> ChainTranscript:
    """c_N = 4 from the sin factor 3.9 plus the ball radius."""
    sin_factor = ledger.get("sin_factor")
    r = ledger.radii["existence-ball"]
    ledger.record("c_N", C_N, "C19")
    return ChainTranscript(
        "C19",
        (
            InequalityStep("sin factor + r <= c_N", sin_factor + r, "<=", C_N),
            InequalityStep("sin factor + 2r <= c_N", sin_factor + 2 * r, "<=", C_N),
        ),
    )


def assemble_contraction(ledger: ConstantsLedger) -> ChainTranscript:
    """Self-map and Lipschitz chains of the existence fixed point."""
    c_l, c_lt, c_r, c_n = ledger.get("c_L"), ledger.get("c_Lt"), ledger.get("c_R"), ledger.get("c_N")
    r = ledger.radii["existence-ball"]
    self_map = c_l * (c_r + c_lt * r + c_n * r * r)
    lipschitz = c_l * (2 * c_n * r + c_lt)
    return ChainTranscript(
        "C9",
        (
            InequalityStep("self-map value", self_map, "=", Fraction(3636, 10**7)),
            InequalityStep("self-map < r", self_map, "<", r),
            InequalityStep("Lipschitz value", lipschitz, "=", Fraction(7272, 10**4)),
            InequalityStep("Lipschitz < 1", lipschitz, "<", Fraction(1)),
        ),
    )


def assemble_zero_count_chain(ledger: ConstantsLedger) -> ChainTranscript:
    """Zero-count fixed point: contraction factor c_L c_Lt and self-map into the 0.03 ball."""
    c_w0 = (ledger.get("sup_p3_dw0") + ledger.get("sup_p1_w0")) / 2
    ledger.record("c_w0", c_w0, "C11")
    r = ledger.radii["zero-count-ball"]
    factor = ledger.get("c_L") * ledger.get("c_Lt")
    return ChainTranscript(
        "C12",
        (
            InequalityStep("c_w0 = (1.2 + 4)/2", c_w0, "=", Fraction(13, 5)),
            InequalityStep("c_w0 + r <= 3", c_w0 + r, "<=", Fraction(3)),
            InequalityStep("c_L c_Lt < 1", factor, "<", Fraction(1)),
            InequalityStep("c_L c_Lt * 3 < r", factor * 3, "<", r),
        ),
    )
