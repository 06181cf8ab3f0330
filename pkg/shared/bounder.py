# shared/bounder.py
"""Adaptive bisection certifying sup, sign and bracket claims for NamedExpressions.

The root domain is tried whole first; when that is not enough it is cut into 2^k initial
sub-boxes, each explored depth-first (worst hull first) with an equal share of the box budget.
Sub-boxes are independent, so the merged certificate is the same for any worker count.
"""

from __future__ import annotations

import concurrent.futures
import hashlib
import logging
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Union

from shared.exact_arith import (
    DEFAULT_PRECISION,
    DomainError,
    Interval,
    Precision,
    RationalLike,
    StraddlingDivisionError,
    format_rational,
    to_rational,
)
from shared.expr import NamedExpression, enclose

logger = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 48
DEFAULT_MAX_BOXES = 10**6
DEFAULT_INITIAL_SPLITS = 3


class Status(str, Enum):
    CERTIFIED = "certified"
    FAILED = "failed"
    BUDGET_EXHAUSTED = "budget-exhausted"


# --- claims ------------------------------------------------------------------------


@dataclass(frozen=True)
class SupClaim:
    """|e| <= target on the domain."""

    target: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "target", to_rational(self.target))
        if self.target <= 0:
            raise ValueError("sup target must be positive")

    def accepts(self, hull: Interval) -> bool:
        return hull.magnitude <= self.target

    def violated_by(self, hull: Interval) -> bool:
        return hull.lo > self.target or hull.hi < -self.target

    def excess(self, hull: Interval) -> Fraction:
        return hull.magnitude - self.target

    def to_dict(self) -> dict[str, str]:
        return {"kind": "sup_abs", "target": format_rational(self.target)}


_RELATIONS = {"ge": ">=", "gt": ">", "le": "<=", "lt": "<"}


@dataclass(frozen=True)
class SignClaim:
    """e (relation) threshold everywhere on the domain; relation in ge, gt, le, lt."""

    relation: str
    threshold: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.relation not in _RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "threshold", to_rational(self.threshold))

    def accepts(self, hull: Interval) -> bool:
        match self.relation:
            case "ge":
                return hull.lo >= self.threshold
            case "gt":
                return hull.lo > self.threshold
            case "le":
                return hull.hi <= self.threshold
            case _:
                return hull.hi < self.threshold

    def violated_by(self, hull: Interval) -> bool:
        match self.relation:
            case "ge":
                return hull.hi < self.threshold
            case "gt":
                return hull.hi <= self.threshold
            case "le":
                return hull.lo > self.threshold
            case _:
                return hull.lo >= self.threshold

    def excess(self, hull: Interval) -> Fraction:
        if self.relation in ("ge", "gt"):
            return self.threshold - hull.lo
        return hull.hi - self.threshold

    def to_dict(self) -> dict[str, str]:
        return {"kind": "sign", "relation": self.relation, "threshold": format_rational(self.threshold)}


@dataclass(frozen=True)
class BracketClaim:
    """e stays inside [lo, hi]."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", to_rational(self.lo))
        object.__setattr__(self, "hi", to_rational(self.hi))
        if self.lo > self.hi:
            raise ValueError("empty bracket")

    def accepts(self, hull: Interval) -> bool:
        return self.lo <= hull.lo and hull.hi <= self.hi

    def violated_by(self, hull: Interval) -> bool:
        return hull.hi < self.lo or hull.lo > self.hi

    def excess(self, hull: Interval) -> Fraction:
        return max(self.lo - hull.lo, hull.hi - self.hi)

    def to_dict(self) -> dict[str, str]:
        return {"kind": "bracket", "lo": format_rational(self.lo), "hi": format_rational(self.hi)}


Claim = Union[SupClaim, SignClaim, BracketClaim]


def claim_from_dict(data: dict[str, str]) -> Claim:
    match data.get("kind"):
        case "sup_abs":
            return SupClaim(to_rational(data["target"]))
        case "sign":
            return SignClaim(data["relation"], to_rational(data["threshold"]))
        case "bracket":
            return BracketClaim(to_rational(data["lo"]), to_rational(data["hi"]))
    raise ValueError(f"unknown claim kind {data.get('kind')!r}")


# --- certificates --------------------------------------------------------------------


@dataclass(frozen=True)
class Budget:
    max_depth: int = DEFAULT_MAX_DEPTH
    max_boxes: int = DEFAULT_MAX_BOXES
    initial_splits: int = DEFAULT_INITIAL_SPLITS

    def to_dict(self) -> dict[str, int]:
        return {"max_depth": self.max_depth, "max_boxes": self.max_boxes, "initial_splits": self.initial_splits}


@dataclass(frozen=True)
class Witness:
    """Box where the claim was decided against, and the offending hull."""

    box: Interval
    point: Fraction | None
    hull: Interval | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "box": str(self.box),
            "point": None if self.point is None else format_rational(self.point),
            "hull": None if self.hull is None else str(self.hull),
        }


@dataclass(frozen=True)
class BoundStats:
    boxes: int
    max_depth_reached: int
    wall_time: float = 0.0

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        data: dict[str, Any] = {"boxes": self.boxes, "max_depth_reached": self.max_depth_reached}
        if include_timing:
            data["wall_time_seconds"] = round(self.wall_time, 3)
        return data


@dataclass(frozen=True)
class BoundCertificate:
    expression_id: str
    chart: str
    domain: Interval
    claim: Claim
    status: Status
    stats: BoundStats
    precision: Precision
    trace_digest: str
    hull: Interval | None = None  # union of leaf hulls when certified
    witness: Witness | None = None  # failing point or worst surviving box

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    def to_json(self, include_timing: bool = False) -> dict[str, Any]:
        return {
            "id": self.expression_id,
            "claim": self.claim.to_dict(),
            "domain": {"chart": self.chart, "box": str(self.domain)},
            "status": self.status.value,
            "stats": self.stats.to_dict(include_timing),
            "precision": self.precision.to_dict(),
            "splitting-trace-digest": self.trace_digest,
            "hull": None if self.hull is None else str(self.hull),
            "witness": None if self.witness is None else self.witness.to_dict(),
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "BoundCertificate":
        witness = data.get("witness")
        stats = data["stats"]
        return cls(
            expression_id=data["id"],
            chart=data["domain"]["chart"],
            domain=Interval.parse(data["domain"]["box"]),
            claim=claim_from_dict(data["claim"]),
            status=Status(data["status"]),
            stats=BoundStats(stats["boxes"], stats["max_depth_reached"], stats.get("wall_time_seconds", 0.0)),
            precision=Precision(**data["precision"]),
            trace_digest=data["splitting-trace-digest"],
            hull=None if data.get("hull") is None else Interval.parse(data["hull"]),
            witness=None
            if witness is None
            else Witness(
                box=Interval.parse(witness["box"]),
                point=None if witness["point"] is None else to_rational(witness["point"]),
                hull=None if witness["hull"] is None else Interval.parse(witness["hull"]),
            ),
        )


# --- evaluation -------------------------------------------------------------------


def bound_hull(expr: NamedExpression, box: Interval, precision: Precision = DEFAULT_PRECISION) -> Interval:
    """Enclosure of expr over box; StraddlingDivisionError means the box must be bisected."""
    expr.require_bounded()
    return enclose(expr.body, box, precision)


def _try_hull(expr: NamedExpression, box: Interval, precision: Precision) -> Interval | None:
    try:
        return enclose(expr.body, box, precision)
    except (StraddlingDivisionError, DomainError):
        return None


@dataclass
class _Exploration:
    status: Status
    boxes: int
    max_depth: int
    digest: str
    hull: Interval | None = None
    witness: Witness | None = None


def _explore(
    expr: NamedExpression,
    claim: Claim,
    root: Interval,
    root_hull: Interval | None,
    depth: int,
    max_depth: int,
    max_boxes: int,
    precision: Precision,
) -> _Exploration:
    trace = hashlib.sha256()
    stack: list[tuple[Interval, int, Interval | None]] = [(root, depth, root_hull)]
    boxes = 0
    deepest = depth
    union: Interval | None = None

    while stack:
        box, level, hull = stack.pop()
        if boxes >= max_boxes:
            return _Exploration(Status.BUDGET_EXHAUSTED, boxes, deepest, trace.hexdigest(), witness=Witness(box, None, hull))
        boxes += 1
        deepest = max(deepest, level)

        if hull is not None and claim.accepts(hull):
            trace.update(f"A{box}{hull}".encode())
            union = hull if union is None else union.hull(hull)
            continue

        mid = box.midpoint
        point_hull = _try_hull(expr, Interval.point(mid), precision)
        if point_hull is not None and claim.violated_by(point_hull):
            trace.update(f"F{box}{point_hull}".encode())
            return _Exploration(Status.FAILED, boxes, deepest, trace.hexdigest(), witness=Witness(box, mid, point_hull))

        if level >= max_depth:
            return _Exploration(Status.BUDGET_EXHAUSTED, boxes, deepest, trace.hexdigest(), witness=Witness(box, None, hull))

        trace.update(f"S{box}".encode())
        children = [(child, level + 1, _try_hull(expr, child, precision)) for child in box.split()]
        # undecided children first, then by how far the hull misses the claim
        children.sort(key=lambda c: (c[2] is None, claim.excess(c[2]) if c[2] is not None else 0))
        stack.extend(children)

    return _Exploration(Status.CERTIFIED, boxes, deepest, trace.hexdigest(), hull=union)


def _initial_boxes(domain: Interval, splits: int) -> list[Interval]:
    boxes = [domain]
    for _ in range(splits):
        boxes = [half for box in boxes for half in box.split()]
    return boxes


def certify(
    expr: NamedExpression,
    claim: Claim,
    budget: Budget = Budget(),
    precision: Precision = DEFAULT_PRECISION,
    domain: Interval | None = None,
    workers: int = 1,
) -> BoundCertificate:
    """Run the bisection for claim over domain (default: the expression's own domain)."""
    expr.require_bounded()
    domain = domain or expr.domain
    started = time.perf_counter()

    root_hull = _try_hull(expr, domain, precision)
    if root_hull is not None and claim.accepts(root_hull):
        parts = [_Exploration(Status.CERTIFIED, 1, 0, hashlib.sha256(f"A{domain}{root_hull}".encode()).hexdigest(), hull=root_hull)]
    elif domain.is_degenerate:
        # a point cannot be refined; only more precision helps
        status = Status.FAILED if root_hull is not None and claim.violated_by(root_hull) else Status.BUDGET_EXHAUSTED
        digest = hashlib.sha256(f"P{domain}{root_hull}".encode()).hexdigest()
        parts = [_Exploration(status, 1, 0, digest, witness=Witness(domain, domain.lo, root_hull))]
    else:
        subs = _initial_boxes(domain, budget.initial_splits)
        share = max(1, budget.max_boxes // len(subs))
        args = [
            (expr, claim, box, _try_hull(expr, box, precision), budget.initial_splits, budget.max_depth, share, precision)
            for box in subs
        ]
        if workers > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
                parts = list(executor.map(lambda a: _explore(*a), args))
        else:
            parts = [_explore(*a) for a in args]

    certificate = _merge(expr, claim, domain, parts, precision, time.perf_counter() - started)
    logger.info(
        "Bound finished",
        extra={
            "expression": expr.id,
            "chart": expr.chart.value,
            "status": certificate.status.value,
            "boxes": certificate.stats.boxes,
        },
    )
    return certificate


def _merge(
    expr: NamedExpression,
    claim: Claim,
    domain: Interval,
    parts: list[_Exploration],
    precision: Precision,
    elapsed: float,
) -> BoundCertificate:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(part.digest.encode())

    failed = next((p for p in parts if p.status is Status.FAILED), None)
    exhausted = next((p for p in parts if p.status is Status.BUDGET_EXHAUSTED), None)
    if failed is not None:
        status, witness, hull = Status.FAILED, failed.witness, None
    elif exhausted is not None:
        status, witness, hull = Status.BUDGET_EXHAUSTED, exhausted.witness, None
    else:
        status, witness = Status.CERTIFIED, None
        hull = parts[0].hull
        for part in parts[1:]:
            hull = hull.hull(part.hull)

    return BoundCertificate(
        expression_id=expr.id,
        chart=expr.chart.value,
        domain=domain,
        claim=claim,
        status=status,
        stats=BoundStats(
            boxes=sum(p.boxes for p in parts),
            max_depth_reached=max(p.max_depth for p in parts),
            wall_time=elapsed,
        ),
        precision=precision,
        trace_digest=digest.hexdigest(),
        hull=hull,
        witness=witness,
    )


def certify_sup(expr: NamedExpression, target: RationalLike, **kwargs: Any) -> BoundCertificate:
    return certify(expr, SupClaim(to_rational(target)), **kwargs)


def certify_sign(expr: NamedExpression, relation: str, threshold: RationalLike = 0, **kwargs: Any) -> BoundCertificate:
    return certify(expr, SignClaim(relation, to_rational(threshold)), **kwargs)


def certify_bracket(expr: NamedExpression, lo: RationalLike, hi: RationalLike, **kwargs: Any) -> BoundCertificate:
    return certify(expr, BracketClaim(to_rational(lo), to_rational(hi)), **kwargs)
