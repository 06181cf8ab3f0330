# shared/pipeline.py
"""Certificate catalogue, dependency-ordered runs and the proof report."""

from __future__ import annotations

import concurrent.futures
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Iterable, Optional

from shared import ledger as constants
from shared.bounder import BoundCertificate, Status as BoundStatus, certify_bracket, certify_sign, certify_sup
from shared.config import RuntimeConfig
from shared.exact_arith import format_rational
from shared.expr import NamedExpression
from shared.fundamental import (
    ZERO_COUNT_RADIUS,
    FundamentalSystem,
    build_epsilon_check,
    build_fundamental_system,
    build_nonnegativity_checks,
    build_PQ,
    build_ratio_factors,
    build_zero_count_exprs,
    v1_positive,
    wronskian_identity_defect,
)
from shared.ledger import ChainTranscript, ConstantsLedger
from shared.profile import (
    ProfileAnsatz,
    WeightFamily,
    build_farfield_gap,
    build_gauge_positivity,
    build_nonlinearity_factors,
    build_profile,
    build_residual,
)
from shared.tables import CoefficientTables, ingest_tables

logger = logging.getLogger(__name__)


class CertStatus(str, Enum):
    VERIFIED = "verified"
    FAILED = "failed"
    INCONCLUSIVE = "inconclusive"
    BLOCKED = "blocked"
    ERROR = "error"


EXISTENCE = "Theorem 1.1 constants"
ZERO_COUNT = "Lemma 4.1 numerics"
GAUGE = "Lemma 4.3 positivity"
GROUPS = (EXISTENCE, ZERO_COUNT, GAUGE)


@dataclass
class CertificateResult:
    cert_id: str
    status: CertStatus
    bounds: list[BoundCertificate] = field(default_factory=list)
    chains: list[ChainTranscript] = field(default_factory=list)
    checks: dict[str, str] = field(default_factory=dict)
    message: str = ""

    def to_json(self, include_timing: bool = False) -> dict[str, Any]:
        return {
            "id": self.cert_id,
            "status": self.status.value,
            "bounds": [b.to_json(include_timing) for b in self.bounds],
            "chains": [c.to_dict() for c in self.chains],
            "checks": dict(sorted(self.checks.items())),
            "message": self.message,
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "CertificateResult":
        return cls(
            cert_id=data["id"],
            status=CertStatus(data["status"]),
            bounds=[BoundCertificate.from_json(b) for b in data.get("bounds", [])],
            chains=[ChainTranscript.from_dict(c) for c in data.get("chains", [])],
            checks=dict(data.get("checks", {})),
            message=data.get("message", ""),
        )


class RunContext:
    """Tables and symbolic objects shared by the certificate runners, built once on demand."""

    def __init__(self, config: RuntimeConfig, tables: CoefficientTables | None = None) -> None:
        self.config = config
        self._tables = tables
        self._lock = threading.Lock()
        self._profile: ProfileAnsatz | None = None
        self._system: FundamentalSystem | None = None
        self.weights = WeightFamily.standard()

    @property
    def tables(self) -> CoefficientTables:
        with self._lock:
            if self._tables is None:
                self._tables = ingest_tables(self.config.tables_dir)
            return self._tables

    @property
    def profile(self) -> ProfileAnsatz:
        tables = self.tables
        with self._lock:
            if self._profile is None:
                self._profile = build_profile(tables.f0)
            return self._profile

    @property
    def system(self) -> FundamentalSystem:
        tables = self.tables
        with self._lock:
            if self._system is None:
                self._system = build_fundamental_system(tables.w0, tables.w1)
            return self._system

    @property
    def loaded_checksums(self) -> dict[str, str]:
        return dict(self._tables.checksums) if self._tables is not None else {}

    def bound_kwargs(self, cert_id: str) -> dict[str, Any]:
        settings = self.config.settings_for(cert_id)
        return {"budget": settings.budget(), "precision": settings.precision(), "workers": self.config.workers}


Runner = Callable[[RunContext, ConstantsLedger], CertificateResult]


@dataclass(frozen=True)
class CatalogueEntry:
    cert_id: str
    title: str
    group: str
    deps: tuple[str, ...]
    runner: Runner


# --- helpers -------------------------------------------------------------------------


def _status_from_bounds(bounds: Iterable[BoundCertificate]) -> CertStatus:
    statuses = [b.status for b in bounds]
    if any(s is BoundStatus.FAILED for s in statuses):
        return CertStatus.FAILED
    if any(s is BoundStatus.BUDGET_EXHAUSTED for s in statuses):
        return CertStatus.INCONCLUSIVE
    return CertStatus.VERIFIED


def _status_from_checks(ok: bool) -> CertStatus:
    return CertStatus.VERIFIED if ok else CertStatus.FAILED


def _sup_all(ctx: RunContext, cert_id: str, exprs: Iterable[NamedExpression], target: Fraction) -> list[BoundCertificate]:
    return [certify_sup(e, target, **ctx.bound_kwargs(cert_id)) for e in exprs]


def _result(cert_id: str, bounds: list[BoundCertificate], **kwargs: Any) -> CertificateResult:
    return CertificateResult(cert_id, _status_from_bounds(bounds), bounds=bounds, **kwargs)


def _with_chain(result: CertificateResult, chain: ChainTranscript) -> CertificateResult:
    result.chains.append(chain)
    if result.status is CertStatus.VERIFIED and not chain.holds:
        result.status = CertStatus.FAILED
        result.message = f"chain {chain.chain_id} fails"
    return result


# --- runners --------------------------------------------------------------------------


def run_residual(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    expr = build_residual(ctx.profile, ctx.weights)
    bounds = _sup_all(ctx, "C1", [expr], constants.C_R)
    ledger.record("c_R", constants.C_R, "C1")
    return _result("C1", bounds, checks={"denominator_bernstein_positive": expr.notes["den_bernstein_positive"]})


def run_sin_factor(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    sin_factor, _ = build_nonlinearity_factors(ctx.profile, ctx.weights)
    bounds = _sup_all(ctx, "C2", [sin_factor], constants.SIN_FACTOR_BOUND)
    ledger.record("sin_factor", constants.SIN_FACTOR_BOUND, "C2")
    return _result("C2", bounds)


def run_weight_factor(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    _, weight_factor = build_nonlinearity_factors(ctx.profile, ctx.weights)
    bounds = _sup_all(ctx, "C3", [weight_factor], constants.WEIGHT_FACTOR_BOUND)
    ledger.record("weight_factor", constants.WEIGHT_FACTOR_BOUND, "C3")
    return _result("C3", bounds)


def run_weight_identities(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    identities = ctx.weights.identities()
    checks = {name: str(ok) for name, ok in identities.items()}
    return CertificateResult("C4", _status_from_checks(all(identities.values())), checks=checks)


def run_wronskian_identity(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    d_coefficient, remainder = wronskian_identity_defect()
    checks = {"dawson_coefficient_vanishes": str(d_coefficient.is_zero), "remainder_is_free_wronskian": str(remainder.is_zero)}
    return CertificateResult("C5", _status_from_checks(d_coefficient.is_zero and remainder.is_zero), checks=checks)


def run_ratio_factors(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    kwargs = ctx.bound_kwargs("C6")
    checks = {"v1_bernstein_positive": str(v1_positive(ctx.system))}
    if checks["v1_bernstein_positive"] != "True":
        return CertificateResult("C6", CertStatus.FAILED, checks=checks, message="v1 is not positive on (0, inf)")
    bounds = [certify_sign(expr, "ge", 0, **kwargs) for expr in build_nonnegativity_checks(ctx.system)]
    if _status_from_bounds(bounds) is not CertStatus.VERIFIED:
        return _result("C6", bounds, checks=checks, message="nonnegativity prerequisites not certified")

    ratio_exprs = [e for e in build_ratio_factors(ctx.system) if e.id.startswith("C6:")]
    bounds += _sup_all(ctx, "C6", ratio_exprs, constants.RATIO_BOUND)
    ledger.record("ratio_bound", constants.RATIO_BOUND, "C6")
    return _result("C6", bounds, checks=checks)


def run_wronskian_ratio(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    ratio_exprs = [e for e in build_ratio_factors(ctx.system) if e.id.startswith("C7:")]
    bounds = _sup_all(ctx, "C7", ratio_exprs, constants.WRONSKIAN_RATIO_BOUND)
    ledger.record("wronskian_ratio", constants.WRONSKIAN_RATIO_BOUND, "C7")
    return _with_chain(_result("C7", bounds), constants.assemble_c_l(ledger))


def run_perturbation(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    p_expr, q_expr = build_PQ(ctx.profile, ctx.system, ctx.weights)
    bounds = _sup_all(ctx, "C8", [p_expr], constants.C_P) + _sup_all(ctx, "C8", [q_expr], constants.C_Q)
    ledger.record("c_P", constants.C_P, "C8")
    ledger.record("c_Q", constants.C_Q, "C8")
    return _with_chain(_result("C8", bounds), constants.assemble_c_lt(ledger))


def run_contraction(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    chain = constants.assemble_contraction(ledger)
    return CertificateResult("C9", _status_from_checks(chain.holds), chains=[chain])


def run_dawson_epsilon(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    bounds = [certify_bracket(build_epsilon_check(ctx.system), 0, constants.C_EPS, **ctx.bound_kwargs("C10"))]
    ledger.record("c_eps", constants.C_EPS, "C10")
    return _result("C10", bounds)


def run_w0_sups(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    exprs = build_zero_count_exprs(ctx.system, ctx.weights)
    bounds = _sup_all(ctx, "C11", exprs["C11:p3w0'"], constants.SUP_P3_DW0)
    bounds += _sup_all(ctx, "C11", exprs["C11:p1w0"], constants.SUP_P1_W0)
    ledger.record("sup_p3_dw0", constants.SUP_P3_DW0, "C11")
    ledger.record("sup_p1_w0", constants.SUP_P1_W0, "C11")
    return _result("C11", bounds)


def run_zero_count_chain(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    chain = constants.assemble_zero_count_chain(ledger)
    return CertificateResult("C12", _status_from_checks(chain.holds), chains=[chain])


def run_w0_slope(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    slope = ctx.system.w0_slope_at_origin()
    ok = slope > 1 and slope - ZERO_COUNT_RADIUS > 0
    checks = {"w0_slope_at_origin": format_rational(slope), "exceeds_one": str(slope > 1), "normalizer_positive": str(slope - ZERO_COUNT_RADIUS > 0)}
    return CertificateResult("C13", _status_from_checks(ok), checks=checks)


def run_endpoint_envelopes(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    exprs = build_zero_count_exprs(ctx.system, ctx.weights)
    kwargs = ctx.bound_kwargs("C14")
    bounds = [
        certify_sign(exprs["C14:q3"][0], "le", constants.Q3_BOUND, **kwargs),
        certify_sign(exprs["C14:dq3"][0], "le", constants.DQ3_BOUND, **kwargs),
    ]
    return _result("C14", bounds)


def run_zero_count_signs(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    exprs = build_zero_count_exprs(ctx.system, ctx.weights)
    kwargs = ctx.bound_kwargs("C15")
    bounds = [
        certify_sign(exprs["C15:q-pos"][0], "gt", 0, **kwargs),
        certify_sign(exprs["C15:dq-neg"][0], "lt", 0, **kwargs),
    ]
    return _result("C15", bounds)


def run_gauge_positivity(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    settings = ctx.config.settings_for("C16")
    forms = build_gauge_positivity(ctx.profile, ctx.weights, degree=settings.bernstein_degree, precision=settings.precision())
    checks = {
        "bernstein_degree": str(forms.numerator.degree),
        "min_numerator_coefficient": format_rational(min(forms.numerator.coefficients)),
        "min_denominator_coefficient": format_rational(min(forms.denominator.coefficients)),
        "sqrt2_upper": format_rational(forms.sqrt2_upper),
    }
    return CertificateResult("C16", _status_from_checks(forms.all_positive), checks=checks)


def run_farfield_gap(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    settings = ctx.config.settings_for("C17")
    gap = build_farfield_gap(ctx.profile.far_field_value, precision=settings.precision())
    checks = {"s": format_rational(gap.s), "gap": str(gap.gap), "threshold": format_rational(gap.threshold)}
    return CertificateResult("C17", _status_from_checks(gap.holds), checks=checks)


def run_tail_conditions(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    system = ctx.system
    at_origin, at_infinity = system.tail_conditions()
    a36, a37 = system.tails
    floor, ceiling = constants.TAIL_MAGNITUDE_RANGE
    small = all(floor < abs(a) < ceiling for a in (a36, a37))
    checks = {
        "w1_36": format_rational(a36),
        "w1_37": format_rational(a37),
        "condition_at_origin": format_rational(at_origin),
        "condition_at_infinity": format_rational(at_infinity),
    }
    return CertificateResult("C18", _status_from_checks(at_origin == 0 and at_infinity == 0 and small), checks=checks)


def run_nonlinearity_constant(ctx: RunContext, ledger: ConstantsLedger) -> CertificateResult:
    chain = constants.assemble_c_n(ledger)
    return CertificateResult("C19", _status_from_checks(chain.holds), chains=[chain])


CATALOGUE: dict[str, CatalogueEntry] = {
    e.cert_id: e
    for e in (
        CatalogueEntry("C1", "weighted residual p2 R(f0~) <= 1e-6", EXISTENCE, (), run_residual),
        CatalogueEntry("C2", "sin factor of the nonlinearity <= 3.9", EXISTENCE, (), run_sin_factor),
        CatalogueEntry("C3", "weight factor of the nonlinearity <= 1", EXISTENCE, (), run_weight_factor),
        CatalogueEntry("C4", "weight identities (1/p1)' = 1/p3, L0(1/p1) = 1/p2", EXISTENCE, (), run_weight_identities),
        CatalogueEntry("C5", "free Wronskian v0 v1' - v0' v1 = -6 y^-2 e^(y^2/4)", EXISTENCE, (), run_wronskian_identity),
        CatalogueEntry("C6", "ratio factors h0, h1, dh0, dh1 <= 1.01", EXISTENCE, ("C10", "C18"), run_ratio_factors),
        CatalogueEntry("C7", "Wronskian ratio <= 28, c_L = 180", EXISTENCE, ("C4", "C6", "C10", "C18"), run_wronskian_ratio),
        CatalogueEntry("C8", "c_P, c_Q <= 2e-5, c_Lt = 4e-5", EXISTENCE, ("C10", "C18"), run_perturbation),
        CatalogueEntry("C9", "existence contraction chain", EXISTENCE, ("C1", "C2", "C3", "C7", "C8", "C19"), run_contraction),
        CatalogueEntry("C10", "Dawson truncation eps in [0, 1/500]", EXISTENCE, (), run_dawson_epsilon),
        CatalogueEntry("C11", "sup p3 w0~' <= 1.2 and sup p1 w0~ <= 4 on (0, 3)", ZERO_COUNT, ("C10",), run_w0_sups),
        CatalogueEntry("C12", "zero-count contraction chain", ZERO_COUNT, ("C7", "C8", "C11"), run_zero_count_chain),
        CatalogueEntry("C13", "w0~'(0) > 1, normalizer positive", ZERO_COUNT, ("C12",), run_w0_slope),
        CatalogueEntry("C14", "q(3) <= -0.06, q'(3) <= -0.05", ZERO_COUNT, ("C12",), run_endpoint_envelopes),
        CatalogueEntry("C15", "q > 0 on [0, 1], q' < 0 on [1, 3]", ZERO_COUNT, ("C12",), run_zero_count_signs),
        CatalogueEntry("C16", "gauge mode Bernstein positivity", GAUGE, (), run_gauge_positivity),
        CatalogueEntry("C17", "far-field gap 2 arctan(s) - pi/2 > 0.56 + slack", EXISTENCE, (), run_farfield_gap),
        CatalogueEntry("C18", "w1~ tail conditions, tails of order 1e-12", EXISTENCE, (), run_tail_conditions),
        CatalogueEntry("C19", "c_N = 4 from 3.9 + r", EXISTENCE, ("C2", "C3"), run_nonlinearity_constant),
    )
}


def _id_key(cert_id: str) -> int:
    return int(cert_id[1:])


def dependency_closure(ids: Iterable[str], catalogue: dict[str, CatalogueEntry] = CATALOGUE) -> set[str]:
    pending = list(ids)
    closure: set[str] = set()
    while pending:
        cert_id = pending.pop()
        if cert_id not in catalogue:
            raise KeyError(f"unknown certificate {cert_id}")
        if cert_id in closure:
            continue
        closure.add(cert_id)
        pending.extend(catalogue[cert_id].deps)
    return closure


def topological_waves(ids: Iterable[str], catalogue: dict[str, CatalogueEntry] = CATALOGUE) -> list[list[str]]:
    """Groups of certificates whose dependencies are all in earlier groups; ordered by ID."""
    remaining = set(ids)
    waves: list[list[str]] = []
    while remaining:
        ready = sorted((c for c in remaining if not set(catalogue[c].deps) & remaining), key=_id_key)
        if not ready:
            raise ValueError(f"dependency cycle among {sorted(remaining, key=_id_key)}")
        waves.append(ready)
        remaining.difference_update(ready)
    return waves


# --- running ---------------------------------------------------------------------------


def run_certificate(
    cert_id: str,
    ctx: RunContext,
    ledger: ConstantsLedger,
    results: dict[str, CertificateResult] | None = None,
    catalogue: dict[str, CatalogueEntry] = CATALOGUE,
) -> CertificateResult:
    """Run one certificate whose dependencies were run earlier; results holds their outcomes."""
    entry = catalogue[cert_id]
    results = results or {}
    blockers = [d for d in entry.deps if d not in results or results[d].status is not CertStatus.VERIFIED]
    if blockers:
        logger.warning("Certificate blocked", extra={"certificate": cert_id, "blockers": blockers})
        return CertificateResult(cert_id, CertStatus.BLOCKED, message="blocked by " + ", ".join(blockers))

    started = time.perf_counter()
    try:
        result = entry.runner(ctx, ledger)
    except Exception as exc:
        logger.exception("Certificate raised", extra={"certificate": cert_id, "error": str(exc)})
        return CertificateResult(cert_id, CertStatus.ERROR, message=f"{type(exc).__name__}: {exc}")

    logger.info(
        "Certificate finished",
        extra={
            "certificate": cert_id,
            "status": result.status.value,
            "boxes": sum(b.stats.boxes for b in result.bounds),
            "seconds": round(time.perf_counter() - started, 3),
        },
    )
    return result


@dataclass
class ProofReport:
    certificates: list[CertificateResult]
    ledger: ConstantsLedger
    table_checksums: dict[str, str]
    configuration: dict[str, Any]
    requested: list[str]
    runtime: float = 0.0

    def result(self, cert_id: str) -> Optional[CertificateResult]:
        return next((c for c in self.certificates if c.cert_id == cert_id), None)

    @property
    def chains(self) -> list[ChainTranscript]:
        return [chain for c in self.certificates for chain in c.chains]

    def group_verdicts(self, catalogue: dict[str, CatalogueEntry] = CATALOGUE) -> dict[str, str]:
        verdicts = {}
        for group in GROUPS:
            members = [c for c in self.certificates if catalogue[c.cert_id].group == group]
            if not members:
                verdicts[group] = "NOT RUN"
                continue
            blockers = [c.cert_id for c in members if c.status is not CertStatus.VERIFIED]
            verdicts[group] = "VERIFIED" if not blockers else f"INCOMPLETE (blockers: {', '.join(blockers)})"
        return verdicts

    @property
    def verdict(self) -> str:
        return "; ".join(f"{group}: {v}" for group, v in self.group_verdicts().items())

    @property
    def all_requested_verified(self) -> bool:
        return all((r := self.result(c)) is not None and r.status is CertStatus.VERIFIED for c in self.requested)

    def to_json(self, include_timing: bool = False) -> dict[str, Any]:
        data = {
            "verdict": self.verdict,
            "groups": self.group_verdicts(),
            "requested": self.requested,
            "certificates": [c.to_json(include_timing) for c in self.certificates],
            "ledger": self.ledger.to_dict(),
            "chains": [c.to_dict() for c in self.chains],
            "table_checksums": dict(sorted(self.table_checksums.items())),
            "configuration": self.configuration,
        }
        if include_timing:
            data["runtime_seconds"] = round(self.runtime, 3)
        return data

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ProofReport":
        return cls(
            certificates=[CertificateResult.from_json(c) for c in data["certificates"]],
            ledger=ConstantsLedger.from_dict(data["ledger"]),
            table_checksums=dict(data["table_checksums"]),
            configuration=dict(data["configuration"]),
            requested=list(data["requested"]),
            runtime=float(data.get("runtime_seconds", 0.0)),
        )


def run_certificates(
    ids: Iterable[str],
    config: RuntimeConfig,
    ctx: RunContext | None = None,
    catalogue: dict[str, CatalogueEntry] = CATALOGUE,
) -> ProofReport:
    """Run ids and everything they depend on, wave by wave; ledger writes are merged in ID order."""
    requested = sorted(set(ids), key=_id_key)
    ctx = ctx or RunContext(config)
    started = time.perf_counter()
    ledger = ConstantsLedger()
    results: dict[str, CertificateResult] = {}

    for wave in topological_waves(dependency_closure(requested, catalogue), catalogue):
        scratch = {cert_id: ledger.copy() for cert_id in wave}

        def run(cert_id: str) -> CertificateResult:
            return run_certificate(cert_id, ctx, scratch[cert_id], results, catalogue)

        if config.workers > 1 and len(wave) > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=config.workers) as executor:
                outcomes = list(executor.map(run, wave))
        else:
            outcomes = [run(cert_id) for cert_id in wave]

        for cert_id, outcome in zip(wave, outcomes):
            results[cert_id] = outcome
            if outcome.status is CertStatus.VERIFIED:
                ledger.merge_from(scratch[cert_id])

    ordered = [results[c] for c in sorted(results, key=_id_key)]
    report = ProofReport(
        certificates=ordered,
        ledger=ledger,
        table_checksums=ctx.loaded_checksums,
        configuration=config.to_dict(),
        requested=requested,
        runtime=time.perf_counter() - started,
    )
    logger.info("Run complete", extra={"requested": requested, "verdict": report.verdict})
    return report


def run_all(config: RuntimeConfig, ctx: RunContext | None = None) -> ProofReport:
    return run_certificates(CATALOGUE, config, ctx)


# --- emission ---------------------------------------------------------------------------


def report_emit(report: ProofReport, fmt: str = "json", catalogue: dict[str, CatalogueEntry] = CATALOGUE) -> str:
    """Deterministic serialization of the report; text renders the certificate table."""
    if fmt == "json":
        return json.dumps(report.to_json(), indent=2, sort_keys=True)
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")

    lines = [f"Verdict: {report.verdict}", ""]
    lines.append(f"{'ID':<5} {'status':<13} {'boxes':>9}  claim")
    for result in report.certificates:
        boxes = sum(b.stats.boxes for b in result.bounds)
        title = catalogue[result.cert_id].title if result.cert_id in catalogue else ""
        lines.append(f"{result.cert_id:<5} {result.status.value:<13} {boxes:>9}  {title}")
        if result.message:
            lines.append(f"{'':<5} {result.message}")
        for bound in result.bounds:
            if bound.status is not BoundStatus.CERTIFIED and bound.witness is not None:
                lines.append(f"{'':<5} {bound.expression_id} on {bound.chart} {bound.witness.box}: hull {bound.witness.hull}")
    if report.chains:
        lines += ["", "Inequality chains:"]
        for chain in report.chains:
            lines += [f"  {chain.chain_id}"] + [f"    {step}" for step in chain.steps]
    if report.ledger.entries:
        lines += ["", "Constants:"]
        for name, entry in sorted(report.ledger.entries.items()):
            lines.append(f"  {name} = {format_rational(entry.value)} ({entry.provenance})")
    if report.table_checksums:
        lines += ["", "Table checksums:"]
        lines += [f"  {name}: {digest}" for name, digest in sorted(report.table_checksums.items())]
    if report.runtime:
        lines += ["", f"Runtime: {report.runtime:.1f}s"]
    return "\n".join(lines) + "\n"
