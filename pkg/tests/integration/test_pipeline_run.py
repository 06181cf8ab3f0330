"""
Integration tests for the certificate pipeline.

Goal:
- Dependencies run before dependents, in waves ordered by certificate ID.
- A certificate whose dependency did not verify is BLOCKED, never run.
- A runner that raises becomes an ERROR result; the run continues.
- Only verified certificates contribute to the constants ledger.
- The report is identical for any worker count and survives a JSON round trip.
- The real bound certificates verify against the shipped tables, C6 and C7 included.
- The known C8 and C11 failures come with witnesses that violate their claims.
- An all-verified run renders the exact three-group verdict.
"""
import json
from fractions import Fraction

import pytest

from shared.config import RuntimeConfig
from shared.pipeline import (
    CATALOGUE,
    CatalogueEntry,
    CertificateResult,
    CertStatus,
    EXISTENCE,
    GAUGE,
    ZERO_COUNT,
    ProofReport,
    RunContext,
    dependency_closure,
    report_emit,
    run_certificates,
    topological_waves,
)
from shared.bounder import Status as BoundStatus
from shared.tables import DEFAULT_TABLES_DIR


def _config(workers: int = 1) -> RuntimeConfig:
    return RuntimeConfig(
        tables_dir=str(DEFAULT_TABLES_DIR),
        workers=workers,
        config_path=None,
        report_bucket=None,
        log_level="INFO",
    )


def _verified(cert_id: str, constant: str | None = None):
    def runner(ctx, ledger):
        if constant:
            ledger.record(constant, Fraction(1, 7), cert_id)
        return CertificateResult(cert_id, CertStatus.VERIFIED, checks={"ok": "True"})

    return runner


def _failed(cert_id: str, constant: str):
    def runner(ctx, ledger):
        ledger.record(constant, Fraction(9), cert_id)
        return CertificateResult(cert_id, CertStatus.FAILED, message="bound exceeded")

    return runner


def _raising(ctx, ledger):
    raise RuntimeError("boom")


class FakeCatalogue(dict):
    """Catalogue with real IDs and groups but scripted runners."""

    def __init__(self) -> None:
        super().__init__(
            {
                "C1": CatalogueEntry("C1", "existence piece", EXISTENCE, (), _verified("C1", "c_R")),
                "C10": CatalogueEntry("C10", "existence base", EXISTENCE, (), _verified("C10", "c_eps")),
                "C11": CatalogueEntry("C11", "zero-count base", ZERO_COUNT, ("C10",), _verified("C11", "sup_p1_w0")),
                "C12": CatalogueEntry("C12", "zero-count chain", ZERO_COUNT, ("C11",), _failed("C12", "c_w0")),
                "C13": CatalogueEntry("C13", "zero-count slope", ZERO_COUNT, ("C12",), _verified("C13")),
                "C16": CatalogueEntry("C16", "gauge", GAUGE, (), _raising),
            }
        )


def _fake_report(workers: int = 1) -> ProofReport:
    return run_certificates(["C13", "C16", "C1"], _config(workers), catalogue=FakeCatalogue())


def test_waves_follow_dependencies():
    """The closure pulls in dependencies and waves are sorted by ID."""
    catalogue = FakeCatalogue()
    closure = dependency_closure(["C13", "C16"], catalogue)
    assert closure == {"C10", "C11", "C12", "C13", "C16"}
    assert topological_waves(closure | {"C1"}, catalogue) == [["C1", "C10", "C16"], ["C11"], ["C12"], ["C13"]]


def test_dependency_cycle_is_rejected():
    """A cyclic catalogue cannot be scheduled."""
    cyclic = {
        "C1": CatalogueEntry("C1", "a", EXISTENCE, ("C2",), _verified("C1")),
        "C2": CatalogueEntry("C2", "b", EXISTENCE, ("C1",), _verified("C2")),
    }
    with pytest.raises(ValueError, match="cycle"):
        topological_waves(["C1", "C2"], cyclic)


def test_unknown_certificate_is_rejected():
    """IDs outside the catalogue raise KeyError."""
    with pytest.raises(KeyError):
        dependency_closure(["C42"])


def test_blocked_error_and_verdicts():
    """FAILED blocks its dependents, a raising runner is an ERROR, and group verdicts list blockers."""
    report = _fake_report()
    assert [c.cert_id for c in report.certificates] == ["C1", "C10", "C11", "C12", "C13", "C16"]
    assert report.result("C12").status is CertStatus.FAILED
    blocked = report.result("C13")
    assert blocked.status is CertStatus.BLOCKED
    assert blocked.message == "blocked by C12"
    error = report.result("C16")
    assert error.status is CertStatus.ERROR
    assert error.message == "RuntimeError: boom"

    assert report.requested == ["C1", "C13", "C16"]
    assert not report.all_requested_verified
    assert report.group_verdicts() == {
        EXISTENCE: "VERIFIED",
        ZERO_COUNT: "INCOMPLETE (blockers: C12, C13)",
        GAUGE: "INCOMPLETE (blockers: C16)",
    }


def test_only_verified_certificates_reach_the_ledger():
    """Constants recorded by a failed runner are dropped."""
    report = _fake_report()
    assert set(report.ledger.entries) == {"c_R", "c_eps", "sup_p1_w0"}
    assert report.ledger.entries["c_eps"].provenance == "C10"


def test_report_is_independent_of_worker_count():
    """One worker and three workers give the same report."""
    single = _fake_report(workers=1).to_json()
    pooled = _fake_report(workers=3).to_json()
    for key in ("verdict", "certificates", "ledger", "chains"):
        assert single[key] == pooled[key]


def test_report_json_round_trip():
    """A parsed report renders to the same JSON."""
    report = _fake_report()
    data = json.loads(report_emit(report, "json"))
    assert data["verdict"] == report.verdict
    restored = ProofReport.from_json(data)
    assert report_emit(restored, "json") == report_emit(report, "json")


def test_text_report_lists_every_certificate():
    """The text table has the verdict first and one row per certificate."""
    text = report_emit(_fake_report(), "text", catalogue=FakeCatalogue())
    assert text.startswith("Verdict: Theorem 1.1 constants: VERIFIED")
    assert "blocked by C12" in text
    assert "RuntimeError: boom" in text
    for cert_id in ("C1", "C10", "C11", "C12", "C13", "C16"):
        assert f"\n{cert_id:<5} " in text


def test_unknown_report_format():
    """Only json and text are rendered."""
    with pytest.raises(ValueError):
        report_emit(_fake_report(), "yaml")


def test_real_catalogue_shape():
    """C1 to C19 with the dependency edges the chains need."""
    assert sorted(CATALOGUE, key=lambda c: int(c[1:])) == [f"C{i}" for i in range(1, 20)]
    assert dependency_closure(["C9"]) == {"C1", "C2", "C3", "C4", "C6", "C7", "C8", "C9", "C10", "C18", "C19"}
    waves = topological_waves(CATALOGUE)
    assert waves[0] == ["C1", "C2", "C3", "C4", "C5", "C10", "C16", "C17", "C18"]
    assert waves[-1] == ["C13", "C14", "C15"]
    for cert_id in ("C6", "C7", "C8", "C11"):
        assert "C10" in CATALOGUE[cert_id].deps


def test_cheap_real_certificates_verify(tables):
    """Weight identities, the free Wronskian, the far-field gap and the w1 tails."""
    config = _config()
    report = run_certificates(["C4", "C5", "C17", "C18"], config, ctx=RunContext(config, tables))
    for cert_id in ("C4", "C5", "C17", "C18"):
        assert report.result(cert_id).status is CertStatus.VERIFIED, report.result(cert_id).message
    assert report.all_requested_verified
    assert report.group_verdicts()[EXISTENCE] == "VERIFIED"
    assert report.group_verdicts()[ZERO_COUNT] == "NOT RUN"
    assert report.result("C18").checks["condition_at_origin"] == "0/1"
    assert set(report.table_checksums) == {"f0", "w0", "w1"}


@pytest.fixture(scope="module")
def real_ctx(tables):
    return RunContext(_config(), tables)


def test_all_verified_verdict_names_every_group():
    """One verified certificate per group renders the full verdict string."""
    catalogue = {
        "C1": CatalogueEntry("C1", "existence piece", EXISTENCE, (), _verified("C1")),
        "C11": CatalogueEntry("C11", "zero-count piece", ZERO_COUNT, (), _verified("C11")),
        "C16": CatalogueEntry("C16", "gauge", GAUGE, (), _verified("C16")),
    }
    report = run_certificates(["C1", "C11", "C16"], _config(), catalogue=catalogue)
    assert report.verdict == (
        "Theorem 1.1 constants: VERIFIED; Lemma 4.1 numerics: VERIFIED; Lemma 4.3 positivity: VERIFIED"
    )
    assert report_emit(report, "text", catalogue=catalogue).startswith(f"Verdict: {report.verdict}")


def test_real_bound_certificates_verify(real_ctx):
    """Residual, nonlinearity factors, Dawson bracket, gauge positivity and c_N."""
    ids = ["C1", "C2", "C3", "C10", "C16", "C19"]
    report = run_certificates(ids, real_ctx.config, ctx=real_ctx)
    for cert_id in ids:
        assert report.result(cert_id).status is CertStatus.VERIFIED, report.result(cert_id).message
    assert report.all_requested_verified
    assert report.group_verdicts()[GAUGE] == "VERIFIED"
    assert report.ledger.entries["c_eps"].provenance == "C10"


def test_green_operator_constant_is_certified(real_ctx):
    """C6 clears its sign prerequisites and C7 closes the chain to c_L = 180."""
    report = run_certificates(["C7"], real_ctx.config, ctx=real_ctx)
    ratio_factors = report.result("C6")
    assert ratio_factors.status is CertStatus.VERIFIED, ratio_factors.message
    assert ratio_factors.checks["v1_bernstein_positive"] == "True"
    signs = [b for b in ratio_factors.bounds if b.expression_id.endswith("-nonneg")]
    assert [b.expression_id for b in signs] == ["C6:v0-nonneg", "C6:dv0-nonneg", "C6:dv0-lower-nonneg", "C6:v1-nonneg"]
    assert all(b.certified for b in signs)

    assert report.result("C7").status is CertStatus.VERIFIED, report.result("C7").message
    assert report.ledger.get("c_L") == 180
    assert report.ledger.entries["c_L"].provenance == "C7"


def _failed_bounds(result: CertificateResult):
    return [b for b in result.bounds if b.status is BoundStatus.FAILED]


def test_perturbation_and_zero_count_failures_carry_witnesses(real_ctx):
    """sup P, Q come out near 0.1 against 2e-5 and sup p3 w0~' near 5.2 against 1.2."""
    report = run_certificates(["C8", "C11"], real_ctx.config, ctx=real_ctx)
    for cert_id in ("C8", "C11"):
        result = report.result(cert_id)
        assert result.status is CertStatus.FAILED
        for bound in _failed_bounds(result):
            assert bound.witness.point is not None
            assert bound.witness.box.contains(bound.witness.point)
            assert bound.claim.violated_by(bound.witness.hull)
    assert {b.expression_id for b in _failed_bounds(report.result("C8"))} <= {"C8:P-weighted", "C8:Q-weighted"}
    assert _failed_bounds(report.result("C8"))
    assert "C11:p3w0'" in {b.expression_id for b in _failed_bounds(report.result("C11"))}
    assert "c_P" not in report.ledger.entries
    assert report.group_verdicts()[ZERO_COUNT] == "INCOMPLETE (blockers: C11)"
