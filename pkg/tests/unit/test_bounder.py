from fractions import Fraction

import pytest

from shared.bounder import (
    BoundCertificate,
    BracketClaim,
    Budget,
    SignClaim,
    Status,
    SupClaim,
    bound_hull,
    certify,
    certify_bracket,
    certify_sign,
    certify_sup,
    claim_from_dict,
)
from shared.exact_arith import Interval
from shared.expr import Chart, Const, NamedExpression, PolyLeaf, Var
from shared.polyrat import Polynomial
from shared.tower import LedgerError

UNIT = Interval(0, 1)


def _expr(body, domain=UNIT, expr_id="test", ledger=0):
    return NamedExpression(expr_id, Chart.Y, body, domain, ledger)


def _parabola_tree():
    """x(1 - x) as an operation tree, enclosed naively."""
    return _expr(Var() * (1 - Var()), expr_id="parabola")


def _parabola_poly():
    return _expr(PolyLeaf(Polynomial.from_coefficients([0, 1, -1])), expr_id="parabola")


def test_bound_hull_naive_and_bernstein():
    assert bound_hull(_parabola_tree(), UNIT) == Interval(0, 1)
    assert bound_hull(_parabola_poly(), UNIT) == Interval(0, Fraction(1, 2))
    assert bound_hull(_expr(Const(Fraction(7, 3))), UNIT) == Interval.point(Fraction(7, 3))


def test_sup_below_the_maximum_fails_with_a_witness():
    """sup x(1-x) is 1/4, so the target 1/5 must fail at a concrete point."""
    certificate = certify_sup(_parabola_tree(), Fraction(1, 5))
    assert certificate.status is Status.FAILED
    witness = certificate.witness
    assert witness.hull.lo > Fraction(1, 5)
    assert witness.point * (1 - witness.point) > Fraction(1, 5)
    assert witness.box.contains(witness.point)


def test_sup_above_the_maximum_is_certified():
    certificate = certify_sup(_parabola_tree(), Fraction(3, 10))
    assert certificate.certified
    assert certificate.hull.hi <= Fraction(3, 10)
    assert certificate.hull.contains(Fraction(1, 4))
    assert certificate.stats.boxes > 1


def test_zero_expression_is_certified_with_one_box():
    certificate = certify_sup(_expr(Const(0)), Fraction(1, 10**6))
    assert certificate.certified
    assert certificate.stats.boxes == 1


def test_sign_claim_failure_near_zero():
    """x - 1 >= 0 fails; the first witness lies in the leftmost sub-box."""
    certificate = certify_sign(_expr(Var() - 1), "ge", 0)
    assert certificate.status is Status.FAILED
    assert certificate.witness.point <= Fraction(1, 8)
    assert certificate.witness.hull.hi < 0


def test_strict_sign_claim():
    assert certify_sign(_expr(Var() + 1), "gt", 0).certified
    assert certify_sign(_expr(Var() - 2), "lt", 0).certified
    assert not certify_sign(_expr(Var()), "gt", 0).certified


def test_bracket_claim_accepted_at_the_root():
    certificate = certify_bracket(_parabola_poly(), 0, Fraction(1, 2))
    assert certificate.certified
    assert certificate.stats.boxes == 1


def test_budget_exhaustion_is_not_a_failure():
    """With one box per sub-box the bisection cannot reach 1/4 < 26/100."""
    certificate = certify_sup(_parabola_tree(), Fraction(26, 100), budget=Budget(max_boxes=8))
    assert certificate.status is Status.BUDGET_EXHAUSTED
    assert certificate.witness is not None
    assert certificate.witness.point is None


def test_undecidable_boxes_exhaust_the_depth():
    """1/x near 0 never encloses; the run ends inconclusive rather than failed."""
    certificate = certify_sign(_expr(Const(1) / Var()), "ge", 0, budget=Budget(max_depth=6))
    assert certificate.status is Status.BUDGET_EXHAUSTED
    assert certificate.witness.hull is None
    assert certificate.stats.max_depth_reached == 6


def test_degenerate_domain():
    point = _expr(Var(), domain=Interval(3, 3))
    assert certify_sign(point, "le", 4).certified
    failed = certify_sign(point, "le", 2)
    assert failed.status is Status.FAILED
    assert failed.witness.point == 3
    assert failed.stats.boxes == 1


def test_domain_override():
    certificate = certify_sup(_parabola_tree(), Fraction(1, 5), domain=Interval(0, Fraction(1, 8)))
    assert certificate.certified
    assert certificate.domain == Interval(0, Fraction(1, 8))


def test_result_is_independent_of_worker_count():
    expr = _parabola_tree()
    single = certify_sup(expr, Fraction(3, 10), workers=1)
    pooled = certify_sup(expr, Fraction(3, 10), workers=4)
    assert single.to_json() == pooled.to_json()
    assert single.trace_digest == pooled.trace_digest


def test_unbounded_ledger_is_refused():
    with pytest.raises(LedgerError):
        certify_sup(_expr(Var(), ledger=1), 1)


def test_certificate_json_round_trip():
    certificate = certify_sup(_parabola_tree(), Fraction(1, 5))
    data = certificate.to_json()
    assert {"id", "claim", "domain", "status", "stats", "precision", "splitting-trace-digest"} <= set(data)
    assert data["domain"] == {"chart": "y", "box": "[0/1, 1/1]"}
    assert BoundCertificate.from_json(data).to_json() == data
    assert "wall_time_seconds" in certificate.to_json(include_timing=True)["stats"]


def test_claim_validation_and_dicts():
    with pytest.raises(ValueError):
        SupClaim(Fraction(0))
    with pytest.raises(ValueError):
        SignClaim("eq", Fraction(0))
    with pytest.raises(ValueError):
        BracketClaim(Fraction(1), Fraction(0))
    for claim in (SupClaim(Fraction(2)), SignClaim("lt", Fraction(-1, 2)), BracketClaim(Fraction(0), Fraction(1, 500))):
        assert claim_from_dict(claim.to_dict()) == claim
    with pytest.raises(ValueError):
        claim_from_dict({"kind": "mystery"})


def test_claim_semantics():
    claim = SupClaim(Fraction(1))
    assert claim.accepts(Interval(-1, 1))
    assert not claim.accepts(Interval(0, 2))
    assert claim.violated_by(Interval(Fraction(3, 2), 2))
    assert not claim.violated_by(Interval(0, 2))
    sign = SignClaim("le", Fraction(-6, 100))
    assert sign.accepts(Interval(-1, Fraction(-7, 100)))
    assert sign.violated_by(Interval(0, 1))


def test_certify_accepts_claim_objects():
    certificate = certify(_parabola_poly(), BracketClaim(Fraction(-1), Fraction(1)))
    assert certificate.certified
    assert certificate.claim.to_dict()["kind"] == "bracket"
