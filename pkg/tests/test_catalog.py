from fractions import Fraction

import pytest

from dlvsym import catalog
from dlvsym.catalog import (
    PHI,
    CaseNotFound,
    Restriction,
    RestrictionViolated,
    TABLE1,
    TABLE2,
    entries,
    entry,
    export_listing,
    instantiate,
    sample_params,
    verify_entry,
)
from dlvsym.expr import Expr, param
from dlvsym.parser import parse


def test_row_counts_and_keys():
    assert len(TABLE1) == 8 and len(TABLE2) == 9
    assert [e.key for e in entries(2)][:2] == ["T2.1", "T2.2"]
    assert entry(1, 8).key == "T1.8"
    assert len(entries()) == 17


@pytest.mark.parametrize("table, case", [(3, None), (1, 9), (2, 0)])
def test_unknown_case(table, case):
    with pytest.raises(CaseNotFound):
        entries(table, case)
    with pytest.raises(KeyError):
        entries(table, case)


# phi_k' + s*phi_k = r, with s the selector, for both branches
PHI_ODE = {1: ("a2", "beta1"), 2: ("a2", "beta1"), 3: ("a1", "beta1"), 4: ("a", "1")}


@pytest.mark.parametrize("k", sorted(PHI))
def test_phi_branches_solve_their_first_order_equation(k):
    sel, rhs = PHI_ODE[k]
    branch = PHI[k]
    assert branch.selector == sel
    s = Expr.from_atom(param(sel))
    nonzero = parse(branch.if_nonzero)
    assert nonzero.diff("t") + s * nonzero == parse(rhs)
    zero = parse(branch.if_zero)
    assert zero.diff("t") == parse(rhs)
    d0, d1 = branch.derivative_identity()
    assert (d0, d1) == (zero.diff("t"), nonzero.diff("t"))


def test_phi_branch_selection():
    b = PHI[4]
    assert b.choose({"a": Expr.const(0)}) == b.if_zero
    assert b.choose({"a": Expr.const(2)}) == b.if_nonzero
    assert b.choose({}) == b.if_nonzero


def test_restriction_solving():
    r = Restriction("(lambda2 - lambda3)*a1 - (lambda1 - lambda3)*a2 + (lambda1 - lambda2)*a3",
                    "==", "a3")
    name, value = r.solved()
    assert name == "a3"
    binds = {"a3": value}
    assert r.holds(binds)
    assert not Restriction("a1 - a2").holds({"a1": Expr.const(1), "a2": Expr.const(1)})


def test_solved_restriction_is_applied_on_instantiation():
    e = entry(2, 4)
    system, _ = instantiate(e)
    l1, l2, l3 = (parse(f"lambda{k}") for k in (1, 2, 3))
    a1, a2 = parse("a1"), parse("a2")
    assert system.a[2] == ((l1 - l3) * a2 - (l2 - l3) * a1) / (l1 - l2)


def test_violated_restriction():
    with pytest.raises(RestrictionViolated):
        instantiate(entry(2, 1), {"a1": 1, "a2": 1})


def test_operator_text_and_build():
    e = entry(2, 9)
    op = [o for o in e.operators if o.phis()][0]
    assert any("phi" in c for c in op.text())
    assert not any("phi" in c for c in op.text({"a1": Expr.const(1), "a2": Expr.const(0)}))
    q = op.build({})
    assert q.xi0 == 1


def test_first_table_operators_have_no_time_part():
    for e in TABLE1:
        _, ops = instantiate(e)
        for label, q in ops:
            if label != "D":
                assert q.xi0 == 0 and q.xi1 == 0, (e.key, label)


def test_sampling_is_deterministic_and_admissible():
    for e in TABLE1 + TABLE2:
        for vi in range(len(e.variants)):
            a = sample_params(e, 3, vi)
            assert a == sample_params(e, 3, vi)
            for name, value in e.variants[vi]:
                assert a[name] == Fraction(value)
            system, _ = instantiate(e, a)
            lams = [l.as_fraction() for l in system.lambdas]
            assert all(l > 0 for l in lams)
    e = entry(2, 5)
    assert sample_params(e, 0) != sample_params(e, 1)


def test_verify_entry_records():
    report = verify_entry(entry(2, 1))
    kinds = {(r.operator, r.kind, r.pivot) for r in report.records}
    assert ("Q1_1", "Lie", None) in kinds
    assert ("Q1_1", "FirstType", "any") in kinds
    assert {p for _, k, p in kinds if k == "FirstType"} == {"u", "v", "w", "any"}
    lie = [r for r in report.records if r.kind == "Lie"]
    assert all(r.verdict == "fail" and r.witness for r in lie)
    assert report.ok
    s = report.summary()
    assert s["failed"] == 0 and s["total"] == s["passed"] == 4


def test_hierarchy_uses_time_translation_for_pure_dependent_operators():
    report = verify_entry(entry(1, 4), hierarchy=True)
    labels = {r.operator for r in report.records if r.kind != "Lie"}
    assert labels == {"d_t + exp(-a2*t)*v*d_w", "d_t + w*d_w"}
    assert report.ok


def test_mismatch_is_reported():
    # a Lie symmetry placed in the conditional table would fail its expectation
    bogus = catalog.CatalogEntry(2, 99, ("lambda1", "lambda2", "lambda3"),
                                 (("a1", "b1", "c1", "d1"), ("a2", "b2", "c2", "d2"),
                                  ("a3", "b3", "c3", "d3")),
                                 (catalog.OperatorSpec("d_t", ("1", "0", "0", "0", "0")),))
    report = verify_entry(bogus)
    assert not report.ok
    assert [r.kind for r in report.mismatches] == ["Lie"]


def test_listing():
    text = export_listing()
    for e in TABLE1 + TABLE2:
        assert f"[table {e.table} case {e.case_id}]" in text
    assert text == export_listing()
    assert "operator Q5_1" in text
