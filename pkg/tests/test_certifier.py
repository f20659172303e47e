import json

import pytest

import oracles
import probes
from conftest import FIXTURES, T
from make_fixtures import DIV_INPUT, DIV_ORDER, DIV_RESULT, MUTATIONS, DIV_CERT
from okb.certifier import check_certificate, check_ground_confluence
from okb.critical import extended_critical_pairs
from okb.engine import OrientLR, ProverState, complete
from okb.formats import Certificate, parse_certificate, parse_problem
from okb.orders import Lpo
from okb.rewriting import Budget, Equation, Rule, symcl


def E(lhs, rhs):
    return Equation(T(lhs), T(rhs))


def test_fixture_certificate_is_accepted(div_cert):
    report = check_certificate(div_cert)
    assert report.accepted, report.summary()
    assert report.summary() == "ACCEPTED"
    assert {"phase": "order", "minimal_constant": "true"} in report.audit


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_mutations_are_rejected(name):
    _, phase, step = MUTATIONS[name]
    report = check_certificate(parse_certificate((FIXTURES / f"{name}.cert.json").read_bytes()))
    assert not report.accepted
    assert (report.phase, report.step) == (phase, step), report.summary()


def test_mutation_suite_covers_every_rule_kind():
    run_kinds = {MUTATIONS[n][0].steps[MUTATIONS[n][2]].kind for n in MUTATIONS if MUTATIONS[n][1] == "run"}
    assert run_kinds == {"deduce", "orient_lr", "orient_rl", "delete", "simplify_left", "simplify_right", "collapse", "compose"}
    assert {p for _, p, _ in MUTATIONS.values()} >= {"run", "order", "final-state", "ground-confluence"}


def test_reports_are_deterministic(div_cert):
    a = check_certificate(div_cert).to_json()
    b = check_certificate(parse_certificate((FIXTURES / "division.cert.json").read_bytes())).to_json()
    assert a == b
    bad = parse_certificate((FIXTURES / "mutated_orient.cert.json").read_bytes())
    assert check_certificate(bad).to_json() == check_certificate(bad).to_json()


def test_reason_strings():
    report = check_certificate(MUTATIONS["mutated_orient"][0])
    assert report.summary().startswith("REJECTED [run] at step 5: orient_rl: order returned Smaller")
    report = check_certificate(MUTATIONS["mutated_order"][0])
    assert report.summary() == "REJECTED [order]: constant 'true' has weight 0 below w0 = 1"
    report = check_certificate(MUTATIONS["mutated_final_state"][0])
    assert "p(0, y) -> div(x, y)" in report.reason


def test_empty_run_rejects_at_first_unresolved_pair():
    report = check_certificate(MUTATIONS["mutated_empty_run"][0])
    assert report.phase == "ground-confluence"
    assert report.reason.startswith("critical pair p(s(q), r) == p(0, y) (peak div(x, y))")


def test_empty_certificate_is_accepted():
    doc = {"input": [], "order": {"kind": "lpo", "precedence": []}, "steps": [], "result": {"equations": [], "rules": []}}
    assert check_certificate(parse_certificate(json.dumps(doc))).accepted


def _small_cert():
    # the overlap of g(b) into f(g(x)) gives f(c) == a, joinable in one step
    eqs = [E("f(g(x))", "a"), E("g(b)", "c"), E("f(c)", "a")]
    steps = [OrientLR(e) for e in eqs]
    return Certificate(eqs, Lpo(("f", "g", "c", "b", "a")), steps, ProverState([], [Rule(e.lhs, e.rhs) for e in eqs]))


def test_budget_exhaustion_is_a_rejection():
    assert check_certificate(_small_cert()).accepted
    report = check_certificate(_small_cert(), Budget(max_terms=2))
    assert (report.verdict, report.phase) == ("REJECTED", "resources")
    assert "more than 2 terms" in report.reason


def test_signature_clash_rejected_in_order_phase():
    cert = Certificate([E("f(a)", "b"), E("f(a,a)", "b")], Lpo(("f", "a", "b")), [], ProverState())
    report = check_certificate(cert)
    assert report.phase == "order" and "arities 1 and 2" in report.reason


def test_missing_precedence_symbol():
    cert = Certificate([E("f(a)", "b")], Lpo(("f", "a")), [], ProverState([E("f(a)", "b")]))
    report = check_certificate(cert)
    assert report.phase == "order" and "'b'" in report.reason


def test_final_state_requires_decreasing_rules():
    result = ProverState(DIV_RESULT.equations, DIV_RESULT.rules[:-1] + (Rule(T("gt(x,y)"), T("gt(s(x),s(y))")),))
    report = check_certificate(Certificate(DIV_INPUT, DIV_ORDER, DIV_CERT.steps, result))
    assert report.phase == "final-state"


# -- ground confluence -----------------------------------------------------

def test_final_system_ground_confluence_audit():
    gc = check_ground_confluence(DIV_RESULT, DIV_ORDER)
    assert gc.ok
    kinds = {e["discharge"] for e in gc.audit}
    assert kinds == {"instance", "joinable"}
    assert any(e["discharge"] == "instance" and e["pair"].startswith("p(") for e in gc.audit)


def test_audit_discharges_hold_under_oracles():
    closed = symcl(DIV_RESULT.equations)
    cps = extended_critical_pairs(closed + [r.as_equation() for r in DIV_RESULT.rules], DIV_ORDER)
    gc = check_ground_confluence(DIV_RESULT, DIV_ORDER)
    assert len(gc.audit) == len(cps)
    gt = oracles.greater_fn(DIV_ORDER)
    rules = [(oracles.to_tuple(r.lhs), oracles.to_tuple(r.rhs)) for r in DIV_RESULT.rules]
    eqs = [(oracles.to_tuple(e.lhs), oracles.to_tuple(e.rhs)) for e in DIV_RESULT.equations]
    consts = ["0", "true"]
    for entry, cp in zip(gc.audit, cps):
        s, t = oracles.to_tuple(cp.lhs), oracles.to_tuple(cp.rhs)
        if entry["discharge"] == "instance":
            assert any(
                (m := oracles.naive_match(oracles.to_tuple(e.lhs), s)) is not None
                and oracles.naive_match(oracles.to_tuple(e.rhs), t, m) is not None
                for e in closed
            )
        else:
            assert oracles.brute_joinable(rules, eqs, gt, consts, s, t)


def test_minus_system_is_ground_confluent():
    rules = [Rule(T("minus(x,0)"), T("x")), Rule(T("minus(0,x)"), T("0"))]
    gc = check_ground_confluence(ProverState([], rules), DIV_ORDER)
    assert gc.ok and [e["discharge"] for e in gc.audit] == ["joinable", "joinable"]


def test_failing_pair_is_reported():
    state = ProverState([E("f(x)", "a"), E("f(x)", "b")])
    gc = check_ground_confluence(state, Lpo(("f", "a", "b")))
    assert not gc.ok
    assert {gc.failing.lhs, gc.failing.rhs} == {T("a"), T("b")}
    assert gc.audit[-1]["discharge"] == "failed"


# -- self-certification and run invariants ---------------------------------

@pytest.mark.parametrize("name, order", [("idempotence", Lpo(("f",))), ("fragment", Lpo(("double", "plus", "s", "0")))])
def test_completion_output_is_accepted(name, order):
    problem = parse_problem((FIXTURES / f"{name}.es").read_text())
    res = complete(problem.equations, order)
    assert res.ok
    cert = Certificate(problem.equations, order, res.steps, res.state)
    assert check_certificate(cert).accepted
    assert probes.conversion_failures(cert.input, cert.steps, order) == []
    assert probes.rules_decrease_everywhere(cert.input, cert.steps, order) == []
