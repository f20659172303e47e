import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, T
from make_fixtures import MUTATIONS, DIV_CERT
from strategies import terms
from okb.engine import STEP_KINDS, OrientLR, OrientRL
from okb.formats import (
    Certificate,
    CertificateFormatError,
    ParseError,
    certificate_to_json,
    format_problem,
    parse_certificate,
    parse_problem,
    parse_term,
    serialize_certificate,
    term_from_json,
    term_to_json,
)
from okb.orders import Lpo
from okb.rewriting import Equation, Rule

EMPTY = {"input": [], "order": {"kind": "lpo", "precedence": []}, "steps": [], "result": {"equations": [], "rules": []}}


def test_parse_small_problem():
    p = parse_problem("(VAR x y)\n(EQUATIONS minus(x,0) == x)")
    assert p.equations == [Equation(T("minus(x,0)"), T("x"))]
    assert p.signature == {"minus": 2, "0": 0}
    assert p.warnings == []


def test_parse_division_problem():
    p = parse_problem((FIXTURES / "division.es").read_text())
    assert len(p.equations) == 9
    assert p.signature == {"div": 2, "p": 2, "minus": 2, "gt": 2, "le": 2, "s": 1, "0": 0, "true": 0}
    assert p.equations == list(DIV_CERT.input)


def test_parse_rules_and_comment():
    p = parse_problem((FIXTURES / "minus.trs").read_text() + "\n(COMMENT anything; goes? here)")
    assert p.rules[0] == Rule(T("minus(x,0)"), T("x")) and len(p.rules) == 3
    assert "anything" in p.comment


def test_undeclared_identifier_lint():
    p = parse_problem("(EQUATIONS f(x) == x)")
    assert p.signature == {"f": 1, "x": 0}
    assert len(p.warnings) == 1 and "'x'" in p.warnings[0]


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("(VAR x)\n(EQUATIONS f(x == x)", 2, 16),
        ("(VAR x)\n(EQUATIONS f(x) = x)", 2, 17),
        ("(VAR x)\n(EQUATIONS f(x) == x f(x,x) == x)", 2, 22),
        ("(VAR x)\n(EQUATIONS f(x) == x", 2, 21),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as exc:
        parse_problem(text)
    assert (exc.value.line, exc.value.column) == (line, column)
    assert str(exc.value).startswith(f"{line}:{column}:")


def test_unknown_section_is_rejected():
    with pytest.raises(ParseError, match="STRATEGY"):
        parse_problem("(STRATEGY foo)")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(terms(), terms()), max_size=4), st.lists(st.tuples(terms(), terms()), max_size=3))
def test_problem_round_trip(eqs, rules):
    eqs = [Equation(a, b) for a, b in eqs]
    rules = [Rule(a, b) for a, b in rules]
    text = format_problem(eqs, rules)
    p = parse_problem(text)
    assert p.equations == eqs and p.rules == rules
    assert format_problem(p.equations, p.rules) == text


@given(terms())
def test_term_json_round_trip(t):
    assert term_from_json(term_to_json(t)) == t


def test_fixture_certificate_loads():
    cert = parse_certificate((FIXTURES / "division.cert.json").read_bytes())
    assert len(cert.steps) == 21
    assert cert == DIV_CERT


@pytest.mark.parametrize("name", ["division", *MUTATIONS])
def test_serialization_is_a_fixpoint(name):
    raw = (FIXTURES / f"{name}.cert.json").read_bytes()
    assert serialize_certificate(parse_certificate(raw)) == raw


def test_empty_certificate():
    cert = parse_certificate(json.dumps(EMPTY))
    assert cert == Certificate([], Lpo(()), [], cert.result)
    assert cert.result.equations == () and cert.result.rules == ()


def test_orient_with_direction_field():
    eq = {"lhs": {"var": "x"}, "rhs": {"fun": "a", "args": []}}
    doc = dict(EMPTY, steps=[{"kind": "orient", "direction": "rl", "equation": eq}, {"kind": "orient", "direction": "lr", "equation": eq}])
    cert = parse_certificate(json.dumps(doc))
    assert [type(s) for s in cert.steps] == [OrientRL, OrientLR]
    with pytest.raises(CertificateFormatError, match=r"\$\.steps\[0\]: missing field 'direction'"):
        parse_certificate(json.dumps(dict(EMPTY, steps=[{"kind": "orient", "equation": eq}])))


@pytest.mark.parametrize(
    "doc, message",
    [
        (dict(EMPTY, extra=1), r"\$: unknown field 'extra'"),
        (dict(EMPTY, order={"kind": "lpo", "precedence": [], "w0": 1}), r"\$\.order: unknown field 'w0'"),
        (dict(EMPTY, order={"kind": "rpo", "precedence": []}), r"\$\.order"),
        (dict(EMPTY, steps=[{"kind": "superpose"}]), r"\$\.steps\[0\]"),
        (dict(EMPTY, input=[{"lhs": {"var": "x"}}]), r"\$\.input\[0\]: missing field 'rhs'"),
        ({k: v for k, v in EMPTY.items() if k != "steps"}, r"missing field 'steps'"),
    ],
)
def test_strict_certificate_parsing(doc, message):
    with pytest.raises(CertificateFormatError, match=message):
        parse_certificate(json.dumps(doc))


def test_invalid_json_is_a_format_error():
    with pytest.raises(CertificateFormatError):
        parse_certificate(b"{not json")


def test_every_step_kind_round_trips():
    cert = DIV_CERT
    kinds = {s.kind for s in cert.steps} | {s.kind for m, _, _ in MUTATIONS.values() for s in m.steps}
    assert kinds == set(STEP_KINDS)
    for m, _, _ in MUTATIONS.values():
        assert parse_certificate(serialize_certificate(m)) == m
    assert certificate_to_json(cert)["steps"][0]["kind"] == "simplify_left"


def test_parse_term_checks_arity_against_signature():
    sig = {"f": 1}
    assert parse_term("f(a)", (), sig) == T("f(a)")
    with pytest.raises(ParseError):
        parse_term("f(a,a)", (), {"f": 1})
