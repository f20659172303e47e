"""Problem files (TPDB-style s-expressions) and JSON certificates.

Problem grammar::

    (VAR x y ...)
    (EQUATIONS s == t  ...)      # or (RULES l -> r ...)
    (COMMENT anything balanced)

Certificate terms are ``{"var": name}`` or ``{"fun": name, "args": [...]}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from .engine import (
    STEP_KINDS,
    Collapse,
    Compose,
    Deduce,
    Delete,
    InferenceStep,
    OrientLR,
    OrientRL,
    ProverState,
    SimplifyLeft,
    SimplifyRight,
)
from .orders import Kbo, Lpo, ReductionOrder
from .rewriting import Equation, Rule
from .terms import Fun, Term, Var, variables

NAME = re.compile(r"^(?:(?!==|->)[A-Za-z0-9_+*/<>=.\-])+$")
_TOKEN = re.compile(r"\s+|(?P<op>==|->)|(?P<punct>[(),])|(?P<ident>(?:(?!==|->)[A-Za-z0-9_+*/<>=.\-])+)|(?P<other>\S)")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"{line}:{column}: " if line else ""
        super().__init__(f"{where}{message}")


class CertificateFormatError(ValueError):
    """Schema violation; the message starts with the JSON path."""


# -- problem files ---------------------------------------------------------

@dataclass
class ProblemFile:
    variables: List[str]
    equations: List[Equation]
    rules: List[Rule]
    signature: Dict[str, int]
    warnings: List[str] = field(default_factory=list)
    comment: Optional[str] = None


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> List[_Tok]:
    toks = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        kind = m.lastgroup
        if kind is not None:
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    return toks


class _TermParser:
    def __init__(self, toks: List[_Tok], variables: Sequence[str], signature: Dict[str, int], warnings: List[str], lint_constants: bool):
        self.toks = toks
        self.i = 0
        self.vars = set(variables)
        self.sig = signature
        self.warnings = warnings
        self.lint_constants = lint_constants

    def peek(self) -> Optional[_Tok]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self, expected: str = "token") -> _Tok:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else _Tok("", "", 1, 0)
            raise ParseError(f"unexpected end of input, expected {expected}", last.line, last.col + len(last.text))
        self.i += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next(repr(text))
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.col)
        return tok

    def term(self) -> Term:
        tok = self.next("a term")
        if tok.kind == "other":
            raise ParseError(f"unexpected character {tok.text!r}", tok.line, tok.col)
        if tok.kind != "ident":
            raise ParseError(f"expected an identifier, found {tok.text!r}", tok.line, tok.col)
        name = tok.text
        nxt = self.peek()
        if nxt is not None and nxt.text == "(":
            if name in self.vars:
                raise ParseError(f"variable {name!r} applied to arguments", tok.line, tok.col)
            self.next()
            args = [self.term()]
            while self.peek() is not None and self.peek().text == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            return self._fun(name, args, tok)
        if name in self.vars:
            return Var(name)
        if self.lint_constants and name not in self.sig:
            self.warnings.append(f"{tok.line}:{tok.col}: {name!r} is not declared in VAR and is treated as a constant")
        return self._fun(name, [], tok)

    def _fun(self, name, args, tok) -> Term:
        known = self.sig.setdefault(name, len(args))
        if known != len(args):
            raise ParseError(f"symbol {name!r} used with arity {len(args)}, earlier with arity {known}", tok.line, tok.col)
        return Fun(name, args)


def parse_problem(text: Union[str, bytes]) -> ProblemFile:
    """Parse a ``.es``/``.trs`` problem file."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    toks = _tokenize(text)
    declared: List[str] = []
    equations: List[Equation] = []
    rules: List[Rule] = []
    sig: Dict[str, int] = {}
    warnings: List[str] = []
    comment = None
    # first pass: VAR declarations may follow their use
    i = 0
    while i + 1 < len(toks):
        if toks[i].text == "(" and toks[i + 1].text == "VAR":
            j = i + 2
            while j < len(toks) and toks[j].text != ")":
                if toks[j].kind != "ident":
                    raise ParseError(f"expected a variable name, found {toks[j].text!r}", toks[j].line, toks[j].col)
                declared.append(toks[j].text)
                j += 1
            i = j
        i += 1
    p = _TermParser(toks, declared, sig, warnings, lint_constants=not declared)
    while p.peek() is not None:
        p.expect("(")
        head = p.next("a section keyword")
        if head.text == "VAR":
            while p.peek() is not None and p.peek().text != ")":
                p.next()
        elif head.text in ("EQUATIONS", "RULES"):
            op = "==" if head.text == "EQUATIONS" else "->"
            while p.peek() is not None and p.peek().text != ")":
                lhs = p.term()
                p.expect(op)
                rhs = p.term()
                if op == "==":
                    equations.append(Equation(lhs, rhs))
                else:
                    rules.append(Rule(lhs, rhs))
        elif head.text == "COMMENT":
            depth, parts = 1, []
            while depth:
                tok = p.next("')'")
                depth += {"(": 1, ")": -1}.get(tok.text, 0)
                if depth:
                    parts.append(tok.text)
            comment = " ".join(parts)
            continue
        else:
            raise ParseError(f"unknown section {head.text!r}", head.line, head.col)
        p.expect(")")
    for v in declared:
        if v in sig:
            raise ParseError(f"{v!r} is declared as a variable and used as a function symbol")
    return ProblemFile(declared, equations, rules, sig, warnings, comment)


def parse_term(text: str, variables: Sequence[str] = (), signature: Optional[Dict[str, int]] = None) -> Term:
    """Parse a single term; identifiers in ``variables`` are variables."""
    sig = dict(signature or {})
    p = _TermParser(_tokenize(text), variables, sig, [], lint_constants=False)
    t = p.term()
    tok = p.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return t


def format_problem(equations: Sequence[Equation] = (), rules: Sequence[Rule] = ()) -> str:
    names = {}
    for pair in (*equations, *rules):
        for side in (pair.lhs, pair.rhs):
            for v in variables(side):
                names.setdefault(v.name, None)
    out = [f"(VAR {' '.join(names)})"]
    if equations:
        out.append("(EQUATIONS\n" + "".join(f"  {e.lhs} == {e.rhs}\n" for e in equations) + ")")
    if rules:
        out.append("(RULES\n" + "".join(f"  {r.lhs} -> {r.rhs}\n" for r in rules) + ")")
    return "\n".join(out) + "\n"


# -- certificate JSON ------------------------------------------------------

def term_to_json(t: Term) -> Dict[str, Any]:
    if isinstance(t, Var):
        return {"var": t.name}
    return {"fun": t.name, "args": [term_to_json(a) for a in t.args]}


def _pair_to_json(p) -> Dict[str, Any]:
    return {"lhs": term_to_json(p.lhs), "rhs": term_to_json(p.rhs)}


def order_to_json(order: ReductionOrder) -> Dict[str, Any]:
    if isinstance(order, Kbo):
        return {"kind": "kbo", "precedence": list(order.precedence), "w0": order.w0, "weights": dict(order.weights)}
    return {"kind": "lpo", "precedence": list(order.precedence)}


def step_to_json(step: InferenceStep) -> Dict[str, Any]:
    out: Dict[str, Any] = {"kind": step.kind}
    if isinstance(step, Deduce):
        out.update(peak=term_to_json(step.peak), left=term_to_json(step.left), right=term_to_json(step.right))
    elif isinstance(step, (OrientLR, OrientRL, Delete)):
        out["equation"] = _pair_to_json(step.equation)
    elif isinstance(step, (SimplifyLeft, SimplifyRight)):
        out.update(equation=_pair_to_json(step.equation), result=term_to_json(step.result))
    else:
        out.update(rule=_pair_to_json(step.rule), result=term_to_json(step.result))
    return out


@dataclass(frozen=True)
class Certificate:
    input: Tuple[Equation, ...]
    order: ReductionOrder
    steps: Tuple[InferenceStep, ...]
    result: ProverState

    def __post_init__(self):
        object.__setattr__(self, "input", tuple(self.input))
        object.__setattr__(self, "steps", tuple(self.steps))


def certificate_to_json(cert: Certificate) -> Dict[str, Any]:
    return {
        "input": [_pair_to_json(e) for e in cert.input],
        "order": order_to_json(cert.order),
        "steps": [step_to_json(s) for s in cert.steps],
        "result": {
            "equations": [_pair_to_json(e) for e in cert.result.equations],
            "rules": [_pair_to_json(r) for r in cert.result.rules],
        },
    }


def serialize_certificate(cert: Certificate) -> bytes:
    return (json.dumps(certificate_to_json(cert), indent=1) + "\n").encode("utf-8")


def _fail(path: str, msg: str):
    raise CertificateFormatError(f"{path}: {msg}")


def _obj(data, path: str, required: Sequence[str], optional: Sequence[str] = ()) -> Dict[str, Any]:
    if not isinstance(data, dict):
        _fail(path, f"expected an object, got {type(data).__name__}")
    for key in required:
        if key not in data:
            _fail(path, f"missing field {key!r}")
    allowed = set(required) | set(optional)
    for key in data:
        if key not in allowed:
            _fail(path, f"unknown field {key!r}")
    return data


def _list(data, path: str) -> list:
    if not isinstance(data, list):
        _fail(path, f"expected a list, got {type(data).__name__}")
    return data


def _name(data, path: str) -> str:
    if not isinstance(data, str) or not NAME.match(data):
        _fail(path, f"invalid symbol or variable name {data!r}")
    return data


def term_from_json(data, path: str = "term") -> Term:
    if isinstance(data, dict) and "var" in data:
        _obj(data, path, ["var"])
        return Var(_name(data["var"], f"{path}.var"))
    d = _obj(data, path, ["fun"], ["args"])
    name = _name(d["fun"], f"{path}.fun")
    args = _list(d.get("args", []), f"{path}.args")
    return Fun(name, [term_from_json(a, f"{path}.args[{i}]") for i, a in enumerate(args)])


def _equation(data, path) -> Equation:
    d = _obj(data, path, ["lhs", "rhs"])
    return Equation(term_from_json(d["lhs"], f"{path}.lhs"), term_from_json(d["rhs"], f"{path}.rhs"))


def _rule(data, path) -> Rule:
    e = _equation(data, path)
    return Rule(e.lhs, e.rhs)


def order_from_json(data, path: str = "order") -> ReductionOrder:
    if not isinstance(data, dict) or "kind" not in data:
        _fail(path, "missing field 'kind'")
    kind = data["kind"]
    if kind == "lpo":
        d = _obj(data, path, ["kind", "precedence"])
        return Lpo(tuple(_name(f, f"{path}.precedence[{i}]") for i, f in enumerate(_list(d["precedence"], f"{path}.precedence"))))
    if kind == "kbo":
        d = _obj(data, path, ["kind", "precedence", "w0"], ["weights"])
        prec = tuple(_name(f, f"{path}.precedence[{i}]") for i, f in enumerate(_list(d["precedence"], f"{path}.precedence")))
        w0 = d["w0"]
        if not isinstance(w0, int) or isinstance(w0, bool):
            _fail(f"{path}.w0", f"expected an integer, got {w0!r}")
        weights = d.get("weights", {})
        if not isinstance(weights, dict):
            _fail(f"{path}.weights", "expected an object")
        for f, w in weights.items():
            _name(f, f"{path}.weights")
            if not isinstance(w, int) or isinstance(w, bool):
                _fail(f"{path}.weights.{f}", f"expected an integer, got {w!r}")
        return Kbo(prec, w0, weights)
    _fail(f"{path}.kind", f"unknown order kind {kind!r} (expected 'kbo' or 'lpo')")


def step_from_json(data, path: str) -> InferenceStep:
    if not isinstance(data, dict) or "kind" not in data:
        _fail(path, "missing field 'kind'")
    kind = data["kind"]
    if kind == "orient":
        d = _obj(data, path, ["kind", "direction", "equation"])
        if d["direction"] not in ("lr", "rl"):
            _fail(f"{path}.direction", f"expected 'lr' or 'rl', got {d['direction']!r}")
        kind = f"orient_{d['direction']}"
        data = {"kind": kind, "equation": d["equation"]}
    if kind not in STEP_KINDS:
        _fail(f"{path}.kind", f"unknown inference rule {kind!r}")
    if kind == "deduce":
        d = _obj(data, path, ["kind", "peak", "left", "right"])
        return Deduce(*(term_from_json(d[k], f"{path}.{k}") for k in ("peak", "left", "right")))
    if kind in ("orient_lr", "orient_rl", "delete"):
        d = _obj(data, path, ["kind", "equation"])
        return STEP_KINDS[kind](_equation(d["equation"], f"{path}.equation"))
    if kind in ("simplify_left", "simplify_right"):
        d = _obj(data, path, ["kind", "equation", "result"])
        return STEP_KINDS[kind](_equation(d["equation"], f"{path}.equation"), term_from_json(d["result"], f"{path}.result"))
    d = _obj(data, path, ["kind", "rule", "result"])
    return STEP_KINDS[kind](_rule(d["rule"], f"{path}.rule"), term_from_json(d["result"], f"{path}.result"))


def certificate_from_json(data) -> Certificate:
    d = _obj(data, "$", ["input", "order", "steps", "result"])
    res = _obj(d["result"], "$.result", ["equations", "rules"])
    return Certificate(
        input=[_equation(e, f"$.input[{i}]") for i, e in enumerate(_list(d["input"], "$.input"))],
        order=order_from_json(d["order"], "$.order"),
        steps=[step_from_json(s, f"$.steps[{i}]") for i, s in enumerate(_list(d["steps"], "$.steps"))],
        result=ProverState(
            [_equation(e, f"$.result.equations[{i}]") for i, e in enumerate(_list(res["equations"], "$.result.equations"))],
            [_rule(r, f"$.result.rules[{i}]") for i, r in enumerate(_list(res["rules"], "$.result.rules"))],
        ),
    )


def parse_certificate(text: Union[str, bytes]) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(f"$: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return certificate_from_json(data)
