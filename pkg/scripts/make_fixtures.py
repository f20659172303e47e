"""Regenerate the JSON/problem fixtures under fixtures/.

The division example (input equations, KBO, 21-step run, final system) is
written out here in the problem-file term syntax and serialized to the
native certificate format, together with one mutated certificate per
inference rule and per non-run rejection phase.

    python scripts/make_fixtures.py [outdir]
"""

import sys
from dataclasses import replace
from pathlib import Path

from okb.engine import (
    Collapse,
    Compose,
    Deduce,
    Delete,
    OrientLR,
    OrientRL,
    ProverState,
    SimplifyLeft,
    SimplifyRight,
)
from okb.formats import Certificate, format_problem, parse_term, serialize_certificate
from okb.orders import Kbo
from okb.rewriting import Equation, Rule

VARS = ("x", "y", "z", "q", "r", "u", "v")


def t(text):
    return parse_term(text, VARS)


def eq(lhs, rhs):
    return Equation(t(lhs), t(rhs))


def rule(lhs, rhs):
    return Rule(t(lhs), t(rhs))


DIV_INPUT = [
    eq("div(x,y)", "p(0,y)"),
    eq("div(x,y)", "p(s(q),r)"),
    eq("minus(x,0)", "x"),
    eq("minus(0,y)", "0"),
    eq("minus(s(x),s(y))", "minus(x,y)"),
    eq("gt(s(x),s(y))", "gt(x,y)"),
    eq("gt(s(x),0)", "true"),
    eq("le(s(x),s(y))", "le(x,y)"),
    eq("le(0,x)", "true"),
]

DIV_ORDER = Kbo(
    precedence=("gt", "s", "le", "true", "minus", "div", "p", "0"),
    w0=1,
    weights={"0": 2, "div": 1, "true": 1, "s": 1},
)

# Orientation labels are relative to the stored sides of each equation.
DIV_STEPS = [
    SimplifyLeft(eq("div(x,y)", "p(s(q),r)"), t("p(0,y)")),
    Deduce(t("p(s(u),v)"), t("p(0,x)"), t("p(0,y)")),
    Deduce(t("p(0,u)"), t("p(s(x),y)"), t("p(s(q),r)")),
    Deduce(t("gt(s(x),s(y))"), t("gt(x,y)"), t("gt(s(s(x)),s(s(y)))")),
    Deduce(t("gt(s(x),0)"), t("gt(s(s(x)),s(0))"), t("true")),
    OrientLR(eq("le(0,x)", "true")),
    OrientLR(eq("gt(s(s(x)),s(0))", "true")),
    OrientLR(eq("gt(s(x),s(y))", "gt(x,y)")),
    OrientLR(eq("gt(s(x),0)", "true")),
    OrientRL(eq("gt(x,y)", "gt(s(s(x)),s(s(y)))")),
    OrientLR(eq("minus(x,0)", "x")),
    OrientLR(eq("div(x,y)", "p(0,y)")),
    OrientLR(eq("minus(s(x),s(y))", "minus(x,y)")),
    OrientLR(eq("minus(0,x)", "0")),
    OrientLR(eq("le(s(x),s(y))", "le(x,y)")),
    Collapse(rule("gt(s(s(x)),s(s(y)))", "gt(x,y)"), t("gt(s(x),s(y))")),
    SimplifyLeft(eq("gt(s(x),s(y))", "gt(x,y)"), t("gt(x,y)")),
    Collapse(rule("gt(s(s(x)),s(0))", "true"), t("gt(s(x),0)")),
    SimplifyLeft(eq("gt(s(x),0)", "true"), t("true")),
    Delete(eq("gt(x,y)", "gt(x,y)")),
    Delete(eq("true", "true")),
]

DIV_RESULT = ProverState(
    equations=[
        eq("p(s(x),y)", "p(s(q),r)"),
        eq("p(s(q),r)", "p(0,y)"),
        eq("p(0,x)", "p(0,y)"),
    ],
    rules=[
        rule("minus(x,0)", "x"),
        rule("minus(0,x)", "0"),
        rule("minus(s(x),s(y))", "minus(x,y)"),
        rule("div(x,y)", "p(0,y)"),
        rule("le(0,x)", "true"),
        rule("le(s(x),s(y))", "le(x,y)"),
        rule("gt(s(x),0)", "true"),
        rule("gt(s(x),s(y))", "gt(x,y)"),
    ],
)

DIV_CERT = Certificate(DIV_INPUT, DIV_ORDER, DIV_STEPS, DIV_RESULT)


def _with_step(cert, index, step):
    steps = list(cert.steps)
    steps[index] = step
    return replace(cert, steps=steps)


# name -> (certificate, expected phase, expected step index or None)
MUTATIONS = {
    # wrong right-hand target: peak gt(s(x),s(y)) cannot reach gt(s(x),y)
    "mutated_deduce": (_with_step(DIV_CERT, 3, Deduce(t("gt(s(x),s(y))"), t("gt(x,y)"), t("gt(s(x),y)"))), "run", 3),
    # the stored equation is le(0,x) == true, so orient_rl needs true > le(0,x)
    "mutated_orient": (_with_step(DIV_CERT, 5, OrientRL(eq("le(0,x)", "true"))), "run", 5),
    "mutated_orient_lr": (_with_step(DIV_CERT, 9, OrientLR(eq("gt(x,y)", "gt(s(s(x)),s(s(y)))"))), "run", 9),
    "mutated_delete": (_with_step(DIV_CERT, 19, Delete(eq("gt(x,y)", "gt(y,x)"))), "run", 19),
    "mutated_simplify_left": (_with_step(DIV_CERT, 0, SimplifyLeft(eq("div(x,y)", "p(s(q),r)"), t("p(s(0),y)"))), "run", 0),
    "mutated_simplify_right": (_with_step(DIV_CERT, 0, SimplifyRight(eq("div(x,y)", "p(s(q),r)"), t("p(0,r)"))), "run", 0),
    "mutated_collapse": (_with_step(DIV_CERT, 15, Collapse(rule("gt(s(s(x)),s(s(y)))", "gt(x,y)"), t("gt(x,y)"))), "run", 15),
    "mutated_compose": (
        replace(DIV_CERT, steps=list(DIV_CERT.steps[:15]) + [Compose(rule("le(0,x)", "true"), t("le(0,0)"))] + list(DIV_CERT.steps[16:])),
        "run",
        15,
    ),
    "mutated_order": (replace(DIV_CERT, order=Kbo(DIV_ORDER.precedence, 1, {**DIV_ORDER.weights, "true": 0})), "order", None),
    "mutated_final_state": (
        replace(
            DIV_CERT,
            result=ProverState(
                DIV_RESULT.equations,
                [rule("p(0,y)", "div(x,y)") if r == rule("div(x,y)", "p(0,y)") else r for r in DIV_RESULT.rules],
            ),
        ),
        "final-state",
        None,
    ),
    "mutated_empty_run": (replace(DIV_CERT, steps=[], result=ProverState(DIV_INPUT, [])), "ground-confluence", None),
}

IDEMPOTENCE = "(VAR x)\n(EQUATIONS\n  f(f(x)) == f(x)\n)\n"
# three equations, no commutativity axiom
FRAGMENT = "(VAR x y)\n(EQUATIONS\n  plus(0,y) == y\n  plus(s(x),y) == s(plus(x,y))\n  double(x) == plus(x,x)\n)\n"
TRS = "(VAR x y)\n(RULES\n  minus(x,0) -> x\n  minus(0,x) -> 0\n  minus(s(x),s(y)) -> minus(x,y)\n)\n"


def main(outdir="fixtures"):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "division.cert.json").write_bytes(serialize_certificate(DIV_CERT))
    (out / "division.es").write_text(format_problem(DIV_INPUT))
    for name, (cert, _, _) in MUTATIONS.items():
        (out / f"{name}.cert.json").write_bytes(serialize_certificate(cert))
    (out / "idempotence.es").write_text(IDEMPOTENCE)
    (out / "fragment.es").write_text(FRAGMENT)
    (out / "minus.trs").write_text(TRS)
    print(f"wrote fixtures to {out}")


if __name__ == "__main__":
    main(*sys.argv[1:])
