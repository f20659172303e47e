"""Command line interface: ``okb check|complete|normalize|ecp``.

Exit codes: 0 accepted / success, 1 rejected / completion failed,
2 usage, I/O or parse error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .certifier import check_certificate, check_ground_confluence
from .critical import extended_critical_pairs, instance_witness
from .engine import Limits, ProverState, complete
from .formats import (
    Certificate,
    CertificateFormatError,
    ParseError,
    parse_certificate,
    parse_problem,
    parse_term,
    serialize_certificate,
)
from .orders import Kbo, Lpo, OrderConfigError, check_admissible
from .rewriting import Budget, BudgetExceeded, joinable, normal_forms, symcl
from .terms import SignatureError, signature_of

EXIT_OK, EXIT_REJECT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_precedence(text: str) -> List[str]:
    sep = "," if "," in text else ">"
    prec = [f.strip() for f in text.split(sep)]
    if not all(prec):
        raise UsageError(f"malformed precedence {text!r}")
    return prec


def _order_from_args(args):
    if args.order is None or args.prec is None:
        raise UsageError("--order and --prec are required")
    prec = _parse_precedence(args.prec)
    if args.order == "lpo":
        return Lpo(prec)
    weights = {}
    for item in args.weight or []:
        name, _, value = item.partition("=")
        try:
            weights[name] = int(value)
        except ValueError:
            raise UsageError(f"malformed --weight {item!r}, expected NAME=N") from None
    return Kbo(prec, args.w0, weights)


def _budget(args) -> Budget:
    return Budget.from_env(getattr(args, "max_terms", None), getattr(args, "max_term_size", None))


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def cmd_check(args) -> int:
    cert = parse_certificate(_read(args.certificate))
    report = check_certificate(cert, _budget(args))
    if args.json_report:
        print(report.to_json())
    else:
        print(report.summary())
    return EXIT_OK if report.accepted else EXIT_REJECT


def cmd_complete(args) -> int:
    problem = parse_problem(_read(args.problem))
    for w in problem.warnings:
        print(f"warning: {w}", file=sys.stderr)
    order = _order_from_args(args)
    problems = check_admissible(order, problem.signature)
    if problems:
        raise UsageError("; ".join(problems))
    limits = Limits(max_steps=args.max_steps, budget=_budget(args))
    result = complete(problem.equations, order, limits)
    cert = Certificate(problem.equations, order, result.steps, result.state)
    out = Path(args.output) if args.output else _default_output(Path(args.problem))
    if result.ok:
        report = check_certificate(cert, _budget(args))
        out.write_bytes(serialize_certificate(cert))
        print(f"wrote {out} ({len(result.steps)} steps, {len(result.state.rules)} rules, {len(result.state.equations)} equations)")
        print(report.summary())
        return EXIT_OK if report.accepted else EXIT_REJECT
    partial = out.with_name(out.name.replace(".cert.json", "") + ".partial.cert.json")
    partial.write_bytes(serialize_certificate(cert))
    print(f"completion failed: {result.reason}; partial run ({len(result.steps)} steps) written to {partial}")
    return EXIT_REJECT


def _default_output(problem: Path) -> Path:
    return problem.with_name(problem.stem + ".cert.json")


def _load_system(args):
    path = args.source
    if path.endswith(".json"):
        cert = parse_certificate(_read(path))
        sig = signature_of(t for f in (*cert.result.equations, *cert.result.rules) for t in (f.lhs, f.rhs))
        return cert.result, cert.order, sig, None
    problem = parse_problem(_read(path))
    for w in problem.warnings:
        print(f"warning: {w}", file=sys.stderr)
    state = ProverState(problem.equations, problem.rules)
    if args.order is None and not problem.equations:
        order = Lpo(sorted(problem.signature))  # rules rewrite unconditionally
    else:
        order = _order_from_args(args)
    return state, order, problem.signature, problem


def cmd_normalize(args) -> int:
    state, order, sig, problem = _load_system(args)
    variables = problem.variables if problem else []
    term = parse_term(args.term, variables, sig)
    constants = [f for f, n in sig.items() if n == 0]
    for nf in sorted(normal_forms(state.system(order, constants), term, _budget(args)), key=str):
        print(nf)
    return EXIT_OK


def cmd_ecp(args) -> int:
    state, order, sig, _ = _load_system(args)
    closed = symcl(state.equations)
    constants = [f for f, n in sig.items() if n == 0]
    system = state.system(order, constants)
    failed = False
    for k, cp in enumerate(extended_critical_pairs(closed + [r.as_equation() for r in state.rules], order)):
        hit = instance_witness(cp, closed)
        if hit is not None:
            status = f"instance of {closed[hit[0]]}"
        else:
            try:
                status = "joinable" if joinable(system, cp.lhs, cp.rhs, _budget(args)) else "NOT DISCHARGED"
            except BudgetExceeded:
                status = "budget exceeded"
        failed |= status in ("NOT DISCHARGED", "budget exceeded")
        print(f"{k}: {cp}   [peak {cp.overlap.peak}]  {status}")
    return EXIT_REJECT if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="okb", description="Ordered completion toolkit and certificate checker.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def budget_flags(p):
        p.add_argument("--max-terms", type=int, help="terms explored per joinability query (default 10000 or $OKB_BUDGET_TERMS)")
        p.add_argument("--max-term-size", type=int, help="largest term size explored (default 200)")

    def order_flags(p, required=False):
        p.add_argument("--order", choices=["kbo", "lpo"], required=required)
        p.add_argument("--prec", required=required, help='precedence, greatest first: "f>g>h" or "f,g,h"')
        p.add_argument("--w0", type=int, default=1)
        p.add_argument("--weight", action="append", metavar="NAME=N", help="KBO symbol weight (repeatable)")

    p = sub.add_parser("check", help="check a certificate")
    p.add_argument("certificate")
    p.add_argument("--json-report", action="store_true")
    budget_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("complete", help="run naive ordered completion and write a certificate")
    p.add_argument("problem")
    order_flags(p, required=True)
    p.add_argument("--max-steps", type=int, default=Limits.max_steps)
    p.add_argument("-o", "--output")
    budget_flags(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("normalize", help="ordered normal forms of a term")
    p.add_argument("source", help="certificate (.json) or problem file (.trs/.es)")
    p.add_argument("term")
    order_flags(p)
    budget_flags(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("ecp", help="list extended critical pairs and how each is discharged")
    p.add_argument("source", help="certificate (.json) or problem file (.es/.trs)")
    order_flags(p)
    budget_flags(p)
    p.set_defaults(func=cmd_ecp)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (UsageError, ParseError, CertificateFormatError, SignatureError, OrderConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_REJECT


if __name__ == "__main__":
    sys.exit(main())
