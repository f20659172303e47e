"""Certificate checking for ordered completion proofs.

Phases run in a fixed order and the first failure decides the report:
order, run, final-state (including R in >), ground-confluence. A budget
blow-up in the last phase is reported as ``resources``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .critical import CriticalPair, extended_critical_pairs, instance_witness
from .engine import ProverState, StepViolation, describe, non_decreasing_rules, replay
from .formats import Certificate
from .orders import NoConstantError, OrderConfigError, ReductionOrder, check_admissible, minimal_constant
from .rewriting import Budget, BudgetExceeded, Equation, joinable, symcl
from .terms import SignatureError, Term, signature_of, variant_of

ACCEPT = "ACCEPTED"
REJECT = "REJECTED"


@dataclass
class CheckReport:
    verdict: str
    phase: Optional[str] = None
    step: Optional[int] = None
    reason: str = ""
    audit: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.verdict == ACCEPT

    def summary(self) -> str:
        if self.accepted:
            return ACCEPT
        where = f" at step {self.step}" if self.step is not None else ""
        return f"{REJECT} [{self.phase}]{where}: {self.reason}"

    def to_json(self) -> str:
        doc = {"verdict": self.verdict, "phase": self.phase, "step": self.step, "reason": self.reason, "audit": self.audit}
        return json.dumps(doc, indent=1, sort_keys=True)


def _reject(phase: str, reason: str, step: Optional[int] = None, audit=None) -> CheckReport:
    return CheckReport(REJECT, phase, step, reason, audit or [])


def certificate_signature(cert: Certificate) -> Dict[str, int]:
    terms: List[Term] = []
    for e in cert.input:
        terms += [e.lhs, e.rhs]
    for step in cert.steps:
        for value in vars(step).values():
            if hasattr(value, "lhs"):
                terms += [value.lhs, value.rhs]
            else:
                terms.append(value)
    for f in (*cert.result.equations, *cert.result.rules):
        terms += [f.lhs, f.rhs]
    return signature_of(terms)


@dataclass
class GroundConfluenceResult:
    ok: bool
    failing: Optional[CriticalPair] = None
    audit: List[Dict[str, Any]] = field(default_factory=list)


def check_ground_confluence(
    state: ProverState,
    order: ReductionOrder,
    budget: Budget = Budget(),
    constants: Sequence[str] = (),
) -> GroundConfluenceResult:
    """Every extended critical pair of ``symcl(E) u R`` is S-joinable or an instance of ``symcl(E)``.

    Raises ``BudgetExceeded`` when a joinability query runs out of budget.
    """
    closed = symcl(state.equations)
    cps = extended_critical_pairs(closed + [r.as_equation() for r in state.rules], order)
    system = state.system(order, constants)
    audit = []
    for k, cp in enumerate(cps):
        entry = {"index": k, "pair": str(cp), "peak": str(cp.overlap.peak)}
        hit = instance_witness(cp, closed)
        if hit is not None:
            entry.update(discharge="instance", equation=str(closed[hit[0]]))
        elif joinable(system, cp.lhs, cp.rhs, budget):
            entry["discharge"] = "joinable"
        else:
            entry["discharge"] = "failed"
            audit.append(entry)
            return GroundConfluenceResult(False, cp, audit)
        audit.append(entry)
    return GroundConfluenceResult(True, None, audit)


def _match_multiset(claimed: Sequence, actual: Sequence, same) -> Optional[Tuple[str, Any]]:
    remaining = list(actual)
    for c in claimed:
        for i, a in enumerate(remaining):
            if same(c, a):
                del remaining[i]
                break
        else:
            return "claimed", c
    if remaining:
        return "derived", remaining[0]
    return None


def _same_rule(a, b) -> bool:
    return variant_of((a.lhs, a.rhs), (b.lhs, b.rhs))


def _same_equation(a: Equation, b: Equation) -> bool:
    return variant_of((a.lhs, a.rhs), (b.lhs, b.rhs)) or variant_of((a.lhs, a.rhs), (b.rhs, b.lhs))


def check_certificate(cert: Certificate, budget: Budget = Budget()) -> CheckReport:
    audit: List[Dict[str, Any]] = []

    # order
    try:
        sig = certificate_signature(cert)
    except SignatureError as exc:
        return _reject("order", str(exc))
    problems = check_admissible(cert.order, sig)
    if problems:
        return _reject("order", "; ".join(problems))
    try:
        c = minimal_constant(cert.order, sig)
        audit.append({"phase": "order", "minimal_constant": c})
    except NoConstantError:
        # no ground terms at all: ground completeness holds vacuously
        audit.append({"phase": "order", "minimal_constant": None})
    constants = sorted(f for f, n in sig.items() if n == 0)

    # run
    states: List[Dict[str, Any]] = []

    def on_state(i, state):
        bad = non_decreasing_rules(state, cert.order)
        states.append({"phase": "run", "after_step": i, "rules": len(state.rules), "equations": len(state.equations), "rules_decreasing": not bad})
        if bad:
            raise StepViolation(cert.steps[i].kind if i >= 0 else "input", f"rule {bad[0]} is not decreasing", i)

    try:
        final = replay(cert.input, cert.steps, cert.order, constants, on_state)
    except StepViolation as exc:
        step = cert.steps[exc.index] if exc.index is not None and exc.index < len(cert.steps) else None
        reason = f"{exc.kind}: {exc.condition}" + ("" if step is None else f" (in: {describe(step)})")
        return _reject("run", reason, exc.index, audit + states)
    except OrderConfigError as exc:
        return _reject("order", str(exc))
    audit += states

    # final state
    mismatch = _match_multiset(cert.result.rules, final.rules, _same_rule)
    if mismatch:
        side, fact = mismatch
        what = "claimed rule has no variant among derived rules" if side == "claimed" else "derived rule is missing from the claimed result"
        return _reject("final-state", f"{what}: {fact}", audit=audit)
    mismatch = _match_multiset(cert.result.equations, final.equations, _same_equation)
    if mismatch:
        side, fact = mismatch
        what = "claimed equation has no variant among derived equations" if side == "claimed" else "derived equation is missing from the claimed result"
        return _reject("final-state", f"{what}: {fact}", audit=audit)
    bad = non_decreasing_rules(cert.result, cert.order)
    if bad:
        return _reject("final-state", f"claimed rule {bad[0]} is not decreasing in the order", audit=audit)

    # ground confluence
    try:
        gc = check_ground_confluence(cert.result, cert.order, budget, constants)
    except BudgetExceeded as exc:
        return _reject("resources", f"joinability check exceeded its budget: {exc}", audit=audit)
    audit += [dict(e, phase="ground-confluence") for e in gc.audit]
    if not gc.ok:
        cp = gc.failing
        return _reject(
            "ground-confluence",
            f"critical pair {cp} (peak {cp.overlap.peak}) is neither joinable nor an instance of an equation",
            audit=audit,
        )
    return CheckReport(ACCEPT, audit=audit)
