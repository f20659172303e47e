"""The ordered completion inference system as an executable state machine.

``apply_step``/``replay`` validate certificate runs; ``complete`` is a
naive, deterministic completion loop that records the run it executes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, ClassVar, Iterable, List, Optional, Sequence, Tuple, Union

from .critical import extended_critical_pairs, is_instance_of
from .orders import Diagnosis, ReductionOrder
from .rewriting import (
    Budget,
    BudgetExceeded,
    Equation,
    RewriteSystem,
    Rule,
    find_step,
    joinable,
    ordered_successors,
    symcl,
)
from .terms import Term, apply_subst, canonical_renaming, signature_of, variant_of

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProverState:
    equations: Tuple[Equation, ...] = ()
    rules: Tuple[Rule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "equations", tuple(self.equations))
        object.__setattr__(self, "rules", tuple(self.rules))

    def system(self, order: ReductionOrder, constants: Iterable[str] = ()) -> RewriteSystem:
        return RewriteSystem(self.rules, self.equations, order, constants)


# -- inference steps -------------------------------------------------------

@dataclass(frozen=True)
class Deduce:
    peak: Term
    left: Term
    right: Term
    kind: ClassVar[str] = "deduce"


@dataclass(frozen=True)
class OrientLR:
    equation: Equation
    kind: ClassVar[str] = "orient_lr"


@dataclass(frozen=True)
class OrientRL:
    equation: Equation
    kind: ClassVar[str] = "orient_rl"


@dataclass(frozen=True)
class Delete:
    equation: Equation
    kind: ClassVar[str] = "delete"


@dataclass(frozen=True)
class Compose:
    rule: Rule
    result: Term
    kind: ClassVar[str] = "compose"


@dataclass(frozen=True)
class SimplifyLeft:
    equation: Equation
    result: Term
    kind: ClassVar[str] = "simplify_left"


@dataclass(frozen=True)
class SimplifyRight:
    equation: Equation
    result: Term
    kind: ClassVar[str] = "simplify_right"


@dataclass(frozen=True)
class Collapse:
    rule: Rule
    result: Term
    kind: ClassVar[str] = "collapse"


InferenceStep = Union[Deduce, OrientLR, OrientRL, Delete, Compose, SimplifyLeft, SimplifyRight, Collapse]
STEP_KINDS = {cls.kind: cls for cls in (Deduce, OrientLR, OrientRL, Delete, Compose, SimplifyLeft, SimplifyRight, Collapse)}


def describe(step: InferenceStep) -> str:
    if isinstance(step, Deduce):
        return f"deduce {step.left} <- {step.peak} -> {step.right}"
    if isinstance(step, (OrientLR, OrientRL, Delete)):
        return f"{step.kind} {step.equation}"
    if isinstance(step, (SimplifyLeft, SimplifyRight)):
        return f"{step.kind} {step.equation} to {step.result}"
    return f"{step.kind} {step.rule} to {step.result}"


class StepViolation(Exception):
    """A step whose side condition fails; ``index`` is 0-based when known."""

    def __init__(self, kind: str, condition: str, index: Optional[int] = None):
        self.kind = kind
        self.condition = condition
        self.index = index
        super().__init__(self.message)

    @property
    def message(self) -> str:
        where = f"step {self.index}: " if self.index is not None else ""
        return f"{where}{self.kind}: {self.condition}"


# -- validation ------------------------------------------------------------

def _locate(facts: Sequence, wanted, kind: str, what: str) -> int:
    # orientation-strict variant lookup
    for i, f in enumerate(facts):
        if variant_of((f.lhs, f.rhs), (wanted.lhs, wanted.rhs)):
            return i
    raise StepViolation(kind, f"no {what} in the current state is a variant of {wanted}")


def _drop(facts: tuple, i: int) -> tuple:
    return facts[:i] + facts[i + 1:]


def apply_step(state: ProverState, step: InferenceStep, order: ReductionOrder, constants: Iterable[str] = ()) -> ProverState:
    """Validate ``step`` against ``state`` and return the successor state.

    ``constants`` widens the signature used to instantiate result-side-only
    variables of equations in ordered steps.
    """
    E, R = state.equations, state.rules
    kind = step.kind

    if isinstance(step, Deduce):
        plain = RewriteSystem(R, E, order, constants)
        for side, target in (("left", step.left), ("right", step.right)):
            if find_step(plain, step.peak, target, ordered=False) is None:
                raise StepViolation(kind, f"{step.peak} does not rewrite to the {side} term {target} in one R u E step")
        return ProverState(E + (Equation(step.left, step.right),), R)

    if isinstance(step, (OrientLR, OrientRL)):
        i = _locate(E, step.equation, kind, "equation")
        s, t = step.equation.lhs, step.equation.rhs
        if isinstance(step, OrientRL):
            s, t = t, s
        d = order.compare(s, t)
        if d is not Diagnosis.GREATER:
            raise StepViolation(kind, f"order returned {d.value.capitalize()} for {s} > {t}")
        return ProverState(_drop(E, i), R + (Rule(s, t),))

    if isinstance(step, Delete):
        if step.equation.lhs != step.equation.rhs:
            raise StepViolation(kind, f"sides of {step.equation} are not syntactically equal")
        i = _locate(E, step.equation, kind, "equation")
        return ProverState(_drop(E, i), R)

    if isinstance(step, (SimplifyLeft, SimplifyRight)):
        i = _locate(E, step.equation, kind, "equation")
        rest = RewriteSystem(R, _drop(E, i), order, constants)
        s, t = step.equation.lhs, step.equation.rhs
        source = s if isinstance(step, SimplifyLeft) else t
        if find_step(rest, source, step.result, ordered=True) is None:
            raise StepViolation(kind, f"no ordered rewrite step {source} -> {step.result}")
        new = Equation(step.result, t) if isinstance(step, SimplifyLeft) else Equation(s, step.result)
        return ProverState(_drop(E, i) + (new,), R)

    if isinstance(step, (Compose, Collapse)):
        i = _locate(R, step.rule, kind, "rule")
        rest = RewriteSystem(_drop(R, i), E, order, constants)
        s, t = step.rule.lhs, step.rule.rhs
        if isinstance(step, Compose):
            if find_step(rest, t, step.result, ordered=True) is None:
                raise StepViolation(kind, f"no ordered rewrite step {t} -> {step.result}")
            if not order.greater(s, step.result):
                raise StepViolation(kind, f"composed rule {s} -> {step.result} is not decreasing")
            return ProverState(E, _drop(R, i) + (Rule(s, step.result),))
        if find_step(rest, s, step.result, ordered=True) is None:
            raise StepViolation(kind, f"no ordered rewrite step {s} -> {step.result}")
        return ProverState(E + (Equation(step.result, t),), _drop(R, i))

    raise StepViolation(str(kind), "unknown inference rule")


def non_decreasing_rules(state: ProverState, order: ReductionOrder) -> List[Rule]:
    """Rules of ``state`` that are not ``lhs > rhs`` (empty when R is in >)."""
    return [r for r in state.rules if not order.greater(r.lhs, r.rhs)]


def replay(
    initial: Iterable[Equation],
    steps: Sequence[InferenceStep],
    order: ReductionOrder,
    constants: Iterable[str] = (),
    on_state: Optional[Callable[[int, ProverState], None]] = None,
) -> ProverState:
    """Fold ``apply_step`` over ``steps`` from ``(E0, {})``.

    ``on_state(i, state)`` sees the state after step ``i`` (``-1`` for the
    initial one).
    """
    constants = tuple(constants)
    state = ProverState(tuple(initial), ())
    if on_state:
        on_state(-1, state)
    for i, step in enumerate(steps):
        try:
            state = apply_step(state, step, order, constants)
        except StepViolation as exc:
            raise StepViolation(exc.kind, exc.condition, i) from None
        if on_state:
            on_state(i, state)
    return state


# -- naive completion ------------------------------------------------------

@dataclass(frozen=True)
class Limits:
    max_steps: int = 2000
    max_rounds: int = 100
    budget: Budget = Budget(max_terms=2000)


@dataclass
class CompletionResult:
    ok: bool
    state: ProverState
    steps: List[InferenceStep] = field(default_factory=list)
    reason: str = ""


class _LimitHit(Exception):
    pass


def complete(initial: Sequence[Equation], order: ReductionOrder, limits: Limits = Limits()) -> CompletionResult:
    """Run a fair naive completion loop and return the run it executed.

    Each round fully inter-reduces (simplify, delete, orient, compose,
    collapse, always the first applicable fact), then deduces every extended
    critical pair of the current state that is neither joinable nor an
    instance of an equation. The loop stops once no such pair remains.
    """
    constants = [f for f, n in signature_of(t for e in initial for t in (e.lhs, e.rhs)).items() if n == 0]
    state = ProverState(tuple(initial), ())
    steps: List[InferenceStep] = []

    def emit(step):
        nonlocal state
        if len(steps) >= limits.max_steps:
            raise _LimitHit(f"step limit {limits.max_steps} reached")
        state = apply_step(state, step, order, constants)
        steps.append(step)

    try:
        for _ in range(limits.max_rounds):
            while _interreduce_once(state, order, constants, emit):
                pass
            pending = _unresolved_pairs(state, order, constants, limits.budget)
            if not pending:
                return CompletionResult(True, state, steps)
            for step in pending:
                emit(step)
            log.debug("round done: %d equations, %d rules", len(state.equations), len(state.rules))
        raise _LimitHit(f"round limit {limits.max_rounds} reached")
    except _LimitHit as exc:
        return CompletionResult(False, state, steps, str(exc))


def _interreduce_once(state: ProverState, order, constants, emit) -> bool:
    E, R = state.equations, state.rules
    for i, e in enumerate(E):
        rest = RewriteSystem(R, _drop(E, i), order, constants)
        succ = ordered_successors(rest, e.lhs)
        if succ:
            emit(SimplifyLeft(e, succ[0].target))
            return True
        succ = ordered_successors(rest, e.rhs)
        if succ:
            emit(SimplifyRight(e, succ[0].target))
            return True
        if e.lhs == e.rhs:
            emit(Delete(e))
            return True
        d = order.compare(e.lhs, e.rhs)
        if d is Diagnosis.GREATER:
            emit(OrientLR(e))
            return True
        if d is Diagnosis.SMALLER:
            emit(OrientRL(e))
            return True
    for i, r in enumerate(R):
        rest = RewriteSystem(_drop(R, i), E, order, constants)
        succ = ordered_successors(rest, r.lhs)
        if succ:
            emit(Collapse(r, succ[0].target))
            return True
        succ = ordered_successors(rest, r.rhs)
        if succ:
            emit(Compose(r, succ[0].target))
            return True
    return False


def _variant_key(lhs: Term, rhs: Term):
    pi = canonical_renaming([lhs, rhs])
    return apply_subst(lhs, pi), apply_subst(rhs, pi)


def _equation_keys(eq: Equation):
    return _variant_key(eq.lhs, eq.rhs), _variant_key(eq.rhs, eq.lhs)


def _unresolved_pairs(state: ProverState, order, constants, budget) -> List[Deduce]:
    closed = symcl(state.equations)
    cps = extended_critical_pairs(closed + [r.as_equation() for r in state.rules], order)
    system = state.system(order, constants)
    out: List[Deduce] = []
    known = {k for e in state.equations for k in _equation_keys(e)}
    for cp in cps:
        if cp.lhs == cp.rhs or is_instance_of(cp, closed):
            continue
        try:
            if joinable(system, cp.lhs, cp.rhs, budget):
                continue
        except BudgetExceeded:
            pass
        keys = _equation_keys(cp.as_equation())
        if not known.isdisjoint(keys):
            continue
        known.update(keys)
        peak = cp.overlap.peak
        pi = canonical_renaming([peak, cp.lhs, cp.rhs])
        out.append(Deduce(*(apply_subst(t, pi) for t in (peak, cp.lhs, cp.rhs))))
    return out
