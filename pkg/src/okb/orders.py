"""Knuth-Bendix and lexicographic path orders over a total precedence."""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .terms import Fun, Term, Var, iter_vars, var_counts


class Diagnosis(enum.Enum):
    GREATER = "greater"
    SMALLER = "smaller"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"

    def flip(self) -> "Diagnosis":
        return {Diagnosis.GREATER: Diagnosis.SMALLER, Diagnosis.SMALLER: Diagnosis.GREATER}.get(self, self)


class OrderConfigError(ValueError):
    """A term uses a symbol that the order does not know about."""

    def __init__(self, symbol: str):
        super().__init__(f"symbol {symbol!r} is missing from the precedence")
        self.symbol = symbol


class NoConstantError(ValueError):
    pass


def _ranks(precedence: Sequence[str]) -> Dict[str, int]:
    # larger rank = greater in the precedence
    n = len(precedence)
    return {f: n - i for i, f in enumerate(precedence)}


@dataclass(frozen=True)
class Kbo:
    """KBO parameters; ``precedence`` lists symbols from greatest to least."""

    precedence: Tuple[str, ...]
    w0: int = 1
    weights: Mapping[str, int] = field(default_factory=dict)

    kind = "kbo"

    def __post_init__(self):
        object.__setattr__(self, "precedence", tuple(self.precedence))
        object.__setattr__(self, "weights", dict(self.weights))

    @cached_property
    def ranks(self) -> Dict[str, int]:
        return _ranks(self.precedence)

    def weight_of(self, f: str) -> int:
        return self.weights.get(f, 0)

    def weight(self, t: Term) -> int:
        if isinstance(t, Var):
            return self.w0
        return self.weight_of(t.name) + sum(self.weight(a) for a in t.args)

    def compare(self, s: Term, t: Term) -> Diagnosis:
        return kbo_compare(self, s, t)

    def greater(self, s: Term, t: Term) -> bool:
        return kbo_greater(self, s, t)

    def __hash__(self):
        return hash((self.precedence, self.w0, tuple(sorted(self.weights.items()))))


@dataclass(frozen=True)
class Lpo:
    precedence: Tuple[str, ...]

    kind = "lpo"

    def __post_init__(self):
        object.__setattr__(self, "precedence", tuple(self.precedence))

    @cached_property
    def ranks(self) -> Dict[str, int]:
        return _ranks(self.precedence)

    def compare(self, s: Term, t: Term) -> Diagnosis:
        return lpo_compare(self, s, t)

    def greater(self, s: Term, t: Term) -> bool:
        return lpo_greater(self, s, t)

    def __hash__(self):
        return hash(self.precedence)


ReductionOrder = Union[Kbo, Lpo]


def _rank(order, f: str) -> int:
    try:
        return order.ranks[f]
    except KeyError:
        raise OrderConfigError(f) from None


def _diagnose(greater, s: Term, t: Term) -> Diagnosis:
    if s == t:
        return Diagnosis.EQUAL
    if greater(s, t):
        return Diagnosis.GREATER
    if greater(t, s):
        return Diagnosis.SMALLER
    return Diagnosis.INCOMPARABLE


# -- KBO -------------------------------------------------------------------

def kbo_greater(params: Kbo, s: Term, t: Term) -> bool:
    if isinstance(s, Var) or s == t:
        return False
    # variable condition: multiset containment of variable occurrences
    s_counts = var_counts(s)
    for x, n in var_counts(t).items():
        if s_counts.get(x, 0) < n:
            return False
    if isinstance(t, Var):
        # x occurs in s and s != x
        return True
    ws, wt = params.weight(s), params.weight(t)
    if ws != wt:
        return ws > wt
    rs, rt = _rank(params, s.name), _rank(params, t.name)
    if rs != rt:
        return rs > rt
    for a, b in zip(s.args, t.args):
        if a != b:
            return kbo_greater(params, a, b)
    return False


def kbo_compare(params: Kbo, s: Term, t: Term) -> Diagnosis:
    for u in (s, t):
        _check_symbols(params, u)
    return _diagnose(lambda a, b: kbo_greater(params, a, b), s, t)


# -- LPO -------------------------------------------------------------------

def lpo_greater(prec: Lpo, s: Term, t: Term) -> bool:
    if isinstance(s, Var):
        return False
    if isinstance(t, Var):
        return any(v == t for v in iter_vars(s))
    # subterm case
    if any(a == t or lpo_greater(prec, a, t) for a in s.args):
        return True
    rs, rt = _rank(prec, s.name), _rank(prec, t.name)
    if rs > rt:
        return all(lpo_greater(prec, s, b) for b in t.args)
    if rs == rt:
        for i, (a, b) in enumerate(zip(s.args, t.args)):
            if a != b:
                return lpo_greater(prec, a, b) and all(lpo_greater(prec, s, c) for c in t.args[i + 1:])
    return False


def lpo_compare(prec: Lpo, s: Term, t: Term) -> Diagnosis:
    for u in (s, t):
        _check_symbols(prec, u)
    return _diagnose(lambda a, b: lpo_greater(prec, a, b), s, t)


def _check_symbols(order, t: Term):
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Fun):
            _rank(order, u.name)
            stack.extend(u.args)


def compare(order: ReductionOrder, s: Term, t: Term) -> Diagnosis:
    return order.compare(s, t)


# -- admissibility and ground terms ----------------------------------------

def check_admissible(order: ReductionOrder, signature: Mapping[str, int]) -> List[str]:
    """All violations of totality (and KBO admissibility) over ``signature``."""
    problems: List[str] = []
    seen = set()
    for f in order.precedence:
        if f in seen:
            problems.append(f"symbol {f!r} occurs more than once in the precedence")
        seen.add(f)
    for f in sorted(signature):
        if f not in seen:
            problems.append(f"symbol {f!r} is missing from the precedence")
    if isinstance(order, Lpo):
        return problems
    if order.w0 <= 0:
        problems.append("w0 must be positive")
    for f, w in sorted(order.weights.items()):
        if w < 0:
            problems.append(f"weight of {f!r} must be nonnegative, got {w}")
    for f, arity in sorted(signature.items()):
        w = order.weight_of(f)
        if arity == 0 and w < order.w0:
            problems.append(f"constant {f!r} has weight {w} below w0 = {order.w0}")
        if arity == 1 and w == 0 and f in seen:
            bigger = [g for g in signature if g != f and g in seen and order.ranks[g] > order.ranks[f]]
            if bigger:
                problems.append(
                    f"unary symbol {f!r} has weight 0 but is not precedence-greatest "
                    f"({bigger[0]!r} is greater)"
                )
    return problems


def minimal_constant(order: ReductionOrder, signature: Mapping[str, int]) -> str:
    """A constant ``c`` with ``t >= c`` for every ground term ``t`` over ``signature``."""
    constants = [f for f, n in signature.items() if n == 0]
    if not constants:
        raise NoConstantError("signature has no constants, so there are no ground terms")
    if isinstance(order, Kbo):
        least = min(order.weight_of(c) for c in constants)
        constants = [c for c in constants if order.weight_of(c) == least]
    return min(constants, key=lambda c: _rank(order, c))


def ground_terms(signature: Mapping[str, int], max_size: int) -> List[Term]:
    """All ground terms over ``signature`` with at most ``max_size`` symbols."""
    by_size: Dict[int, List[Term]] = {}
    for n in range(1, max_size + 1):
        out: List[Term] = []
        for f, arity in sorted(signature.items()):
            if arity == 0:
                if n == 1:
                    out.append(Fun(f))
                continue
            for sizes in _compositions(n - 1, arity):
                if all(k in by_size for k in sizes):
                    for args in itertools.product(*(by_size[k] for k in sizes)):
                        out.append(Fun(f, args))
        if out:
            by_size[n] = out
    return [t for n in sorted(by_size) for t in by_size[n]]


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def ground_total_on(order: ReductionOrder, signature: Mapping[str, int], size_bound: int) -> Optional[Tuple[Term, Term]]:
    """First pair of distinct ground terms the order fails to compare, or None."""
    for f in signature:
        _rank(order, f)
    terms = ground_terms(signature, size_bound)
    for i, s in enumerate(terms):
        for t in terms[i + 1:]:
            if order.compare(s, t) not in (Diagnosis.GREATER, Diagnosis.SMALLER):
                return s, t
    return None
