"""Equations, rules, plain and ordered rewriting, joinability.

Ordered rewriting uses ``S = R u (E+-)^>``: rules unconditionally and every
instance of an equation (either orientation) that the order decreases.
Variables that occur only on the result side of an equation are
instantiated with the constants of the signature, which keeps the step
relation finitely branching; on open terms such steps are never
decreasing anyway.
"""

from __future__ import annotations

import itertools
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .orders import ReductionOrder
from .terms import (
    Fun,
    Position,
    Substitution,
    Term,
    Var,
    apply_subst,
    iter_vars,
    match,
    match_rigid,
    rename_terms_apart,
    replace_at,
    signature_of,
    subterm_at,
    subterms,
    term_size,
    unify,
    variables,
)


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term

    def reversed(self) -> "Equation":
        return Equation(self.rhs, self.lhs)

    def __str__(self):
        return f"{self.lhs} == {self.rhs}"


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term

    def as_equation(self) -> Equation:
        return Equation(self.lhs, self.rhs)

    def __str__(self):
        return f"{self.lhs} -> {self.rhs}"


def symcl(equations: Iterable[Equation]) -> List[Equation]:
    """Symmetric closure, syntactic duplicates removed, original order first."""
    out: Dict[Equation, None] = {}
    eqs = list(equations)
    for e in eqs:
        out.setdefault(e, None)
    for e in eqs:
        out.setdefault(e.reversed(), None)
    return list(out)


@dataclass(frozen=True)
class Budget:
    max_terms: int = 10_000
    max_term_size: int = 200

    @classmethod
    def from_env(cls, max_terms: Optional[int] = None, max_term_size: Optional[int] = None) -> "Budget":
        """Flags win over ``OKB_BUDGET_TERMS``, which wins over the default."""
        if max_terms is None and os.environ.get("OKB_BUDGET_TERMS"):
            max_terms = int(os.environ["OKB_BUDGET_TERMS"])
        kwargs = {}
        if max_terms is not None:
            kwargs["max_terms"] = max_terms
        if max_term_size is not None:
            kwargs["max_term_size"] = max_term_size
        return cls(**kwargs)


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class StepWitness:
    """One rewrite step ``source -> target`` and where it came from.

    ``origin`` is ``("rule", i)`` or ``("equation", i, "lr" | "rl")``;
    ``lhs``/``rhs`` are the oriented sides actually used.
    """

    source: Term
    target: Term
    position: Position
    origin: tuple
    lhs: Term
    rhs: Term
    sigma: Dict[Var, Term] = field(hash=False, compare=False)

    def check(self) -> bool:
        return (
            subterm_at(self.source, self.position) == apply_subst(self.lhs, self.sigma)
            and replace_at(self.source, self.position, apply_subst(self.rhs, self.sigma)) == self.target
        )


@dataclass(frozen=True, init=False)
class RewriteSystem:
    rules: Tuple[Rule, ...]
    equations: Tuple[Equation, ...]
    order: ReductionOrder
    constants: Tuple[str, ...] = ()

    def __init__(self, rules=(), equations=(), order=None, constants: Iterable[str] = ()):
        rules = tuple(rules)
        equations = tuple(equations)
        sig = signature_of(t for r in (*rules, *equations) for t in (r.lhs, r.rhs))
        consts = dict.fromkeys(constants)
        consts.update((f, None) for f, n in sig.items() if n == 0)
        object.__setattr__(self, "rules", rules)
        object.__setattr__(self, "equations", equations)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "constants", tuple(consts))

    def oriented(self) -> Iterator[Tuple[tuple, Term, Term]]:
        """(origin, lhs, rhs) for rules and both orientations of equations."""
        for i, r in enumerate(self.rules):
            yield ("rule", i), r.lhs, r.rhs
        for i, e in enumerate(self.equations):
            yield ("equation", i, "lr"), e.lhs, e.rhs
            if e.rhs != e.lhs:
                yield ("equation", i, "rl"), e.rhs, e.lhs

    def without_rule(self, index: int) -> "RewriteSystem":
        rules = self.rules[:index] + self.rules[index + 1:]
        return RewriteSystem(rules, self.equations, self.order, self.constants)

    def without_equation(self, index: int) -> "RewriteSystem":
        eqs = self.equations[:index] + self.equations[index + 1:]
        return RewriteSystem(self.rules, eqs, self.order, self.constants)


def _extra_vars(lhs: Term, rhs: Term) -> List[Var]:
    lv = set(variables(lhs))
    return [v for v in variables(rhs) if v not in lv]


def _redexes(t: Term):
    # every position, including variable ones: an equation side may be a bare variable
    return subterms(t)


def _renamed_apart(system: "RewriteSystem", avoid) -> List[Tuple[tuple, Term, Term]]:
    return [(origin, *rename_terms_apart((lhs, rhs), avoid)[0]) for origin, lhs, rhs in system.oriented()]


# Cached copies of a system's sides use variables with this prefix; terms
# containing such variables fall back to renaming apart per call.
_RESERVED = "!"


class _SideIndex:
    """Oriented sides renamed into the reserved namespace, indexed by root symbol."""

    def __init__(self, system: "RewriteSystem"):
        self.by_root: Dict[str, List[Tuple[int, tuple, Term, Term]]] = {}
        self.var_lhs: List[Tuple[int, tuple, Term, Term]] = []
        for k, (origin, lhs, rhs) in enumerate(system.oriented()):
            pi = {v: Var(_RESERVED + v.name) for t in (lhs, rhs) for v in iter_vars(t)}
            entry = (k, origin, apply_subst(lhs, pi), apply_subst(rhs, pi))
            if isinstance(lhs, Var):
                self.var_lhs.append(entry)
            else:
                self.by_root.setdefault(lhs.name, []).append(entry)

    def candidates(self, u: Term):
        if isinstance(u, Var) or not self.var_lhs:
            return self.by_root.get(u.name, []) if isinstance(u, Fun) else self.var_lhs
        return sorted(self.by_root.get(u.name, []) + self.var_lhs)


def _indexed_sides(system: "RewriteSystem", t: Term):
    """Per-subterm candidate lookup, renamed apart from ``t``."""
    if any(v.name.startswith(_RESERVED) for v in iter_vars(t)):
        renamed = _renamed_apart(system, set(variables(t)))
        return lambda u: [(k, origin, l, r) for k, (origin, l, r) in enumerate(renamed)]
    index = system.__dict__.get("_index")
    if index is None:
        index = _SideIndex(system)
        object.__setattr__(system, "_index", index)
    return index.candidates


# -- plain rewriting -------------------------------------------------------

def plain_successors(system: RewriteSystem, t: Term) -> List[StepWitness]:
    """One-step rewrites with rules left to right and equations both ways.

    Result-side-only variables are instantiated with fresh variables.
    """
    out = []
    avoid = set(variables(t))
    renamed = _renamed_apart(system, avoid)
    for p, u in _redexes(t):
        for origin, l, r in renamed:
            sigma = match(l, u)
            if sigma is None:
                continue
            extra = _extra_vars(l, r)
            if extra:
                taken = avoid | set(variables(l)) | set(variables(r))
                fresh, _ = rename_terms_apart(extra, taken)
                sigma = dict(sigma)
                sigma.update(zip(extra, fresh))
            out.append(StepWitness(t, replace_at(t, p, apply_subst(r, sigma)), p, origin, l, r, sigma))
    return out


def find_step(
    system: RewriteSystem,
    source: Term,
    target: Term,
    ordered: bool,
) -> Optional[StepWitness]:
    """A single step ``source -> target`` (plain or ordered), if one exists.

    Result-side-only variables are bound by matching against ``target``.
    """
    rigid = set(variables(source)) | set(variables(target))
    renamed = None
    for p, u in _redexes(source):
        try:
            v = subterm_at(target, p)
        except IndexError:
            continue
        if replace_at(source, p, v) != target:
            continue
        if renamed is None:
            renamed = _renamed_apart(system, rigid)
        for origin, l, r in renamed:
            sigma = match(l, u)
            if sigma is None:
                continue
            tau = match_rigid(apply_subst(r, sigma), v, rigid)
            if tau is None:
                continue
            full = _extend(sigma, tau)
            if ordered and origin[0] == "equation":
                if not system.order.greater(apply_subst(l, full), apply_subst(r, full)):
                    continue
            return StepWitness(source, target, p, origin, l, r, full)
    return None


def _extend(sigma: Substitution, tau: Substitution) -> Substitution:
    out = dict(sigma)
    for x, t in tau.items():
        out.setdefault(x, t)
    return out


# -- ordered rewriting -----------------------------------------------------

def _term_constants(t: Term) -> Iterator[str]:
    for _, u in subterms(t):
        if isinstance(u, Fun) and not u.args:
            yield u.name


def ordered_successors(system: RewriteSystem, t: Term) -> List[StepWitness]:
    """One-step rewrites with ``S = R u (E+-)^>`` at every position."""
    out = []
    order = system.order
    consts = list(dict.fromkeys([*system.constants, *_term_constants(t)]))
    candidates = _indexed_sides(system, t)
    for p, u in _redexes(t):
        for _, origin, l, r in candidates(u):
            sigma = match(l, u)
            if sigma is None:
                continue
            if origin[0] == "rule":
                out.append(StepWitness(t, replace_at(t, p, apply_subst(r, sigma)), p, origin, l, r, sigma))
                continue
            extra = _extra_vars(l, r)
            instances = [sigma]
            if extra:
                instances = [
                    _extend(sigma, dict(zip(extra, (Fun(c) for c in choice))))
                    for choice in itertools.product(consts, repeat=len(extra))
                ]
            for inst in instances:
                left, right = apply_subst(l, inst), apply_subst(r, inst)
                if order.greater(left, right):
                    out.append(StepWitness(t, replace_at(t, p, right), p, origin, l, r, inst))
    return out


_TARGET_CACHE_LIMIT = 200_000


def _cached_targets(system: RewriteSystem, t: Term) -> List[Term]:
    # systems are immutable, so successor sets can be shared between searches
    cache = system.__dict__.get("_targets")
    if cache is None or len(cache) > _TARGET_CACHE_LIMIT:
        cache = {}
        object.__setattr__(system, "_targets", cache)
    targets = cache.get(t)
    if targets is None:
        targets = cache[t] = list(dict.fromkeys(w.target for w in ordered_successors(system, t)))
    return targets


class _Closure:
    """Incrementally explored ``->_S`` reachability set with a shared budget."""

    def __init__(self, system, start, budget, counter):
        self.system = system
        self.seen = {start: None}
        self.frontier = deque([start])
        self.budget = budget
        self.counter = counter
        self.counter[0] += 1
        self.succ: Dict[Term, List[Term]] = {}

    def done(self):
        return not self.frontier

    def expand(self) -> List[Term]:
        t = self.frontier.popleft()
        new = []
        targets = _cached_targets(self.system, t)
        self.succ[t] = targets
        for u in targets:
            if u in self.seen:
                continue
            if term_size(u) > self.budget.max_term_size:
                raise BudgetExceeded(f"term size above {self.budget.max_term_size}: {u}")
            self.counter[0] += 1
            if self.counter[0] > self.budget.max_terms:
                raise BudgetExceeded(f"more than {self.budget.max_terms} terms explored")
            self.seen[u] = None
            self.frontier.append(u)
            new.append(u)
        return new


def reachable(system: RewriteSystem, t: Term, budget: Budget = Budget()) -> Dict[Term, List[Term]]:
    """Full ``->_S`` closure of ``t`` as a successor map."""
    c = _Closure(system, t, budget, [0])
    while not c.done():
        c.expand()
    return c.succ


def normal_forms(system: RewriteSystem, t: Term, budget: Budget = Budget()) -> Set[Term]:
    succ = reachable(system, t, budget)
    return {u for u, ts in succ.items() if not ts}


def joinable(system: RewriteSystem, s: Term, t: Term, budget: Budget = Budget()) -> bool:
    """Whether the ``->_S`` closures of ``s`` and ``t`` intersect."""
    if s == t:
        return True
    counter = [0]
    left = _Closure(system, s, budget, counter)
    right = _Closure(system, t, budget, counter)
    while not (left.done() and right.done()):
        for mine, other in ((left, right), (right, left)):
            if mine.done():
                continue
            for u in mine.expand():
                if u in other.seen:
                    return True
    return False


# -- conversions -----------------------------------------------------------

# Result-side-only variables in conversion steps become placeholders: fresh
# variables whose names the problem parser cannot produce.
_PLACEHOLDER = "?"


def _conversion_steps(equations: Sequence[Equation], t: Term, fresh, max_size: int) -> Iterator[Term]:
    avoid = set(variables(t))
    sides = [rename_terms_apart(pair, avoid)[0] for e in equations for pair in ((e.lhs, e.rhs), (e.rhs, e.lhs))]
    for p, u in _redexes(t):
        for l, r in sides:
            sigma = match(l, u)
            if sigma is None:
                continue
            inst = _extend(sigma, {x: fresh() for x in _extra_vars(l, r)})
            v = replace_at(t, p, apply_subst(r, inst))
            if term_size(v) <= max_size:
                yield v


def _is_placeholder(v: Var) -> bool:
    return v.name.startswith(_PLACEHOLDER)


def _shape(t: Term) -> Term:
    """``t`` with placeholders renamed canonically, used as the visited-set key."""
    names: Dict[Var, Term] = {}
    for v in iter_vars(t):
        if _is_placeholder(v) and v not in names:
            names[v] = Var(f"{_PLACEHOLDER}{len(names)}")
    return apply_subst(t, names) if names else t


def _root_key(t: Term):
    if isinstance(t, Fun):
        return t.name, len(t.args)
    return None if _is_placeholder(t) else t


def _thaw(t: Term) -> Term:
    if t.name.startswith("\x00") and not t.args:
        return Var(t.name[1:])
    return Fun(t.name, [_thaw(a) if isinstance(a, Fun) else a for a in t.args])


def _unify_placeholders(a: Term, b: Term) -> Optional[Substitution]:
    """An mgu of ``a`` and ``b`` that binds only placeholders."""
    frozen = {v: Fun("\x00" + v.name) for t in (a, b) for v in iter_vars(t) if not _is_placeholder(v)}
    mu = unify(apply_subst(a, frozen), apply_subst(b, frozen))
    if mu is None:
        return None
    return {x: (_thaw(u) if isinstance(u, Fun) else u) for x, u in mu.items()}


class _Side:
    def __init__(self, start: Term):
        self.parent: Dict[Term, Tuple[Term, Optional[Term]]] = {start: (start, None)}
        self.index: Dict[object, List[Term]] = {}
        self.frontier = [start]
        self._add_index(start)

    def _add_index(self, t: Term):
        self.index.setdefault(_root_key(t), []).append(t)

    def add(self, v: Term, parent: Term) -> bool:
        k = _shape(v)
        if k in self.parent:
            return False
        self.parent[k] = (v, _shape(parent))
        self._add_index(v)
        return True

    def candidates(self, v: Term) -> Iterator[Term]:
        key = _root_key(v)
        if key is None:
            for ts in self.index.values():
                yield from ts
            return
        yield from self.index.get(key, ())
        yield from self.index.get(None, ())

    def chain(self, t: Term) -> List[Term]:
        out = []
        k: Optional[Term] = _shape(t)
        while k is not None:
            term, k = self.parent[k]
            out.append(term)
        return out


def bounded_conversion(
    equations: Sequence[Equation],
    s: Term,
    t: Term,
    depth: int,
    max_size: int = 30,
    max_nodes: int = 50000,
) -> Optional[List[Term]]:
    """A chain ``s <-> ... <-> t`` of at most ``depth`` equational steps.

    Bidirectional breadth-first search. Result-side-only variables are left
    as placeholders, and the two frontiers meet when a pair of their terms
    unifies by binding placeholders only; the unifier is then applied to the
    whole chain. ``None`` is inconclusive (sizes and ``max_nodes`` cap the
    search).
    """
    if s == t:
        return [s]
    counter = itertools.count()

    def fresh() -> Var:
        return Var(f"{_PLACEHOLDER}{next(counter)}")

    sides = [_Side(s), _Side(t)]
    budgets = [(depth + 1) // 2, depth // 2]
    nodes = 2
    for level in range(depth):
        side = level % 2
        if budgets[side] == 0:
            side = 1 - side
        budgets[side] -= 1
        mine, other = sides[side], sides[1 - side]
        nxt = []
        for u in mine.frontier:
            for v in _conversion_steps(equations, u, fresh, max_size):
                if not mine.add(v, u):
                    continue
                for w in other.candidates(v):
                    mu = _unify_placeholders(v, w)
                    if mu is not None:
                        a, b = (v, w) if side == 0 else (w, v)
                        path = sides[0].chain(a)[::-1] + sides[1].chain(b)
                        path = [apply_subst(x, mu) for x in path]
                        return [x for i, x in enumerate(path) if i == 0 or x != path[i - 1]]
                nodes += 1
                if nodes > max_nodes:
                    return None
                nxt.append(v)
        mine.frontier = nxt
    return None
