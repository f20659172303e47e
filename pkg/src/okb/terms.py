"""First-order terms, positions, substitutions, matching and unification.

Terms are immutable. ``Var`` and ``Fun`` cache their hash so that large
sets of terms (reachability closures) stay cheap.
"""

from __future__ import annotations

import itertools
import re
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

Position = Tuple[int, ...]
ROOT: Position = ()


class Var:
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        if not name:
            raise ValueError("variable name must be nonempty")
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Var({self.name!r})"

    def __str__(self):
        return self.name


class Fun:
    __slots__ = ("name", "args", "_hash", "size")

    def __init__(self, name: str, args: Iterable["Term"] = ()):
        if not name:
            raise ValueError("function symbol name must be nonempty")
        args = tuple(args)
        for a in args:
            if not isinstance(a, (Var, Fun)):
                raise TypeError(f"argument of {name} is not a term: {a!r}")
        self.name = name
        self.args = args
        self._hash = hash((name, args))
        self.size = 1 + sum(term_size(a) for a in args)

    @property
    def arity(self) -> int:
        return len(self.args)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Fun)
            and other._hash == self._hash
            and other.name == self.name
            and other.args == self.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Fun({self.name!r}, {list(self.args)!r})"

    def __str__(self):
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


Term = Union[Var, Fun]
Substitution = Dict[Var, Term]


class SignatureError(ValueError):
    """A symbol is used with two different arities."""


class PositionError(IndexError):
    pass


def term_size(t: Term) -> int:
    return 1 if isinstance(t, Var) else t.size


def is_ground(t: Term) -> bool:
    return not any(True for _ in iter_vars(t))


def iter_vars(t: Term) -> Iterator[Var]:
    """Variable occurrences of ``t``, left to right, with repetitions."""
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            yield u
        else:
            stack.extend(reversed(u.args))


def variables(t: Term) -> List[Var]:
    """Distinct variables of ``t`` in order of first occurrence."""
    seen = {}
    for v in iter_vars(t):
        seen.setdefault(v, None)
    return list(seen)


def var_counts(t: Term) -> Dict[Var, int]:
    counts: Dict[Var, int] = {}
    for v in iter_vars(t):
        counts[v] = counts.get(v, 0) + 1
    return counts


def symbols(t: Term) -> Iterator[Tuple[str, int]]:
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Fun):
            yield u.name, len(u.args)
            stack.extend(u.args)


def signature_of(terms: Iterable[Term], sig: Optional[Dict[str, int]] = None) -> Dict[str, int]:
    """Collect ``name -> arity`` for all function symbols; arity clashes raise."""
    sig = {} if sig is None else sig
    for t in terms:
        for name, arity in symbols(t):
            known = sig.setdefault(name, arity)
            if known != arity:
                raise SignatureError(f"symbol {name!r} used with arities {known} and {arity}")
    return sig


# -- substitutions ---------------------------------------------------------

def make_subst(bindings: Mapping[Var, Term]) -> Substitution:
    """Normalize a binding map: identity bindings x -> x are dropped."""
    return {x: t for x, t in bindings.items() if t != x}


def apply_subst(t: Term, sigma: Mapping[Var, Term]) -> Term:
    if not sigma:
        return t
    if isinstance(t, Var):
        return sigma.get(t, t)
    if not t.args:
        return t
    return Fun(t.name, [apply_subst(a, sigma) for a in t.args])


def compose(sigma: Mapping[Var, Term], tau: Mapping[Var, Term]) -> Substitution:
    """The substitution ``t -> (t sigma) tau``."""
    out = {x: apply_subst(t, tau) for x, t in sigma.items()}
    for x, t in tau.items():
        out.setdefault(x, t)
    return make_subst(out)


def is_renaming(sigma: Mapping[Var, Term]) -> bool:
    images = list(sigma.values())
    return all(isinstance(t, Var) for t in images) and len(set(images)) == len(images)


# -- positions -------------------------------------------------------------

def subterm_at(t: Term, p: Sequence[int]) -> Term:
    for depth, i in enumerate(p):
        if isinstance(t, Var) or not 1 <= i <= len(t.args):
            raise PositionError(f"invalid index {i} at depth {depth} of position {tuple(p)}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Sequence[int], u: Term) -> Term:
    if not p:
        return u
    i = p[0]
    if isinstance(t, Var) or not 1 <= i <= len(t.args):
        raise PositionError(f"invalid index {i} in position {tuple(p)}")
    args = list(t.args)
    try:
        args[i - 1] = replace_at(args[i - 1], p[1:], u)
    except PositionError:
        raise PositionError(f"invalid position {tuple(p)} for {t}") from None
    return Fun(t.name, args)


def positions(t: Term) -> List[Position]:
    """All positions, outermost-leftmost (preorder)."""
    out: List[Position] = []

    def walk(u, p):
        out.append(p)
        if isinstance(u, Fun):
            for i, a in enumerate(u.args, 1):
                walk(a, p + (i,))

    walk(t, ROOT)
    return out


def fun_positions(t: Term) -> List[Position]:
    """Positions of non-variable subterms, outermost-leftmost."""
    return [p for p in positions(t) if isinstance(subterm_at(t, p), Fun)]


def subterms(t: Term) -> Iterator[Tuple[Position, Term]]:
    stack: List[Tuple[Position, Term]] = [(ROOT, t)]
    while stack:
        p, u = stack.pop()
        yield p, u
        if isinstance(u, Fun):
            stack.extend((p + (i,), a) for i, a in reversed(list(enumerate(u.args, 1))))


# -- matching and unification ---------------------------------------------

def _match_into(pattern: Term, subject: Term, out: Dict[Var, Term]) -> bool:
    # ``out`` keeps identity bindings so later pairs cannot rebind them
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if isinstance(p, Var):
            bound = out.get(p)
            if bound is None:
                out[p] = s
            elif bound != s:
                return False
        elif isinstance(s, Var) or p.name != s.name or len(p.args) != len(s.args):
            return False
        else:
            stack.extend(zip(p.args, s.args))
    return True


def match(pattern: Term, subject: Term) -> Optional[Substitution]:
    """Most general ``sigma`` with ``pattern sigma == subject``."""
    out: Dict[Var, Term] = {}
    if not _match_into(pattern, subject, out):
        return None
    return make_subst(out)


def match_all(pairs: Iterable[Tuple[Term, Term]]) -> Optional[Substitution]:
    """One substitution matching every (pattern, subject) pair simultaneously."""
    out: Dict[Var, Term] = {}
    for p, s in pairs:
        if not _match_into(p, s, out):
            return None
    return make_subst(out)


def match_rigid(pattern: Term, subject: Term, rigid: Iterable[Var], sigma: Optional[Mapping[Var, Term]] = None) -> Optional[Substitution]:
    """Like ``match`` but variables in ``rigid`` may only map to themselves."""
    out: Dict[Var, Term] = {v: v for v in rigid}
    if sigma:
        out.update(sigma)
    if not _match_into(pattern, subject, out):
        return None
    return make_subst(out)


class UnificationFailure(Exception):
    """Carries the reason ("clash" or "occurs") for diagnostics."""

    def __init__(self, reason: str, left: Term, right: Term):
        super().__init__(reason)
        self.reason = reason
        self.left = left
        self.right = right

    def __str__(self):
        return f"{self.reason}: {self.left} vs {self.right}"


def occurs(x: Var, t: Term) -> bool:
    return any(v == x for v in iter_vars(t))


def unify_or_raise(s: Term, t: Term) -> Substitution:
    """Idempotent mgu of ``s`` and ``t``; raises UnificationFailure."""
    sigma: Dict[Var, Term] = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, sigma)
        b = _walk(b, sigma)
        if a == b:
            continue
        if isinstance(b, Var) and not isinstance(a, Var):
            a, b = b, a
        if isinstance(a, Var):
            b_full = _resolve(b, sigma)
            if occurs(a, b_full):
                raise UnificationFailure("occurs", a, b_full)
            sigma[a] = b
            continue
        if a.name != b.name or len(a.args) != len(b.args):
            raise UnificationFailure("clash", a, b)
        stack.extend(zip(a.args, b.args))
    return make_subst({x: _resolve(u, sigma) for x, u in sigma.items()})


def _walk(t: Term, sigma):
    while isinstance(t, Var) and t in sigma:
        t = sigma[t]
    return t


def _resolve(t: Term, sigma) -> Term:
    if isinstance(t, Var):
        u = _walk(t, sigma)
        return u if isinstance(u, Var) else _resolve(u, sigma)
    if not t.args:
        return t
    return Fun(t.name, [_resolve(a, sigma) for a in t.args])


def unify(s: Term, t: Term) -> Optional[Substitution]:
    try:
        return unify_or_raise(s, t)
    except UnificationFailure:
        return None


# -- renaming --------------------------------------------------------------

_SUFFIX = re.compile(r"^(.*?)(\d*)$")


def fresh_var(base: str, avoid) -> Var:
    """``base`` itself if unused, else ``base`` with the smallest free numeric suffix."""
    stem = _SUFFIX.match(base).group(1) or base
    if Var(base) not in avoid:
        return Var(base)
    for i in itertools.count():
        v = Var(f"{stem}{i}")
        if v not in avoid:
            return v
    raise AssertionError("unreachable")


def renaming_apart(vs: Iterable[Var], avoid) -> Substitution:
    taken = set(avoid)
    pi: Substitution = {}
    for v in vs:
        if v in taken:
            w = fresh_var(v.name, taken)
            pi[v] = w
            taken.add(w)
        else:
            taken.add(v)
    return pi


def rename_apart(t: Term, avoid) -> Tuple[Term, Substitution]:
    """A variant of ``t`` sharing no variable with ``avoid`` plus the renaming used."""
    pi = renaming_apart(variables(t), avoid)
    return apply_subst(t, pi), pi


def rename_terms_apart(ts: Sequence[Term], avoid) -> Tuple[List[Term], Substitution]:
    """Rename a tuple of terms jointly (shared variables stay shared)."""
    vs: Dict[Var, None] = {}
    for t in ts:
        for v in iter_vars(t):
            vs.setdefault(v, None)
    pi = renaming_apart(vs, avoid)
    return [apply_subst(t, pi) for t in ts], pi


def canonical_renaming(ts: Sequence[Term], names: Sequence[str] = ("x", "y", "z", "u", "v", "w")) -> Substitution:
    """Rename variables of ``ts`` jointly to x, y, z, ... in order of first occurrence."""
    order: Dict[Var, None] = {}
    for t in ts:
        for v in iter_vars(t):
            order.setdefault(v, None)
    pi: Substitution = {}
    for i, v in enumerate(order):
        pi[v] = Var(names[i] if i < len(names) else f"x{i}")
    return pi


def _paired(ts: Sequence[Term]) -> Term:
    return Fun("\x00pair", ts)


def variant_renaming(s, t) -> Optional[Substitution]:
    """A renaming ``pi`` with ``s pi == t`` (terms or tuples of terms), else None."""
    if isinstance(s, (tuple, list)):
        if len(s) != len(t):
            return None
        s, t = _paired(s), _paired(t)
    sigma = match(s, t)
    if sigma is None:
        return None
    # identity bindings were dropped; restore them to check injectivity
    full = {v: sigma.get(v, v) for v in variables(s)}
    if not is_renaming(full):
        return None
    return sigma


def variant_of(s, t) -> bool:
    return variant_renaming(s, t) is not None
