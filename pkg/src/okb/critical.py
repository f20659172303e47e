"""Extended overlaps and extended critical pairs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .orders import ReductionOrder
from .rewriting import Equation
from .terms import (
    Position,
    Term,
    Var,
    apply_subst,
    fun_positions,
    match_all,
    rename_terms_apart,
    replace_at,
    subterm_at,
    unify,
    variables,
)


@dataclass(frozen=True)
class ExtendedOverlap:
    outer: Equation  # l2 == r2
    inner: Equation  # l1 == r1, renamed apart from outer
    outer_index: int
    inner_index: int
    position: Position
    mgu: Dict[Var, Term]

    def __hash__(self):
        return hash((self.outer, self.inner, self.outer_index, self.inner_index, self.position))

    @property
    def peak(self) -> Term:
        return apply_subst(self.outer.lhs, self.mgu)


@dataclass(frozen=True)
class CriticalPair:
    lhs: Term
    rhs: Term
    overlap: ExtendedOverlap

    def as_equation(self) -> Equation:
        return Equation(self.lhs, self.rhs)

    def reconstruct(self) -> Tuple[Term, Term]:
        o = self.overlap
        lhs = apply_subst(replace_at(o.outer.lhs, o.position, o.inner.rhs), o.mgu)
        return lhs, apply_subst(o.outer.rhs, o.mgu)

    def __str__(self):
        return f"{self.lhs} == {self.rhs}"


def _variant_trivial_self_overlap(e: Equation) -> bool:
    # With vars(r) <= vars(l) a root self-overlap yields r == r; otherwise the
    # result-side-only variables make it a genuine pair and it must be kept.
    lv = set(variables(e.lhs))
    return all(v in lv for v in variables(e.rhs))


def extended_critical_pairs(eqs: Sequence[Equation], order: ReductionOrder) -> List[CriticalPair]:
    """All extended critical pairs among ``eqs`` (each used as given, left to right).

    Pass ``symcl(E) + rules`` to get the set the ground confluence check needs.
    """
    out: List[CriticalPair] = []
    for j, outer in enumerate(eqs):
        l2, r2 = outer.lhs, outer.rhs
        avoid = set(variables(l2)) | set(variables(r2))
        for i, e in enumerate(eqs):
            (l1, r1), _ = rename_terms_apart((e.lhs, e.rhs), avoid)
            for p in fun_positions(l2):
                if i == j and not p and _variant_trivial_self_overlap(e):
                    continue
                mu = unify(l1, subterm_at(l2, p))
                if mu is None:
                    continue
                if order.greater(apply_subst(r1, mu), apply_subst(l1, mu)):
                    continue
                if order.greater(apply_subst(r2, mu), apply_subst(l2, mu)):
                    continue
                overlap = ExtendedOverlap(outer, Equation(l1, r1), j, i, p, mu)
                out.append(CriticalPair(apply_subst(replace_at(l2, p, r1), mu), apply_subst(r2, mu), overlap))
    return out


def instance_witness(cp, eqs: Sequence[Equation]) -> Optional[Tuple[int, Dict[Var, Term]]]:
    """Index of an equation ``s' == t'`` and one ``sigma`` with ``(s' == t') sigma == cp``."""
    for k, e in enumerate(eqs):
        sigma = match_all([(e.lhs, cp.lhs), (e.rhs, cp.rhs)])
        if sigma is not None:
            return k, sigma
    return None


def is_instance_of(cp, eqs: Sequence[Equation]) -> bool:
    return instance_witness(cp, eqs) is not None
