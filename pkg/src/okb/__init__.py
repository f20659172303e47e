"""Ordered rewriting, ordered completion (oKB) and a certificate checker."""

from .terms import Fun, Var, apply_subst, match, unify, variant_of
from .orders import Diagnosis, Kbo, Lpo, check_admissible, minimal_constant
from .rewriting import Budget, Equation, RewriteSystem, Rule, joinable, normal_forms
from .critical import extended_critical_pairs, is_instance_of
from .engine import ProverState, complete, replay
from .formats import Certificate, parse_certificate, parse_problem, serialize_certificate
from .certifier import check_certificate, check_ground_confluence

__all__ = [
    "Budget",
    "Certificate",
    "Diagnosis",
    "Equation",
    "Fun",
    "Kbo",
    "Lpo",
    "ProverState",
    "RewriteSystem",
    "Rule",
    "Var",
    "apply_subst",
    "check_admissible",
    "check_certificate",
    "check_ground_confluence",
    "complete",
    "extended_critical_pairs",
    "is_instance_of",
    "joinable",
    "match",
    "minimal_constant",
    "normal_forms",
    "parse_certificate",
    "parse_problem",
    "replay",
    "serialize_certificate",
    "unify",
    "variant_of",
]
