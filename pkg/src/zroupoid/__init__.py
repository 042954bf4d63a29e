"""Finite implication zroupoids: terms, satisfaction checks, model search and proof chains."""

from .algebra import AlgebraError, Bimagma, FiniteAlgebra, derived_bimagma, load_algebra, counterexample_algebra
from .catalog import catalog, entry, variety, variety_names
from .enumerate import EnumerationReport, canonical_form, enumerate_models, is_isomorphic
from .formulas import (
    Counterexample,
    Identity,
    UniversalFormula,
    VarietySpec,
    holds_identity,
    holds_universal,
    holds_universal_bimagma,
    member_of,
    parse_formula,
)
from .proofs import Justification, ProofChain, StepFailure, StepReport, parse_chain, verify_chain, verify_step
from .terms import Implies, Term, Var, Zero, ZERO, parse, pretty

__all__ = [
    "AlgebraError", "Bimagma", "FiniteAlgebra", "derived_bimagma", "load_algebra", "counterexample_algebra",
    "catalog", "entry", "variety", "variety_names",
    "EnumerationReport", "canonical_form", "enumerate_models", "is_isomorphic",
    "Counterexample", "Identity", "UniversalFormula", "VarietySpec", "holds_identity",
    "holds_universal", "holds_universal_bimagma", "member_of", "parse_formula",
    "Justification", "ProofChain", "StepFailure", "StepReport", "parse_chain", "verify_chain", "verify_step",
    "Implies", "Term", "Var", "Zero", "ZERO", "parse", "pretty",
]
