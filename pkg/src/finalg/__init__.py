"""Finite algebras given by operation tables.

Relation preservation, relation classification, congruence lattices,
central elements, Pierce stalks, and the preprimal algebras P_σ.
"""
from .center import CenterAlgebra, CentralElement, NoConstantFrame, center, decompose, is_central
from .clones import clone_closure, find_u_term, is_primal_upto, search_u_term
from .congruence import (
    ConLattice,
    Congruence,
    FactorPair,
    all_congruences,
    check_fhp,
    compose,
    factor_pairs,
    is_congruence,
    is_directly_indecomposable,
    is_factor_pair,
    is_simple,
    is_subdirectly_irreducible,
    join,
    meet,
    principal_congruence,
)
from .core import (
    CapExceeded,
    FiniteAlgebra,
    Operation,
    Relation,
    SignatureMismatch,
    find_isomorphism,
    is_homomorphism,
    power,
    preserves,
    product,
    quotient,
    subalgebra_generated,
)
from .formats import ParseError, dump_algebra, dump_relation, parse_algebra, parse_relation
from .pierce import StalkReport, check_patchwork_discrete, pierce_stalks, search_di_not_si
from .preprimal import (
    TruncatedPreprimal,
    build_f,
    build_preprimal,
    discriminator,
    find_pierce_terms,
    pol,
    refute_u_term,
)
from .relations import (
    RelationClassification,
    center_of,
    classify,
    is_central_relation,
    is_totally_reflexive,
    is_totally_symmetric,
)

__all__ = [name for name in dir() if not name.startswith("_")]
