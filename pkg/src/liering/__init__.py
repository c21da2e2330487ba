"""Finite nilpotent Lie rings over Z/p^e.

Structure-constant rings, presentation parsing and instantiation through a
nilpotent quotient of the free ring, the p-cover / descendant generation
machinery, and the classification of the maximal-class rings of order p^8
with its PORC count verification.
"""

from .gfplin import (
    Subspace,
    hyperplanes,
    power_coset_transversal,
    primitive_root,
    rref,
    subspace_orbits,
)
from .rings import (
    LieRing,
    Subgroup,
    check_lemma2,
    is_consistent,
    lower_central_series,
    lower_p_central_series,
    nilpotency_class,
    p_class,
    is_maximal_class,
    quotient,
    ring_from_json,
    ring_to_json,
    standard_form,
)
from .presentations import Presentation, parse, instantiate, print_presentation
from .catalog import CatalogEntry, catalog_p7, catalog_p8
from .generation import (
    AutAction,
    DescendantSet,
    PCover,
    allowable_subspaces,
    automorphisms,
    extend_to_cover,
    immediate_descendants,
    is_terminal,
    nucleus,
    p_cover,
)
from .classification import (
    EquivRelation,
    PorcFormula,
    classify,
    cross_validate,
    is_isomorphic,
    parent_formula,
    porc_sum_check,
    solve_equivalence,
    theorem1,
)

__all__ = [
    "Subspace",
    "hyperplanes",
    "power_coset_transversal",
    "primitive_root",
    "rref",
    "subspace_orbits",
    "LieRing",
    "Subgroup",
    "check_lemma2",
    "is_consistent",
    "lower_central_series",
    "lower_p_central_series",
    "nilpotency_class",
    "p_class",
    "is_maximal_class",
    "quotient",
    "ring_from_json",
    "ring_to_json",
    "standard_form",
    "Presentation",
    "parse",
    "instantiate",
    "print_presentation",
    "CatalogEntry",
    "catalog_p7",
    "catalog_p8",
    "AutAction",
    "DescendantSet",
    "PCover",
    "allowable_subspaces",
    "automorphisms",
    "extend_to_cover",
    "immediate_descendants",
    "is_terminal",
    "nucleus",
    "p_cover",
    "EquivRelation",
    "PorcFormula",
    "classify",
    "cross_validate",
    "is_isomorphic",
    "parent_formula",
    "porc_sum_check",
    "solve_equivalence",
    "theorem1",
]
