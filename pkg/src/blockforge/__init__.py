"""Canonical tree-decompositions displaying blocks and profiles.

The package computes, for a finite connected graph, a tree-decomposition
that is invariant under every automorphism, distinguishes all its
k-profiles (or all maximal robust profiles) with separations of minimum
possible order, and shows every separable k-block verbatim as a part.
Everything is backed by exhaustive oracles, so graphs are capped at a
small vertex count.
"""
from .blocks_profiles import (
    Block,
    Profile,
    block_profile,
    enumerate_profiles,
    haven_component,
    is_profile,
    is_r_robust,
    is_robust,
    k_blocks,
    maximal_robust_profiles,
    s_blocks,
)
from .enumeration import (
    CapExceededError,
    automorphisms,
    canonical_labeling,
    enumerate_separations,
    generating_permutations,
    get_cap,
    is_canonical_system,
    min_distinguisher_order,
    orbit_closure,
    set_cap,
)
from .focusing import build_from_almost_nested, is_almost_nested
from .gluing import tds_isomorphic
from .graph_core import (
    Graph,
    GraphParseError,
    Separation,
    crossing,
    make_separation,
    nested,
    parse_graph_json,
    parse_graph_text,
)
from .pipeline import (
    MAXIMAL_ROBUST,
    DecompositionReport,
    PipelineBugError,
    component_separations,
    decompose,
    decomposition_from_obj,
    is_separable,
    report_to_json,
    s_of_blocks,
    star_decomposition,
    verify,
)
from .refine import RefinementSearchError, refine_nested
from .tree_decomp import (
    TreeDecomposition,
    build_from_nested,
    induced_system,
    td_from_obj,
    td_to_obj,
    to_dot,
    torso,
    validate,
)

__all__ = [
    "Block",
    "CapExceededError",
    "DecompositionReport",
    "Graph",
    "GraphParseError",
    "MAXIMAL_ROBUST",
    "PipelineBugError",
    "Profile",
    "RefinementSearchError",
    "Separation",
    "TreeDecomposition",
    "automorphisms",
    "block_profile",
    "build_from_almost_nested",
    "build_from_nested",
    "canonical_labeling",
    "component_separations",
    "crossing",
    "decompose",
    "decomposition_from_obj",
    "enumerate_profiles",
    "enumerate_separations",
    "generating_permutations",
    "get_cap",
    "haven_component",
    "induced_system",
    "is_almost_nested",
    "is_canonical_system",
    "is_profile",
    "is_r_robust",
    "is_robust",
    "is_separable",
    "k_blocks",
    "make_separation",
    "maximal_robust_profiles",
    "min_distinguisher_order",
    "nested",
    "orbit_closure",
    "parse_graph_json",
    "parse_graph_text",
    "refine_nested",
    "report_to_json",
    "s_blocks",
    "s_of_blocks",
    "set_cap",
    "star_decomposition",
    "td_from_obj",
    "td_to_obj",
    "tds_isomorphic",
    "to_dot",
    "torso",
    "validate",
    "verify",
]

__version__ = "0.1.0"
