"""Exact spectral sequences of filtered chain complexes over prime fields."""

from filtspec.complex import (
    ChainComplex,
    FilteredComplex,
    InvalidComplexError,
    make_column_filtration,
    make_random,
    make_total_of_bicomplex,
    make_trivial_filtration,
    validate,
)
from filtspec.lattice import (
    LinearMap,
    Subquotient,
    Subspace,
    butterfly,
    image,
    induced_map,
    intersect,
    kernel,
    preimage,
    pushforward,
    subquotient,
    subspace_sum,
)
from filtspec.specseq import (
    connecting_isomorphism,
    convergence_report,
    differential,
    homology,
    page,
    page_entry,
    stabilization_index,
    turn_page_check,
)

__all__ = [
    "ChainComplex",
    "FilteredComplex",
    "InvalidComplexError",
    "LinearMap",
    "Subquotient",
    "Subspace",
    "butterfly",
    "connecting_isomorphism",
    "convergence_report",
    "differential",
    "homology",
    "image",
    "induced_map",
    "intersect",
    "kernel",
    "make_column_filtration",
    "make_random",
    "make_total_of_bicomplex",
    "make_trivial_filtration",
    "page",
    "page_entry",
    "preimage",
    "pushforward",
    "stabilization_index",
    "subquotient",
    "subspace_sum",
    "turn_page_check",
    "validate",
]
