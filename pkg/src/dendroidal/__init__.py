"""Exact dendroidal homology with bar and cobar constructions."""

from .barcobar import Bar, CoBar, bar, cobar
from .dhomology import build_dc, category_pair_homology, dendroidal_homology
from .duality import counit, triangle_identities, unit, verify_duality
from .exactalg import ChainComplex, ChainMap, HomologyResult, homology, is_quasi_iso, smith_normal_form
from .presheaf import nerve, parse_presheaf, random_test_presheaf
from .trees import Morphism, Tree, enumerate_trees, parse_term

__version__ = "0.1.0"

__all__ = [
    "Bar",
    "ChainComplex",
    "ChainMap",
    "CoBar",
    "HomologyResult",
    "Morphism",
    "Tree",
    "bar",
    "build_dc",
    "category_pair_homology",
    "cobar",
    "counit",
    "dendroidal_homology",
    "enumerate_trees",
    "homology",
    "is_quasi_iso",
    "nerve",
    "parse_presheaf",
    "parse_term",
    "random_test_presheaf",
    "smith_normal_form",
    "triangle_identities",
    "unit",
    "verify_duality",
]
