"""Hyperelliptic A_r-stable curves: dual graphs, involutions and cyclic double covers."""
from hyperstack.cohomology import (
    a1_separating_decomposition,
    canonical_base_locus,
    classify_genus1,
    exist_decomposition,
    h0_h1,
    hom_omega_dimensions,
    unramifiedness_certificate,
)
from hyperstack.cover import build_cover, extract_cover_data, validate_cover_data
from hyperstack.curve_graph import arithmetic_genus, is_stable, omega_degree
from hyperstack.enumerator import enumerate_strata
from hyperstack.involution import find_hyperelliptic_involutions, quotient, validate_involution
from hyperstack.models import CoverData, CurveGraph, DecoratedInvolution, TreeBundle

__all__ = [
    "CoverData",
    "CurveGraph",
    "DecoratedInvolution",
    "TreeBundle",
    "a1_separating_decomposition",
    "arithmetic_genus",
    "build_cover",
    "canonical_base_locus",
    "classify_genus1",
    "enumerate_strata",
    "exist_decomposition",
    "extract_cover_data",
    "find_hyperelliptic_involutions",
    "h0_h1",
    "hom_omega_dimensions",
    "is_stable",
    "omega_degree",
    "quotient",
    "unramifiedness_certificate",
    "validate_cover_data",
    "validate_involution",
]
