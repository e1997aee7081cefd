"""Certified topology of real zero curves in the projective plane."""

from .count import (
    MaximalityVerdict,
    TopologyReport,
    classify_maximality,
    count_components,
    count_zero_components,
    genus,
    harnack_bound,
    sign_certify,
)
from .corpus import classical_corpus, poly_mul, poly_to_coeffs
from .oracle import grid_component_count
from .sphere import SphereCell

__all__ = [
    "MaximalityVerdict",
    "TopologyReport",
    "SphereCell",
    "classify_maximality",
    "count_components",
    "count_zero_components",
    "genus",
    "harnack_bound",
    "sign_certify",
    "classical_corpus",
    "poly_mul",
    "poly_to_coeffs",
    "grid_component_count",
]
