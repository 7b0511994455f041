"""Rational functions: parsing and extraction, plus realization."""

from .counting import (
    coefficient_count,
    count_exponents,
    nonuniqueness_collection,
    nonuniqueness_demo,
    nonuniqueness_z,
    partner_gamma3,
)
from .extract import denominator_from_j, det_polynomial, extract_pq, field_blocks, interpolate_homogeneous
from .onevar import OneVarParams, canonical_collection, onevar_z, recover_1var, st_coefficients
from .parser import homogenize_fraction, parse, parse_fraction, tokenize
from .poly import MultiPoly, MultiRational, format_complex, functions_agree
from .realize import (
    Labeled,
    RealizationCertificate,
    compile_rational,
    product_by_squares,
    realize_scalar,
    realize_y_matrix,
    two_sided_prune,
)

__all__ = [
    "MultiPoly",
    "MultiRational",
    "format_complex",
    "functions_agree",
    "parse",
    "parse_fraction",
    "homogenize_fraction",
    "tokenize",
    "interpolate_homogeneous",
    "det_polynomial",
    "field_blocks",
    "extract_pq",
    "denominator_from_j",
    "OneVarParams",
    "canonical_collection",
    "onevar_z",
    "st_coefficients",
    "recover_1var",
    "coefficient_count",
    "count_exponents",
    "nonuniqueness_collection",
    "nonuniqueness_z",
    "nonuniqueness_demo",
    "partner_gamma3",
    "Labeled",
    "RealizationCertificate",
    "compile_rational",
    "product_by_squares",
    "realize_scalar",
    "realize_y_matrix",
    "two_sided_prune",
]
