"""Krein-space numerical ranges of small matrices.

Support lines from eigenvalue sweeps of ``H_theta(A)``, hyperbola fits and
shape classification, entry-wise certificates for structured tridiagonal
matrices, and Monte Carlo oracles working from the definition.
"""

from .core import (
    DegenerateError,
    DimensionError,
    KreinError,
    Metric,
    StructureError,
    cartesian_decompose,
    h_theta,
    indefinite_inner,
    is_j_hermitian,
    is_j_unitary,
    j_adjoint,
    j_norm,
    random_j_unitary,
)
from .geometry import (
    BoundaryCurve,
    RayPair,
    Segment,
    TaggedPoint,
    boundary_points,
    classify_range,
    decompose_curve,
    pseudo_convex_join,
    sweep_boundary,
)
from .hyperbola import (
    Hyperbola,
    HyperbolaFitParams,
    RangeClassification,
    Shape,
    fit_quadratic,
    hyperbola_2x2,
    hyperbola_from_fit,
    hyperbola_membership,
    nested_in,
)
from .oracle import (
    ContainmentReport,
    SampleCloud,
    containment_check,
    factor_check6,
    midpoint_witness,
    sample_both,
    sample_range,
    support_consistency,
)
from .spectra import (
    ConvergenceError,
    SupportData,
    curve_poly_eval,
    eig_dense,
    knr_poly_eval,
    split_spectrum,
    support_bounds,
    validity_windows,
)
from .tridiag import (
    Certificate3,
    Certificate4,
    Certificate5,
    Certificate6,
    NormalForm,
    TridiagonalSpec,
    block_reduce4,
    block_reduce5,
    block_reduce6,
    certify,
    certify_order3,
    certify_order4,
    certify_order5,
    certify_order6,
    normal_form,
)

__version__ = "0.1.0"

__all__ = [
    "block_reduce4",
    "block_reduce5",
    "block_reduce6",
    "boundary_points",
    "BoundaryCurve",
    "cartesian_decompose",
    "Certificate3",
    "Certificate4",
    "Certificate5",
    "Certificate6",
    "certify",
    "certify_order3",
    "certify_order4",
    "certify_order5",
    "certify_order6",
    "classify_range",
    "containment_check",
    "ContainmentReport",
    "ConvergenceError",
    "curve_poly_eval",
    "decompose_curve",
    "DegenerateError",
    "DimensionError",
    "eig_dense",
    "factor_check6",
    "fit_quadratic",
    "h_theta",
    "Hyperbola",
    "hyperbola_2x2",
    "hyperbola_from_fit",
    "hyperbola_membership",
    "HyperbolaFitParams",
    "indefinite_inner",
    "is_j_hermitian",
    "is_j_unitary",
    "j_adjoint",
    "j_norm",
    "knr_poly_eval",
    "KreinError",
    "Metric",
    "midpoint_witness",
    "nested_in",
    "normal_form",
    "NormalForm",
    "pseudo_convex_join",
    "random_j_unitary",
    "RangeClassification",
    "RayPair",
    "sample_both",
    "sample_range",
    "SampleCloud",
    "Segment",
    "Shape",
    "split_spectrum",
    "StructureError",
    "support_bounds",
    "support_consistency",
    "SupportData",
    "sweep_boundary",
    "TaggedPoint",
    "TridiagonalSpec",
    "validity_windows",
]
