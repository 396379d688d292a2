"""Numerical certification of curvature bounds for glued collar metrics.

The package builds the C^1 cubic interpolation between two collar metrics
with isometric boundaries, mollifies it to a C-infinity metric within an
explicit C^1 budget, and grid-certifies intermediate Ricci (Ric_k) and
k-th scalar (Sc_k) curvature bounds on the result.
"""

__version__ = "0.1.0"

from .chart import (
    CollarChart,
    CollarMetric,
    Point,
    SliceChart,
    collar_chart,
    make_diagonal_torus,
    make_warped_product,
    mirror_collar,
    round_sphere_chart,
)
from .curvature import FDConfig, SamplingPlan, curvature_at, jacobi_operator, sectional
from .errors import GluecertError
from .gluing import (
    GluedMetric,
    GluingParams,
    SplineFamily,
    assemble_glued,
    boundary_condition_check,
    spline_family,
)
from .smoothing import PiecewiseC1Scalar, mollify_c1, smooth_glued
from .verifier import (
    CurvatureCertificate,
    almost_nonneg_check,
    certify,
    diameter_estimate,
    epsilon_nu_search,
    rate_suite,
)

__all__ = [
    "CollarChart",
    "CollarMetric",
    "CurvatureCertificate",
    "FDConfig",
    "GluecertError",
    "GluedMetric",
    "GluingParams",
    "PiecewiseC1Scalar",
    "Point",
    "SamplingPlan",
    "SliceChart",
    "SplineFamily",
    "almost_nonneg_check",
    "assemble_glued",
    "boundary_condition_check",
    "certify",
    "collar_chart",
    "curvature_at",
    "diameter_estimate",
    "epsilon_nu_search",
    "jacobi_operator",
    "make_diagonal_torus",
    "make_warped_product",
    "mirror_collar",
    "mollify_c1",
    "rate_suite",
    "round_sphere_chart",
    "sectional",
    "smooth_glued",
    "spline_family",
]
