"""Radon transforms between affine Grassmannians, their range and inversion."""

from . import _kernels
from .errors import (
    BadRadii,
    DomainMismatch,
    GrassRadonError,
    NotCompactlySupported,
    NotEven,
    NotOrthogonal,
    OddDegree,
    OverflowGuard,
    ParseError,
    RuleTooCoarse,
    UnsupportedCase,
)
from .fields import (
    FieldSpec,
    ScalarField,
    ball_bump_field,
    build_field,
    gaussian_field,
    parse_field_spec,
    shell_bump_field,
    zero_field,
)
from .geometry import AffinePlane, FlagPoint, QuadratureRule, Subspace, make_rng
from .harmonic import SphericalHarmonicExpansion, funk_multiplier, funk_table
from .range import (
    InversionConfig,
    InversionResult,
    MomentReport,
    candidate_moment_polynomial,
    forward_moment_identity_residual,
    invert_equal_rank,
    moment_functional,
    moment_polynomial,
    range_membership_report,
)
from .support import (
    PaleyWienerReport,
    SupportReport,
    pw_condition_i,
    pw_condition_ii,
    support_radius,
    support_theorem_I_harness,
    support_theorem_II_harness,
)
from .transforms import (
    DEFAULT_CONFIG,
    TransformConfig,
    partial_fourier,
    partial_fourier_inverse,
    projection_slice_residual,
    radon_field,
    radon_pq,
)

_kernels.configure_threads()

__version__ = "0.1.0"

__all__ = [
    "AffinePlane",
    "BadRadii",
    "DEFAULT_CONFIG",
    "DomainMismatch",
    "FieldSpec",
    "FlagPoint",
    "GrassRadonError",
    "InversionConfig",
    "InversionResult",
    "MomentReport",
    "NotCompactlySupported",
    "NotEven",
    "NotOrthogonal",
    "OddDegree",
    "OverflowGuard",
    "PaleyWienerReport",
    "ParseError",
    "QuadratureRule",
    "RuleTooCoarse",
    "ScalarField",
    "SphericalHarmonicExpansion",
    "Subspace",
    "SupportReport",
    "TransformConfig",
    "UnsupportedCase",
    "ball_bump_field",
    "build_field",
    "candidate_moment_polynomial",
    "forward_moment_identity_residual",
    "funk_multiplier",
    "funk_table",
    "gaussian_field",
    "invert_equal_rank",
    "make_rng",
    "moment_functional",
    "moment_polynomial",
    "parse_field_spec",
    "partial_fourier",
    "partial_fourier_inverse",
    "projection_slice_residual",
    "pw_condition_i",
    "pw_condition_ii",
    "radon_field",
    "radon_pq",
    "range_membership_report",
    "shell_bump_field",
    "support_radius",
    "support_theorem_II_harness",
    "support_theorem_I_harness",
    "zero_field",
]
