"""Birkhoff-James orthogonality in finite-dimensional normed spaces."""

__version__ = "0.1.0"

from .auerbach import AuerbachSystem, auerbach_system, mutual_orthogonality_residual
from .bj_core import (
    EPS_ORTH,
    OrthVerdict,
    ProjLine,
    canonicalize,
    is_bj_orthogonal,
    is_orth_via_functional,
    lambda_curve,
    min_gain,
    sample_lines,
    thales_alpha,
    unique_right_neighbor_2d,
)
from .errors import (
    BJOrthoError,
    ConvergenceFailure,
    DegenerateInput,
    DimensionMismatch,
    DuplicateLines,
    NonSmoothPoint,
    Overflow,
    SearchFailed,
    SpecError,
    Unsupported,
)
from .norms import (
    DualFunctional,
    NormOracle,
    NormSpec,
    conj_differential,
    custom_oracle,
    dual_oracle,
    eval_norm,
    grad_norm,
    gram_oracle,
    lp_oracle,
    parse_norm_spec,
    polyhedral_oracle,
    supporting_functional,
)
