"""Moduli-space geometry of two-operator Hamiltonian pencils.

Ground states of ``H1 + g H2`` map to points ``(<H1>, <H2>)`` on the convex
boundary of the set of attainable expectation pairs.  The boundary's
curvature vanishes at quantum critical points.
"""

from .errors import (
    ConvergenceError,
    DimensionLimitError,
    IllConditionedError,
    InvalidModelError,
    NonCommutingError,
    NotHermitianError,
    NumericalError,
    UndefinedCurvatureError,
    ValidationError,
    ZerocurvError,
)
from .moduli import (
    BoundaryCurve,
    BoundaryPoint,
    BranchCurve,
    TransitionKind,
    TransitionReport,
    check_convexity,
    check_normal,
    curvature_finite_difference,
    curvature_from_spectrum,
    detect_transition,
    energy_second_derivative,
    hellmann_feynman_residuals,
    sweep_boundary,
    trace_branches,
)
from .operators import (
    OperatorMatrix,
    OperatorPair,
    PauliString,
    build_tfim,
    build_toric_code,
    commutator_norm,
    pauli_string_to_matrix,
    random_hermitian,
)
from .spectra import SpectralDecomposition, eigendecompose, expectation, ground_state, spectral_gap
from .tfim_exact import boundary_exact, curvature_exact, elliptic_E, elliptic_K, magnetization

__version__ = "0.1.0"
