"""Polynomial optimization via moment relaxations with Hankel certificates."""

from .extract import (
    Certificate,
    QuadratureRule,
    Tolerances,
    certify,
    check_feasibility,
    extract_quadrature,
    moller_bound,
    simultaneous_diagonalize,
    verify_quadrature,
)
from .gns import (
    GnsModel,
    build_gns_model,
    certify_hankel,
    is_flat,
    kernel_basis,
    max_commutator_rank,
    modified_moment_matrix,
    multiplication_operators,
    truncation_basis,
)
from .hierarchy import RunConfig, RunReport, run_hierarchy
from .moment import (
    MomentMatrix,
    MomentSequence,
    is_generalized_hankel,
    linear_form_apply,
    localizing_matrix,
    moment_matrix,
    psd_check,
)
from .poly import (
    Monomial,
    MonomialBasis,
    Polynomial,
    devectorize,
    evaluate,
    monomials_up_to,
    vectorize,
)
from .sdp import PopProblem, SdpProblem, SdpSolution, SolveOptions, assemble_relaxation, solve_sdp

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
