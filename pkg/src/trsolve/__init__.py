"""trsolve: sparse trust-region maximization via eigenvalue computations."""

from .eigs import EigenEstimate, approx_max_eigvec, min_eig_lower, spectral_norm_upper
from .reference import solve_dense_exact
from .rotation import equalize_rayleighs, extract_solution
from .sdp import SdpFeasible, SdpInfeasible, combine_weights, solve_sdp
from .sparse import (
    MatvecCounter,
    SymmetricCSR,
    dump_matrix_market,
    load_matrix_market,
    load_vector,
    matvec,
    parse_matrix_market,
    parse_vector,
    quad_form,
    save_matrix_market,
)
from .trust_region import (
    ConditioningEstimates,
    FoundVector,
    InfeasibleAtLevel,
    MaximizeResult,
    TrustRegionProblem,
    estimate_conditioning,
    lifted_pair,
    maximize,
    solve_feasibility,
)

__all__ = [
    "ConditioningEstimates",
    "EigenEstimate",
    "FoundVector",
    "InfeasibleAtLevel",
    "MatvecCounter",
    "MaximizeResult",
    "SdpFeasible",
    "SdpInfeasible",
    "SymmetricCSR",
    "TrustRegionProblem",
    "approx_max_eigvec",
    "combine_weights",
    "dump_matrix_market",
    "equalize_rayleighs",
    "estimate_conditioning",
    "extract_solution",
    "lifted_pair",
    "load_matrix_market",
    "load_vector",
    "matvec",
    "maximize",
    "min_eig_lower",
    "parse_matrix_market",
    "parse_vector",
    "quad_form",
    "save_matrix_market",
    "solve_dense_exact",
    "solve_feasibility",
    "solve_sdp",
    "spectral_norm_upper",
]

__version__ = "0.1.0"
