"""Admissible estimation of covariance eigenvalues under scale-invariant loss."""
from .estimator import (
    EstimateResult,
    McConfig,
    TauMatrix,
    compute_tau,
    estimate,
    loss,
    mle,
    phi_star,
    psi_star,
    tilde_tau,
)
from .jacobi import eig_sym_desc, jacobi_eigh
from .rng import RngStream, derive_stream
from .sampling import (
    sample_chi_square,
    sample_haar_orthogonal,
    sample_ordered_unit,
    sample_wishart_eigs,
)

__version__ = "0.1.0"

__all__ = [
    "EstimateResult",
    "McConfig",
    "RngStream",
    "TauMatrix",
    "compute_tau",
    "derive_stream",
    "eig_sym_desc",
    "estimate",
    "jacobi_eigh",
    "loss",
    "mle",
    "phi_star",
    "psi_star",
    "sample_chi_square",
    "sample_haar_orthogonal",
    "sample_ordered_unit",
    "sample_wishart_eigs",
    "tilde_tau",
]
