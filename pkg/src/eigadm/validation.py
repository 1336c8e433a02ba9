"""Input validation helpers shared by the estimators, samplers and CLI."""
from __future__ import annotations

import numpy as np


def check_dimension(p) -> int:
    if isinstance(p, bool) or int(p) != p or p < 1:
        raise ValueError(f"invalid dimension: p must be a positive integer, got {p!r}")
    return int(p)


def check_nu(nu, p: int | None = None) -> float:
    """Degrees of freedom; with ``p`` given, require the full-rank case nu >= p."""
    nu = float(nu)
    if not np.isfinite(nu) or nu <= 0:
        raise ValueError(f"invalid parameter: nu must be positive, got {nu!r}")
    if p is not None and nu < p:
        raise ValueError(f"invalid parameter: nu={nu:g} is smaller than p={p}")
    return nu


def check_spectrum(values, *, name: str = "l", descending: bool = True) -> np.ndarray:
    """Validate a positive eigenvalue vector and return it as a float array.

    Non-descending input is rejected rather than sorted.
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"invalid input: {name} must be a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"invalid input: {name} has non-finite entries")
    if np.any(arr <= 0):
        raise ValueError(f"invalid input: {name} must be strictly positive")
    if descending and np.any(np.diff(arr) > 0):
        raise ValueError(f"invalid input: {name} must be sorted in descending order")
    return arr


def check_symmetric(m, *, tol: float = 1e-12) -> np.ndarray:
    """Return a square finite matrix, mirrored from its lower triangle.

    Asymmetry above ``tol`` relative to the largest entry is an error.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValueError(f"invalid input: expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("invalid input: matrix has non-finite entries")
    scale = max(np.abs(a).max(), np.finfo(float).tiny)
    if np.abs(a - a.T).max() > tol * scale:
        raise ValueError("invalid input: matrix is not symmetric")
    low = np.tril(a)
    return low + np.tril(a, -1).T
