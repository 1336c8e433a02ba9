"""Random variates used by the estimator and the risk simulation.

Every sampler takes an :class:`~eigadm.rng.RngStream` and builds its own
generator from it, so the output is a pure function of the stream.
"""
from __future__ import annotations

import numpy as np

from .jacobi import jacobi_eigh
from .rng import RngStream
from .validation import check_dimension, check_nu, check_spectrum

_TWO53 = float(2**53)


def _shape(size, *tail):
    if size is None:
        return tail
    if isinstance(size, (int, np.integer)):
        return (int(size), *tail)
    return (*tuple(size), *tail)


def haar_from_gaussian(g: np.ndarray) -> np.ndarray:
    """Map Gaussian ``(..., p, p)`` matrices to Haar-distributed orthogonal ones.

    This is the Q factor of the QR decomposition normalised so that R has a
    positive diagonal, computed column by column with Gram-Schmidt and one
    reorthogonalisation pass. Vectorised over the stack, it is much cheaper
    than a LAPACK call per small matrix.
    """
    q = np.array(g, dtype=float, copy=True)
    p = q.shape[-1]
    for j in range(p):
        v = q[..., :, j]
        if j:
            basis = q[..., :, :j]
            for _ in range(2):
                v = v - np.einsum("...ik,...k->...i", basis, np.einsum("...ik,...i->...k", basis, v))
        q[..., :, j] = v / np.sqrt(np.sum(v * v, axis=-1, keepdims=True))
    return q


def sample_haar_orthogonal(stream: RngStream, p: int, size=None) -> np.ndarray:
    """Draw orthogonal matrices from the Haar probability measure on O(p)."""
    p = check_dimension(p)
    g = stream.generator().standard_normal(_shape(size, p, p))
    return haar_from_gaussian(g)


def open_unit(gen: np.random.Generator, shape) -> np.ndarray:
    """Uniforms on the open interval (0, 1), on a 2**-53 grid offset by a half step."""
    return (gen.integers(0, 2**53, size=shape, dtype=np.int64) + 0.5) / _TWO53


def sample_ordered_unit(stream: RngStream, n: int, size=None) -> np.ndarray:
    """Uniform draw from {0 < r_1 < ... < r_n < 1}: sorted i.i.d. uniforms."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n!r}")
    u = open_unit(stream.generator(), _shape(size, int(n)))
    return np.sort(u, axis=-1)


def sample_chi_square(stream: RngStream, df: float, size=None):
    """Chi-square variates, as twice a Gamma(df/2) draw.

    numpy's gamma sampler is the Marsaglia-Tsang squeeze/rejection method;
    non-integer ``df`` is allowed.
    """
    df = float(df)
    if not np.isfinite(df) or df <= 0:
        raise ValueError(f"invalid parameter: df must be positive, got {df!r}")
    out = 2.0 * stream.generator().standard_gamma(df / 2.0, size=size)
    return float(out) if size is None else out


def bartlett_factor(gen: np.random.Generator, nu: float, p: int, size=None) -> np.ndarray:
    """Lower-triangular Bartlett factor A with A A^T ~ W_p(nu, I)."""
    shape = _shape(size, p, p)
    a = np.zeros(shape)
    dof = nu - np.arange(p)
    a[..., np.arange(p), np.arange(p)] = np.sqrt(2.0 * gen.standard_gamma(dof / 2.0, size=_shape(size, p)))
    rows, cols = np.tril_indices(p, -1)
    if rows.size:
        a[..., rows, cols] = gen.standard_normal(_shape(size, rows.size))
    return a


def wishart_matrix(stream: RngStream, nu: float, lam, size=None) -> np.ndarray:
    """Draw S ~ W_p(nu, diag(lam)) as L A A^T L with L = diag(sqrt(lam))."""
    lam = check_spectrum(lam, name="lambda")
    p = lam.size
    nu = check_nu(nu, p)
    a = bartlett_factor(stream.generator(), nu, p, size)
    la = np.sqrt(lam)[:, None] * a
    s = la @ np.swapaxes(la, -1, -2)
    return 0.5 * (s + np.swapaxes(s, -1, -2))


def sample_wishart_eigs(stream: RngStream, nu: float, lam, size=None) -> np.ndarray:
    """Descending eigenvalues of S ~ W_p(nu, diag(lam)).

    Only the population spectrum matters for the law of the sample
    eigenvalues, so a diagonal covariance loses no generality.
    """
    w, _ = jacobi_eigh(wishart_matrix(stream, nu, lam, size))
    # rounding can push a tiny eigenvalue to <= 0 for extreme spectra
    return np.maximum(w, np.finfo(float).tiny)
