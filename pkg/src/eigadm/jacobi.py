"""Cyclic Jacobi eigensolver for small dense symmetric matrices.

Works on a single ``(p, p)`` matrix or a stack ``(..., p, p)``; every matrix in
a stack is rotated with the same sweep schedule, which keeps the batch fully
vectorised. Intended for p of order ten or less.
"""
from __future__ import annotations

import numpy as np

from .validation import check_symmetric

OFF_TOL = 1e-12
MAX_SWEEPS = 100


def _off_norm(a):
    p = a.shape[-1]
    off = a * (1.0 - np.eye(p))
    return np.sqrt(np.sum(off * off, axis=(-2, -1))), np.sqrt(np.sum(a * a, axis=(-2, -1)))


def jacobi_eigh(a, *, tol=OFF_TOL, max_sweeps=MAX_SWEEPS):
    """Eigen-decompose symmetric matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    a : array_like, shape (..., p, p)
        Symmetric input. Only finite values are accepted.
    tol : float
        Stop once the off-diagonal Frobenius norm drops below
        ``tol * ||a||_F`` for every matrix in the stack.
    max_sweeps : int
        Hard cap on full cyclic sweeps.

    Returns
    -------
    w : ndarray, shape (..., p)
        Eigenvalues, sorted descending.
    q : ndarray, shape (..., p, p)
        Accumulated rotations; column ``k`` of ``q`` is the eigenvector of ``w[..., k]``.
    """
    a = np.array(a, dtype=float, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"invalid input: expected (..., p, p) array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("invalid input: matrix has non-finite entries")
    p = a.shape[-1]
    q = np.broadcast_to(np.eye(p), a.shape).copy()

    for _ in range(max_sweeps):
        off, full = _off_norm(a)
        # converged matrices are frozen so a stack gives the same bits as single calls
        todo = off > tol * full
        if not np.any(todo):
            break
        for k in range(p - 1):
            for m in range(k + 1, p):
                akm = a[..., k, m]
                active = (akm != 0.0) & todo
                if not np.any(active):
                    continue
                safe = np.where(active, akm, 1.0)
                with np.errstate(over="ignore"):
                    theta = (a[..., m, m] - a[..., k, k]) / (2.0 * safe)
                t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                c_ = c[..., None]
                s_ = s[..., None]

                col_k = a[..., :, k].copy()
                col_m = a[..., :, m].copy()
                a[..., :, k] = c_ * col_k - s_ * col_m
                a[..., :, m] = s_ * col_k + c_ * col_m
                row_k = a[..., k, :].copy()
                row_m = a[..., m, :].copy()
                a[..., k, :] = c_ * row_k - s_ * row_m
                a[..., m, :] = s_ * row_k + c_ * row_m
                a[..., k, m] = np.where(active, 0.0, a[..., k, m])
                a[..., m, k] = a[..., k, m]

                qk = q[..., :, k].copy()
                qm = q[..., :, m].copy()
                q[..., :, k] = c_ * qk - s_ * qm
                q[..., :, m] = s_ * qk + c_ * qm

    w = np.diagonal(a, axis1=-2, axis2=-1).copy()
    order = np.argsort(-w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    q = np.take_along_axis(q, order[..., None, :], axis=-1)
    return w, q


def eig_sym_desc(m) -> np.ndarray:
    """Eigenvalues of a symmetric matrix in descending order."""
    w, _ = jacobi_eigh(check_symmetric(m))
    return w
