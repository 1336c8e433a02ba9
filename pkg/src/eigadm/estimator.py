"""Admissible eigenvalue estimator and its baselines.

The admissible estimate is a shrinkage combination ``psi_i = sum_j tau_ij l_j``
whose weights ``tau_ij`` are ratios of integrals over ordered unit ratios
``0 < r_1 < ... < r_{p-1} < 1`` and the orthogonal group. Both integrals are
estimated from one shared set of Monte Carlo points (Haar orthogonal matrix,
ordered uniforms), with the weights handled in the log domain.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import RngStream, derive_stream
from .sampling import haar_from_gaussian, open_unit
from .validation import check_nu, check_spectrum


@dataclass(frozen=True)
class McConfig:
    """Integration budget for one tau computation.

    ``antithetic`` pairs every ordered-ratio draw ``r`` with its reflection
    ``1 - r`` (reversed) under the same orthogonal matrix.
    """

    n_points: int = 1000
    antithetic: bool = False

    def __post_init__(self):
        if isinstance(self.n_points, bool) or int(self.n_points) != self.n_points or self.n_points < 1:
            raise ValueError(f"invalid config: n_points must be >= 1, got {self.n_points!r}")
        if self.antithetic and self.n_points < 2:
            raise ValueError("invalid config: antithetic sampling needs n_points >= 2")


@dataclass
class TauMatrix:
    """Tau weights; ``weights`` is the row-stochastic matrix ``(nu+2) * entries``."""

    entries: np.ndarray
    nu: float
    ess: np.ndarray
    std_error: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.weights is None:
            self.weights = self.entries * (self.nu + 2.0)

    @property
    def p(self) -> int:
        return self.entries.shape[0]


@dataclass
class EstimateResult:
    psi: np.ndarray
    tau: TauMatrix
    ess: np.ndarray = field(init=False)

    def __post_init__(self):
        self.ess = self.tau.ess


def raw_points(stream: RngStream, p: int, mc: McConfig):
    """Gaussian matrices and sorted ratios before the Haar map and antithetic pairing."""
    m = (mc.n_points + 1) // 2 if mc.antithetic else mc.n_points
    g = derive_stream(stream, 0).generator().standard_normal((m, p, p))
    r = np.sort(open_unit(derive_stream(stream, 1).generator(), (m, p - 1)), axis=-1)
    return g, r


def finish_points(g, r, mc: McConfig):
    """Turn :func:`raw_points` output (optionally stacked) into ``(h2, r)``."""
    n = mc.n_points
    h2 = np.square(haar_from_gaussian(g))
    if mc.antithetic:
        h2 = np.concatenate([h2, h2], axis=-3)[..., :n, :, :]
        r = np.concatenate([r, (1.0 - r)[..., ::-1]], axis=-2)[..., :n, :]
    r = np.concatenate([r, np.ones((*r.shape[:-1], 1))], axis=-1)
    return h2, r


def draw_points(stream: RngStream, p: int, mc: McConfig):
    """Squared orthogonal entries and ordered ratios for one tau computation.

    Returns ``h2`` with shape ``(n, p, p)`` and ``r`` with shape ``(n, p)``
    whose last column is the fixed ratio 1.
    """
    return finish_points(*raw_points(stream, p, mc), mc)


def tau_from_points(l, nu, h2, r):
    """Self-normalised ratio estimate of tau from precomputed points.

    Vectorised over leading batch axes: ``l`` is ``(..., p)``, ``h2`` is
    ``(..., n, p, p)`` and ``r`` is ``(..., n, p)``. Returns
    ``(weights, ess, std_error)`` with shapes ``(..., p, p)``, ``(..., p)``,
    ``(..., p, p)``; ``weights`` rows sum to one and tau is ``weights/(nu+2)``.
    """
    l = np.asarray(l, dtype=float)
    p = l.shape[-1]
    ln = l / l[..., :1]
    # y[s] = sum_k l_k h_sk^2 ; A = 1/2 sum_s r_s y_s
    y = np.einsum("...nsk,...k->...ns", h2, ln)
    big_a = 0.5 * np.sum(r * y, axis=-1)
    log_r = np.log(r)
    base = -(p * nu / 2.0 + 2.0) * np.log(big_a)
    if p > 1:
        base = base + (nu / 2.0 - 1.0) * np.sum(log_r[..., :-1], axis=-1)
    logw = base[..., :, None] + 2.0 * log_r  # (..., n, i)
    logw = logw - np.max(logw, axis=-2, keepdims=True)
    w = np.exp(logw)

    num = np.einsum("...ni,...nij->...ij", w, h2)
    # sum_j h_ij^2 = 1, so the row total of the numerators is the denominator
    den = np.sum(num, axis=-1, keepdims=True)
    ratio = num / den

    wsum = np.sum(w, axis=-2)
    ess = wsum**2 / np.sum(w * w, axis=-2)
    resid = h2 - ratio[..., None, :, :]
    var = np.einsum("...ni,...nij->...ij", w * w, resid * resid)
    std_error = np.sqrt(var) / wsum[..., :, None] / (nu + 2.0)
    return ratio, ess, std_error


def compute_tau(l, nu, mc: McConfig | None = None, stream: RngStream | None = None) -> TauMatrix:
    """Monte Carlo estimate of the tau weight matrix for sample eigenvalues ``l``.

    Each row sums to ``1/(nu+2)`` and every entry is nonnegative. The result
    is invariant to rescaling ``l`` when the same stream is used.
    """
    l = check_spectrum(l, descending=False)
    p = l.size
    nu = check_nu(nu, p)
    mc = McConfig() if mc is None else mc
    stream = RngStream(0) if stream is None else stream
    h2, r = draw_points(stream, p, mc)
    weights, ess, se = tau_from_points(l, nu, h2, r)
    return TauMatrix(weights / (nu + 2.0), nu, ess, se, weights)


def psi_star(l, tau: TauMatrix) -> EstimateResult:
    l = check_spectrum(l, descending=False)
    if tau.entries.shape != (l.size, l.size):
        raise ValueError(f"dimension mismatch: tau is {tau.entries.shape}, l has length {l.size}")
    return EstimateResult(tau.weights @ l / (tau.nu + 2.0), tau)


def estimate(l, nu, mc: McConfig | None = None, stream: RngStream | None = None) -> EstimateResult:
    """Admissible estimate of the population eigenvalues from sample eigenvalues ``l``."""
    return psi_star(l, compute_tau(l, nu, mc, stream))


def phi_star(l, nu) -> np.ndarray:
    """Best scalar multiple of ``l`` under the scale-invariant loss, ``l/(nu+2)``."""
    return check_spectrum(l, descending=False) / (check_nu(nu) + 2.0)


def mle(l, nu) -> np.ndarray:
    return check_spectrum(l, descending=False) / check_nu(nu)


def tilde_tau(tau: TauMatrix, l) -> np.ndarray:
    """``tau_ij * l_j / l_i``; row sums times ``l_i`` give the estimate."""
    l = check_spectrum(l, descending=False)
    if tau.entries.shape != (l.size, l.size):
        raise ValueError(f"dimension mismatch: tau is {tau.entries.shape}, l has length {l.size}")
    return tau.entries * l[None, :] / l[:, None]


def loss(psi, lam) -> float:
    """Scale-invariant squared error ``sum_i (psi_i/lam_i - 1)^2``, index by index."""
    psi = np.asarray(psi, dtype=float)
    lam = check_spectrum(lam, name="lambda", descending=False)
    if psi.shape != lam.shape:
        raise ValueError(f"dimension mismatch: psi {psi.shape} vs lambda {lam.shape}")
    return float(np.sum((psi / lam - 1.0) ** 2))
