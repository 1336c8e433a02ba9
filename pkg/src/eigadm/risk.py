"""Monte Carlo risk of eigenvalue estimators and the p=2, p=3 risk tables.

Replicate ``k`` of a scenario draws its Wishart matrix from
``derive_stream(derive_stream(root, k), 0)`` and, for the admissible
estimator, its integration points from ``derive_stream(..., 1)``. Replicates
are processed in fixed-size chunks and reduced in replicate order, so results
do not depend on how many workers run the chunks.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .estimator import McConfig, draw_points, finish_points, raw_points, tau_from_points
from .jacobi import jacobi_eigh
from .rng import RngStream, derive_stream
from .sampling import bartlett_factor
from .validation import check_nu, check_spectrum

log = logging.getLogger(__name__)

ESTIMATORS = ("psi_star", "phi_star", "mle")
TAU_POINTS = ("fresh", "frozen")
CHUNK = 128
# stream index reserved for the shared point set when tau_points="frozen"
FROZEN_INDEX = (1 << 64) - 1

TABLE_NUS = (5, 20, 50)
TABLE_PATTERNS = {
    1: [
        (1.0, 1.0),
        (1.0, 0.8),
        (1.0, 0.6),
        (1.0, 0.4),
        (1.0, 0.2),
        (1.0, 0.01),
        (1.0, 0.001),
    ],
    2: [
        (1.0, 1.0, 1.0),
        (1.0, 0.5, 0.25),
        (1.0, 0.1, 0.01),
        (1.0, 1.0, 0.5),
        (1.0, 0.5, 0.5),
        (1.0, 1.0, 0.1),
        (1.0, 0.1, 0.1),
        (1.0, 1.0, 0.01),
        (1.0, 0.01, 0.01),
    ],
}

# Published risks, (psi_star, phi_star) for nu = 5, 20, 50.
PUBLISHED = {
    1: {
        (1.0, 1.0): ((0.623, 0.776), (0.184, 0.263), (0.077, 0.114)),
        (1.0, 0.8): ((0.584, 0.689), (0.160, 0.203), (0.065, 0.078)),
        (1.0, 0.6): ((0.565, 0.637), (0.169, 0.180), (0.080, 0.074)),
        (1.0, 0.4): ((0.587, 0.624), (0.199, 0.185), (0.086, 0.078)),
        (1.0, 0.2): ((0.628, 0.634), (0.197, 0.186), (0.077, 0.077)),
        (1.0, 0.01): ((0.643, 0.633), (0.240, 0.188), (0.151, 0.079)),
        (1.0, 0.001): ((23.271, 0.632), (15.299, 0.188), (14.044, 0.078)),
    },
    2: {
        (1.0, 1.0, 1.0): ((0.942, 1.475), (0.261, 0.523), (0.102, 0.226)),
        (1.0, 0.5, 0.25): ((0.820, 1.060), (0.279, 0.278), (0.145, 0.114)),
        (1.0, 0.1, 0.01): ((5.281, 1.079), (9.666, 0.294), (13.246, 0.120)),
        (1.0, 1.0, 0.5): ((0.866, 1.269), (0.258, 0.369), (0.132, 0.154)),
        (1.0, 0.5, 0.5): ((0.863, 1.092), (0.270, 0.335), (0.135, 0.149)),
        (1.0, 1.0, 0.1): ((1.002, 1.234), (0.353, 0.367), (0.198, 0.155)),
        (1.0, 0.1, 0.1): ((1.006, 1.120), (0.276, 0.360), (0.127, 0.153)),
        (1.0, 1.0, 0.01): ((41.145, 1.233), (20.654, 0.370), (18.899, 0.156)),
        (1.0, 0.01, 0.01): ((11.869, 1.135), (9.718, 0.365), (7.173, 0.155)),
    },
}


def published_risk(table: int, lam, nu, estimator: str) -> float:
    cell = PUBLISHED[table][tuple(float(v) for v in lam)][TABLE_NUS.index(int(nu))]
    return cell[("psi_star", "phi_star").index(estimator)]


@dataclass(frozen=True)
class Scenario:
    lam: tuple
    nu: float
    estimator: str = "psi_star"
    n_rep: int = 10000
    mc: McConfig = field(default_factory=McConfig)
    seed: int = 42
    tau_points: str = "fresh"

    def __post_init__(self):
        lam = tuple(float(v) for v in check_spectrum(self.lam, name="lambda"))
        object.__setattr__(self, "lam", lam)
        check_nu(self.nu, len(lam))
        if self.estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.estimator!r}; choose from {ESTIMATORS}")
        if self.tau_points not in TAU_POINTS:
            raise ValueError(f"tau_points must be one of {TAU_POINTS}")
        if int(self.n_rep) != self.n_rep or self.n_rep < 1:
            raise ValueError(f"n_rep must be >= 1, got {self.n_rep!r}")

    @property
    def p(self) -> int:
        return len(self.lam)


@dataclass
class RiskEstimate:
    mean_loss: float
    std_error: float
    n_rep: int
    ess_min: float | None = None
    n_nonfinite: int = 0
    # heavy-tail flags: 99.9th percentile of losses, how many exceed it, largest loss
    p999: float | None = None
    n_above_p999: int = 0
    max_loss: float | None = None


def _estimate_chunk(s: Scenario, start: int, stop: int):
    root = RngStream(s.seed)
    lam = np.asarray(s.lam)
    p = s.p
    reps = [derive_stream(root, k) for k in range(start, stop)]

    a = np.stack([bartlett_factor(derive_stream(rs, 0).generator(), s.nu, p) for rs in reps])
    la = np.sqrt(lam)[:, None] * a
    sm = la @ np.swapaxes(la, -1, -2)
    l, _ = jacobi_eigh(0.5 * (sm + np.swapaxes(sm, -1, -2)))
    l = np.maximum(l, np.finfo(float).tiny)

    ess = None
    if s.estimator == "phi_star":
        psi = l / (s.nu + 2.0)
    elif s.estimator == "mle":
        psi = l / s.nu
    else:
        if s.tau_points == "frozen":
            h2, r = draw_points(derive_stream(root, FROZEN_INDEX), p, s.mc)
            h2 = np.broadcast_to(h2, (len(reps), *h2.shape))
            r = np.broadcast_to(r, (len(reps), *r.shape))
        else:
            raw = [raw_points(derive_stream(rs, 1), p, s.mc) for rs in reps]
            h2, r = finish_points(np.stack([q[0] for q in raw]), np.stack([q[1] for q in raw]), s.mc)
        weights, ess, _ = tau_from_points(l, s.nu, h2, r)
        psi = np.einsum("kij,kj->ki", weights, l) / (s.nu + 2.0)
        ess = ess.min(axis=-1)

    losses = np.sum((psi / lam - 1.0) ** 2, axis=-1)
    return losses, ess


def replicate_losses(s: Scenario, threads: int = 1):
    """Per-replicate losses (and minimum per-row ESS for psi_star) in replicate order."""
    bounds = [(k, min(k + CHUNK, s.n_rep)) for k in range(0, s.n_rep, CHUNK)]
    workers = (os.cpu_count() or 1) if threads == 0 else threads
    if workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(bounds))) as pool:
            parts = list(pool.map(_estimate_chunk, [s] * len(bounds), *zip(*bounds)))
    else:
        parts = [_estimate_chunk(s, a, b) for a, b in bounds]
    losses = np.concatenate([q[0] for q in parts])
    ess = None if parts[0][1] is None else np.concatenate([q[1] for q in parts])
    return losses, ess


def summarize(losses, ess=None) -> RiskEstimate:
    losses = np.asarray(losses, dtype=float)
    n = losses.size
    finite = np.isfinite(losses)
    mean = float(np.mean(losses))
    with np.errstate(invalid="ignore"):
        se = float(np.std(losses, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    out = RiskEstimate(mean, se, n, n_nonfinite=int(n - finite.sum()))
    if ess is not None:
        out.ess_min = float(np.min(ess))
    if finite.any():
        q = float(np.quantile(losses[finite], 0.999))
        out.p999 = q
        out.n_above_p999 = int(np.sum(losses > q))
        out.max_loss = float(np.max(losses))
    return out


def simulate_risk(s: Scenario, threads: int = 1) -> RiskEstimate:
    """Mean loss of ``s.estimator`` over ``s.n_rep`` Wishart replicates."""
    losses, ess = replicate_losses(s, threads)
    if not np.all(np.isfinite(losses)):
        log.warning("%d non-finite replicate losses in %s", np.sum(~np.isfinite(losses)), s)
    return summarize(losses, ess)


def _trace_moments(p: int, nu: float):
    return p * nu, p * (nu * nu + 2 * nu) + p * (p - 1) * nu


def analytic_identity_risk(p: int, nu: float, divisor: float) -> float:
    """Exact risk of ``l/divisor`` at Sigma = I.

    The loss ``sum_i (l_i/d - 1)^2`` equals ``tr(S^2)/d^2 - 2 tr(S)/d + p``, and
    both trace moments are known in closed form under W_p(nu, I).
    """
    e1, e2 = _trace_moments(p, nu)
    return e2 / divisor**2 - 2.0 * e1 / divisor + p


def analytic_phi_star_risk_identity(p: int, nu: float) -> float:
    p, nu = int(p), check_nu(nu, int(p))
    return 2 * p / (nu + 2) + p * (p - 1) * nu / (nu + 2) ** 2


def analytic_mle_risk_identity(p: int, nu: float) -> float:
    p, nu = int(p), check_nu(nu, int(p))
    return p * (p + 1) / nu


@dataclass
class RiskRow:
    lam: tuple
    nu: float
    estimates: dict  # estimator name -> RiskEstimate


@dataclass
class RiskReport:
    rows: list
    metadata: dict

    def __eq__(self, other):
        if not isinstance(other, RiskReport):
            return NotImplemented
        strip = lambda m: {k: v for k, v in m.items() if k != "wall_ms"}
        return self.rows == other.rows and strip(self.metadata) == strip(other.metadata)


def reproduce_tables(
    table: int,
    seed: int = 42,
    n_rep: int = 10000,
    mc: McConfig | None = None,
    *,
    estimators=("psi_star", "phi_star"),
    nus=TABLE_NUS,
    threads: int = 1,
    tau_points: str = "fresh",
) -> RiskReport:
    """Risk table for p=2 (``table=1``) or p=3 (``table=2``).

    Every cell and estimator shares ``seed``, so estimators within a cell are
    compared on the same Wishart draws.
    """
    if table not in TABLE_PATTERNS:
        raise ValueError(f"table must be 1 or 2, got {table!r}")
    mc = McConfig() if mc is None else mc
    t0 = time.perf_counter()
    rows = []
    for lam in TABLE_PATTERNS[table]:
        for nu in nus:
            est = {}
            for name in estimators:
                s = Scenario(lam, nu, name, n_rep, mc, seed, tau_points)
                est[name] = simulate_risk(s, threads)
                log.info("table %d %s nu=%s %s risk=%.4f", table, lam, nu, name, est[name].mean_loss)
            rows.append(RiskRow(tuple(lam), nu, est))
    from . import __version__

    meta = {
        "seed": seed,
        "n_points": mc.n_points,
        "n_rep": n_rep,
        "version": __version__,
        "wall_ms": round(1000 * (time.perf_counter() - t0)),
        "table": table,
        "antithetic": mc.antithetic,
        "tau_points": tau_points,
    }
    return RiskReport(rows, meta)


def with_seed(s: Scenario, seed: int) -> Scenario:
    return replace(s, seed=seed)
