"""Fast invariant checks run by ``eigadm selftest``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimator import McConfig, compute_tau, psi_star
from .rng import RngStream
from .risk import Scenario, analytic_phi_star_risk_identity, simulate_risk
from .sampling import sample_haar_orthogonal

CASES = [((3.0, 1.0), 5), ((1.0, 0.4, 0.1), 5), ((2.0, 1.5, 1.0), 20), ((1.0, 1e-3, 1e-4), 50)]


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def run_selftest(seed: int = 42, *, row_sum_perturbation: float = 0.0) -> list[Check]:
    """Run every check and return the results.

    ``row_sum_perturbation`` is added to tau entries before the row-sum check;
    it only exists so tests can exercise the failure path.
    """
    mc = McConfig(500)
    stream = RngStream(seed)
    checks = []

    worst_sum = worst_neg = worst_scale = 0.0
    bound_ok = True
    for l, nu in CASES:
        l = np.asarray(l)
        tau = compute_tau(l, nu, mc, stream)
        entries = tau.entries + row_sum_perturbation
        worst_sum = max(worst_sum, np.abs(entries.sum(axis=1) - 1 / (nu + 2)).max())
        worst_neg = min(worst_neg, entries.min())
        for c in (1e-6, 1.0, 1e6):
            scaled = compute_tau(c * l, nu, mc, stream).entries
            worst_scale = max(worst_scale, np.abs(scaled - tau.entries).max())
        bound_ok &= bool(np.all(psi_star(l, tau).psi <= l[0] / (nu + 2) * (1 + 1e-12)))
    checks.append(Check("tau row sums", worst_sum <= 1e-12, f"max |row sum - 1/(nu+2)| = {worst_sum:.3g}"))
    checks.append(Check("tau nonnegative", worst_neg >= 0.0, f"min entry = {worst_neg:.3g}"))
    checks.append(Check("scale invariance", worst_scale <= 1e-12, f"max diff = {worst_scale:.3g}"))
    checks.append(Check("shrinkage bound", bound_ok, "psi_i <= l_1/(nu+2)"))

    p1 = float(psi_star([7.0], compute_tau([7.0], 5, mc, stream)).psi[0])
    checks.append(Check("p=1 degeneracy", p1 == 1.0, f"psi(7; nu=5) = {p1!r}"))

    h = sample_haar_orthogonal(stream, 4, size=1000)
    orth = np.abs(np.swapaxes(h, -1, -2) @ h - np.eye(4)).max()
    checks.append(Check("haar orthogonality", orth <= 1e-10, f"max |H^T H - I| = {orth:.3g}"))

    r = simulate_risk(Scenario((1.0, 1.0), 5, "phi_star", n_rep=20000, seed=seed))
    exact = analytic_phi_star_risk_identity(2, 5)
    gap = abs(r.mean_loss - exact)
    checks.append(
        Check(
            "phi_star identity risk",
            gap <= 3 * r.std_error,
            f"{r.mean_loss:.4f} vs {exact:.4f} (3 se = {3 * r.std_error:.4f})",
        )
    )
    return checks
