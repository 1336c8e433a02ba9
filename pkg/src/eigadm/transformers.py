"""scikit-learn compatible wrappers around the eigenvalue estimators.

Each row of ``X`` is one vector of sample eigenvalues (descending, positive);
``transform`` returns the matching row of estimated population eigenvalues.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .estimator import McConfig, compute_tau, psi_star
from .rng import RngStream, derive_stream
from .validation import check_nu, check_spectrum


def _check_spectra(X, est, reset):
    X = check_array(X, dtype=np.float64)
    for row in X:
        check_spectrum(row)
    if reset:
        est.n_features_in_ = X.shape[1]
    elif X.shape[1] != est.n_features_in_:
        raise ValueError(f"X has {X.shape[1]} features, but {type(est).__name__} was fitted with {est.n_features_in_}")
    return X


class AdmissibleEigenvalueEstimator(TransformerMixin, BaseEstimator):
    """Shrink sample eigenvalues with the Monte Carlo tau weights.

    Parameters
    ----------
    nu : float
        Degrees of freedom of the Wishart matrix the eigenvalues came from.
    n_points : int, default=1000
        Monte Carlo points per row.
    antithetic : bool, default=False
        Pair each ratio draw with its reflection.
    random_state : int or None
        Root seed. Row ``i`` uses the stream derived from it with index ``i``,
        so results do not depend on how ``X`` is batched. ``None`` draws a
        fresh seed at fit time.

    Attributes
    ----------
    n_features_in_ : int
    seed_ : int
        Root seed actually used.
    """

    def __init__(self, nu=5.0, n_points=1000, antithetic=False, random_state=None):
        self.nu = nu
        self.n_points = n_points
        self.antithetic = antithetic
        self.random_state = random_state

    def fit(self, X, y=None):
        X = _check_spectra(X, self, reset=True)
        check_nu(self.nu, X.shape[1])
        self.mc_ = McConfig(self.n_points, self.antithetic)
        if self.random_state is None:
            self.seed_ = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
        else:
            self.seed_ = int(self.random_state)
        return self

    def transform(self, X):
        check_is_fitted(self, "seed_")
        X = _check_spectra(X, self, reset=False)
        root = RngStream(self.seed_)
        out = np.empty_like(X)
        for i, l in enumerate(X):
            tau = compute_tau(l, self.nu, self.mc_, derive_stream(root, i))
            out[i] = psi_star(l, tau).psi
        return out


class ScaledEigenvalueEstimator(TransformerMixin, BaseEstimator):
    """``l/(nu+2)`` (``method="phi_star"``) or the MLE ``l/nu`` (``method="mle"``)."""

    def __init__(self, nu=5.0, method="phi_star"):
        self.nu = nu
        self.method = method

    def fit(self, X, y=None):
        X = _check_spectra(X, self, reset=True)
        nu = check_nu(self.nu, X.shape[1])
        if self.method == "phi_star":
            self.divisor_ = nu + 2.0
        elif self.method == "mle":
            self.divisor_ = nu
        else:
            raise ValueError(f"method must be 'phi_star' or 'mle', got {self.method!r}")
        return self

    def transform(self, X):
        check_is_fitted(self, "divisor_")
        return _check_spectra(X, self, reset=False) / self.divisor_
