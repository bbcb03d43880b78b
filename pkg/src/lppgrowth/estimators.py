"""scikit-learn style transformer for edge rescaling of passage times."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import DomainError, check_gamma, check_positive_int
from .asymptotics import edge_constants, exp_constants

__all__ = ["EdgeRescaler"]


class EdgeRescaler(TransformerMixin, BaseEstimator):
    """Map passage times ``G`` to ``(G - N omega) / (sigma N^{1/3})``.

    Parameters
    ----------
    gamma : float
        Aspect ratio ``M / N``, at least 1.
    q : float, optional
        Geometric parameter; ignored when ``exponential`` is true.
    N : int
        Number of rows of the grid.
    exponential : bool
        Use the exponential-weight constants instead of the geometric ones.

    Attributes
    ----------
    center_, scale_ : float
        ``N omega`` and ``sigma N^{1/3}`` after :meth:`fit`.
    """

    def __init__(self, gamma=1.0, q=0.5, N=1, exponential=False):
        self.gamma = gamma
        self.q = q
        self.N = N
        self.exponential = exponential

    def fit(self, X=None, y=None):
        gamma = check_gamma(self.gamma)
        N = check_positive_int(self.N, "N")
        if self.exponential:
            self.omega_, self.sigma_ = exp_constants(gamma)
        else:
            c = edge_constants(gamma, self.q)
            self.omega_, self.sigma_ = c.omega, c.sigma
        self.center_ = N * self.omega_
        self.scale_ = self.sigma_ * N ** (1.0 / 3.0)
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        X = np.asarray(X, dtype=float)
        if not np.all(np.isfinite(X)):
            raise DomainError("X must be finite")
        return (X - self.center_) / self.scale_

    def inverse_transform(self, X):
        check_is_fitted(self, "scale_")
        return np.asarray(X, dtype=float) * self.scale_ + self.center_
