"""Parameter containers and input validation helpers."""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when a parameter lies outside the model's domain."""


def check_probability(q, name="q"):
    """Return ``q`` as float, requiring ``0 < q < 1``."""
    if isinstance(q, bool) or not isinstance(q, numbers.Real):
        raise DomainError(f"{name} must be a real number, got {q!r}")
    q = float(q)
    if not (0.0 < q < 1.0):
        raise DomainError(f"{name} must lie in (0, 1), got {q}")
    return q


def check_positive_int(n, name):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {n!r}")
    if n < 1:
        raise DomainError(f"{name} must be >= 1, got {n}")
    return int(n)


def check_nonneg_int(n, name):
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise DomainError(f"{name} must be an integer, got {n!r}")
    if n < 0:
        raise DomainError(f"{name} must be >= 0, got {n}")
    return int(n)


def check_gamma(gamma):
    if isinstance(gamma, bool) or not isinstance(gamma, numbers.Real) or not math.isfinite(gamma):
        raise DomainError(f"gamma must be a finite real, got {gamma!r}")
    gamma = float(gamma)
    if gamma < 1.0:
        raise DomainError(f"gamma must be >= 1, got {gamma}")
    return gamma


def check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, numbers.Integral):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    if not (0 <= seed < 2**64):
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)


def rows_for_gamma(gamma, N):
    """``[gamma * N]``, robust to binary rounding of ``gamma``."""
    return int(math.floor(gamma * N + 1e-9))


@dataclass(frozen=True)
class ModelParams:
    """Geometric corner-growth configuration: success parameter and grid size.

    ``M`` counts columns (first coordinate) and ``N`` rows; ``M >= N``.
    """

    q: float
    M: int
    N: int

    def __post_init__(self):
        object.__setattr__(self, "q", check_probability(self.q))
        object.__setattr__(self, "M", check_positive_int(self.M, "M"))
        object.__setattr__(self, "N", check_positive_int(self.N, "N"))
        if self.M < self.N:
            raise DomainError(f"require M >= N, got M={self.M}, N={self.N}")

    @classmethod
    def from_gamma(cls, gamma, N, q):
        gamma = check_gamma(gamma)
        N = check_positive_int(N, "N")
        return cls(q=q, M=rows_for_gamma(gamma, N), N=N)

    @property
    def gamma(self):
        return self.M / self.N

    @property
    def K(self):
        """Meixner weight parameter ``M - N + 1``."""
        return self.M - self.N + 1

    def to_dict(self):
        return {"q": self.q, "M": self.M, "N": self.N, "gamma": self.gamma}


def as_float_array(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr
