"""Distribution-distance helpers for comparing samples with exact or limiting laws."""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "dkw_epsilon",
    "two_sample_epsilon",
    "ks_integer",
    "ks_two_sample",
    "ks_continuous",
    "ks_smoothed_lattice",
    "binomial_se",
]


def dkw_epsilon(n, alpha=0.01):
    """Half-width ``sqrt(log(2/alpha) / (2n))`` of the DKW confidence band."""
    if n <= 0:
        raise ValueError("n must be positive")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def two_sample_epsilon(n1, n2, alpha=0.01):
    """Band for two independent ECDFs: each gets its own DKW band at ``alpha / 2``."""
    return dkw_epsilon(n1, alpha / 2) + dkw_epsilon(n2, alpha / 2)


def _ecdf(sorted_x, at):
    return np.searchsorted(sorted_x, at, side="right") / sorted_x.size


def ks_integer(samples, cdf):
    """``sup_x |F_n(x) - F(x)|`` for integer samples and an integer-supported CDF.

    Both functions are right-continuous steps with jumps on the integers, so
    the supremum is attained on the integers between the sample extremes.
    ``cdf`` maps an integer array to probabilities.
    """
    x = np.sort(np.asarray(samples))
    if x.size == 0:
        raise ValueError("no samples")
    grid = np.arange(int(x[0]) - 1, int(x[-1]) + 1)
    exact = np.asarray(cdf(grid), dtype=float)
    # beyond the extremes F_n is 0 or 1; the largest gap there sits at the ends
    tail = max(exact[0], 1.0 - exact[-1])
    return float(max(np.max(np.abs(_ecdf(x, grid) - exact)), tail))


def ks_two_sample(a, b):
    a = np.sort(np.asarray(a))
    b = np.sort(np.asarray(b))
    grid = np.union1d(a, b)
    return float(np.max(np.abs(_ecdf(a, grid) - _ecdf(b, grid))))


def ks_continuous(samples, cdf):
    """One-sample KS distance against a continuous CDF (both sides of each jump)."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    vals = np.unique(x)
    upper = _ecdf(x, vals)
    lower = np.searchsorted(x, vals, side="left") / n
    F = np.array([cdf(v) for v in vals])
    return float(max(np.max(np.abs(upper - F)), np.max(np.abs(lower - F))))


def ks_smoothed_lattice(samples, cdf, center, scale, n_sub=16):
    """KS distance between ``(Y + U - center) / scale`` and ``cdf``.

    ``Y`` is integer valued and ``U`` uniform on ``[0, 1)`` independent of
    ``Y``; the law of ``Y + U`` has the piecewise-linear CDF through
    ``(m + 1, F_n(m))``.  The supremum is taken over ``n_sub + 1`` points per
    unit interval.
    """
    y = np.sort(np.asarray(samples))
    if y.size == 0:
        raise ValueError("no samples")
    ms = np.arange(int(y[0]) - 1, int(y[-1]) + 1)
    Fm = _ecdf(y, ms)
    best = 0.0
    th = np.linspace(0.0, 1.0, n_sub + 1)
    for i in range(ms.size - 1):
        lin = Fm[i] + th * (Fm[i + 1] - Fm[i])
        lim = np.array([cdf((ms[i] + 1 + s - center) / scale) for s in th])
        best = max(best, float(np.max(np.abs(lin - lim))))
    # outside the sampled range the smoothed CDF is 0 or 1
    best = max(best, cdf((ms[0] + 1 - center) / scale), 1.0 - cdf((ms[-1] + 1 - center) / scale))
    return best


def binomial_se(p, n):
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)
