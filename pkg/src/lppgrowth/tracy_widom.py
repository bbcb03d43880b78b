"""Tracy-Widom GUE distribution by an Airy-kernel determinant and by Painleve II."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from ._validation import DomainError
from .airy import airy, airy_ai

__all__ = [
    "TwMethod",
    "TwValue",
    "Painleve2Solution",
    "ConvergenceError",
    "airy_kernel",
    "airy_kernel_matrix",
    "airy_tail_bound",
    "kernel_trace_tail",
    "tw_cdf_fredholm",
    "painleve2_solve",
    "tw_cdf_painleve",
    "tw_table",
    "FREDHOLM_RANGE",
    "PAINLEVE_MIN",
]

FREDHOLM_RANGE = (-10.0, 8.0)
PAINLEVE_MIN = -8.0
TAIL_TOL = 1e-12


class ConvergenceError(RuntimeError):
    pass


class TwMethod(str, Enum):
    AIRY_FREDHOLM = "AiryFredholm"
    PAINLEVE2 = "Painleve2"


@dataclass(frozen=True)
class TwValue:
    s: float
    f: float
    method: TwMethod
    est_err: float

    def as_row(self):
        return {"s": self.s, "F": self.f, "method": self.method.value, "est_err": self.est_err}


def airy_tail_bound(x):
    """Upper bound ``e^{-2/3 x^{3/2}} / (2 sqrt(pi) x^{1/4})`` on ``|Ai(x)|`` for ``x > 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bound holds for x > 0 only")
    return np.exp(-2.0 / 3.0 * x**1.5) / (2.0 * math.sqrt(math.pi) * x**0.25)


def kernel_trace_tail(u):
    """Bound on ``int_u^inf A(x, x) dx`` from the Airy bound, for ``u > 0``."""
    return math.exp(-4.0 / 3.0 * u**1.5) / (16.0 * math.pi * u**1.5)


@lru_cache(maxsize=None)
def _upper_cutoff(tol=TAIL_TOL):
    u = 1.0
    while kernel_trace_tail(u) > tol:
        u += 0.25
    return u


def airy_kernel_matrix(x, y=None):
    """``A(x_i, y_j)``; the confluent value ``Ai'(x)^2 - x Ai(x)^2`` is used where ``x = y``."""
    x = np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    ax, apx, _ = airy_ai(x)
    ay, apy, _ = airy_ai(y)
    X, Y = np.meshgrid(x, y, indexing="ij")
    diff = X - Y
    num = np.outer(ax, apy) - np.outer(apx, ay)
    same = diff == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(same, 0.0, num / np.where(same, 1.0, diff))
    if np.any(same):
        diag = apx**2 - x * ax**2
        ii, jj = np.nonzero(same)
        out[ii, jj] = diag[ii]
    return out


def airy_kernel(x, y):
    """Airy kernel ``(Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y)``."""
    return float(airy_kernel_matrix([x], [y])[0, 0])


def _fredholm_det(s, upper, m):
    z, w = np.polynomial.legendre.leggauss(m)
    half = 0.5 * (upper - s)
    x = s + half * (z + 1.0)
    sw = np.sqrt(w * half)
    A = sw[:, None] * airy_kernel_matrix(x) * sw[None, :]
    return float(np.linalg.det(np.eye(m) - A))


def tw_cdf_fredholm(s, tol=1e-8, max_nodes=1024):
    """``F(s) = det(I - A)`` on ``L^2(s, inf)`` by Gauss-Legendre Nystrom discretization.

    The interval is truncated where the Airy tail bound makes the discarded
    kernel trace below ``1e-12``; the node count doubles until two successive
    determinants differ by at most ``tol``.
    """
    s = float(s)
    lo, hi = FREDHOLM_RANGE
    if not (lo <= s <= hi):
        raise DomainError(f"s must lie in [{lo}, {hi}], got {s}")
    upper = max(_upper_cutoff(), s + 1.0)
    tail = kernel_trace_tail(upper)
    m = 16
    prev = _fredholm_det(s, upper, m)
    while True:
        m *= 2
        cur = _fredholm_det(s, upper, m)
        delta = abs(cur - prev)
        if delta <= tol:
            f = min(max(cur, 0.0), 1.0)
            return TwValue(s, f, TwMethod.AIRY_FREDHOLM, delta + tail)
        if m >= max_nodes:
            raise ConvergenceError(f"Nystrom determinant at s={s} not converged: |dF|={delta:.2e}")
        prev = cur


# ---------------------------------------------------------------------------
# Painleve II


@dataclass(frozen=True)
class Painleve2Solution:
    """Hastings-McLeod solution on ``[s_min, x0]`` with running tail integrals.

    ``i1[k] = int_{grid[k]}^inf u^2`` and ``i2[k] = int_{grid[k]}^inf x u^2``;
    the part beyond ``x0`` uses ``u = Ai`` there.
    """

    x0: float
    s_min: float
    tol: float
    grid: np.ndarray
    u: np.ndarray
    up: np.ndarray
    i1: np.ndarray
    i2: np.ndarray
    est_err: np.ndarray
    monotone: bool
    _dense: object = None

    def state(self, x):
        """``(u, u', i1, i2)`` at ``x`` from the dense output."""
        if not (self.s_min <= x <= self.x0):
            raise DomainError(f"x={x} outside the solved range [{self.s_min}, {self.x0}]")
        y = self._dense(x)
        t1, t2 = _ai_tails(self.x0)
        return y[0], y[1], t1 + y[2], t2 + y[3]

    def value(self, x):
        return float(self.state(x)[0])


def _ai_tails(x0):
    a = airy(x0)
    t1 = a.ai_prime**2 - x0 * a.ai**2
    t2 = -(x0**2 * a.ai**2 - x0 * a.ai_prime**2 + a.ai * a.ai_prime) / 3.0
    return t1, t2


_GUARD = 1e3


def _integrate(x0, s_min, rtol):
    a = airy(x0)

    def rhs(x, y):
        u, v = y[0], y[1]
        return [v, 2.0 * u**3 + x * u, -(u * u), -(x * u * u)]

    def blowup(x, y):
        return _GUARD - abs(y[0])

    blowup.terminal = True
    sol = solve_ivp(rhs, (x0, s_min), [a.ai, a.ai_prime, 0.0, 0.0], method="DOP853",
                    rtol=rtol, atol=rtol * 1e-12, dense_output=True, events=blowup)
    if sol.status != 0:
        raise ConvergenceError(f"Painleve II integration stopped at x={sol.t[-1]:.4g}: {sol.message}")
    return sol


def painleve2_solve(x0=8.0, s_min=PAINLEVE_MIN, tol=1e-12):
    """Integrate ``u'' = 2u^3 + x u`` leftward from ``u(x0) = Ai(x0)``.

    ``est_err`` on the grid compares the run at ``tol`` with one at
    ``tol / 16`` and is scaled by ten to stay conservative.
    """
    if x0 < 6:
        raise DomainError("x0 must be >= 6")
    if s_min < PAINLEVE_MIN or s_min >= x0:
        raise DomainError(f"s_min must lie in [{PAINLEVE_MIN}, x0)")
    if not (0 < tol < 1e-3):
        raise DomainError("tol must lie in (0, 1e-3)")
    fine = _integrate(x0, s_min, tol / 16.0)
    coarse = _integrate(x0, s_min, tol)
    grid = fine.t
    y = fine.y
    err = 10.0 * np.max(np.abs(coarse.sol(grid) - y), axis=0)
    t1, t2 = _ai_tails(x0)
    u = y[0]
    if np.any(u <= 0):
        raise ConvergenceError("solution lost positivity")
    monotone = bool(np.all(np.diff(u) >= 0))  # grid is decreasing, so u should increase
    return Painleve2Solution(float(x0), float(s_min), float(tol), grid, u, y[1],
                             t1 + y[2], t2 + y[3], err, monotone, fine.sol)


@lru_cache(maxsize=8)
def _cached_solution(x0, s_min, tol):
    return painleve2_solve(x0, s_min, tol)


def tw_cdf_painleve(s, solution=None):
    """``F(s) = exp(-int_s^inf (x - s) u(x)^2 dx)`` from the Hastings-McLeod solution."""
    sol = solution or _cached_solution(8.0, PAINLEVE_MIN, 1e-12)
    s = float(s)
    if s > sol.x0:
        t1, t2 = _ai_tails(s) if s <= 30 else (0.0, 0.0)
        expo = t2 - s * t1
        return TwValue(s, math.exp(-expo), TwMethod.PAINLEVE2, 1e-15 + abs(expo) * 1e-3)
    u, up, i1, i2 = sol.state(s)
    expo = i2 - s * i1
    # ODE error: re-evaluate at the loose tolerance through the stored grid error
    k = int(np.argmin(np.abs(sol.grid - s)))
    ode_err = float(sol.est_err[k]) * (1.0 + abs(s))
    f = math.exp(-expo)
    # u beyond x0 equals Ai up to relative O(Ai^2)
    model_err = abs(airy(sol.x0).ai) ** 4
    return TwValue(s, min(f, 1.0), TwMethod.PAINLEVE2, f * (ode_err + model_err) + 1e-15)


def tw_table(s_grid, method="fredholm"):
    """``F`` on ``s_grid`` (Fredholm route by default)."""
    fn = tw_cdf_fredholm if method == "fredholm" else tw_cdf_painleve
    return [fn(float(s)) for s in s_grid]
