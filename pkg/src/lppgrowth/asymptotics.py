"""Edge constants, limit shape, equilibrium density, upper-tail rate and edge rescaling."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum
import numpy as np
from scipy import integrate

from ._validation import DomainError, check_gamma, check_positive_int, check_probability

__all__ = [
    "EdgeConstants",
    "Regime",
    "EquilibriumDensity",
    "RateFunction",
    "omega",
    "sigma",
    "edge_constants",
    "shape_contains",
    "exp_constants",
    "equilibrium_density",
    "rate_J",
    "rate_function",
    "small_deviation_coefficient",
    "tail_bound_finiteN",
    "rescale_cdf",
    "sup_distance",
    "convergence_table",
    "tasep_fluct_params",
    "lower_tail_rate",
]


def _check(gamma, q):
    return check_gamma(gamma), check_probability(q)


def omega(gamma, q):
    """Mean growth constant ``(1 + sqrt(q gamma))^2 / (1 - q) - 1``."""
    gamma, q = _check(gamma, q)
    return (1.0 + math.sqrt(q * gamma)) ** 2 / (1.0 - q) - 1.0


def sigma(gamma, q):
    """Fluctuation scale multiplying ``N^{1/3}`` at the edge."""
    gamma, q = _check(gamma, q)
    return (q ** (1 / 6) * gamma ** (-1 / 6) * (math.sqrt(gamma) + math.sqrt(q)) ** (2 / 3)
            * (1.0 + math.sqrt(q * gamma)) ** (2 / 3) / (1.0 - q))


@dataclass(frozen=True)
class EdgeConstants:
    gamma: float
    q: float
    omega: float
    sigma: float
    a: float
    b: float
    c: float
    B: float
    D: float

    def to_dict(self):
        return asdict(self)


def edge_constants(gamma, q):
    gamma, q = _check(gamma, q)
    r = math.sqrt(q * gamma)
    a = (1.0 - r) ** 2 / (1.0 - q)
    b = (1.0 + r) ** 2 / (1.0 - q)
    return EdgeConstants(
        gamma=gamma,
        q=q,
        omega=omega(gamma, q),
        sigma=sigma(gamma, q),
        a=a,
        b=b,
        c=b - a,
        B=(gamma + q) / (2.0 * r),
        D=(1.0 + q * gamma) / (2.0 * r),
    )


def shape_contains(x, y, q):
    """Membership in the limit shape ``y + 2 sqrt(q x y) + x <= 1 - q``."""
    q = check_probability(q)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y < 0):
        raise DomainError("x and y must be nonnegative")
    lhs = y + 2.0 * np.sqrt(q * x * y) + x
    out = lhs <= (1.0 - q) * (1.0 + 1e-12)
    return bool(out) if out.ndim == 0 else out


def exp_constants(gamma):
    """``(mean, scale)`` per unit ``N`` for exponential last passage: ``(1+sqrt g)^2`` and ``g^{-1/6}(1+sqrt g)^{4/3}``."""
    gamma = check_gamma(gamma)
    s = 1.0 + math.sqrt(gamma)
    return s * s, gamma ** (-1 / 6) * s ** (4 / 3)


# ---------------------------------------------------------------------------
# equilibrium density


class Regime(str, Enum):
    GAMMA_GE = "GammaGE"  # gamma >= 1/q: density below 1 on its support
    GAMMA_LT = "GammaLT"  # gamma < 1/q: saturated (= 1) on [0, a]


def _arctan_term(P, x):
    # arctan((P x + 1) / (sqrt(1 - x^2) sqrt(P^2 - 1))) with the x = +-1 and P = 1 limits
    den = np.sqrt(np.clip(1.0 - x * x, 0.0, None)) * math.sqrt(max(P * P - 1.0, 0.0))
    return np.arctan2(P * x + 1.0, den)


@dataclass(frozen=True)
class EquilibriumDensity:
    constants: EdgeConstants
    regime: Regime

    def v(self, x):
        x = np.asarray(x, dtype=float)
        c = self.constants
        d = _arctan_term(c.D, x)
        bb = _arctan_term(c.B, x)
        if self.regime is Regime.GAMMA_GE:
            out = (d - bb) / (2.0 * math.pi)
        else:
            out = (math.pi - d - bb) / (2.0 * math.pi)
        return np.clip(out, 0.0, 1.0)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        c = self.constants
        if np.any(t < 0) or np.any(t > c.b * (1 + 1e-12)):
            raise DomainError(f"density is defined on [0, {c.b}]")
        x = np.clip(2.0 * (t - c.a) / c.c - 1.0, -1.0, 1.0)
        out = np.where(t >= c.a, self.v(x), 1.0 if self.regime is Regime.GAMMA_LT else 0.0)
        return float(out) if out.ndim == 0 else out

    def mass(self):
        """``int_0^b phi`` with ``t = a + c (1 - cos th) / 2`` on the arctan part."""
        c = self.constants
        f = lambda th: float(self.v(-math.cos(th))) * 0.5 * c.c * math.sin(th)
        val, _ = integrate.quad(f, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=200)
        if self.regime is Regime.GAMMA_LT:
            val += c.a
        return val


def equilibrium_density(gamma, q):
    """Constrained equilibrium density ``phi`` on ``[0, b]``; ``gamma = 1/q`` uses the unsaturated form."""
    c = edge_constants(gamma, q)
    regime = Regime.GAMMA_GE if c.gamma * c.q >= 1.0 else Regime.GAMMA_LT
    return EquilibriumDensity(c, regime)


# ---------------------------------------------------------------------------
# upper tail rate


def _J(c, t):
    if t <= c.b:
        return 0.0
    x = 2.0 * (t - c.a) / c.c - 1.0
    big = math.acosh(x)
    r = math.sqrt(c.q * c.gamma)
    g1, g2 = c.gamma - c.q, 1.0 - c.q * c.gamma

    # y = cosh(th) removes the 1/sqrt(y^2 - 1) endpoint singularity
    def f(th):
        y = math.cosh(th)
        return (x - y) * (g1 / (y + c.B) + g2 / (y + c.D))

    val, err = integrate.quad(f, 0.0, big, epsabs=0.0, epsrel=1e-12, limit=200)
    if not math.isfinite(val):
        raise ArithmeticError(f"rate quadrature failed at t={t}")
    return c.c / (8.0 * r) * val


@dataclass(frozen=True)
class RateFunction:
    constants: EdgeConstants

    def __call__(self, t):
        if np.ndim(t):
            return np.array([_J(self.constants, float(s)) for s in np.ravel(t)]).reshape(np.shape(t))
        if t < 0:
            raise DomainError("t must be >= 0")
        return _J(self.constants, float(t))


def rate_function(gamma, q):
    return RateFunction(edge_constants(gamma, q))


def rate_J(gamma, q, t):
    """Upper-tail rate ``J(t)``: zero for ``t <= b``, positive beyond."""
    if t < 0:
        raise DomainError("t must be >= 0")
    return _J(edge_constants(gamma, q), float(t))


def small_deviation_coefficient(gamma, q):
    """Leading coefficient ``k`` in ``J(b + d) ~ k d^{3/2}`` as ``d -> 0``."""
    gamma, q = _check(gamma, q)
    return (2.0 * (1.0 - q) ** 1.5 * gamma**0.25
            / (3.0 * q**0.25 * (math.sqrt(q) + math.sqrt(gamma)) * (1.0 + math.sqrt(q * gamma))))


def tail_bound_finiteN(gamma, q, N, t):
    """Upper bound ``exp(-2 N J(t + 1))`` on ``P[G(M, N) > N t]`` valid for every ``N``."""
    N = check_positive_int(N, "N")
    if t < 0:
        raise DomainError("t must be >= 0")
    return math.exp(-2.0 * N * rate_J(gamma, q, t + 1.0))


def lower_tail_rate(gamma, q, t):
    """Lower-tail rate at speed ``N^2``; no closed form is available."""
    raise NotImplementedError("lower-tail rate function has no explicit form")


# ---------------------------------------------------------------------------
# rescaling exact CDFs


def _table(exact):
    ts = np.array([v.t for v in exact], dtype=np.int64)
    ps = np.array([v.p for v in exact], dtype=float)
    order = np.argsort(ts)
    ts, ps = ts[order], ps[order]
    if ts.size and np.any(np.diff(ts) != 1):
        raise DomainError("exact CDF values must cover a contiguous integer range")
    return ts, ps


def rescale_cdf(exact, constants, N):
    """``s -> P[G <= floor(N omega + sigma N^{1/3} s)]`` from tabulated exact values."""
    ts, ps = _table(exact)
    center = N * constants.omega
    scale = constants.sigma * N ** (1.0 / 3.0)

    def cdf(s):
        t = math.floor(center + scale * float(s))
        if t < 0:
            return 0.0
        if ts.size == 0 or t < ts[0] or t > ts[-1]:
            raise DomainError(f"threshold {t} outside the tabulated range")
        return float(ps[t - ts[0]])

    return cdf


def _needed_thresholds(constants, N, s_lo, s_hi):
    center = N * constants.omega
    scale = constants.sigma * N ** (1.0 / 3.0)
    return math.floor(center + scale * s_lo), math.floor(center + scale * s_hi), center, scale


def sup_distance(exact, constants, N, limit_cdf, s_lo=-5.0, s_hi=2.0):
    """Exact ``sup_{s in [s_lo, s_hi]} |p_N(s) - F(s)|`` for increasing continuous ``F``.

    ``p_N`` is a step function in ``s``, so the supremum over each step is
    attained at its ends; ``F`` is evaluated only at the jump points.
    """
    ts, ps = _table(exact)
    t_lo, t_hi, center, scale = _needed_thresholds(constants, N, s_lo, s_hi)
    if ts.size == 0 or max(t_lo, 0) < ts[0] or t_hi > ts[-1]:
        raise DomainError("exact table does not cover the rescaled range")
    p_at = lambda t: 0.0 if t < 0 else float(ps[t - ts[0]])
    jumps = [(t - center) / scale for t in range(t_lo + 1, t_hi + 1)]
    edges = [s_lo] + jumps + [s_hi]
    F = [limit_cdf(s) for s in edges]
    best = 0.0
    for k, t in enumerate(range(t_lo, t_hi + 1)):
        p = p_at(t)
        best = max(best, abs(p - F[k]), abs(p - F[k + 1]))
    return best


def convergence_table(gamma, q, ladder, s_lo=-5.0, s_hi=2.0, tol=1e-12):
    """Rows ``{N, sup_dist, grid_lo, grid_hi}`` comparing rescaled exact CDFs to Tracy-Widom."""
    from ._validation import ModelParams
    from .ensemble import meixner_cdf_table
    from .tracy_widom import tw_cdf_fredholm

    c = edge_constants(gamma, q)
    F = lambda s: tw_cdf_fredholm(s).f
    rows = []
    for N in ladder:
        params = ModelParams.from_gamma(gamma, N, q)
        t_lo, t_hi, _, _ = _needed_thresholds(c, N, s_lo, s_hi)
        exact = meixner_cdf_table(params, range(max(t_lo, 0), t_hi + 1), tol=tol)
        d = sup_distance(exact, c, N, F, s_lo, s_hi)
        rows.append({"N": int(N), "sup_dist": d, "grid_lo": s_lo, "grid_hi": s_hi})
    return rows


# ---------------------------------------------------------------------------
# TASEP fluctuations


def tasep_fluct_params(u, t=1.0):
    """``(center, scale)`` for ``Y([ut], t)``.

    With ``P[Y(k, t) <= m] = 1 - P[H(m + k + 1, m + 1) <= t]`` and the
    exponential edge law, linearizing ``(sqrt(M) + sqrt(N))^2`` around the
    Rost centre ``m = t (1 - u)^2 / 4`` gives the scale
    ``2^{-4/3} (1 - u^2)^{2/3} t^{1/3}``; then
    ``P[(Y - center) / scale <= xi] -> 1 - F(-xi)``.
    """
    if not (0.0 <= u < 1.0):
        raise DomainError(f"u must lie in [0, 1), got {u}")
    if t <= 0:
        raise DomainError("t must be positive")
    center = t * (1.0 - u) ** 2 / 4.0
    scale = 2.0 ** (-4.0 / 3.0) * (1.0 - u * u) ** (2.0 / 3.0) * t ** (1.0 / 3.0)
    return center, scale
