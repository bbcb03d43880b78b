"""Airy function Ai and its derivative on [-30, 30].

Self-contained evaluator: Taylor series of the Airy equation ``y'' = x y``
re-centred on a fixed grid of anchors for moderate ``|x|``, and the classical
asymptotic expansions beyond the switch points.  Anchor values are produced
once at import time by stepping the Taylor series outward from ``x = 0`` on the
oscillatory side and inward from the right switch point on the decaying side,
so each propagation runs in the numerically stable direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["AiryValue", "airy", "airy_ai", "AIRY_RANGE"]

AIRY_RANGE = 30.0

AI0 = 0.35502805388781723926  # 3^(-2/3) / Gamma(2/3)
AIP0 = -0.25881940379280679840  # -3^(-1/3) / Gamma(1/3)

# switch points: asymptotic expansions are used outside [_X_NEG, _X_POS]
_X_NEG = -10.0
_X_POS = 8.0
_SPACING = 0.25
_N_TAYLOR = 40
_EPS = 2.0**-52


@dataclass(frozen=True)
class AiryValue:
    x: float
    ai: float
    ai_prime: float
    est_err: float


def _taylor_coeffs(center, y0, dy0, n_terms=_N_TAYLOR):
    a = np.zeros(n_terms)
    a[0], a[1] = y0, dy0
    a[2] = center * y0 / 2.0
    for n in range(1, n_terms - 2):
        a[n + 2] = (center * a[n] + a[n - 1]) / ((n + 2) * (n + 1))
    return a


def _taylor_eval(a, h):
    """Horner evaluation of value and derivative; ``a`` has shape (..., n)."""
    n = a.shape[-1]
    val = a[..., n - 1] * np.ones_like(h)
    der = (n - 1) * a[..., n - 1] * np.ones_like(h)
    for k in range(n - 2, -1, -1):
        val = val * h + a[..., k]
        if k >= 1:
            der = der * h + k * a[..., k]
    return val, der


def _asym_coeffs(n_max=60):
    u = [1.0]
    for k in range(1, n_max):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    u = np.array(u)
    k = np.arange(n_max)
    v = -(6 * k + 1) / (6 * k - 1) * u
    return u, v


_U, _V = _asym_coeffs()


def _truncated_sum(coeffs, z):
    """Sum ``coeffs[k] * z**k`` stopping at the smallest term (optimal truncation).

    Returns the sum and the magnitude of the first omitted term.
    """
    total = np.zeros_like(z)
    term_prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)
    tail = np.zeros_like(z)
    zk = np.ones_like(z)
    for c in coeffs:
        term = c * zk
        grow = np.abs(term) >= np.abs(term_prev)
        stop = active & grow
        tail[stop] = np.abs(term[stop])
        active &= ~grow
        total = np.where(active, total + term, total)
        term_prev = np.where(active, term, term_prev)
        small = active & (np.abs(term) <= _EPS * 1e-3 * np.abs(total))
        tail[small] = np.abs(term[small])
        active &= ~small
        if not active.any():
            break
        zk = zk * z
    return total, tail


def _asym_positive(x):
    zeta = (2.0 / 3.0) * x**1.5
    z = -1.0 / zeta
    su, eu = _truncated_sum(_U, z)
    sv, ev = _truncated_sum(_V, z)
    pref = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = pref * x**-0.25 * su
    aip = -pref * x**0.25 * sv
    # exp(-zeta) inherits the relative rounding error of zeta
    err = pref * (x**-0.25 * eu + x**0.25 * ev) + 4 * _EPS * (1 + zeta) * (np.abs(ai) + np.abs(aip))
    return ai, aip, err


def _asym_negative(x):
    r = -x
    zeta = (2.0 / 3.0) * r**1.5
    z2 = -1.0 / zeta**2
    ue, uee = _truncated_sum(_U[0::2], z2)
    uo, uoe = _truncated_sum(_U[1::2], z2)
    ve, vee = _truncated_sum(_V[0::2], z2)
    vo, voe = _truncated_sum(_V[1::2], z2)
    uo, uoe, vo, voe = uo / zeta, uoe / zeta, vo / zeta, voe / zeta
    phase = zeta - math.pi / 4
    c, s = np.cos(phase), np.sin(phase)
    amp = 1.0 / math.sqrt(math.pi)
    ai = amp * r**-0.25 * (c * ue + s * uo)
    aip = amp * r**0.25 * (s * ve - c * vo)
    # phase carries an absolute rounding error of order eps * zeta
    err = amp * (r**-0.25 * (uee + uoe) + r**0.25 * (vee + voe))
    err = err + amp * 4 * _EPS * (1 + zeta) * (r**-0.25 + r**0.25)
    return ai, aip, err


def _build_anchors():
    centers = np.arange(_X_NEG, _X_POS + _SPACING / 2, _SPACING)
    i0 = int(round(-_X_NEG / _SPACING))
    table = np.zeros((centers.size, _N_TAYLOR))
    table[i0] = _taylor_coeffs(0.0, AI0, AIP0)
    # oscillatory side: stable outward propagation from the origin
    for i in range(i0, 0, -1):
        y, dy = _taylor_eval(table[i], np.array(-_SPACING))
        table[i - 1] = _taylor_coeffs(centers[i - 1], float(y), float(dy))
    # decaying side: Ai is dominant when stepping leftward
    ai, aip, _ = _asym_positive(np.array([centers[-1]]))
    table[-1] = _taylor_coeffs(centers[-1], float(ai[0]), float(aip[0]))
    for i in range(centers.size - 1, i0 + 1, -1):
        y, dy = _taylor_eval(table[i], np.array(-_SPACING))
        table[i - 1] = _taylor_coeffs(centers[i - 1], float(y), float(dy))
    return centers, table


_CENTERS, _TABLE = _build_anchors()


def airy_ai(x):
    """Vectorised ``(Ai(x), Ai'(x), est_err)`` for ``|x| <= 30``."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(np.abs(x) > AIRY_RANGE):
        raise ValueError(f"airy: argument outside supported range [-{AIRY_RANGE}, {AIRY_RANGE}]")
    shape = x.shape
    x = x.ravel()
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    err = np.empty_like(x)

    lo = x < _X_NEG
    hi = x > _X_POS
    mid = ~(lo | hi)
    if lo.any():
        ai[lo], aip[lo], err[lo] = _asym_negative(x[lo])
    if hi.any():
        ai[hi], aip[hi], err[hi] = _asym_positive(x[hi])
    if mid.any():
        xm = x[mid]
        idx = np.clip(np.rint((xm - _X_NEG) / _SPACING).astype(int), 0, _CENTERS.size - 1)
        h = xm - _CENTERS[idx]
        v, d = _taylor_eval(_TABLE[idx], h)
        ai[mid], aip[mid] = v, d
        # anchor propagation and Horner rounding, measured well below this
        err[mid] = 5e-15 * (1.0 + np.abs(xm)) * np.maximum(1.0, np.abs(v) + np.abs(d))
    return ai.reshape(shape), aip.reshape(shape), err.reshape(shape)


def airy(x: float) -> AiryValue:
    """Ai and Ai' at a single point, with an error estimate."""
    ai, aip, err = airy_ai(np.array([float(x)]))
    return AiryValue(float(x), float(ai[0]), float(aip[0]), float(err[0]))
