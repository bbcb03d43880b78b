"""Exact finite-N distribution of last-passage times.

``P[G(M, N) <= t]`` for geometric weights is the gap probability of the
Meixner ensemble above ``t + N - 1``; ``P[H(M, N) <= t]`` for exponential
weights is the gap probability of the Laguerre ensemble above ``t``.  Both are
evaluated as finite determinants built from orthonormal wavefunctions
(polynomial times square-root weight) generated by the three-term recurrence.

A brute-force summation over the Coulomb-gas configurations (``N <= 3``) and a
moment-based Gram-Schmidt construction of the recurrence are kept alongside as
independent oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import gammaln

from ._validation import (
    DomainError,
    check_positive_int,
    check_probability,
)

__all__ = [
    "MonicRecurrence",
    "KernelWindow",
    "CdfValue",
    "TruncationError",
    "meixner_weight_log",
    "meixner_recurrence",
    "laguerre_recurrence",
    "gram_schmidt_recurrence",
    "wavefunctions",
    "lattice_wavefunctions",
    "meixner_wavefunctions",
    "meixner_kernel",
    "laguerre_kernel",
    "exact_cdf_meixner",
    "meixner_cdf_table",
    "brute_force_cdf",
    "exact_cdf_laguerre",
    "tail_truncation_bound",
    "tail_window",
    "gap_determinant",
]

_EPS = np.finfo(float).eps
_RESCALE = 2.0**400


class TruncationError(RuntimeError):
    """A truncated sum or quadrature could not reach the requested accuracy."""


@dataclass(frozen=True)
class MonicRecurrence:
    """Coefficients of ``p_{n+1} = (x - A_n) p_n - B_n p_{n-1}``.

    ``B[0]`` is unused and stored as 0.  ``log_norms[n]`` is the log of the
    squared norm of the monic ``p_n`` under the (unnormalised) weight.
    """

    family: str
    A: np.ndarray
    B: np.ndarray
    log_norms: np.ndarray
    K: Optional[int] = None
    q: Optional[float] = None
    alpha: Optional[float] = None

    @property
    def n_max(self):
        return self.A.size - 1

    @property
    def norms(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_norms)

    def log_weight(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "meixner":
            return meixner_weight_log(x, self.K, self.q)
        with np.errstate(divide="ignore"):
            return self.alpha * np.log(x) - x if self.alpha else -x

    def zeros(self, n):
        """Zeros of the degree-``n`` polynomial (Jacobi matrix eigenvalues)."""
        if n <= 0:
            return np.empty(0)
        if n == 1:
            return np.array([self.A[0]])
        return eigvalsh_tridiagonal(self.A[:n], np.sqrt(self.B[1:n]))


@dataclass(frozen=True)
class KernelWindow:
    """Dense kernel evaluated on a finite set of points.

    For quadrature windows ``weights`` holds the rule's weights; ``values`` is
    then the raw kernel ``K(x_i, x_j)``, not the symmetrised Nystrom matrix.
    """

    offset: float
    points: np.ndarray
    values: np.ndarray
    trace_tail_bound: float
    weights: Optional[np.ndarray] = None

    def nystrom_matrix(self):
        if self.weights is None:
            return self.values
        sw = np.sqrt(self.weights)
        return sw[:, None] * self.values * sw[None, :]


@dataclass(frozen=True)
class CdfValue:
    t: float
    p: float
    err: float
    method: str  # "Fredholm" | "BruteForce" | "ClosedForm"

    def as_row(self):
        return {"t": self.t, "p": self.p, "err": self.err, "method": self.method}


# ---------------------------------------------------------------------------
# weights and recurrences


def meixner_weight_log(x, K, q):
    """``log( C(x+K-1, x) q^x )`` via log-gamma; vectorised over ``x``."""
    x = np.asarray(x, dtype=float)
    return gammaln(x + K) - gammaln(K) - gammaln(x + 1.0) + x * math.log(q)


def _log_norms(log_mass, B):
    with np.errstate(divide="ignore"):
        logs = np.log(B)
    logs[0] = 0.0
    return log_mass + np.cumsum(logs)


def meixner_recurrence(K, q, n_max):
    """Monic Jacobi coefficients for the weight ``C(x+K-1, x) q^x`` on the naturals."""
    K = check_positive_int(K, "K")
    q = check_probability(q)
    n_max = check_positive_int(n_max, "n_max")
    n = np.arange(n_max + 1, dtype=float)
    A = (n + (n + K) * q) / (1.0 - q)
    with np.errstate(over="raise"):
        try:
            B = n * (n + K - 1) * q / (1.0 - q) ** 2
        except FloatingPointError as exc:
            raise OverflowError("Meixner recurrence coefficients overflow") from exc
    if not np.all(np.isfinite(B)) or not np.all(np.isfinite(A)):
        raise OverflowError("Meixner recurrence coefficients overflow")
    log_mass = -K * math.log1p(-q)
    return MonicRecurrence("meixner", A, B, _log_norms(log_mass, B), K=K, q=q)


def laguerre_recurrence(alpha, n_max):
    """Monic Jacobi coefficients for the weight ``x^alpha e^{-x}`` on the half line."""
    alpha = float(alpha)
    if not (alpha >= 0.0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    n_max = check_positive_int(n_max, "n_max")
    n = np.arange(n_max + 1, dtype=float)
    A = 2 * n + alpha + 1
    B = n * (n + alpha)
    if not np.all(np.isfinite(B)):
        raise OverflowError("Laguerre recurrence coefficients overflow")
    log_mass = math.lgamma(alpha + 1.0)
    return MonicRecurrence("laguerre", A, B, _log_norms(log_mass, B), alpha=alpha)


def gram_schmidt_recurrence(family, n, *, K=None, q=None, alpha=None, dps=50):
    """Recurrence coefficients from Gram-Schmidt on monomials.

    Inner products come from the weight's moments, computed with mpmath by
    direct summation (Meixner) or quadrature (Laguerre).  Used to check the
    closed forms of :func:`meixner_recurrence` and :func:`laguerre_recurrence`.
    Returns ``(A, B)`` with ``A[0..n-1]`` and ``B[0..n-1]``.
    """
    import mpmath as mp

    with mp.workdps(dps):
        n_mom = 2 * n + 1
        if family == "meixner":
            K = check_positive_int(K, "K")
            qq = mp.mpf(check_probability(q))
            mom = [mp.mpf(0)] * n_mom
            x = 0
            w = mp.mpf(1)
            while True:
                xp = mp.mpf(1)
                term_max = mp.mpf(0)
                for k in range(n_mom):
                    t = w * xp
                    mom[k] += t
                    term_max = max(term_max, abs(t) / max(abs(mom[k]), mp.mpf(1e-300)))
                    xp *= x
                if x > 10 and term_max < mp.mpf(10) ** (-dps + 5):
                    break
                x += 1
                w = w * qq * (x + K - 1) / x
        elif family == "laguerre":
            a = mp.mpf(alpha)
            mom = [mp.quad(lambda s, k=k: s ** (a + k) * mp.e ** (-s), [0, 1, 10, mp.inf])
                   for k in range(n_mom)]
        else:
            raise DomainError(f"unknown family {family!r}")

        def inner(c1, c2):
            return mp.fsum(c1[i] * c2[j] * mom[i + j]
                           for i in range(len(c1)) for j in range(len(c2)))

        polys = []
        for deg in range(n + 1):
            c = [mp.mpf(0)] * deg + [mp.mpf(1)]
            for pk in polys:
                proj = inner(c, pk) / inner(pk, pk)
                c = [ci - proj * (pk[i] if i < len(pk) else 0) for i, ci in enumerate(c)]
            polys.append(c)
        norms = [inner(p, p) for p in polys]
        A, B = [], []
        for deg in range(n):
            xp = [mp.mpf(0)] + polys[deg]
            A.append(float(inner(xp, polys[deg]) / norms[deg]))
            B.append(0.0 if deg == 0 else float(norms[deg] / norms[deg - 1]))
    return np.array(A), np.array(B)


def wavefunctions(rec, n, points):
    """``phi_j(x) = p_j(x) sqrt(w(x)) / ||p_j||`` for ``j < n``, shape ``(n, len(points))``.

    The orthonormal recurrence runs on a rescaled copy with a per-point log
    scale so that neither the weight nor the polynomial part overflows.
    """
    n = check_positive_int(n, "n")
    if n - 1 > rec.n_max:
        raise DomainError(f"recurrence holds {rec.n_max + 1} terms, {n} requested")
    x = np.atleast_1d(np.asarray(points, dtype=float))
    a = np.sqrt(rec.B)
    out = np.empty((n, x.size))
    logscale = 0.5 * (rec.log_weight(x) - rec.log_norms[0])
    y_prev = np.zeros_like(x)
    y = np.ones_like(x)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out[0] = np.exp(logscale)
        for j in range(1, n):
            y_next = ((x - rec.A[j - 1]) * y - a[j - 1] * y_prev) / a[j]
            y_prev, y = y, y_next
            big = np.abs(y) > _RESCALE
            if big.any():
                s = np.abs(y[big])
                y[big] /= s
                y_prev[big] /= s
                logscale[big] += np.log(s)
            if not np.all(np.isfinite(y)):
                raise FloatingPointError("wavefunction recurrence lost precision")
            mag = np.log(np.abs(y)) + logscale
            out[j] = np.sign(y) * np.exp(mag)
    out[~np.isfinite(out)] = 0.0
    return out


def lattice_wavefunctions(rec, n, size):
    """Meixner wavefunctions on ``{0, ..., size-1}`` from the dual lattice operator.

    For fixed degree ``j`` the sequence ``x -> phi_j(x)`` is an eigenvector, with
    eigenvalue ``j (1 - q)``, of the symmetric tridiagonal operator with diagonal
    ``x + (x + K) q`` and off-diagonal ``-sqrt(q (x+1)(x+K))`` (the difference
    equation in ``x``).  Eigenvectors are computed by LAPACK on the truncated
    lattice, which stays accurate where the forward recurrence in ``j`` is
    unstable (density-saturated region).  Signs follow ``phi_0 > 0`` and
    ``<x phi_{j-1}, phi_j> = sqrt(B_j) > 0``.
    """
    from scipy.linalg import eigh_tridiagonal

    if rec.family != "meixner":
        raise DomainError("lattice_wavefunctions applies to the Meixner family")
    K, q = rec.K, rec.q
    x = np.arange(size, dtype=float)
    diag = x + (x + K) * q
    off = -np.sqrt(q * (x[:-1] + 1.0) * (x[:-1] + K))
    _, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(0, n - 1))
    phi = vecs.T.copy()
    if phi[0].sum() < 0:
        phi[0] = -phi[0]
    for j in range(1, n):
        if np.dot(x * phi[j - 1], phi[j]) < 0:
            phi[j] = -phi[j]
    return phi


def _lattice_size(rec, N, hi):
    """Lattice truncation beyond which every ``phi_j``, ``j <= N``, is negligible."""
    zeros = _safe_zeros(rec, N + 1)
    start = max(float(hi), float(zeros[-1]) + 1.0 if zeros.size else 1.0)
    cutoff, _ = _find_cutoff(lambda c: _meixner_tail(rec, N + 1, c, zeros), start, 1e-34)
    return int(cutoff) + 1


LATTICE_ACCURACY = 1e-10


def _lattice_error(rec, size):
    # eigenvector accuracy ~ eps * ||L|| / gap, with ||L|| ~ size (1 + q) and gap 1 - q
    return _EPS * size * (1.0 + rec.q) / (1.0 - rec.q)


def _saturation_edge(rec, N):
    """Right end of the density-one region of the Meixner ensemble (0 if none)."""
    gamma = (N + rec.K - 1) / N
    qg = rec.q * gamma
    if qg >= 1.0:
        return 0.0
    return N * (1.0 - math.sqrt(qg)) ** 2 / (1.0 - rec.q)


def meixner_wavefunctions(rec, n, points, method="auto"):
    """Meixner wavefunctions at integer points by the recurrence or the lattice route.

    ``auto`` uses the lattice eigenproblem when some point lies near the
    density-saturated region, where the recurrence in the degree is unstable,
    and raises :class:`TruncationError` if that lattice is too large to keep
    eigenvector errors below ``LATTICE_ACCURACY``.
    """
    pts = np.atleast_1d(np.asarray(points))
    if method == "recurrence":
        return wavefunctions(rec, n, pts)
    N = n - 1
    if method == "auto":
        margin = 6.0 * max(N, 1) ** (1.0 / 3.0) + 10.0
        if pts.size == 0 or pts.min() > _saturation_edge(rec, max(N, 1)) + margin:
            return wavefunctions(rec, n, pts)
    size = _lattice_size(rec, max(N, 1), float(pts.max()))
    if method == "auto" and _lattice_error(rec, size) > LATTICE_ACCURACY:
        raise TruncationError(
            f"points reach the saturated region and a lattice of size {size} is too "
            f"large for accurate eigenvectors (q={rec.q})")
    if method not in ("auto", "lattice"):
        raise DomainError(f"unknown method {method!r}")
    phi = lattice_wavefunctions(rec, n, size)
    return phi[:, pts.astype(int)]


@lru_cache(maxsize=64)
def _meixner_rec_cached(K, q, n_max):
    return meixner_recurrence(K, q, n_max)


@lru_cache(maxsize=64)
def _laguerre_rec_cached(alpha, n_max):
    return laguerre_recurrence(alpha, n_max)


# ---------------------------------------------------------------------------
# truncation control


def _log_ratio_meixner(rec, N, x, zeros):
    K, q = rec.K, rec.q
    lr = math.log(q) + math.log((x + K) / (x + 1.0))
    if zeros.size:
        lr += 2.0 * float(np.sum(np.log1p(1.0 / (x - zeros))))
    return lr


def _safe_zeros(rec, N):
    z = rec.zeros(N - 1)
    return z + 1e-9 * (1.0 + np.abs(z))


def _diag_kernel(rec, N, x):
    phi = wavefunctions(rec, N, np.array([float(x)]))
    return float(np.sum(phi[:, 0] ** 2))


def _meixner_tail(rec, N, cutoff, zeros):
    if zeros.size and cutoff <= zeros[-1]:
        return math.inf
    lr = _log_ratio_meixner(rec, N, cutoff, zeros)
    if lr >= 0.0:
        return math.inf
    r = math.exp(lr)
    return _diag_kernel(rec, N, cutoff) * r / (1.0 - r)


def _laguerre_tail(rec, N, cutoff, zeros):
    if cutoff <= 0 or (zeros.size and cutoff <= zeros[-1]):
        return math.inf
    mu = 1.0 - rec.alpha / cutoff
    if zeros.size:
        mu -= 2.0 * float(np.sum(1.0 / (cutoff - zeros)))
    if mu <= 0.0:
        return math.inf
    return _diag_kernel(rec, N, cutoff) / mu


def tail_truncation_bound(params, cutoff, *, exponential=False):
    """Upper bound on the kernel trace beyond ``cutoff``.

    Geometric model: bounds ``sum_{x > cutoff} K_N(x, x)``.  Beyond the
    largest zero ``z`` of ``p_{N-1}`` every ``phi_j(x+1)^2 / phi_j(x)^2`` is at
    most ``q (x+K)/(x+1) prod_z (1 + 1/(x - z))^2``, a decreasing function of
    ``x``, which turns the tail into a geometric series.

    Exponential model (``exponential=True``): bounds ``int_cutoff^inf K_N(x,x)
    dx`` for the Laguerre kernel using the analogous bound on the logarithmic
    derivative.  Returns ``inf`` when ``cutoff`` is not yet past the edge.
    """
    if exponential:
        rec = _laguerre_rec_cached(float(params.M - params.N), params.N + 1)
        return _laguerre_tail(rec, params.N, float(cutoff), _safe_zeros(rec, params.N))
    rec = _meixner_rec_cached(params.K, params.q, params.N + 1)
    return _meixner_tail(rec, params.N, float(cutoff), _safe_zeros(rec, params.N))


def tail_window(params, tol=1e-12):
    """Integer window ``[0, hi]`` whose discarded kernel trace is at most ``tol``."""
    rec = _meixner_rec_cached(params.K, params.q, params.N + 1)
    zeros = _safe_zeros(rec, params.N)
    hi, _ = _find_cutoff(lambda c: _meixner_tail(rec, params.N, c, zeros),
                         float(params.N), tol)
    return 0, int(hi)


def _find_cutoff(tail, start, tol, integer=True):
    """A cutoff ``>= start`` with ``tail(cutoff) <= tol``, near the smallest one.

    Geometric search followed by bisection; ``tail`` is nonincreasing past the
    spectral edge.
    """
    lo = hi = float(start)
    val = tail(hi)
    step = 1.0
    n_iter = 0
    while val > tol:
        lo = hi
        hi = hi + step
        step *= 2.0
        val = tail(hi)
        n_iter += 1
        if n_iter > 200:
            raise TruncationError("could not bound the kernel tail")
    if hi == start:
        return hi, val
    # tail(lo) > tol >= tail(hi)
    while hi - lo > (1.0 if integer else 1e-3 * max(1.0, hi)):
        mid = 0.5 * (lo + hi)
        if integer:
            mid = math.floor(mid)
        v = tail(mid)
        if v <= tol:
            hi, val = mid, v
        else:
            lo = mid
    return hi, val


# ---------------------------------------------------------------------------
# kernels and determinants


def _cd_offdiag(a_n, phi_hi, phi_lo, x):
    """Christoffel-Darboux quotient ``a_N (phi_N(x)phi_{N-1}(y) - phi_{N-1}(x)phi_N(y)) / (x-y)``."""
    num = phi_hi[:, None] * phi_lo[None, :] - phi_lo[:, None] * phi_hi[None, :]
    dx = np.subtract.outer(x, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = a_n * num / dx
    return vals


def _assemble(rec, N, x, method="recurrence"):
    if rec.family == "meixner":
        phi = meixner_wavefunctions(rec, N + 1, x, method)
    else:
        phi = wavefunctions(rec, N + 1, x)
    vals = _cd_offdiag(math.sqrt(rec.B[N]), phi[N], phi[N - 1], x)
    diag = np.sum(phi[:N] ** 2, axis=0)
    vals[np.diag_indices_from(vals)] = diag
    upper = np.triu(vals)
    return upper + np.triu(upper, 1).T


def meixner_kernel(params, window, method="auto"):
    """Meixner kernel ``K_N`` on the integer window ``[lo, hi]`` (inclusive).

    Off-diagonal entries use the Christoffel-Darboux quotient, the diagonal
    the sum of squared wavefunctions.
    """
    lo, hi = int(window[0]), int(window[1])
    if lo < 0 or hi < lo:
        raise DomainError(f"invalid integer window [{lo}, {hi}]")
    N = params.N
    rec = _meixner_rec_cached(params.K, params.q, N + 1)
    x = np.arange(lo, hi + 1, dtype=float)
    vals = _assemble(rec, N, x, method)
    tail = _meixner_tail(rec, N, float(hi), _safe_zeros(rec, N))
    return KernelWindow(offset=float(lo), points=x, values=vals, trace_tail_bound=tail)


def _gauss_panels(a, b, n_panels, m):
    nodes, weights = np.polynomial.legendre.leggauss(m)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return x, w


def _laguerre_shape(M, N):
    M = check_positive_int(M, "M")
    N = check_positive_int(N, "N")
    if M < N:
        raise DomainError(f"need M >= N, got M={M}, N={N}")
    return M, N


def laguerre_kernel(M, N, lo, hi, m=16, panel=2.0):
    """Laguerre kernel on Gauss-Legendre panels covering ``[lo, hi]``."""
    M, N = _laguerre_shape(M, N)
    rec = _laguerre_rec_cached(float(M - N), N + 1)
    n_panels = max(1, int(math.ceil((hi - lo) / panel)))
    x, w = _gauss_panels(lo, hi, n_panels, m)
    vals = _assemble(rec, N, x)
    tail = _laguerre_tail(rec, N, float(hi), _safe_zeros(rec, N))
    return KernelWindow(offset=float(lo), points=x, values=vals, trace_tail_bound=tail, weights=w)


def gap_determinant(phi):
    """``det(I - Phi^T Phi)`` for an ``(N, W)`` block of (weighted) wavefunctions.

    The kernel restricted to the block has rank at most ``N``, so the smaller
    of ``det(I_N - Phi Phi^T)`` and ``det(I_W - Phi^T Phi)`` is formed (the two
    agree by Sylvester's identity) and evaluated by pivoted LU.
    """
    n, w = phi.shape
    if w == 0:
        return 1.0
    if n <= w:
        mat = np.eye(n) - phi @ phi.T
    else:
        mat = np.eye(w) - phi.T @ phi
    return float(np.linalg.det(mat))


def _clip(p):
    return min(1.0, max(0.0, p))


def meixner_cdf_table(params, ts, tol=1e-12):
    """``P[G(M, N) <= t]`` for each ``t`` in ``ts`` from one shared window."""
    if not (tol > 0):
        raise DomainError("tol must be positive")
    ts = [int(math.floor(t)) for t in ts]
    N = params.N
    out = {}
    finite = sorted({t for t in ts if t >= 0})
    for t in ts:
        if t < 0:
            out[t] = CdfValue(float(t), 0.0, 0.0, "ClosedForm")
    if finite:
        rec = _meixner_rec_cached(params.K, params.q, N + 1)
        zeros = _safe_zeros(rec, N)
        start = finite[0] + N
        cutoff, bound = _find_cutoff(lambda c: _meixner_tail(rec, N, c, zeros),
                                     max(start, finite[-1] + N), tol)
        if bound > tol:
            raise TruncationError(f"tail bound {bound:.3g} exceeds tolerance {tol:.3g}")
        x = np.arange(start, int(cutoff) + 1, dtype=float)
        phi = meixner_wavefunctions(rec, N, x)
        for t in finite:
            block = phi[:, t + N - start:]
            p = gap_determinant(block)
            err = bound + 64 * _EPS * max(1, min(block.shape))
            out[t] = CdfValue(float(t), _clip(p), err, "Fredholm")
    return [out[t] for t in ts]


def exact_cdf_meixner(params, t, tol=1e-12):
    """``P[G(M, N) <= t]``: gap probability of the Meixner ensemble on ``{t+N, t+N+1, ...}``.

    Real ``t`` is floored; ``err`` bounds the discarded kernel trace beyond the
    window plus rounding.
    """
    return meixner_cdf_table(params, [t], tol)[0]


def _log_gas_weights(params, cutoff):
    return meixner_weight_log(np.arange(cutoff + 1), params.K, params.q)


def _brute_sums(params, bounds, cutoff, ordered):
    """Restricted partition sums ``sum_{max h <= b}`` for each ``b``, in a common scale."""
    N = params.N
    lw = _log_gas_weights(params, cutoff)
    lw = lw - lw.max()
    w = np.exp(lw)
    h = np.arange(cutoff + 1, dtype=float)
    sums = np.zeros(len(bounds))
    b_arr = np.asarray(bounds)
    if N == 1:
        cum = np.cumsum(w)
        return cum[np.clip(b_arr, -1, cutoff)] * (b_arr >= 0)
    if N == 2:
        summand = (h[:, None] - h[None, :]) ** 2 * w[:, None] * w[None, :]
        if not ordered:
            summand = 2.0 * np.triu(summand, 1)
        mx = np.maximum.outer(h, h)
        for k, b in enumerate(b_arr):
            sums[k] = summand[mx <= b].sum()
        return sums
    # N == 3: loop over the first coordinate, broadcast the other two
    d23 = (h[:, None] - h[None, :]) ** 2 * w[:, None] * w[None, :]
    mx23 = np.maximum.outer(h, h)
    if not ordered:
        upper = np.triu(np.ones_like(d23, dtype=bool), 1)
    for h1 in range(cutoff + 1):
        s = (h1 - h[:, None]) ** 2 * (h1 - h[None, :]) ** 2 * d23 * w[h1]
        mx = np.maximum(mx23, h1)
        if not ordered:
            # h1 < h2 < h3
            mask = upper & (h[:, None] > h1)
            s = 6.0 * np.where(mask, s, 0.0)
        for k, b in enumerate(b_arr):
            if b >= h1:
                sums[k] += s[mx <= b].sum()
    return sums


def brute_force_cdf(params, t, cutoff=None, *, ordered=True):
    """Direct summation of the discrete Coulomb gas for ``N <= 3`` (oracle only).

    Sums ``prod (h_i - h_j)^2 prod w(h_i)`` over ``h`` with ``max h <= t+N-1``
    and divides by the unrestricted sum.  ``ordered=False`` sums over strictly
    increasing ``h`` and multiplies by ``N!``; the results agree.
    """
    if params.N > 3:
        raise DomainError("brute_force_cdf supports N <= 3 only")
    t = int(math.floor(t))
    b = t + params.N - 1
    if cutoff is None:
        cutoff = _brute_cutoff(params)
    z, zhalf, zb = _brute_sums(params, [cutoff, cutoff // 2, min(b, cutoff)], cutoff, ordered)
    if b < 0:
        return CdfValue(float(t), 0.0, 0.0, "BruteForce")
    err = (z - zhalf) / z
    return CdfValue(float(t), _clip(zb / z), float(err), "BruteForce")


@lru_cache(maxsize=128)
def _brute_cutoff(params, target=1e-12):
    c = 32
    while True:
        z, zhalf = _brute_sums(params, [c, c // 2], c, True)
        if (z - zhalf) / z <= target:
            return c
        c *= 2
        if c > 1 << 14:
            raise TruncationError("brute-force cutoff did not converge")


def exact_cdf_laguerre(M, N, t, tol=1e-8, tail_tol=1e-12, max_nodes=256):
    """``P[H(M, N) <= t]``: Laguerre-kernel gap probability on ``[t, inf)``.

    Nystrom discretisation with Gauss-Legendre panels on ``[t, t + T]``;
    ``T`` is sized by the tail bound and the per-panel node count doubled until
    successive determinants differ by at most ``tol``.
    """
    M, N = _laguerre_shape(M, N)
    t = float(t)
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    rec = _laguerre_rec_cached(float(M - N), N + 1)
    zeros = _safe_zeros(rec, N)
    hi, bound = _find_cutoff(lambda c: _laguerre_tail(rec, N, c, zeros),
                             max(t, 1.0), tail_tol, integer=False)
    hi = max(hi, t + 1.0)
    n_panels = max(1, int(math.ceil((hi - t) / 2.0)))
    prev = None
    m = 8
    while m <= max_nodes:
        x, w = _gauss_panels(t, hi, n_panels, m)
        phi = wavefunctions(rec, N, x) * np.sqrt(w)[None, :]
        p = gap_determinant(phi)
        if prev is not None and abs(p - prev) <= tol:
            return CdfValue(t, _clip(p), abs(p - prev) + bound, "Fredholm")
        prev = p
        m *= 2
    raise TruncationError(f"Laguerre quadrature did not converge at t={t}")
