"""Random environments, last-passage times, corner growth and the TASEP view."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np

from ._validation import (
    DomainError,
    ModelParams,
    check_nonneg_int,
    check_probability,
    check_seed,
)

__all__ = [
    "WeightKind",
    "WeightField",
    "PassageGrid",
    "YoungDiagramState",
    "TasepConfig",
    "SampleBatch",
    "make_rng",
    "sample_weights",
    "lpp_values",
    "last_passage",
    "passage_star",
    "diagram_at",
    "addable_cells",
    "grow_step",
    "first_addition_time",
    "tasep_encode",
    "tasep_decode",
    "tasep_step_discrete",
    "currents_from_grid",
    "current_Y",
    "sample_currents",
    "monte_carlo_batch",
]

CHUNK = 1024


class WeightKind(str, Enum):
    GEOMETRIC = "geometric"
    GEOMETRIC_STAR = "geometric_star"
    EXPONENTIAL = "exponential"


def make_rng(seed, *key):
    """Counter-based generator for the stream ``(seed, *key)``.

    Streams with different keys are independent, and a stream does not depend
    on how many sibling streams exist, so chunked or concurrent sampling is
    reproducible.
    """
    seed = check_seed(seed)
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _open_uniform(rng, shape):
    # (0, 1]: keeps log() finite
    return 1.0 - rng.random(shape)


def _draw(rng, kind, q, shape):
    u = _open_uniform(rng, shape)
    if kind is WeightKind.EXPONENTIAL:
        return -np.log(u)
    w = np.floor(np.log(u) / math.log(q)).astype(np.int64)
    if kind is WeightKind.GEOMETRIC_STAR:
        w += 1
    return w


@dataclass(frozen=True)
class WeightField:
    params: ModelParams
    kind: WeightKind
    entries: np.ndarray  # shape (M, N); entries[i-1, j-1] = w(i, j)
    seed: int


@dataclass(frozen=True)
class PassageGrid:
    params: ModelParams
    values: np.ndarray  # values[i-1, j-1] = G(i, j)
    kind: WeightKind = WeightKind.GEOMETRIC

    def __getitem__(self, ij):
        i, j = ij
        return self.values[i - 1, j - 1]

    @property
    def corner(self):
        return self.values[-1, -1]


def sample_weights(params, kind=WeightKind.GEOMETRIC, seed=0):
    """i.i.d. site weights on the ``M x N`` grid.

    Geometric: ``P[w = k] = (1-q) q^k`` via ``floor(log U / log q)``; the starred
    kind adds one to the same draws; exponential uses ``-log U``.
    """
    if not isinstance(params, ModelParams):
        raise DomainError("params must be a ModelParams instance")
    kind = WeightKind(kind)
    rng = make_rng(seed)
    entries = _draw(rng, kind, params.q, (params.M, params.N))
    return WeightField(params, kind, entries, int(seed))


def lpp_values(w):
    """Last-passage table for weights of shape ``(..., M, N)``.

    ``G(i, j) = w(i, j) + max(G(i-1, j), G(i, j-1))`` with zero outside the
    grid, swept along anti-diagonals so a batch of grids is handled at once.
    """
    w = np.asarray(w)
    *batch, M, N = w.shape
    G = np.zeros((*batch, M + 1, N + 1), dtype=w.dtype)
    for d in range(M + N - 1):
        i = np.arange(max(0, d - N + 1), min(d, M - 1) + 1)
        j = d - i
        G[..., i + 1, j + 1] = w[..., i, j] + np.maximum(G[..., i, j + 1], G[..., i + 1, j])
    return G[..., 1:, 1:]


def last_passage(weights):
    return PassageGrid(weights.params, lpp_values(weights.entries), weights.kind)


def passage_star(grid):
    """``G*(i, j) = G(i, j) + i + j - 1`` (all up/right paths have ``i + j - 1`` sites)."""
    M, N = grid.values.shape[-2:]
    shift = np.arange(1, M + 1)[:, None] + np.arange(1, N + 1)[None, :] - 1
    return PassageGrid(grid.params, grid.values + shift, WeightKind.GEOMETRIC_STAR)


# ---------------------------------------------------------------------------
# Young diagrams


@dataclass(frozen=True)
class YoungDiagramState:
    """A Young diagram at time ``t``.

    ``rows[k-1]`` is the height of column ``k``, i.e. the number of cells
    ``(k, j)`` in the diagram; the list is weakly decreasing with no zeros.
    """

    t: float
    rows: Tuple[int, ...] = ()

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if any(r <= 0 for r in rows) or any(a < b for a, b in zip(rows, rows[1:])):
            raise DomainError(f"not a Young diagram: {rows}")
        object.__setattr__(self, "rows", rows)

    def __contains__(self, cell):
        k, j = cell
        return 1 <= k <= len(self.rows) and 1 <= j <= self.rows[k - 1]

    @property
    def size(self):
        return sum(self.rows)

    def cells(self):
        return {(k, j) for k, h in enumerate(self.rows, 1) for j in range(1, h + 1)}


def diagram_at(gstar, t):
    """Cells with ``G*(k, j) <= t`` inside the grid; ``t = math.inf`` gives the full rectangle."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    heights = np.sum(np.asarray(gstar.values) <= t, axis=1)
    return YoungDiagramState(t, tuple(int(h) for h in heights if h > 0))


def addable_cells(state):
    """Cells whose left and lower neighbours are in the diagram or outside the quadrant."""
    rows = state.rows
    cells = []
    for k in range(1, len(rows) + 2):
        h = rows[k - 1] if k <= len(rows) else 0
        if k == 1 or rows[k - 2] >= h + 1:
            cells.append((k, h + 1))
    return cells


def grow_step(state, q, rng):
    """Add each addable cell independently with probability ``1 - q``."""
    q = check_probability(q)
    cells = addable_cells(state)
    picks = rng.random(len(cells)) < 1.0 - q
    rows = list(state.rows)
    for (k, j), pick in zip(cells, picks):
        if pick:
            if k > len(rows):
                rows.append(1)
            else:
                rows[k - 1] += 1
    return YoungDiagramState(state.t + 1, tuple(rows))


def first_addition_time(M, N, q, rng, max_steps=10**7):
    """Time at which cell ``(M, N)`` joins the growing diagram started from empty."""
    state = YoungDiagramState(0)
    while (M, N) not in state:
        state = grow_step(state, q, rng)
        if state.t > max_steps:
            raise RuntimeError("growth did not reach the target cell")
    return int(state.t)


# ---------------------------------------------------------------------------
# TASEP view


@dataclass(frozen=True)
class TasepConfig:
    """Occupation of sites ``k_lo..k_hi``; all sites left of the window are
    occupied and all sites right of it are empty."""

    window: Tuple[int, int]
    occupation: np.ndarray
    t: float = 0

    def __post_init__(self):
        lo, hi = self.window
        occ = np.asarray(self.occupation, dtype=np.int8)
        if occ.shape != (hi - lo + 1,) or np.any((occ != 0) & (occ != 1)):
            raise DomainError("occupation must be a 0/1 vector matching the window")
        object.__setattr__(self, "window", (int(lo), int(hi)))
        object.__setattr__(self, "occupation", occ)

    def site(self, k):
        lo, hi = self.window
        if k < lo:
            return 1
        if k > hi:
            return 0
        return int(self.occupation[k - lo])

    def front(self):
        """Position of the rightmost particle (the one started at site 0)."""
        lo, _ = self.window
        idx = np.nonzero(self.occupation)[0]
        return int(idx[-1] + lo) if idx.size else lo - 1

    def particle_positions(self):
        lo, _ = self.window
        return np.nonzero(self.occupation)[0] + lo


def _boundary_word(state):
    """Symbols at sites ``1 - rows[0] .. len(rows)`` read along the boundary."""
    rows = list(state.rows)
    if not rows:
        return 1, []
    word = []
    heights = rows + [0]
    for c in range(1, len(rows) + 1):
        word.append(0)  # horizontal top of column c
        word.extend([1] * (heights[c - 1] - heights[c]))
    return 1 - rows[0], word


def tasep_encode(state, window=None):
    """01-word of the diagram boundary: vertical unit segments are particles.

    Site ``k`` carries the segment crossing from ``x - y = k - 1`` to
    ``x - y = k``, so the empty diagram gives particles exactly on ``k <= 0``.
    """
    start, word = _boundary_word(state)
    end = start + len(word) - 1
    if window is None:
        window = (min(0, start), max(1, end))
    lo, hi = int(window[0]), int(window[1])
    if word and (lo > start or hi < end):
        raise DomainError(f"window [{lo}, {hi}] too small; need [{start}, {end}]")
    occ = np.empty(hi - lo + 1, dtype=np.int8)
    for idx, k in enumerate(range(lo, hi + 1)):
        if word and start <= k <= end:
            occ[idx] = word[k - start]
        else:
            occ[idx] = 1 if k <= (start - 1 if word else 0) else 0
    return TasepConfig((lo, hi), occ, state.t)


def tasep_decode(config):
    """Inverse of :func:`tasep_encode`."""
    lo, _ = config.window
    x, y = 0, 1 - lo
    if y < 0:
        # the window starts right of the y-axis arm; walk in from site 0
        raise DomainError("window must start at or left of site 1")
    heights = []
    for s in config.occupation:
        if s:
            y -= 1
            if y < 0:
                raise DomainError("configuration is not a Young diagram boundary")
        else:
            x += 1
            heights.append(y)
    if y != 0:
        raise DomainError("configuration leaves infinitely many particles right of the window")
    return YoungDiagramState(config.t, tuple(h for h in heights if h > 0))


def tasep_step_discrete(config, q, rng):
    """One synchronous step: each particle with an empty right neighbour jumps with probability ``1 - q``."""
    q = check_probability(q)
    lo, hi = config.window
    occ = config.occupation.astype(np.int8)
    if occ.size == 0 or occ[0] == 0:
        occ = np.concatenate(([1], occ)).astype(np.int8)
        lo -= 1
    if occ[-1] == 1:
        occ = np.concatenate((occ, [0])).astype(np.int8)
        hi += 1
    can = (occ[:-1] == 1) & (occ[1:] == 0)
    jump = can & (rng.random(occ.size - 1) < 1.0 - q)
    idx = np.nonzero(jump)[0]
    new = occ.copy()
    new[idx] = 0
    new[idx + 1] = 1
    return TasepConfig((lo, hi), new, config.t + 1)


# ---------------------------------------------------------------------------
# continuous-time currents through exponential passage times


def currents_from_grid(H, t, ks):
    """``Y(k, t) = #{m >= 0 : H(m + k + 1, m + 1) <= t}`` for each ``k`` in ``ks``.

    ``H`` has shape ``(..., M, N)``.  The events are nested in ``m``, so the
    count equals the largest ``m`` with ``Y(k, t) > m``, plus one.
    """
    H = np.asarray(H)
    out = []
    M, N = H.shape[-2:]
    for k in ks:
        m = np.arange(0, min(N, M - k))
        diag = H[..., m + k, m]
        hit = diag <= t
        if hit.shape[-1] and np.any(hit[..., -1]):
            raise DomainError("grid too small to resolve the current")
        out.append(hit.sum(axis=-1))
    return np.stack(out, axis=-1) if out else np.empty(H.shape[:-2] + (0,), dtype=int)


def _current_grid_size(u, t):
    return int(math.ceil((1 - u) ** 2 * t / 4 + 8 * max(t, 1.0) ** (1.0 / 3.0) + 10))


def current_Y(u, t, rng, m_max=None):
    """One sample of ``Y([u t], t)`` for Rost's continuous-time TASEP.

    Uses ``Y > m`` iff ``H(m + [ut] + 1, m + 1) <= t`` on a sampled grid of
    exponential weights rather than event-driven clocks.
    """
    if not (0.0 <= u < 1.0):
        raise DomainError(f"u must lie in [0, 1), got {u}")
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    k = int(math.floor(u * t))
    if t == 0:
        return 0
    m_max = m_max or _current_grid_size(u, t)
    while True:
        w = -np.log(_open_uniform(rng, (m_max + k + 1, m_max + 1)))
        H = lpp_values(w)
        if H[-1, -1] > t:
            return int(currents_from_grid(H, t, [k])[0])
        m_max *= 2


def sample_currents(u, t, n_runs, seed):
    """``n_runs`` independent samples of ``Y([ut], t)``; run ``r`` uses stream ``(seed, r)``."""
    n_runs = check_nonneg_int(n_runs, "n_runs")
    return np.array([current_Y(u, t, make_rng(seed, r)) for r in range(n_runs)], dtype=np.int64)


# ---------------------------------------------------------------------------
# Monte Carlo batches


@dataclass(frozen=True)
class SampleBatch:
    """Passage-time samples and their edge rescaling ``(raw - N omega) / (sigma N^{1/3})``."""

    raw: np.ndarray
    rescaled: np.ndarray
    params: ModelParams
    seed: int
    kind: WeightKind
    center: float
    scale: float

    def __post_init__(self):
        if self.raw.shape != self.rescaled.shape:
            raise DomainError("raw and rescaled must have equal length")

    def to_raw(self, rescaled):
        return np.asarray(rescaled) * self.scale + self.center

    def metadata(self):
        return {
            "params": self.params.to_dict(),
            "seed": self.seed,
            "kind": self.kind.value,
            "n_samples": int(self.raw.size),
            "center": self.center,
            "scale": self.scale,
        }


def _chunk_corners(params, kind, seed, idx, size):
    rng = make_rng(seed, idx)
    w = _draw(rng, kind, params.q, (size, params.M, params.N))
    return lpp_values(w)[:, -1, -1]


def monte_carlo_batch(params, n_samples, seed, scaling=None, *, kind=WeightKind.GEOMETRIC,
                      n_jobs=1):
    """``n_samples`` independent draws of ``G(M, N)`` (or ``H(M, N)``), rescaled.

    Samples are generated in fixed chunks of ``CHUNK`` with one random stream
    per chunk, so the output does not depend on ``n_jobs``.  ``scaling`` is an
    object with ``center`` and ``scale`` per unit ``N`` in the form used by
    :mod:`lppgrowth.asymptotics` (defaults to the model's edge constants).
    """
    from .asymptotics import edge_constants, exp_constants

    n_samples = check_nonneg_int(n_samples, "n_samples")
    seed = check_seed(seed)
    kind = WeightKind(kind)
    N = params.N
    if scaling is None:
        if kind is WeightKind.EXPONENTIAL:
            mean, sc = exp_constants(params.gamma)
            center, scale = N * mean, sc * N ** (1.0 / 3.0)
        else:
            ec = edge_constants(params.gamma, params.q)
            center, scale = N * ec.omega, ec.sigma * N ** (1.0 / 3.0)
    else:
        center, scale = N * scaling.omega, scaling.sigma * N ** (1.0 / 3.0)
    sizes = [min(CHUNK, n_samples - s) for s in range(0, n_samples, CHUNK)]
    jobs = [(params, kind, seed, i, size) for i, size in enumerate(sizes)]
    if n_jobs > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as ex:
            parts = list(ex.map(lambda a: _chunk_corners(*a), jobs))
    else:
        parts = [_chunk_corners(*a) for a in jobs]
    dtype = float if kind is WeightKind.EXPONENTIAL else np.int64
    raw = np.concatenate(parts).astype(dtype) if parts else np.empty(0, dtype=dtype)
    rescaled = (raw - center) / scale
    return SampleBatch(raw, rescaled, params, seed, kind, float(center), float(scale))
