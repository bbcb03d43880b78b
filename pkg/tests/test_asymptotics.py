import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from lppgrowth._validation import DomainError, ModelParams
from lppgrowth.asymptotics import (
    Regime,
    convergence_table,
    edge_constants,
    equilibrium_density,
    exp_constants,
    lower_tail_rate,
    omega,
    rate_J,
    rescale_cdf,
    shape_contains,
    sigma,
    small_deviation_coefficient,
    sup_distance,
    tail_bound_finiteN,
    tasep_fluct_params,
)
from lppgrowth.ensemble import meixner_cdf_table
from lppgrowth.growth import diagram_at, last_passage, monte_carlo_batch, passage_star, sample_weights
from lppgrowth.stats import binomial_se
from lppgrowth.tracy_widom import tw_cdf_fredholm

gammas = st.floats(1.0, 50.0)
qs = st.floats(1e-4, 0.999)


def test_omega_values():
    assert abs(omega(1.0, 0.25) - 2.0) <= 1e-14
    assert abs(omega(3.0, 1e-12)) <= 1e-5


@settings(max_examples=200)
@given(gammas, qs)
def test_omega_plus_one_is_upper_edge(gamma, q):
    c = edge_constants(gamma, q)
    assert abs(c.omega + 1 - c.b) <= 1e-12 * c.b
    assert c.a >= 0 and c.c > 0 and min(c.B, c.D) >= 1 - 1e-12 and c.sigma > 0


def test_sigma_values():
    assert abs(sigma(1.0, 0.25) - 1.8171205928321397) <= 1e-12
    for q in (0.1, 0.5, 0.9):
        reduced = q ** (1 / 6) * (1 + math.sqrt(q)) ** (4 / 3) / (1 - q)
        assert abs(sigma(1.0, q) - reduced) <= 1e-12 * reduced


def test_domain_errors():
    with pytest.raises(DomainError):
        omega(0.5, 0.5)
    with pytest.raises(DomainError):
        sigma(2.0, 1.0)
    with pytest.raises(DomainError):
        tasep_fluct_params(1.0)
    with pytest.raises(NotImplementedError):
        lower_tail_rate(1.0, 0.5, 1.0)


def test_shape_membership():
    q = 0.5
    assert shape_contains(0.0, 0.0, q)
    assert shape_contains(1 - q, 0.0, q)
    assert not shape_contains(1 - q + 1e-6, 0.0, q)
    assert not shape_contains(0.3, 0.3, q)


def _sandwich_violations(q, t, eps, seed):
    """Columns breaking (1 - eps) A0 <= A(t)/t and A(t)/t <= (1 + eps) A0 as sets.

    A(t) is the union of the unit squares [i-1, i] x [j-1, j] of the diagram;
    both A0 and A(t) are down-sets, so each column is decided by one corner.
    """
    size = int(1.3 * (1 - q) * t) + 5
    gs = passage_star(last_passage(sample_weights(ModelParams(q, size, size), seed=seed)))
    rows = list(diagram_at(gs, t).rows) + [0] * size
    inner, outer = [], []
    for i in range(1, size + 1):
        h = rows[i - 1]
        if shape_contains((i - 1) / t / (1 - eps), (h / t + 1e-9) / (1 - eps), q):
            inner.append((i, h))
        if h and not shape_contains(i / t / (1 + eps), h / t / (1 + eps), q):
            outer.append((i, h))
    return inner, outer


@pytest.mark.parametrize("seed", [12, 13])
def test_shape_inner_inclusion(seed):
    inner, _ = _sandwich_violations(0.5, 400, 0.1, seed)
    assert inner == []


@pytest.mark.xfail(strict=True, reason="finite-size overshoot near the axes: max gauge of "
                   "A(400)/400 is 1.12-1.19 over seeds 0-7, above 1 + eps = 1.1")
def test_shape_outer_inclusion_at_t400():
    _, outer = _sandwich_violations(0.5, 400, 0.1, 12)
    assert outer == []


def _outer_gauge(q, t, seed):
    # smallest lam with A(t)/t inside lam A0; the gauge of A0 is 1-homogeneous
    size = int(1.3 * (1 - q) * t) + 5
    gs = passage_star(last_passage(sample_weights(ModelParams(q, size, size), seed=seed)))
    rows = diagram_at(gs, t).rows
    return max((i + h + 2 * math.sqrt(q * i * h)) / ((1 - q) * t) for i, h in enumerate(rows, 1) if h)


@pytest.mark.slow
def test_shape_sandwich_tightens_with_t():
    seeds = range(8)
    g400 = np.mean([_outer_gauge(0.5, 400, s) for s in seeds])
    g1600 = np.mean([_outer_gauge(0.5, 1600, s) for s in seeds])
    assert g1600 - 1 <= 0.6 * (g400 - 1)
    ok = sum(_sandwich_violations(0.5, 1600, 0.1, s) == ([], []) for s in seeds)
    assert ok >= 7


def test_exp_constants():
    mean, scale = exp_constants(1.0)
    assert mean == 4.0 and abs(scale - 2 ** (4 / 3)) <= 1e-14
    q = 1 - 1e-6
    for gamma in (1.0, 2.5, 9.0):
        limit = exp_constants(gamma)[0]
        assert abs((1 - q) * (omega(gamma, q) + 1) - limit) <= 1e-5 * limit
        assert exp_constants(gamma)[1] > 0


@pytest.mark.parametrize("gamma,q", [(1.0, 0.25), (5.0, 0.5), (1.0, 0.81), (4.0, 0.25), (2.0, 0.9)])
def test_density_properties(gamma, q):
    dens = equilibrium_density(gamma, q)
    c = dens.constants
    t = np.linspace(0, c.b, 2001)
    phi = dens(t)
    assert np.all((phi >= 0) & (phi <= 1))
    assert abs(dens.mass() - 1) <= 1e-6
    assert dens(c.b) == 0.0
    if gamma * q < 1:
        assert dens.regime is Regime.GAMMA_LT
        assert np.all(dens(np.linspace(0, c.a, 50)) == 1.0)
    else:
        assert dens.regime is Regime.GAMMA_GE
    # independent quadrature of the density in t
    trap = np.trapezoid(dens(np.linspace(0, c.b, 200_001)), dx=c.b / 200_000)
    assert abs(trap - 1) <= 1e-3


def test_density_saturated_interval_example():
    dens = equilibrium_density(1.0, 0.25)
    assert abs(dens.constants.a - 1 / 3) <= 1e-15
    assert dens(0.2) == 1.0 and dens(1 / 3) == 1.0


def test_density_regime_boundary_is_continuous():
    q = 0.5
    lo, hi = equilibrium_density(2.0 - 1e-9, q), equilibrium_density(2.0, q)
    assert lo.regime is Regime.GAMMA_LT and hi.regime is Regime.GAMMA_GE
    t = np.linspace(0.01, hi.constants.b * 0.999, 50)
    assert np.max(np.abs(lo(np.minimum(t, lo.constants.b)) - hi(t))) <= 1e-3


def test_rate_zero_below_edge():
    c = edge_constants(2.0, 0.5)
    assert rate_J(2.0, 0.5, c.b) == 0.0
    assert rate_J(2.0, 0.5, 0.5 * c.b) == 0.0


def test_rate_small_deviation_law():
    c = edge_constants(2.0, 0.5)
    d = 1e-3
    ratio = rate_J(2.0, 0.5, c.b + d) / d**1.5 / small_deviation_coefficient(2.0, 0.5)
    assert abs(ratio - 1) <= 0.02


@pytest.mark.parametrize("gamma,q", [(1.0, 0.5), (2.0, 0.5), (6.0, 0.3)])
def test_rate_growth_and_convexity(gamma, q):
    c = edge_constants(gamma, q)
    small = np.linspace(1e-3, 1.0, 40)
    big = np.linspace(1.0, 30.0, 40)
    assert min(rate_J(gamma, q, c.b + d) / d**1.5 for d in small) > 0
    assert min(rate_J(gamma, q, c.b + d) / d for d in big) > 0
    grid = np.linspace(c.b, c.b + 5, 101)
    J = np.array([rate_J(gamma, q, t) for t in grid])
    assert np.all(np.diff(J) >= 0)
    assert np.all(np.diff(J, 2) >= -1e-10)


def test_finite_n_bound_basic():
    c = edge_constants(1.0, 0.5)
    assert tail_bound_finiteN(1.0, 0.5, 10, c.b - 1.5) == 1.0
    vals = [tail_bound_finiteN(1.0, 0.5, N, c.b - 0.5) for N in (10, 20, 40)]
    assert vals[0] > vals[1] > vals[2]


def test_finite_n_bound_against_simulation():
    c = edge_constants(1.0, 0.5)
    N, n = 20, 20_000
    b = monte_carlo_batch(ModelParams.from_gamma(1.0, N, 0.5), n, seed=77)
    for d in (0.25, 0.5):
        t = c.b - 1 + d
        bound = tail_bound_finiteN(1.0, 0.5, N, t)
        assert np.mean(b.raw > N * t) <= bound + 3 * binomial_se(bound, n)


def test_rescaled_cdf_monotone_and_bounded_range():
    c = edge_constants(1.0, 0.5)
    N = 50
    exact = meixner_cdf_table(ModelParams(0.5, N, N), range(150, 300))
    F = rescale_cdf(exact, c, N)
    s = np.linspace(-5, 2, 300)
    vals = [F(x) for x in s]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(DomainError):
        F(10.0)


def test_sup_distance_matches_dense_search():
    c = edge_constants(1.0, 0.5)
    N = 50
    exact = meixner_cdf_table(ModelParams(0.5, N, N), range(150, 300))
    limit = lambda s: tw_cdf_fredholm(s).f
    d = sup_distance(exact, c, N, limit)
    F = rescale_cdf(exact, c, N)
    dense = max(abs(F(s) - limit(s)) for s in np.linspace(-5, 2, 701))
    assert math.isfinite(d) and 0 < d < 1
    assert dense <= d + 1e-12
    assert d - dense <= 0.01


def test_convergence_trend():
    rows = convergence_table(1.0, 0.5, [50, 100, 200, 400])
    d = [r["sup_dist"] for r in rows]
    assert all(b < a for a, b in zip(d, d[1:]))
    assert d[-1] <= 0.05


def _delta_method_scale(u, t):
    """Scale of Y([ut], t) by linearising the exponential edge law around its mean."""
    mean = lambda m: m * exp_constants((m + u * t) / m)[0]
    m_star = brentq(lambda m: mean(m) - t, 1e-9 * t, t)
    h = 1e-6 * m_star
    slope = (mean(m_star + h) - mean(m_star - h)) / (2 * h)
    return m_star, m_star ** (1 / 3) * exp_constants((m_star + u * t) / m_star)[1] / slope


@pytest.mark.parametrize("u", [0.0, 0.2, 0.5, 0.8])
def test_tasep_params_match_delta_method(u):
    t = 1000.0
    center, scale = tasep_fluct_params(u, t)
    m_star, expected = _delta_method_scale(u, t)
    assert abs(center - m_star) <= 1e-8 * t
    assert abs(scale - expected) <= 1e-6 * expected


def test_tasep_params_at_zero():
    center, scale = tasep_fluct_params(0.0, 8.0)
    assert center == 2.0
    assert abs(scale - 2 ** (-4 / 3) * 2.0) <= 1e-15
    assert tasep_fluct_params(0.99, 5.0)[1] > 0
