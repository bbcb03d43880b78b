import math

import numpy as np
import pytest

from lppgrowth._validation import DomainError, ModelParams
from lppgrowth.ensemble import (
    TruncationError,
    brute_force_cdf,
    exact_cdf_laguerre,
    exact_cdf_meixner,
    gap_determinant,
    gram_schmidt_recurrence,
    laguerre_recurrence,
    meixner_cdf_table,
    meixner_kernel,
    meixner_recurrence,
    meixner_wavefunctions,
    tail_truncation_bound,
    tail_window,
)


def _path_sum_oracle(q, M, N, t, wmax):
    """P[G(M, N) <= t] by enumerating every weight grid with entries <= wmax."""
    import itertools

    from lppgrowth.growth import lpp_values

    total = 0.0
    for w in itertools.product(range(wmax + 1), repeat=M * N):
        grid = np.array(w).reshape(M, N)
        if lpp_values(grid)[-1, -1] <= t:
            total += np.prod((1 - q) * q ** grid)
    return total


def test_single_site_closed_form():
    p = ModelParams(0.5, 1, 1)
    v = exact_cdf_meixner(p, 2)
    assert abs(v.p - 0.875) <= 1e-10
    assert v.err <= 1e-10
    for q in (0.3, 0.7):
        table = meixner_cdf_table(ModelParams(q, 1, 1), range(15))
        assert max(abs(x.p - (1 - q ** (x.t + 1))) for x in table) <= 1e-10


def test_two_by_one_at_zero():
    # both weights zero
    assert abs(exact_cdf_meixner(ModelParams(0.5, 2, 1), 0).p - 0.25) <= 1e-12


def test_negative_threshold_is_zero():
    assert exact_cdf_meixner(ModelParams(0.5, 3, 2), -1).p == 0.0


@pytest.mark.parametrize("q", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("M,N", [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 3)])
def test_matches_configuration_sum(q, M, N):
    p = ModelParams(q, M, N)
    table = meixner_cdf_table(p, range(11))
    for t, v in enumerate(table):
        assert abs(v.p - brute_force_cdf(p, t).p) <= 1e-10


def test_matches_path_enumeration():
    # an oracle independent of the determinantal structure: weights truncated at
    # wmax lose at most 1 - (1 - q^(wmax+1))^(MN) of mass
    q, M, N, wmax = 0.3, 2, 2, 9
    lost = 1 - (1 - q ** (wmax + 1)) ** (M * N)
    p = ModelParams(q, M, N)
    for t in (0, 1, 3, 6):
        approx = _path_sum_oracle(q, M, N, t, wmax)
        assert -1e-15 <= exact_cdf_meixner(p, t).p - approx <= lost + 1e-12


def test_ordered_and_unordered_brute_force_agree():
    p = ModelParams(0.4, 3, 2)
    for t in (0, 2, 5):
        a = brute_force_cdf(p, t, ordered=True).p
        b = brute_force_cdf(p, t, ordered=False).p
        assert abs(a - b) <= 1e-12


def test_brute_force_refuses_large_n():
    with pytest.raises(DomainError):
        brute_force_cdf(ModelParams(0.5, 4, 4), 3)


def test_recurrences_match_gram_schmidt():
    A, B = gram_schmidt_recurrence("meixner", 6, K=3, q=0.4)
    rec = meixner_recurrence(3, 0.4, 6)
    assert np.allclose(rec.A[:6], A, atol=1e-12, rtol=1e-12)
    assert np.allclose(rec.B[1:6], B[1:6], atol=1e-12, rtol=1e-12)
    A, B = gram_schmidt_recurrence("laguerre", 6, alpha=1.5)
    rec = laguerre_recurrence(1.5, 6)
    assert np.allclose(rec.A[:6], A, atol=1e-12, rtol=1e-12)
    assert np.allclose(rec.B[1:6], B[1:6], atol=1e-12, rtol=1e-12)


@pytest.mark.parametrize("N,K,q", [(5, 3, 0.4), (20, 11, 0.5), (50, 1, 0.25), (400, 1, 0.5)])
def test_kernel_is_rank_n_projection(N, K, q):
    p = ModelParams(q, N + K - 1, N)
    Km = meixner_kernel(p, tail_window(p)).values
    assert abs(np.trace(Km) - N) <= 1e-8
    assert np.max(np.abs(Km @ Km - Km)) <= 1e-8
    assert np.array_equal(Km, Km.T)


def test_lattice_and_recurrence_agree_outside_saturation():
    p = ModelParams(0.5, 30, 20)
    rec = meixner_recurrence(p.K, p.q, p.N + 1)
    x = np.arange(60, 120, dtype=float)
    a = meixner_wavefunctions(rec, p.N, x, method="recurrence")
    b = meixner_wavefunctions(rec, p.N, x, method="lattice")
    assert np.max(np.abs(a - b)) <= 1e-10


def test_cdf_monotone_and_bounded():
    p = ModelParams(0.5, 40, 20)
    table = meixner_cdf_table(p, range(60, 160))
    ps = [v.p for v in table]
    assert all(0 <= x <= 1 for x in ps)
    assert all(b >= a - 1e-13 for a, b in zip(ps, ps[1:]))


def test_truncation_error_surfaced():
    with pytest.raises(TruncationError):
        exact_cdf_laguerre(3, 2, 1.0, tol=1e-18, max_nodes=16)
    with pytest.raises(TruncationError):
        # saturated region on a lattice too large for accurate eigenvectors
        meixner_kernel(ModelParams(0.999, 400, 400), (0, 5))
    with pytest.raises(DomainError):
        meixner_cdf_table(ModelParams(0.5, 3, 2), [2], tol=0.0)


def test_tail_bound_decreases():
    p = ModelParams(0.5, 10, 5)
    vals = [tail_truncation_bound(p, c) for c in (40, 60, 80)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_gap_determinant_sylvester_forms_agree():
    rng = np.random.default_rng(0)
    phi = rng.normal(size=(3, 7)) * 0.2
    small = np.linalg.det(np.eye(3) - phi @ phi.T)
    large = np.linalg.det(np.eye(7) - phi.T @ phi)
    assert abs(gap_determinant(phi) - small) <= 1e-14
    assert abs(small - large) <= 1e-13


def test_laguerre_single_site():
    for t in (0.1, 1.0, 3.0, 8.0):
        assert abs(exact_cdf_laguerre(1, 1, t).p - (1 - math.exp(-t))) <= 1e-8


def test_laguerre_two_by_one_is_gamma_law():
    # H(2, 1) is a sum of two exponentials
    for t in (0.5, 2.0, 5.0):
        assert abs(exact_cdf_laguerre(2, 1, t).p - (1 - math.exp(-t) * (1 + t))) <= 1e-8


def test_geometric_to_exponential_limit():
    p = ModelParams(1 - 1e-3, 3, 2)
    for t in (2.0, 4.0, 6.0):
        a = exact_cdf_meixner(p, math.floor(1e3 * t)).p
        assert abs(a - exact_cdf_laguerre(3, 2, t).p) <= 0.01


def test_error_field_bounds_actual_error():
    p = ModelParams(0.6, 3, 3)
    for t in (1, 4, 9):
        v = exact_cdf_meixner(p, t)
        assert abs(v.p - brute_force_cdf(p, t).p) <= v.err + 1e-12
