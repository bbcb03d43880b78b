import math

import mpmath as mp
import numpy as np
import pytest

from lppgrowth.airy import AIRY_RANGE, airy, airy_ai

mp.mp.dps = 30


def test_value_at_zero_matches_gamma_identity():
    expected = float(mp.mpf(3) ** (-mp.mpf(2) / 3) / mp.gamma(mp.mpf(2) / 3))
    assert abs(airy(0.0).ai - expected) <= 1e-15


def test_positive_axis_bound():
    for x in (0.5, 1.0, 5.0, 12.0, 29.0):
        bound = math.exp(-2 / 3 * x**1.5) / (2 * math.sqrt(math.pi) * x**0.25)
        assert 0 < airy(x).ai <= bound


def test_ode_residual_shrinks_with_step():
    x = 1.0
    res = []
    for h in (1e-1, 1e-2):
        lap = (airy(x + h).ai - 2 * airy(x).ai + airy(x - h).ai) / h**2
        res.append(abs(lap - x * airy(x).ai))
    assert res[1] < res[0] / 50
    assert res[1] < 1e-5


@pytest.mark.parametrize("x", np.linspace(-30, 30, 241))
def test_against_arbitrary_precision(x):
    v = airy(float(x))
    ai = float(mp.airyai(x))
    aip = float(mp.airyai(x, 1))
    assert abs(v.ai - ai) <= max(v.est_err, 1e-300)
    assert abs(v.ai_prime - aip) <= max(v.est_err, 1e-300)
    assert v.est_err <= 1e-12


def test_regimes_agree_at_switch_points():
    # the evaluator changes method at -10 and 8; values just either side must be continuous
    h = 1e-9
    for xs in (-10.0, 8.0):
        a, b = airy(xs - h), airy(xs + h)
        # first-order step across the gap, using Ai'' = x Ai
        assert abs(b.ai - a.ai - 2 * h * a.ai_prime) <= 1e-12
        assert abs(b.ai_prime - a.ai_prime - 2 * h * xs * a.ai) <= 1e-12


def test_vectorised_matches_scalar():
    xs = np.array([-12.0, -3.3, 0.0, 2.5, 9.0])
    ai, aip, err = airy_ai(xs)
    for k, x in enumerate(xs):
        v = airy(float(x))
        assert ai[k] == v.ai and aip[k] == v.ai_prime


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        airy(AIRY_RANGE + 0.5)
    with pytest.raises(ValueError):
        airy(-AIRY_RANGE - 0.5)
