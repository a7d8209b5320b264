import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from papr_vlc.quadrature import (
    GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, QuadratureError, gk15, integrate,
)


def test_rule_weights_sum_to_two():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    np.testing.assert_allclose(NODES, -NODES[::-1], atol=0)


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_exact_to_degree_22(deg):
    k, _ = gk15(lambda x: x**deg, np.array([-1.0]), np.array([1.0]))
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert k[0] == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("deg", range(0, 14))
def test_gauss_exact_to_degree_13(deg):
    g = (np.array([NODES]) ** deg) @ GAUSS_WEIGHTS
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert g[0] == pytest.approx(exact, abs=1e-14)


def test_gaussian_bump():
    res = integrate(lambda x: np.exp(-0.5 * (x - 3.3) ** 2 / 0.01), 0.0, 10.0, rel_tol=1e-12)
    assert res.value == pytest.approx(math.sqrt(2 * math.pi * 0.01), rel=1e-12)


def test_kink_with_breakpoint():
    f = lambda x: np.abs(x - 0.3)  # noqa: E731
    res = integrate(f, 0.0, 1.0, rel_tol=1e-13, breakpoints=[0.3])
    assert res.value == pytest.approx(0.5 * 0.3**2 + 0.5 * 0.7**2, rel=1e-14)
    assert res.panels == 2


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0))
def test_exponential(a, b):
    res = integrate(lambda x: np.exp(-a * x), 0.0, b, rel_tol=1e-11)
    assert res.value == pytest.approx(-math.expm1(-a * b) / a, rel=1e-10)


def test_non_convergence_carries_estimate():
    with pytest.raises(QuadratureError) as info:
        integrate(lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, rel_tol=1e-14, max_subdivisions=4)
    assert 1.0 < info.value.estimate < 2.5
    assert info.value.error > 0


def test_empty_interval():
    assert integrate(np.sin, 1.0, 1.0).value == 0.0
