import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from lambdasim.special import erf, erfc


def erf_by_quadrature(x):
    val, _ = quad(lambda s: math.exp(-s * s), 0.0, x, epsabs=1e-14, epsrel=1e-14)
    return 2.0 / math.sqrt(math.pi) * val


@pytest.mark.parametrize("x", [0.0, 1e-8, 0.3, 1.0, 2.5, 2.999, 3.0, 3.001, 4.5, 6.0, 10.0])
def test_erf_matches_quadrature(x):
    assert erf(x) == pytest.approx(erf_by_quadrature(x), abs=1e-13)
    assert erf(-x) == pytest.approx(-erf_by_quadrature(x), abs=1e-13)


def test_known_values():
    assert erf(0.0) == 0.0
    assert erfc(0.0) == 1.0
    assert erf(np.inf) == 1.0
    assert erf(-np.inf) == -1.0
    assert erfc(30.0) < 1e-300


def test_scalar_in_scalar_out():
    assert np.ndim(erf(0.5)) == 0
    assert erf(np.array([0.5, 1.0])).shape == (2,)
    assert erf(np.zeros((3, 4))).shape == (3, 4)


def test_vectorised_agrees_with_stdlib():
    x = np.linspace(-8, 8, 4001)
    ref = np.array([math.erf(v) for v in x])
    assert np.max(np.abs(erf(x) - ref)) < 1e-14
    refc = np.array([math.erfc(v) for v in x])
    assert np.max(np.abs(erfc(x) - refc)) < 1e-14
    tail = x >= 3.0
    assert np.max(np.abs(erfc(x[tail]) - refc[tail]) / refc[tail]) < 1e-13


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-40, max_value=40, allow_nan=False))
def test_erf_properties(x):
    y = erf(x)
    assert -1.0 <= y <= 1.0
    assert erf(-x) == -y
    assert abs(y - math.erf(x)) <= 1e-10
    assert abs(erfc(x) - math.erfc(x)) <= 1e-10


def test_nan_propagates():
    assert math.isnan(erf(float("nan")))
