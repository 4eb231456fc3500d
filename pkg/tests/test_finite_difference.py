import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quartic_scatter.finite_difference import derivative, fd_weights


def test_classic_weights():
    assert np.allclose(fd_weights(0.0, [-1, 0, 1], 2), [1, -2, 1])
    assert np.allclose(fd_weights(0.0, [-1, 0, 1], 1), [-0.5, 0, 0.5])


@given(order=st.integers(0, 4), shift=st.floats(-1, 1))
def test_exact_on_polynomials(order, shift):
    nodes = np.linspace(-2, 2, 7) + shift
    coeffs = np.arange(1.0, 8.0)
    poly = np.polynomial.Polynomial(coeffs)
    w = fd_weights(0.3, nodes, order)
    assert w @ poly(nodes) == pytest.approx(poly.deriv(order)(0.3), rel=1e-8, abs=1e-8)


@pytest.mark.parametrize("side", ["central", "left", "right"])
def test_exponential_derivative(side):
    points = 9 if side == "central" else 11
    assert derivative(math.exp, 0.5, 3, 0.05, points, side) == pytest.approx(math.exp(0.5), rel=1e-8)


def test_bad_arguments():
    with pytest.raises(ValueError):
        fd_weights(0.0, [0, 1], 2)
    with pytest.raises(ValueError):
        derivative(math.exp, 0.0, 1, 0.1, 5, "middle")
