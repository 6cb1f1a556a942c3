"""Extrapolation and quadrature helpers."""

import numpy as np
import pytest

from kreindirac import LimitSchedule
from kreindirac.errors import NoConvergence
from kreindirac.numerics import (
    adaptive_gauss_legendre,
    extrapolate_schedule,
    neville_at_zero,
    require_convergence,
)


def test_limit_schedule_offsets():
    sched = LimitSchedule(y0=0.02, halvings=5)
    np.testing.assert_allclose(sched.offsets(),
                               [0.02, 0.01, 0.005, 0.0025, 0.00125])


def test_neville_exact_on_polynomials():
    xs = np.array([0.4, 0.3, 0.2, 0.1])
    coeffs = [2.0, -1.5, 0.25, 3.0]
    values = [sum(c * x ** k for k, c in enumerate(coeffs)) for x in xs]
    np.testing.assert_allclose(neville_at_zero(xs, values), coeffs[0],
                               rtol=0, atol=1e-12)


def test_neville_carries_matrix_samples():
    xs = np.array([0.3, 0.2, 0.1])
    a0 = np.array([[1.0, 2.0], [3.0, 4.0]])
    a1 = np.array([[0.5, 0.0], [0.0, -0.5]])
    values = [a0 + x * a1 + x ** 2 * np.eye(2) for x in xs]
    np.testing.assert_allclose(neville_at_zero(xs, values), a0, atol=1e-13)


def test_extrapolate_schedule_converges_and_reports_residual():
    sched = LimitSchedule()
    xs = sched.offsets()
    # smooth limit with a small curvature term
    values = [np.array([[1.0 + y + y ** 2, 0.0], [0.0, 2.0 - 3.0 * y]]) for y in xs]
    limit, residual = extrapolate_schedule(xs, values, sched.order)
    np.testing.assert_allclose(limit, np.diag([1.0, 2.0]), atol=1e-10)
    assert residual < 1e-10


def test_extrapolate_schedule_needs_enough_samples():
    with pytest.raises(ValueError):
        extrapolate_schedule([0.1, 0.05], [1.0, 1.0], order=3)


def test_require_convergence():
    require_convergence(1e-9, 1e-6, "fine")
    with pytest.raises(NoConvergence):
        require_convergence(1e-3, 1e-6, "coarse")
    with pytest.raises(NoConvergence):
        require_convergence(float("nan"), 1e-6, "nan is not convergence")


def test_adaptive_gauss_legendre_polynomial():
    val = adaptive_gauss_legendre(lambda x: np.array([[x ** 2]]), 0.0, 1.0)
    np.testing.assert_allclose(val, [[1.0 / 3.0]], atol=1e-14)


def test_adaptive_gauss_legendre_analytic():
    # int_0^1 1/(x + 2) dx = log(3/2)
    val = adaptive_gauss_legendre(lambda x: np.array([[1.0 / (x + 2.0)]]), 0.0, 1.0)
    np.testing.assert_allclose(val, [[np.log(1.5)]], atol=1e-12)


def test_adaptive_gauss_legendre_matrix_valued():
    f = lambda x: np.array([[np.exp(x), np.sin(x)], [x, 1.0]], dtype=complex)
    val = adaptive_gauss_legendre(f, 0.0, 2.0)
    expect = np.array([[np.e ** 2 - 1.0, 1.0 - np.cos(2.0)], [2.0, 2.0]])
    np.testing.assert_allclose(val, expect, atol=1e-11)
