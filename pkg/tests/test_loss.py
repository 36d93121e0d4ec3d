import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from asymloss import loss as L
from asymloss.errors import DomainError
from asymloss.gnd import GndParams
from asymloss.loss import LossParams

shapes = st.floats(min_value=0.1, max_value=8.0)
scales = st.floats(min_value=0.1, max_value=10.0)
weights = st.floats(min_value=0.05, max_value=50.0)
shifts = st.floats(min_value=-20.0, max_value=20.0)


@pytest.mark.parametrize("k1,k2", [(0.0, 1.0), (1.0, -1.0), (math.inf, 1.0), (1.0, math.nan)])
def test_loss_params_validation(k1, k2):
    with pytest.raises(DomainError):
        LossParams(k1, k2)


def test_sgn():
    assert L.sgn(0.0) == 1
    assert L.sgn(3.2) == 1
    assert L.sgn(-1e-300) == -1


def test_loss_values():
    k = LossParams(3.0, 5.0)
    assert L.loss(2.0, k) == 6.0
    assert L.loss(-2.0, k) == 10.0
    assert L.loss(0.0, k) == 0.0
    np.testing.assert_array_equal(L.loss(np.array([2.0, -2.0, 0.0]), k), [6.0, 10.0, 0.0])


def test_expected_loss_examples():
    assert L.expected_loss(0.0, GndParams(1, 1), LossParams(1, 1)) == pytest.approx(1.0, rel=1e-15)
    assert L.expected_loss(math.log(2), GndParams(1, 1), LossParams(1, 3)) == pytest.approx(1 + math.log(2), rel=1e-15)
    assert L.expected_loss(0.0, GndParams(0.5, 1), LossParams(1, 1)) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-15)


def test_variance_examples():
    assert L.variance_loss(0.0, GndParams(1, 1), LossParams(1, 1)) == pytest.approx(1.0, rel=1e-15)
    assert L.variance_loss(0.0, GndParams(0.5, 1), LossParams(1, 1)) == pytest.approx(0.5 - 1 / math.pi, rel=1e-14)
    p = GndParams(1.6, 0.8)
    assert L.variance_loss(1.3, p, LossParams(2, 5)) == pytest.approx(L.variance_loss(-1.3, p, LossParams(5, 2)), rel=1e-13)


def test_laplace_closed_form():
    # a = 1: E[L(Z + c)] = L(c) + (k1 + k2) b exp(-|c/b|) / 2
    p, k = GndParams(1.0, 1.7), LossParams(2.0, 0.5)
    for c in (-3.0, -0.4, 0.0, 0.9, 5.0):
        expected = L.loss(c, k) + (k.k1 + k.k2) * p.b * math.exp(-abs(c / p.b)) / 2
        assert L.expected_loss(c, p, k) == pytest.approx(expected, rel=1e-14)


CASES = [
    (0.0, 1.0, 1.0, 1.0, 1.0),
    (math.log(2), 1.0, 1.0, 1.0, 3.0),
    (-1.3, 2.0, 0.7, 2.0, 5.0),
    (0.4, 0.3, 1.5, 1.0, 4.0),
    (3.0, 5.0, 0.5, 3.0, 1.0),
    (-0.02, 0.5, 2.0, 1.0, 9.0),
    (12.0, 0.7, 1.0, 0.2, 0.3),
]


@pytest.mark.parametrize("c,a,b,k1,k2", CASES)
def test_moments_against_quadrature(c, a, b, k1, k2):
    m, v = oracles.quad_loss_moments(c, a, b, k1, k2)
    p, k = GndParams(a, b), LossParams(k1, k2)
    assert oracles.rel(L.expected_loss(c, p, k), m) <= 1e-12
    assert oracles.rel(L.variance_loss(c, p, k), v) <= 1e-12


@pytest.mark.parametrize("c,a,b,k1,k2", CASES)
def test_variance_is_second_moment_minus_square(c, a, b, k1, k2):
    p, k = GndParams(a, b), LossParams(k1, k2)
    m2 = oracles.second_moment_closed(c, a, b, k1, k2)
    m1 = oracles.expected_loss_closed(c, a, b, k1, k2)
    assert oracles.rel(L.variance_loss(c, p, k), m2 - m1 * m1) <= 1e-12


def test_c_zero_specializations():
    for a, b, k1, k2 in [(0.5, 1.0, 1.0, 3.0), (2.0, 0.3, 4.0, 1.0), (7.0, 2.0, 1.0, 1.0)]:
        p, k = GndParams(a, b), LossParams(k1, k2)
        g2 = math.gamma(2 * a) / math.gamma(a)
        g3 = math.gamma(3 * a) / math.gamma(a)
        assert L.expected_loss(0.0, p, k) == pytest.approx((k1 + k2) * b * g2 / 2, rel=1e-13)
        v0 = -((k1 + k2) ** 2) * b * b * g2 * g2 / 4 + (k1 * k1 + k2 * k2) * b * b * g3 / 2
        assert L.variance_loss(0.0, p, k) == pytest.approx(v0, rel=1e-12)


def test_derivative_examples():
    assert L.expected_loss_derivative(0.0, GndParams(1.3, 2.0), LossParams(3.0, 7.0)) == -2.0


def test_derivative_sign_pattern():
    # negative below the minimizer, positive above it
    p, k = GndParams(0.8, 1.2), LossParams(1.0, 4.0)
    cs = np.linspace(-6, 6, 241)
    d = np.array([L.expected_loss_derivative(float(c), p, k) for c in cs])
    changes = np.flatnonzero(np.diff(np.sign(d)))
    assert len(changes) == 1
    assert d[0] < 0 < d[-1]


@pytest.mark.parametrize("c,a,b,k1,k2", CASES)
def test_derivative_matches_finite_difference(c, a, b, k1, k2):
    p, k = GndParams(a, b), LossParams(k1, k2)
    if c == 0.0:
        c = 0.37 * b  # the derivative jumps in slope class at 0 only through |c|; avoid the kink
    h = 1e-6 * max(b, abs(c))
    fd = (L.expected_loss(c + h, p, k) - L.expected_loss(c - h, p, k)) / (2 * h)
    assert fd == pytest.approx(L.expected_loss_derivative(c, p, k), rel=1e-5, abs=1e-9 * (k1 + k2))


def test_large_shape_overflow_is_reported():
    # Gamma(3a)/Gamma(a) is finite up to the cap, so every valid shape evaluates
    p = GndParams(50.0, 1.0)
    assert math.isfinite(L.variance_loss(0.5, p, LossParams(1, 2)))


def test_nonfinite_shift_rejected():
    with pytest.raises(DomainError):
        L.expected_loss(math.inf, GndParams(1, 1), LossParams(1, 1))


@settings(derandomize=True, max_examples=200)
@given(shifts, shapes, scales, weights, weights)
def test_swap_antisymmetry(c, a, b, k1, k2):
    p = GndParams(a, b)
    lhs = L.expected_loss(c, p, LossParams(k1, k2))
    rhs = L.expected_loss(-c, p, LossParams(k2, k1))
    assert lhs == pytest.approx(rhs, rel=1e-12)


@settings(derandomize=True, max_examples=200)
@given(shifts, shapes, scales, weights, weights, st.floats(min_value=0.01, max_value=100.0))
def test_scale_equivariance(c, a, b, k1, k2, lam):
    k = LossParams(k1, k2)
    e1 = L.expected_loss(c, GndParams(a, b), k)
    e2 = L.expected_loss(lam * c, GndParams(a, lam * b), k)
    assert e2 == pytest.approx(lam * e1, rel=1e-11)
    v1 = L.variance_loss(c, GndParams(a, b), k)
    v2 = L.variance_loss(lam * c, GndParams(a, lam * b), k)
    assert v2 == pytest.approx(lam * lam * v1, rel=1e-9, abs=1e-12 * lam * lam * (k1 + k2) ** 2 * (b * b + c * c))


@settings(derandomize=True, max_examples=200)
@given(shifts, shapes, scales, weights, weights, weights, weights)
def test_linear_in_weights(c, a, b, k1, k2, m1, m2):
    p = GndParams(a, b)
    combined = L.expected_loss(c, p, LossParams(k1 + m1, k2 + m2))
    separate = L.expected_loss(c, p, LossParams(k1, k2)) + L.expected_loss(c, p, LossParams(m1, m2))
    assert combined == pytest.approx(separate, rel=1e-12)


@settings(derandomize=True, max_examples=200)
@given(shifts, shapes, scales, weights, weights)
def test_moments_positive(c, a, b, k1, k2):
    p, k = GndParams(a, b), LossParams(k1, k2)
    assert L.expected_loss(c, p, k) > 0.0
    assert L.variance_loss(c, p, k) >= 0.0


def test_tiny_shape_shift_beyond_double_range():
    # x_c = |c/b|^(1/a) underflows for a = 0.0117, c = 1e-4; P(a, x_c) = |c/b| / Gamma(a + 1) there
    p, k = GndParams(0.0117, 1.0), LossParams(1.0, 2.0)
    c = 1e-4
    assert L.transformed_shift(c, p) == 0.0
    lower = float(oracles.reg_lower(0.0117, (oracles.mp.mpf(c) ** (1 / oracles.mp.mpf(0.0117)))))
    expected_d = 0.5 * (k.k1 - k.k2) + 0.5 * (k.k1 + k.k2) * lower
    assert L.expected_loss_derivative(c, p, k) == pytest.approx(expected_d, rel=1e-13)
    assert oracles.rel(L.expected_loss(c, p, k), oracles.expected_loss_closed(c, 0.0117, 1.0, 1.0, 2.0)) <= 1e-12
    assert oracles.rel(L.variance_loss(c, p, k), oracles.second_moment_closed(c, 0.0117, 1.0, 1.0, 2.0)
                       - oracles.expected_loss_closed(c, 0.0117, 1.0, 1.0, 2.0) ** 2) <= 1e-10
