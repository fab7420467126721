"""Tests for the cubic B-spline volatility basis."""

import numpy as np
import pytest

from spectralreg import (
    InvalidInputError,
    basis_rows_at,
    build_basis,
    volatility_curve,
)


def cox_de_boor(knots, i, k, u):
    """Naive recursive B-spline evaluation, the textbook definition."""
    if k == 0:
        # half-open intervals, closed at the final knot
        if knots[i] <= u < knots[i + 1]:
            return 1.0
        if u == knots[-1] and knots[i] < knots[i + 1] == knots[-1]:
            return 1.0
        return 0.0
    left = 0.0
    if knots[i + k] > knots[i]:
        left = (u - knots[i]) / (knots[i + k] - knots[i]) * cox_de_boor(knots, i, k - 1, u)
    right = 0.0
    if knots[i + k + 1] > knots[i + 1]:
        right = (
            (knots[i + k + 1] - u)
            / (knots[i + k + 1] - knots[i + 1])
            * cox_de_boor(knots, i + 1, k - 1, u)
        )
    return left + right


class TestBasisConstruction:
    def test_dimension_and_shape(self):
        basis = build_basis(50, 7)
        assert basis.Phi.shape == (50, 7)
        assert basis.d == 7
        assert basis.knots.size == 7 + 3 + 1

    def test_minimum_dimension_is_cubic(self):
        with pytest.raises(InvalidInputError):
            build_basis(50, 3)
        with pytest.raises(InvalidInputError):
            build_basis(3, 4)

    def test_bernstein_row_at_midpoint(self):
        # d=4 with no interior knots is the cubic Bernstein basis; at u = 0.5
        # the weights are (1/8, 3/8, 3/8, 1/8). T=9 puts sample 5 at u=0.5.
        basis = build_basis(9, 4)
        np.testing.assert_allclose(
            basis.Phi[4], [0.125, 0.375, 0.375, 0.125], atol=1e-12
        )

    def test_partition_of_unity(self):
        basis = build_basis(50, 10)
        np.testing.assert_allclose(basis.Phi.sum(axis=1), 1.0, atol=1e-12)

    def test_matches_recursive_definition(self):
        basis = build_basis(50, 7)
        u = (np.arange(1, 51) - 0.5) / 50
        oracle = np.array(
            [[cox_de_boor(basis.knots, i, 3, ui) for i in range(7)] for ui in u]
        )
        np.testing.assert_allclose(basis.Phi, oracle, atol=1e-10)


class TestRowsAt:
    def test_in_sample_rows_match_design(self):
        basis = build_basis(20, 5)
        rows = basis_rows_at(basis, np.arange(1, 21))
        np.testing.assert_allclose(rows, basis.Phi, atol=1e-12)

    def test_extrapolation_caps_at_endpoint(self):
        basis = build_basis(20, 5)
        rows = basis_rows_at(basis, np.array([21, 25, 200]))
        np.testing.assert_allclose(rows[0], rows[1], atol=1e-15)
        np.testing.assert_allclose(rows[1], rows[2], atol=1e-15)
        # clamped basis: the last function is 1 at u=1, the rest vanish
        np.testing.assert_allclose(rows[0], np.eye(5)[-1], atol=1e-12)


class TestVolatilityCurve:
    def test_zero_coefficients_give_unit_volatility(self):
        basis = build_basis(30, 6)
        state = volatility_curve(np.zeros(6), basis)
        np.testing.assert_array_equal(state.eta, np.zeros(30))
        np.testing.assert_array_equal(state.sigma, np.ones(30))

    def test_constant_coefficients_shift_level(self):
        basis = build_basis(30, 6)
        state = volatility_curve(np.full(6, 1.4), basis)
        np.testing.assert_allclose(state.eta, 1.4, atol=1e-12)
        np.testing.assert_allclose(state.sigma, np.exp(0.7), atol=1e-12)

    def test_matches_double_loop(self):
        rng = np.random.default_rng(6)
        basis = build_basis(50, 8)
        delta = rng.normal(0.0, 0.8, 8)
        state = volatility_curve(delta, basis)
        eta = np.zeros(50)
        for t in range(50):
            for j in range(8):
                eta[t] += basis.Phi[t, j] * delta[j]
        np.testing.assert_allclose(state.eta, eta, atol=1e-12)
        np.testing.assert_allclose(state.sigma, np.exp(eta / 2.0), atol=1e-12)

    def test_rejects_wrong_length(self):
        basis = build_basis(30, 6)
        with pytest.raises(InvalidInputError):
            volatility_curve(np.zeros(5), basis)
