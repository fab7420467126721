"""Tests for the simulation designs: error processes, covariates, volatility."""

import numpy as np
import pytest

from spectralreg import (
    DgpSpec,
    InvalidInputError,
    ar2_error_sd,
    fourier_frequencies,
    raw_spectrum,
    simulate,
    spectral_to_autocov,
    synthetic_fx_panel,
    true_spectrum,
    volatility_path,
)

TWO_PI = 2.0 * np.pi


class TestErrorScale:
    def test_ar2_stationary_sd(self):
        # closed form: var = (1-a2) / ((1+a2)((1-a2)^2 - a1^2)) with unit
        # innovations, a1=0.5, a2=-0.3
        a1, a2 = 0.5, -0.3
        var = (1.0 - a2) / ((1.0 + a2) * ((1.0 - a2) ** 2 - a1**2))
        assert var == pytest.approx(1.28968, abs=1e-5)
        assert ar2_error_sd() == pytest.approx(np.sqrt(var), rel=1e-12)
        assert ar2_error_sd() == pytest.approx(1.14, abs=0.01)

    def test_scaled_ar2_has_unit_variance(self):
        spec = DgpSpec(volatility="fixed", error="ar2", T=1_000_000, seed=2)
        data = simulate(spec)
        assert data.errors.var() == pytest.approx(1.0, abs=0.02)

    def test_arch_path_is_centered_and_bounded(self):
        # alpha0/(1 - alpha1) = 1 gives unit unconditional variance, but with
        # alpha1 = 0.9 the fourth moment is infinite, so the sample variance is
        # only checked against a broad band
        spec = DgpSpec(volatility="fixed", error="arch1", T=400_000, seed=3)
        data = simulate(spec)
        assert abs(data.errors.mean()) <= 0.02
        assert 0.3 <= data.errors.var() <= 3.0


class TestSimulatedDataset:
    def test_response_reconstruction(self):
        data = simulate(DgpSpec(volatility="sinusoidal", error="ar2", T=300, seed=4))
        rebuilt = data.X @ data.beta + data.sigma * data.errors
        np.testing.assert_array_equal(data.y, rebuilt)

    def test_true_beta(self):
        data = simulate(DgpSpec(volatility="fixed", error="arma11", T=100, seed=5))
        np.testing.assert_array_equal(data.beta, [1.0, 2.0, 3.0])

    def test_covariate_moments(self):
        data = simulate(DgpSpec(volatility="fixed", error="ar2", T=200_000, seed=6))
        np.testing.assert_array_equal(data.X[:, 0], 1.0)
        # scale mixture: half sd 1, half sd sqrt(2) so the variance is 1.5
        assert data.X[:, 1].var() == pytest.approx(1.5, abs=0.03)
        assert data.X[:, 2].mean() == pytest.approx(1.0, abs=0.02)
        assert data.X[:, 2].min() >= 0.0

    def test_determinism_and_seed_sensitivity(self):
        spec = DgpSpec(volatility="sinusoidal", error="ar2", T=150, seed=7)
        a, b = simulate(spec), simulate(spec)
        np.testing.assert_array_equal(a.y, b.y)
        np.testing.assert_array_equal(a.X, b.X)
        c = simulate(DgpSpec(volatility="sinusoidal", error="ar2", T=150, seed=8))
        assert not np.array_equal(a.y, c.y)

    def test_seed_sweep_reproducible(self):
        for seed in range(1, 101, 20):
            spec = DgpSpec(volatility="fixed", error="arma11", T=64, seed=seed)
            np.testing.assert_array_equal(simulate(spec).y, simulate(spec).y)

    def test_as_regression_splits_holdout(self):
        data = simulate(DgpSpec(volatility="fixed", error="ar2", T=120, seed=9))
        reg = data.as_regression(n_fit=100)
        assert reg.n == 100
        assert reg.x_future.shape == (20, 3)
        np.testing.assert_array_equal(reg.x_future, data.X[100:])

    def test_spec_validation(self):
        with pytest.raises(InvalidInputError):
            DgpSpec(volatility="quadratic", error="ar2", T=100, seed=0)
        with pytest.raises(InvalidInputError):
            DgpSpec(volatility="fixed", error="ar5", T=100, seed=0)


class TestVolatilityPath:
    def test_fixed_is_unit(self):
        np.testing.assert_array_equal(volatility_path("fixed", 50), np.ones(50))

    def test_sinusoidal_midpoint(self):
        # sigma^2(t) = 0.5 sin(pi t / T); at t = T/2 that is 0.5
        path = volatility_path("sinusoidal", 200)
        assert path[99] ** 2 == pytest.approx(0.5, rel=1e-10)
        assert np.all(path > 0.0)
        assert np.all(np.isfinite(path))


class TestTrueSpectrum:
    def test_ar2_shape_at_origin(self):
        # |1 - 0.5 + 0.3|^(-2) = 0.64^(-1) = 1.5625 before normalisation
        assert raw_spectrum("ar2", np.array([0.0]))[0] == pytest.approx(1.5625)

    def test_arma_shape_at_origin(self):
        # |1 - 0.6|^2 / |1 - 0.5|^2 = 0.16 / 0.25 = 0.64 before normalisation
        assert raw_spectrum("arma11", np.array([0.0]))[0] == pytest.approx(0.64)

    def test_arch_is_white(self):
        grid = fourier_frequencies(64)
        curve = true_spectrum("arch1", grid)
        np.testing.assert_allclose(curve.values, 1.0 / TWO_PI, rtol=1e-12)

    def test_normalized_ar2_matches_yule_walker_lags(self):
        # the normalised spectrum must reproduce the AR(2) autocorrelations
        a1, a2 = 0.5, -0.3
        rho = [1.0, a1 / (1.0 - a2)]
        for _ in range(4):
            rho.append(a1 * rho[-1] + a2 * rho[-2])
        curve = true_spectrum("ar2", fourier_frequencies(2**12))
        seq = spectral_to_autocov(curve, 5)
        np.testing.assert_allclose(seq.gammas, rho, atol=1e-3)

    def test_true_log_spectrum_method(self):
        data = simulate(DgpSpec(volatility="fixed", error="ar2", T=64, seed=10))
        curve = data.true_log_spectrum()
        assert curve.grid.n == 64
        oracle = true_spectrum("ar2", fourier_frequencies(64))
        np.testing.assert_allclose(curve.log_values, oracle.log_values, atol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(InvalidInputError):
            raw_spectrum("ma3", np.array([0.0]))


class TestSyntheticPanel:
    def test_shapes_and_determinism(self):
        cols = synthetic_fx_panel(120, seed=11)
        assert sorted(cols) == ["date", "m", "m_star", "s", "y", "y_star"]
        assert len(cols["date"]) == 120
        assert cols["s"].size == 120
        again = synthetic_fx_panel(120, seed=11)
        np.testing.assert_array_equal(cols["s"], again["s"])
        np.testing.assert_array_equal(cols["m"], again["m"])
        other = synthetic_fx_panel(120, seed=12)
        assert not np.array_equal(cols["s"], other["s"])

    def test_dates_are_consecutive_months(self):
        cols = synthetic_fx_panel(30, seed=1)
        assert cols["date"][0] == "1970-01"
        assert cols["date"][12] == "1971-01"

    def test_minimum_length(self):
        with pytest.raises(InvalidInputError):
            synthetic_fx_panel(10, seed=0)
