"""k-step-ahead forecasting from posterior draws.

Each retained draw contributes X_future beta + sigma_future * c, where c is
the best linear predictor of the next standardised error given the in-sample
residual. The predictor needs autocovariances out to lag T + k; those are read
off a refined spectral grid so that no circular wrap-around contaminates the
long lags, while the in-sample solve stays on the data-length circulant.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .gibbs import TWO_PI, PosteriorSamples, _full_grid_index
from .spectral import (
    SpectralCurve,
    autocov_normalize,
    circulant_solve,
    refine_curve,
    spectral_to_autocov,
)
from .splines import basis_rows_at


@dataclass(frozen=True)
class ForecastResult:
    horizons: tuple
    forecasts: np.ndarray
    draws: np.ndarray

    def as_rows(self):
        """(horizon, forecast) pairs in horizon order."""
        return list(zip(self.horizons, self.forecasts.tolist()))


def serial_correction(eigenvalues, lag_covariances, resid):
    """Correlation-weighted projection h' Gamma^{-1} r for circulant Gamma.

    `lag_covariances` holds the autocovariances linking the forecast point to
    each in-sample time, newest coordinate last; a (K, T) matrix evaluates K
    forecast points against one solve.

    Gamma here is the circulant operator, not the exact Toeplitz covariance
    G of a stationary process. The substitution error is bounded by
    |h'(Gamma^{-1} - G^{-1}) r| <= ||h|| ||Gamma^{-1}|| ||Gamma - G|| ||G^{-1}|| ||r||
    in the spectral norm. ||Gamma - G|| is dominated by the wrap-around
    corners of the embedding, where short-lag autocovariances replace long
    ones, so the discrepancy lives at the window edges; when the true
    covariance is itself circulant the two operators coincide and the
    projection is exact up to solver precision.
    """
    lag_covariances = np.asarray(lag_covariances, dtype=float)
    weights = circulant_solve(np.asarray(eigenvalues, dtype=float), np.asarray(resid, dtype=float))
    out = lag_covariances @ weights
    return float(out) if lag_covariances.ndim == 1 else out


def _fine_grid_size(needed: int) -> int:
    size = 8
    while size <= 4 * needed:
        size *= 2
    return size


def forecast(samples: PosteriorSamples, horizons, x_future=None) -> ForecastResult:
    """Average the per-draw forecasts for each requested horizon."""
    horizons = tuple(int(k) for k in np.atleast_1d(horizons))
    if len(horizons) == 0 or any(k < 1 for k in horizons):
        raise InvalidInputError("horizons must be positive integers")
    if x_future is None:
        x_future = samples.data.x_future
    if x_future is None:
        raise InvalidInputError("no future covariate rows available for forecasting")
    x_future = np.asarray(x_future, dtype=float)
    max_k = max(horizons)
    if x_future.ndim != 2 or x_future.shape[0] < max_k:
        raise InvalidInputError(
            f"need {max_k} future covariate rows (one per horizon step), "
            f"got {x_future.shape[0] if x_future.ndim == 2 else 'non-matrix'}"
        )
    if x_future.shape[1] != samples.data.p:
        raise InvalidInputError("future covariate rows must match the design width")

    data = samples.data
    grid = samples.grid
    n = data.n
    idx_full = _full_grid_index(grid)
    fine_n = _fine_grid_size(n + max_k)
    max_lag = n + max_k

    beta_draws = samples.stacked("beta")
    delta_draws = samples.stacked("delta")
    theta_draws = samples.stacked("theta")
    n_draws = beta_draws.shape[0]

    future_rows = x_future[[k - 1 for k in horizons]]
    spline_future = basis_rows_at(samples.basis, [n + k for k in horizons])

    per_draw = np.empty((n_draws, len(horizons)))
    lag_matrix = np.empty((len(horizons), n))
    for r in range(n_draws):
        curve = autocov_normalize(SpectralCurve(grid=grid, log_values=theta_draws[r]))
        eigs = TWO_PI * np.exp(curve.log_values[idx_full])
        gammas = spectral_to_autocov(refine_curve(curve, fine_n), max_lag).gammas
        gammas = gammas / gammas[0]
        for j, k in enumerate(horizons):
            lag_matrix[j] = gammas[k : k + n][::-1]

        sigma = np.exp((samples.basis.Phi @ delta_draws[r]) / 2.0)
        resid = (data.y - data.X @ beta_draws[r]) / sigma
        corrections = serial_correction(eigs, lag_matrix, resid)
        sigma_future = np.exp((spline_future @ delta_draws[r]) / 2.0)
        per_draw[r] = future_rows @ beta_draws[r] + sigma_future * corrections

    return ForecastResult(
        horizons=horizons, forecasts=per_draw.mean(axis=0), draws=per_draw
    )
