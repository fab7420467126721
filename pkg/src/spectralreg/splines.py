"""Cubic B-spline representation of the log time-varying volatility.

log sigma^2 at time t is eta_t = sum_b delta_b phi_b(t), with a clamped cubic
basis on time rescaled to (0, 1). Sample rows are evaluated at (i - 0.5)/T;
rows past the sample (forecasting) reuse the last segment by capping the
rescaled argument at 1, which keeps extrapolated volatilities bounded.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BSpline

from .errors import InvalidInputError

DEGREE = 3


@dataclass(frozen=True)
class SplineBasis:
    degree: int
    knots: np.ndarray
    d: int
    n_times: int
    Phi: np.ndarray


@dataclass(frozen=True)
class VolatilityState:
    delta: np.ndarray
    eta: np.ndarray
    sigma: np.ndarray


def _design_rows(knots: np.ndarray, u: np.ndarray) -> np.ndarray:
    u = np.clip(u, 0.0, 1.0)
    return BSpline.design_matrix(u, knots, DEGREE).toarray()


def build_basis(T: int, d: int) -> SplineBasis:
    """Clamped cubic basis with d functions and d-4 equispaced interior knots.

    Rows are evaluated at the rescaled sample times (i - 0.5)/T for i = 1..T.
    """
    if d < DEGREE + 1:
        raise InvalidInputError(f"need at least {DEGREE + 1} basis functions, got {d}")
    if T < d:
        raise InvalidInputError(f"series length {T} shorter than basis dimension {d}")
    interior = np.linspace(0.0, 1.0, d - 2)[1:-1]
    knots = np.concatenate([np.zeros(DEGREE + 1), interior, np.ones(DEGREE + 1)])
    u = (np.arange(1, T + 1) - 0.5) / T
    Phi = _design_rows(knots, u)
    return SplineBasis(degree=DEGREE, knots=knots, d=d, n_times=T, Phi=Phi)


def basis_rows_at(basis: SplineBasis, time_indices: np.ndarray) -> np.ndarray:
    """Basis rows for arbitrary 1-based time indices, possibly beyond the sample.

    The rescaled argument (i - 0.5)/T is capped at 1, so rows past the sample
    repeat the final in-sample segment.
    """
    idx = np.atleast_1d(np.asarray(time_indices, dtype=float))
    u = (idx - 0.5) / basis.n_times
    return _design_rows(basis.knots, u)


def volatility_curve(delta: np.ndarray, basis: SplineBasis) -> VolatilityState:
    """eta = Phi @ delta and the implied volatility sigma = exp(eta / 2)."""
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (basis.d,):
        raise InvalidInputError(f"delta has shape {delta.shape}, expected ({basis.d},)")
    eta = basis.Phi @ delta
    return VolatilityState(delta=delta, eta=eta, sigma=np.exp(eta / 2.0))
