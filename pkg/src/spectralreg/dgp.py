"""Simulation designs: error processes, volatility paths, and true spectra.

Three stationary error recursions (AR(2), ARMA(1,1), ARCH(1)) crossed with
two volatility paths (fixed, sinusoidal). The AR(2) innovations are scaled so
the error process itself has unit variance; the other two are driven by unit
innovations directly.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .dataset import RegressionDataset
from .errors import InvalidInputError
from .spectral import FourierGrid, SpectralCurve, autocov_normalize, fourier_frequencies

VOLATILITY_KINDS = ("fixed", "sinusoidal")
ERROR_KINDS = ("ar2", "arma11", "arch1")

AR2_COEFFS = (0.5, -0.3)
ARMA11_AR = 0.5
ARMA11_MA = -0.6
ARCH1_COEFFS = (0.1, 0.9)
TRUE_BETA = np.array([1.0, 2.0, 3.0])
BURN_IN = 500


def _ar2_sd(a1: float, a2: float) -> float:
    variance = (1.0 - a2) / ((1.0 + a2) * ((1.0 - a2) ** 2 - a1**2))
    return math.sqrt(variance)


def ar2_error_sd() -> float:
    """Standard deviation of the AR(2) process under unit innovations."""
    return _ar2_sd(*AR2_COEFFS)


@dataclass(frozen=True)
class DgpSpec:
    volatility: str
    error: str
    T: int
    seed: int

    def __post_init__(self):
        if self.volatility not in VOLATILITY_KINDS:
            raise InvalidInputError(f"volatility must be one of {VOLATILITY_KINDS}")
        if self.error not in ERROR_KINDS:
            raise InvalidInputError(f"error must be one of {ERROR_KINDS}")
        if self.T < 1:
            raise InvalidInputError("T must be positive")


@dataclass(frozen=True)
class SimulatedDataset:
    spec: DgpSpec
    X: np.ndarray
    y: np.ndarray
    beta: np.ndarray
    sigma: np.ndarray
    errors: np.ndarray

    def true_log_spectrum(self, grid: FourierGrid | None = None) -> SpectralCurve:
        """Normalised log spectral density of the error law, on `grid` or the
        sample-length grid."""
        if grid is None:
            grid = fourier_frequencies(self.spec.T)
        return true_spectrum(self.spec.error, grid)

    def as_regression(self, n_fit: int | None = None) -> RegressionDataset:
        """First n_fit rows as the sample, the rest as future covariates."""
        n_fit = self.spec.T if n_fit is None else int(n_fit)
        if not 1 <= n_fit <= self.spec.T:
            raise InvalidInputError("n_fit must lie in [1, T]")
        x_future = self.X[n_fit:] if n_fit < self.spec.T else None
        return RegressionDataset(y=self.y[:n_fit], X=self.X[:n_fit], x_future=x_future)


def _simulate_errors(kind: str, T: int, rng: np.random.Generator) -> np.ndarray:
    total = T + BURN_IN
    z = rng.standard_normal(total)
    if kind == "ar2":
        a1, a2 = AR2_COEFFS
        path = lfilter([1.0], [1.0, -a1, -a2], z / ar2_error_sd())
    elif kind == "arma11":
        path = lfilter([1.0, ARMA11_MA], [1.0, -ARMA11_AR], z)
    else:
        a0, a1 = ARCH1_COEFFS
        path = np.empty(total)
        h = a0 / (1.0 - a1)
        for t in range(total):
            path[t] = math.sqrt(h) * z[t]
            h = a0 + a1 * path[t] ** 2
    return path[BURN_IN:]


def volatility_path(kind: str, T: int) -> np.ndarray:
    """sigma_t at t = 1..T; the sinusoidal path is sqrt(0.5 sin(pi t / T))."""
    if kind == "fixed":
        return np.ones(T)
    t = np.arange(1, T + 1)
    return np.sqrt(0.5 * np.sin(np.pi * t / T))


def simulate(spec: DgpSpec) -> SimulatedDataset:
    """Draw covariates and the error path, then assemble the response."""
    rng = np.random.default_rng(spec.seed)
    T = spec.T
    wide = rng.random(T) < 0.5
    x1 = rng.standard_normal(T) * np.where(wide, np.sqrt(2.0), 1.0)
    x2 = rng.exponential(1.0, T)
    X = np.column_stack([np.ones(T), x1, x2])
    errors = _simulate_errors(spec.error, T, rng)
    sigma = volatility_path(spec.volatility, T)
    y = X @ TRUE_BETA + sigma * errors
    return SimulatedDataset(
        spec=spec, X=X, y=y, beta=TRUE_BETA.copy(), sigma=sigma, errors=errors
    )


def raw_spectrum(error_kind: str, frequencies: np.ndarray) -> np.ndarray:
    """Unnormalised spectral shape of the error process at radian frequencies."""
    if error_kind not in ERROR_KINDS:
        raise InvalidInputError(f"error must be one of {ERROR_KINDS}")
    z = np.exp(1j * np.asarray(frequencies, dtype=float))
    if error_kind == "ar2":
        a1, a2 = AR2_COEFFS
        return 1.0 / np.abs(1.0 - a1 * z - a2 * z**2) ** 2
    if error_kind == "arma11":
        return np.abs(1.0 + ARMA11_MA * z) ** 2 / np.abs(1.0 - ARMA11_AR * z) ** 2
    return np.ones(z.size)


def true_spectrum(error_kind: str, grid: FourierGrid) -> SpectralCurve:
    """Normalised log spectral density of the error process on `grid`."""
    raw = raw_spectrum(error_kind, grid.frequencies)
    return autocov_normalize(SpectralCurve(grid=grid, log_values=np.log(raw)))


def synthetic_fx_panel(n: int, seed: int, predict_strength: float = 0.5):
    """Monthly-style panel where the fundamental gap forecasts the rate change.

    The gap z follows a persistent AR(1) with unit stationary variance; the
    one-step change is predict_strength * z plus an AR(2) error with
    sinusoidal volatility. Returns a dict of columns (date, s, m, m_star, y,
    y_star) ready for the panel loader or the evaluation driver.
    """
    if n < 24:
        raise InvalidInputError("panel length must be at least 24")
    rng = np.random.default_rng(seed)
    phi = 0.95
    z = np.empty(n)
    z[0] = rng.standard_normal()
    shocks = rng.standard_normal(n) * math.sqrt(1.0 - phi**2)
    for t in range(1, n):
        z[t] = phi * z[t - 1] + shocks[t]
    noise = _simulate_errors("ar2", n, rng) * np.sqrt(
        2.0 * 0.5 * np.sin(np.pi * np.arange(1, n + 1) / n) + 0.25
    )
    s = np.empty(n)
    s[0] = 0.0
    for t in range(1, n):
        s[t] = s[t - 1] + predict_strength * z[t - 1] + noise[t]
    f = s + z
    months = np.arange(n)
    dates = [f"{1970 + m // 12:04d}-{m % 12 + 1:02d}" for m in months]
    return {
        "date": dates,
        "s": s,
        "m": f,
        "m_star": np.zeros(n),
        "y": np.zeros(n),
        "y_star": np.zeros(n),
    }
