"""Fourier grids, periodograms, and spectral-density <-> autocovariance transforms.

Conventions used throughout the package:

* Spectral densities live on [-pi, pi) with gamma(h) = int exp(iwh) lam(w) dw,
  so unit-variance white noise has lam = 1/(2*pi).
* Only the m = floor((n - 1)/2) positive interior Fourier frequencies
  w_j = 2*pi*j/n are modelled; the full n-point grid needed by the circulant
  operator is filled by symmetry, with w = 0 and w = pi (even n) taken from
  the nearest modelled frequency.
* The circulant operator diagonalised by the DFT, Gamma = F diag(lam) F*, is
  used as a fast approximation to the Toeplitz covariance; its matvec/solve
  cost O(n log n).
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularCovarianceError

MIN_SERIES_LENGTH = 8

# Floor on spectral values before inversion; below it we raise instead of
# regularising so that sampler divergence surfaces rather than being masked.
SPECTRAL_FLOOR = 1e-12


@dataclass(frozen=True)
class FourierGrid:
    """Positive interior Fourier frequencies w_j = 2*pi*j/n, j = 1..m."""

    n: int
    m: int
    frequencies: np.ndarray

    def __post_init__(self):
        if self.m != (self.n - 1) // 2:
            raise InvalidInputError(f"m={self.m} inconsistent with n={self.n}")


@dataclass(frozen=True)
class Periodogram:
    grid: FourierGrid
    values: np.ndarray


@dataclass(frozen=True)
class SpectralCurve:
    """Log spectral density evaluated on the positive frequencies of `grid`."""

    grid: FourierGrid
    log_values: np.ndarray

    def __post_init__(self):
        log_values = np.asarray(self.log_values, dtype=float)
        if log_values.shape != (self.grid.m,):
            raise InvalidInputError(
                f"log_values has shape {log_values.shape}, expected ({self.grid.m},)"
            )
        if not np.all(np.isfinite(log_values)):
            raise InvalidInputError("log_values must be finite")
        object.__setattr__(self, "log_values", log_values)

    @property
    def values(self):
        return np.exp(self.log_values)


@dataclass(frozen=True)
class AutocovSequence:
    lags: np.ndarray
    gammas: np.ndarray


def fourier_frequencies(n: int) -> FourierGrid:
    """Grid of the m = floor((n-1)/2) positive interior Fourier frequencies."""
    if n < MIN_SERIES_LENGTH:
        raise InvalidInputError(f"series length must be >= {MIN_SERIES_LENGTH}, got {n}")
    m = (n - 1) // 2
    freqs = 2.0 * np.pi * np.arange(1, m + 1) / n
    return FourierGrid(n=n, m=m, frequencies=freqs)


def periodogram(series: np.ndarray) -> Periodogram:
    """Periodogram |DFT|^2 / (2*pi*n) at the positive Fourier frequencies.

    Computed with an FFT; agrees with the direct double-sum definition up to
    floating round-off.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise InvalidInputError("series must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("series contains NaN or Inf")
    grid = fourier_frequencies(x.size)
    dft = np.fft.fft(x)
    values = np.abs(dft[1 : grid.m + 1]) ** 2 / (2.0 * np.pi * x.size)
    return Periodogram(grid=grid, values=values)


def log_periodogram(series: np.ndarray) -> np.ndarray:
    """log of the periodogram ordinates, floored to keep zeros finite."""
    pgram = periodogram(series)
    return np.log(np.maximum(pgram.values, np.finfo(float).tiny))


def extend_to_full_grid(curve: SpectralCurve) -> np.ndarray:
    """Spectral values on the full n-point grid w_j = 2*pi*j/n, j = 0..n-1.

    Negative frequencies mirror the positive ones; w = 0 and (for even n)
    w = pi take the nearest modelled value.
    """
    n, m = curve.grid.n, curve.grid.m
    lam = curve.values
    full = np.empty(n)
    full[0] = lam[0]
    full[1 : m + 1] = lam
    if n % 2 == 0:
        full[n // 2] = lam[-1]
    full[n - m :] = lam[::-1]
    return full


def spectral_to_autocov(curve: SpectralCurve, max_lag: int) -> AutocovSequence:
    """Autocovariances gamma(0..max_lag) by a Riemann sum over the full grid.

    gamma(h) = (2*pi/n) * sum_j lam(w_j) cos(w_j h), evaluated for all lags at
    once through a single inverse FFT.
    """
    n = curve.grid.n
    if max_lag < 0:
        raise InvalidInputError("max_lag must be nonnegative")
    if max_lag >= n:
        raise InvalidInputError(f"max_lag must be < n = {n}, got {max_lag}")
    lam_full = extend_to_full_grid(curve)
    gammas = 2.0 * np.pi * np.fft.ifft(lam_full).real
    lags = np.arange(max_lag + 1)
    return AutocovSequence(lags=lags, gammas=gammas[: max_lag + 1].copy())


def autocov_normalize(curve: SpectralCurve) -> SpectralCurve:
    """Rescale the curve (constant shift in log) so that gamma(0) = 1."""
    lam_full = extend_to_full_grid(curve)
    gamma0 = 2.0 * np.pi * lam_full.mean()
    return SpectralCurve(grid=curve.grid, log_values=curve.log_values - np.log(gamma0))


def refine_curve(curve: SpectralCurve, n_new: int) -> SpectralCurve:
    """Resample the log curve onto the positive frequencies of a finer grid.

    Linear interpolation in (frequency, log value); beyond the modelled range
    the endpoint values extend flat, matching the nearest-neighbour fill used
    for the full grid. Needed when autocovariances at lags >= n are required.
    """
    if n_new <= curve.grid.n:
        raise InvalidInputError("n_new must exceed the curve's grid size")
    new_grid = fourier_frequencies(n_new)
    log_new = np.interp(
        new_grid.frequencies, curve.grid.frequencies, curve.log_values
    )
    return SpectralCurve(grid=new_grid, log_values=log_new)


def _validated_eigs(lam_full: np.ndarray, floor: float) -> np.ndarray:
    lam = np.asarray(lam_full, dtype=float)
    if lam.ndim != 1:
        raise InvalidInputError("full-grid spectral values must be one-dimensional")
    if not np.all(np.isfinite(lam)):
        raise InvalidInputError("full-grid spectral values must be finite")
    if np.any(lam <= floor):
        raise SingularCovarianceError(
            f"spectral value {lam.min():.3e} at or below floor {floor:.1e}"
        )
    return lam


def circulant_matvec(lam_full: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Gamma @ v for Gamma = F diag(lam) F*, via forward/inverse FFT."""
    lam = _validated_eigs(lam_full, 0.0)
    v = np.asarray(v, dtype=float)
    if v.shape[0] != lam.size:
        raise InvalidInputError("vector length does not match the spectral grid")
    if v.ndim == 1:
        return np.fft.ifft(lam * np.fft.fft(v)).real
    return np.fft.ifft(lam[:, None] * np.fft.fft(v, axis=0), axis=0).real


def circulant_solve(lam_full: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gamma^{-1} @ rhs for Gamma = F diag(lam) F*.

    `rhs` may be a vector or an (n, k) matrix of stacked right-hand sides.
    """
    lam = _validated_eigs(lam_full, SPECTRAL_FLOOR)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != lam.size:
        raise InvalidInputError("rhs length does not match the spectral grid")
    if rhs.ndim == 1:
        return np.fft.ifft(np.fft.fft(rhs) / lam).real
    return np.fft.ifft(np.fft.fft(rhs, axis=0) / lam[:, None], axis=0).real


def circulant_logdet(lam_full: np.ndarray) -> float:
    """log det of Gamma = F diag(lam) F*, i.e. the sum of log spectral values."""
    lam = _validated_eigs(lam_full, SPECTRAL_FLOOR)
    return float(np.sum(np.log(lam)))
