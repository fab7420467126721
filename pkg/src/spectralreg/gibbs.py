"""Gibbs sampler for the regression model with spectrally modelled errors.

The model is y = X beta + sigma * e, where e is a zero-mean stationary
Gaussian process whose log spectral density theta carries a Gaussian-process
prior with exponential kernel, and log sigma^2 is a B-spline curve with
coefficients delta. The error covariance is approximated by the circulant
operator diagonalised in the Fourier basis, so every solve costs O(n log n).

One sweep updates, in order:

    beta -> tau_eps -> [delta, time-varying variant only]
         -> recompute the standardised-residual log periodogram
         -> labels -> theta -> tau_theta -> rho_theta

beta, tau_eps, theta, and tau_theta are conjugate draws; the mixture labels
and the kernel range rho_theta are categorical draws; delta moves by
random-walk Metropolis-Hastings with a scalar proposal scale that adapts
during burn-in and is frozen for retained draws.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, cho_factor, cho_solve, cholesky, solve_triangular

from .dataset import RegressionDataset
from .errors import InvalidInputError, NumericError, SpectralregError
from .mixture import MixtureTable, load_default_table, sample_labels
from .spectral import (
    FourierGrid,
    SpectralCurve,
    circulant_solve,
    extend_to_full_grid,
    fourier_frequencies,
    log_periodogram,
)
from .splines import SplineBasis, build_basis

TWO_PI = 2.0 * np.pi

# Diagonal jitter for the exponential kernel, which is near-singular at close
# frequencies.
KERNEL_JITTER = 1e-8


class ModelVariant(Enum):
    """Fixed volatility freezes delta at zero; time-varying samples it."""

    FIXED = "bfv"
    TIME_VARYING = "btv"


def parse_variant(name) -> ModelVariant:
    if isinstance(name, ModelVariant):
        return name
    try:
        return ModelVariant(str(name).lower())
    except ValueError:
        raise InvalidInputError(f"unknown model variant {name!r}; use 'bfv' or 'btv'") from None


@dataclass
class Hyperparams:
    """Prior settings for all sampled blocks."""

    mu_beta: float = 0.0
    sigma_beta2: float = 100.0
    mu_delta: float = 0.0
    sigma_delta2: float = 100.0
    a: float = 0.01
    b: float = 0.01
    c: float = 0.01
    d: float = 0.01
    rho_grid: np.ndarray = field(default_factory=lambda: np.geomspace(0.1, 100.0, 50))
    nu: float | np.ndarray = 0.0

    def __post_init__(self):
        for name in ("sigma_beta2", "sigma_delta2", "a", "b", "c", "d"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"hyperparameter {name} must be positive")
        rho = np.asarray(self.rho_grid, dtype=float)
        if rho.size == 0 or np.any(rho <= 0):
            raise InvalidInputError("rho_grid must be nonempty and positive")
        self.rho_grid = rho


@dataclass
class SamplerConfig:
    chains: int = 3
    iterations: int = 4000
    retain: int = 1000
    seed: int = 0
    spline_dim: int = 10
    proposal_scale: float = 0.1
    adapt_interval: int = 50
    accept_low: float = 0.25
    accept_high: float = 0.40

    def __post_init__(self):
        if self.retain > self.iterations:
            raise InvalidInputError("retain must not exceed iterations")
        if self.chains < 1 or self.iterations < 1 or self.retain < 1:
            raise InvalidInputError("chains, iterations, and retain must be positive")


@dataclass
class ChainState:
    """Full parameter set for one Gibbs iteration."""

    beta: np.ndarray
    delta: np.ndarray
    theta: np.ndarray
    psi: np.ndarray
    tau_eps: float
    tau_theta: float
    rho_theta: float
    rho_index: int

    def summary(self) -> str:
        return (
            f"beta={np.array2string(self.beta, precision=4)}, "
            f"tau_eps={self.tau_eps:.4g}, tau_theta={self.tau_theta:.4g}, "
            f"rho_theta={self.rho_theta:.4g}, "
            f"max|theta|={np.abs(self.theta).max():.4g}, "
            f"max|delta|={np.abs(self.delta).max():.4g}"
        )


@dataclass
class PosteriorSamples:
    """Retained draws for every chain, plus the objects needed to reuse them."""

    beta: np.ndarray
    delta: np.ndarray
    theta: np.ndarray
    psi: np.ndarray
    tau_eps: np.ndarray
    tau_theta: np.ndarray
    rho_theta: np.ndarray
    chains: int
    iterations: int
    retained: int
    variant: ModelVariant
    grid: FourierGrid
    basis: SplineBasis
    data: RegressionDataset
    mh_acceptance: np.ndarray

    def stacked(self, name: str) -> np.ndarray:
        """Draws pooled across chains, shape (chains * retained, ...)."""
        arr = getattr(self, name)
        return arr.reshape(-1, *arr.shape[2:])

    @property
    def n_draws(self) -> int:
        return self.chains * self.retained

    def normalized_log_spectra(self) -> np.ndarray:
        """Per-draw log spectra shifted so each implies unit error variance."""
        theta = self.stacked("theta")
        counts = np.bincount(_full_grid_index(self.grid), minlength=self.grid.m)
        gamma0 = TWO_PI * (np.exp(theta) @ counts) / self.grid.n
        return theta - np.log(gamma0)[:, None]

    def log_variance_curves(self) -> np.ndarray:
        """Per-draw log volatility curves eta, shape (draws, T)."""
        return self.stacked("delta") @ self.basis.Phi.T

    def to_frame(self) -> pd.DataFrame:
        """One row per retained draw with the documented column names."""
        p = self.beta.shape[2]
        d = self.delta.shape[2]
        m = self.theta.shape[2]
        cols = {}
        cols["chain"] = np.repeat(np.arange(1, self.chains + 1), self.retained)
        cols["draw"] = np.tile(np.arange(1, self.retained + 1), self.chains)
        for j in range(p):
            cols[f"beta_{j}"] = self.stacked("beta")[:, j]
        for j in range(d):
            cols[f"delta_{j + 1}"] = self.stacked("delta")[:, j]
        for j in range(m):
            cols[f"theta_{j + 1}"] = self.stacked("theta")[:, j]
        cols["tau_eps"] = self.stacked("tau_eps")
        cols["tau_theta"] = self.stacked("tau_theta")
        cols["rho_theta"] = self.stacked("rho_theta")
        return pd.DataFrame(cols)


def _full_grid_index(grid: FourierGrid) -> np.ndarray:
    """Source index into theta for each point of the full n-point grid."""
    n, m = grid.n, grid.m
    idx = np.empty(n, dtype=np.intp)
    idx[0] = 0
    idx[1 : m + 1] = np.arange(m)
    if n % 2 == 0:
        idx[n // 2] = m - 1
    idx[n - m :] = np.arange(m)[::-1]
    return idx


def _moving_average(x: np.ndarray, window: int) -> np.ndarray:
    kernel = np.ones(window)
    sums = np.convolve(x, kernel, mode="same")
    counts = np.convolve(np.ones_like(x), kernel, mode="same")
    return sums / counts


def _gamma_draw(rng: np.random.Generator, shape: float, rate: float) -> float:
    if not (rate > 0 and math.isfinite(rate)):
        raise NumericError(f"Gamma rate must be positive and finite, got {rate}")
    return float(rng.gamma(shape, 1.0 / rate))


def _theta_draw_core(precision, rhs_weighted, nu_vec, z):
    """Draw from N(nu + precision^{-1} rhs, precision^{-1}) given z ~ N(0, I)."""
    try:
        low = cho_factor(precision, lower=True)
    except LinAlgError as exc:
        raise NumericError("theta posterior precision not positive definite") from exc
    mean = nu_vec + cho_solve(low, rhs_weighted)
    return mean + solve_triangular(low[0].T, z, lower=False)


def sample_theta_conditional(
    frequencies, phi, psi, nu, tau_theta, rho_theta, table: MixtureTable, rng
):
    """Stand-alone conditional draw of the log spectral density.

    Builds the exponential-kernel prior directly from `frequencies`. Inputs
    are canonicalised to increasing frequency order before any linear algebra
    and the draw is mapped back, so a permutation of the inputs changes
    nothing but the ordering of the output.
    """
    frequencies = np.asarray(frequencies, dtype=float)
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=int)
    nu_vec = np.broadcast_to(np.asarray(nu, dtype=float), frequencies.shape).astype(float)
    order = np.argsort(frequencies, kind="stable")
    w, ph, lv, nv = frequencies[order], phi[order], psi[order], nu_vec[order]

    corr = np.exp(-rho_theta * np.abs(w[:, None] - w[None, :]))
    corr[np.diag_indices_from(corr)] += KERNEL_JITTER
    try:
        corr_inv = np.linalg.inv(corr)
    except LinAlgError as exc:
        raise NumericError("exponential kernel not invertible after jitter") from exc

    v_inv = 1.0 / table.sds[lv - 1] ** 2
    kappa = table.means[lv - 1]
    precision = tau_theta * corr_inv
    precision[np.diag_indices_from(precision)] += v_inv
    z = rng.standard_normal(w.size)
    draw_sorted = _theta_draw_core(precision, v_inv * (ph - kappa - nv), nv, z)

    out = np.empty_like(draw_sorted)
    out[order] = draw_sorted
    return out


class GibbsSampler:
    """Sampler bound to one dataset, variant, prior set, and configuration."""

    def __init__(
        self,
        data: RegressionDataset,
        variant: ModelVariant,
        hyper: Hyperparams | None = None,
        config: SamplerConfig | None = None,
        mixture_table: MixtureTable | None = None,
    ):
        self.data = data
        self.variant = parse_variant(variant)
        self.hyper = hyper if hyper is not None else Hyperparams()
        self.config = config if config is not None else SamplerConfig()
        self.table = mixture_table if mixture_table is not None else load_default_table()

        self.grid = fourier_frequencies(data.n)
        self.basis = build_basis(data.n, self.config.spline_dim)
        self.nu_vec = np.broadcast_to(
            np.asarray(self.hyper.nu, dtype=float), (self.grid.m,)
        ).astype(float)
        self.prior_gram = self.basis.Phi.T @ self.basis.Phi

        self._precompute_kernels()

    def _precompute_kernels(self):
        """Cholesky factors of the unit-scale kernel for every rho candidate."""
        w = self.grid.frequencies
        dist = np.abs(w[:, None] - w[None, :])
        m = self.grid.m
        rho_grid = self.hyper.rho_grid
        self.corr_inv = np.empty((rho_grid.size, m, m))
        self.corr_logdet = np.empty(rho_grid.size)
        inv_chol = np.empty((rho_grid.size, m, m))
        eye = np.eye(m)
        for i, rho in enumerate(rho_grid):
            corr = np.exp(-rho * dist)
            corr[np.diag_indices_from(corr)] += KERNEL_JITTER
            try:
                low = cholesky(corr, lower=True)
            except LinAlgError as exc:
                raise NumericError(f"kernel for rho={rho:g} not positive definite") from exc
            self.corr_logdet[i] = 2.0 * np.sum(np.log(np.diag(low)))
            l_inv = solve_triangular(low, eye, lower=True)
            inv_chol[i] = l_inv
            self.corr_inv[i] = l_inv.T @ l_inv
        # Flattened stack so all candidate quadratic forms cost one gemv.
        self._inv_chol_flat = inv_chol.reshape(rho_grid.size * m, m)

    # -- per-state building blocks -------------------------------------------

    def error_eigenvalues(self, theta: np.ndarray) -> np.ndarray:
        """Full-grid circulant eigenvalues of the error correlation model.

        Scaled by 2*pi so that a curve with gamma(0) = 1 yields unit diagonal,
        which also makes the periodogram of the standardised residual track
        exp(theta) exactly under the circulant model.
        """
        curve = SpectralCurve(grid=self.grid, log_values=theta)
        return TWO_PI * extend_to_full_grid(curve)

    def sigma_path(self, delta: np.ndarray) -> np.ndarray:
        return np.exp((self.basis.Phi @ delta) / 2.0)

    def log_periodogram_of_residual(self, state: ChainState) -> np.ndarray:
        """phi for the volatility-standardised, precision-scaled residual."""
        resid = self.data.y - self.data.X @ state.beta
        scaled = math.sqrt(state.tau_eps) * resid / self.sigma_path(state.delta)
        return log_periodogram(scaled)

    # -- conditional updates -------------------------------------------------

    def update_beta(self, state: ChainState, rng, lam_full=None) -> np.ndarray:
        """Conjugate Gaussian draw of the regression coefficients."""
        if lam_full is None:
            lam_full = self.error_eigenvalues(state.theta)
        sigma = self.sigma_path(state.delta)
        scaled_design = np.column_stack([self.data.X, self.data.y]) / sigma[:, None]
        solved = circulant_solve(lam_full, scaled_design)
        design = scaled_design[:, : self.data.p]
        gram = design.T @ solved[:, : self.data.p]
        gram = 0.5 * (gram + gram.T)
        precision = state.tau_eps * gram + np.eye(self.data.p) / self.hyper.sigma_beta2
        rhs = state.tau_eps * (design.T @ solved[:, self.data.p]) + (
            self.hyper.mu_beta / self.hyper.sigma_beta2
        ) * np.ones(self.data.p)
        try:
            low = cho_factor(precision, lower=True)
        except LinAlgError as exc:
            raise NumericError(
                f"beta posterior precision not positive definite; state: {state.summary()}"
            ) from exc
        mean = cho_solve(low, rhs)
        z = rng.standard_normal(self.data.p)
        return mean + solve_triangular(low[0].T, z, lower=False)

    def update_tau_eps(self, state: ChainState, rng, lam_full=None) -> float:
        """Conjugate Gamma draw of the error precision."""
        if lam_full is None:
            lam_full = self.error_eigenvalues(state.theta)
        resid = (self.data.y - self.data.X @ state.beta) / self.sigma_path(state.delta)
        quad = float(resid @ circulant_solve(lam_full, resid))
        return _gamma_draw(rng, self.hyper.a + 0.5 * self.data.n, self.hyper.b + 0.5 * quad)

    def delta_log_target(self, delta, resid, tau_eps, lam_full) -> float:
        """Unnormalised log conditional of the volatility coefficients."""
        eta = self.basis.Phi @ delta
        scaled = resid * np.exp(-eta / 2.0)
        quad = float(scaled @ circulant_solve(lam_full, scaled))
        dev = delta - self.hyper.mu_delta
        prior = float(dev @ self.prior_gram @ dev) / self.hyper.sigma_delta2
        return -0.5 * (float(eta.sum()) + tau_eps * quad + prior)

    def update_delta(self, state: ChainState, rng, proposal_scale, lam_full=None):
        """Random-walk Metropolis-Hastings step; returns (draw, accepted)."""
        if lam_full is None:
            lam_full = self.error_eigenvalues(state.theta)
        resid = self.data.y - self.data.X @ state.beta
        step = proposal_scale * rng.standard_normal(self.basis.d)
        log_u = math.log(rng.random())
        proposal = state.delta + step
        current = self.delta_log_target(state.delta, resid, state.tau_eps, lam_full)
        candidate = self.delta_log_target(proposal, resid, state.tau_eps, lam_full)
        # Symmetric proposal: the Hastings correction is 1.
        diff = candidate - current
        if math.isnan(diff):
            return state.delta.copy(), False
        if log_u < diff:
            return proposal, True
        return state.delta.copy(), False

    def update_labels(self, state: ChainState, phi, rng) -> np.ndarray:
        return sample_labels(phi, state.theta, self.table, rng)

    def update_theta(self, state: ChainState, phi, rng) -> np.ndarray:
        """Joint Gaussian draw of the log spectral density."""
        v_inv = 1.0 / self.table.sds[state.psi - 1] ** 2
        kappa = self.table.means[state.psi - 1]
        precision = state.tau_theta * self.corr_inv[state.rho_index]
        precision[np.diag_indices_from(precision)] += v_inv
        z = rng.standard_normal(self.grid.m)
        try:
            return _theta_draw_core(precision, v_inv * (phi - kappa - self.nu_vec), self.nu_vec, z)
        except NumericError as exc:
            raise NumericError(f"{exc}; state: {state.summary()}") from exc

    def update_tau_theta(self, state: ChainState, rng) -> float:
        """Conjugate Gamma draw of the kernel precision."""
        dev = state.theta - self.nu_vec
        quad = float(dev @ self.corr_inv[state.rho_index] @ dev)
        return _gamma_draw(
            rng, self.hyper.c + 0.5 * self.grid.m, self.hyper.d + 0.5 * quad
        )

    def recenter(self, state: ChainState) -> None:
        """Pin the common log-scale shared by theta and tau_eps.

        The likelihood depends on (theta, tau_eps) only through
        exp(theta)/tau_eps, so the joint level of theta is a flat direction
        that a long chain would otherwise random-walk into numeric overflow.
        Shifting theta to the prior mean level and absorbing the shift into
        tau_eps leaves every likelihood term, forecast, and normalised
        spectrum draw unchanged while keeping both coordinates bounded.
        """
        shift = float(np.mean(self.nu_vec) - np.mean(state.theta))
        state.theta = state.theta + shift
        state.tau_eps = state.tau_eps * math.exp(shift)

    def update_rho_theta(self, state: ChainState, rng):
        """Grid-search categorical draw of the kernel range; returns (value, index).

        Weights are the Gaussian-process marginal of theta at each candidate,
        exp(-log|C_rho|/2 - tau_theta (theta-nu)' C_rho^{-1} (theta-nu)/2);
        terms common to all candidates cancel in the normalisation.
        """
        dev = state.theta - self.nu_vec
        m = self.grid.m
        half = self._inv_chol_flat @ dev
        quads = np.square(half.reshape(-1, m)).sum(axis=1)
        log_w = -0.5 * self.corr_logdet - 0.5 * state.tau_theta * quads
        log_w -= log_w.max()
        weights = np.exp(log_w)
        total = weights.sum()
        if not (total > 0 and math.isfinite(total)):
            raise NumericError("all rho-grid weights underflowed")
        cdf = np.cumsum(weights) / total
        index = int(np.searchsorted(cdf, rng.random()))
        index = min(index, self.hyper.rho_grid.size - 1)
        return float(self.hyper.rho_grid[index]), index

    # -- orchestration -------------------------------------------------------

    def initial_state(self, rng, jitter: bool) -> ChainState:
        """OLS coefficients, flat volatility, smoothed log periodogram for theta."""
        beta, *_ = np.linalg.lstsq(self.data.X, self.data.y, rcond=None)
        delta = np.zeros(self.basis.d)
        phi0 = log_periodogram(self.data.y - self.data.X @ beta)
        theta = _moving_average(phi0, window=5)
        if jitter:
            beta = beta + rng.normal(0.0, 0.5, beta.size)
            theta = theta + rng.normal(0.0, 0.5, theta.size)
        rho_index = self.hyper.rho_grid.size // 2
        state = ChainState(
            beta=beta,
            delta=delta,
            theta=theta,
            psi=np.ones(self.grid.m, dtype=int),
            tau_eps=1.0,
            tau_theta=1.0,
            rho_theta=float(self.hyper.rho_grid[rho_index]),
            rho_index=rho_index,
        )
        state.psi = self.update_labels(state, phi0, rng)
        return state

    def sweep(self, state: ChainState, rng, proposal_scale: float) -> bool:
        """One full Gibbs sweep, mutating `state`; returns the MH accept flag."""
        lam_full = self.error_eigenvalues(state.theta)
        state.beta = self.update_beta(state, rng, lam_full)
        state.tau_eps = self.update_tau_eps(state, rng, lam_full)
        accepted = True
        if self.variant is ModelVariant.TIME_VARYING:
            state.delta, accepted = self.update_delta(state, rng, proposal_scale, lam_full)
        phi = self.log_periodogram_of_residual(state)
        state.psi = self.update_labels(state, phi, rng)
        state.theta = self.update_theta(state, phi, rng)
        self.recenter(state)
        state.tau_theta = self.update_tau_theta(state, rng)
        state.rho_theta, state.rho_index = self.update_rho_theta(state, rng)
        return accepted

    def run(self) -> PosteriorSamples:
        cfg = self.config
        keep = cfg.retain
        burn = cfg.iterations - keep
        p, d, m = self.data.p, self.basis.d, self.grid.m

        out = {
            "beta": np.empty((cfg.chains, keep, p)),
            "delta": np.empty((cfg.chains, keep, d)),
            "theta": np.empty((cfg.chains, keep, m)),
            "psi": np.empty((cfg.chains, keep, m), dtype=np.int8),
            "tau_eps": np.empty((cfg.chains, keep)),
            "tau_theta": np.empty((cfg.chains, keep)),
            "rho_theta": np.empty((cfg.chains, keep)),
        }
        acceptance = np.zeros(cfg.chains)

        seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
        for chain in range(cfg.chains):
            rng = np.random.default_rng(seeds[chain])
            state = self.initial_state(rng, jitter=chain > 0)
            scale = cfg.proposal_scale
            window_accepts = 0
            retained_accepts = 0
            for it in range(cfg.iterations):
                try:
                    accepted = self.sweep(state, rng, scale)
                except (SpectralregError, LinAlgError) as exc:
                    raise NumericError(
                        f"chain {chain + 1} aborted at iteration {it + 1}: {exc}; "
                        f"state: {state.summary()}"
                    ) from exc
                if it < burn:
                    window_accepts += accepted
                    if (it + 1) % cfg.adapt_interval == 0:
                        rate = window_accepts / cfg.adapt_interval
                        if rate < cfg.accept_low:
                            scale *= 0.8
                        elif rate > cfg.accept_high:
                            scale *= 1.25
                        scale = float(np.clip(scale, 1e-4, 10.0))
                        window_accepts = 0
                else:
                    j = it - burn
                    retained_accepts += accepted
                    out["beta"][chain, j] = state.beta
                    out["delta"][chain, j] = state.delta
                    out["theta"][chain, j] = state.theta
                    out["psi"][chain, j] = state.psi
                    out["tau_eps"][chain, j] = state.tau_eps
                    out["tau_theta"][chain, j] = state.tau_theta
                    out["rho_theta"][chain, j] = state.rho_theta
            acceptance[chain] = retained_accepts / keep

        return PosteriorSamples(
            chains=cfg.chains,
            iterations=cfg.iterations,
            retained=keep,
            variant=self.variant,
            grid=self.grid,
            basis=self.basis,
            data=self.data,
            mh_acceptance=acceptance,
            **out,
        )


def run_gibbs(
    data: RegressionDataset,
    variant,
    hyper: Hyperparams | None = None,
    config: SamplerConfig | None = None,
    mixture_table: MixtureTable | None = None,
) -> PosteriorSamples:
    """Run the full multi-chain sampler and return the retained draws."""
    sampler = GibbsSampler(data, variant, hyper, config, mixture_table)
    return sampler.run()
