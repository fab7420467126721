"""Competitor forecasters: random walk, OLS, and two parametric Bayes models.

The parametric models share the regression mean X beta and differ in the
error law: BAR(1) takes a stationary AR(1) error sampled by quasi-differenced
conjugate blocks with a grid draw for the autoregressive root; BARCH(1) takes
ARCH(1) errors with a conjugate weighted draw for beta and a random-walk
Metropolis step for the variance parameters on unconstrained scales.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve, solve_triangular

from .dataset import RegressionDataset
from .errors import InvalidInputError, NumericError


@dataclass
class BaselineConfig:
    chains: int = 2
    iterations: int = 2000
    retain: int = 500
    seed: int = 0
    sigma_beta2: float = 100.0
    a: float = 0.01
    b: float = 0.01
    phi_grid_size: int = 99
    proposal_scale: float = 0.15
    adapt_interval: int = 50

    def __post_init__(self):
        if self.retain > self.iterations:
            raise InvalidInputError("retain must not exceed iterations")
        if self.chains < 1 or self.retain < 1:
            raise InvalidInputError("chains and retain must be positive")


@dataclass(frozen=True)
class BaselineFit:
    beta_draws: np.ndarray
    extra: dict
    horizons: tuple
    forecasts: np.ndarray


def rw_forecast(series, horizons) -> np.ndarray:
    """No-change forecast: the last observed value at every horizon."""
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise InvalidInputError("series must be nonempty")
    horizons = tuple(int(k) for k in np.atleast_1d(horizons))
    if any(k < 1 for k in horizons):
        raise InvalidInputError("horizons must be positive")
    return np.full(len(horizons), series[-1])


def _check_design(X: np.ndarray):
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise InvalidInputError("design matrix is rank deficient")


def _resolve_future(data: RegressionDataset, x_future, horizons):
    if x_future is None:
        x_future = data.x_future
    if x_future is None:
        raise InvalidInputError("no future covariate rows available")
    x_future = np.asarray(x_future, dtype=float)
    if x_future.ndim != 2 or x_future.shape[1] != data.p:
        raise InvalidInputError("future covariate rows must match the design width")
    if x_future.shape[0] < max(horizons):
        raise InvalidInputError("not enough future covariate rows for the horizons")
    return x_future[[k - 1 for k in horizons]]


def ols_fit_forecast(data: RegressionDataset, horizons, x_future=None):
    """Least-squares fit; returns (coefficients, forecasts per horizon)."""
    horizons = tuple(int(k) for k in np.atleast_1d(horizons))
    _check_design(data.X)
    future = _resolve_future(data, x_future, horizons)
    coef, *_ = np.linalg.lstsq(data.X, data.y, rcond=None)
    return coef, future @ coef


def _conjugate_normal_draw(precision, rhs, rng):
    try:
        low = cho_factor(precision, lower=True)
    except LinAlgError as exc:
        raise NumericError("coefficient posterior precision not positive definite") from exc
    mean = cho_solve(low, rhs)
    z = rng.standard_normal(rhs.size)
    return mean + solve_triangular(low[0].T, z, lower=False)


def bar1_fit_forecast(
    data: RegressionDataset, horizons, config: BaselineConfig | None = None, x_future=None
) -> BaselineFit:
    """Gibbs sampler for the AR(1)-error regression with grid-drawn root.

    The root draw uses the exact stationary likelihood, including the
    log(1 - phi^2) / 2 term from the first observation; forecasts add
    phi^k times the last residual to the regression mean.
    """
    cfg = config if config is not None else BaselineConfig()
    horizons = tuple(int(k) for k in np.atleast_1d(horizons))
    _check_design(data.X)
    future = _resolve_future(data, x_future, horizons)
    X, y, n, p = data.X, data.y, data.n, data.p
    if n < 3:
        raise InvalidInputError("need at least 3 observations")

    phi_grid = np.linspace(-0.99, 0.99, cfg.phi_grid_size)
    keep = cfg.retain
    burn = cfg.iterations - keep
    beta_out = np.empty((cfg.chains, keep, p))
    phi_out = np.empty((cfg.chains, keep))
    tau_out = np.empty((cfg.chains, keep))
    fc_parts = np.zeros((cfg.chains, keep, len(horizons)))

    beta_ols, *_ = np.linalg.lstsq(X, y, rcond=None)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    for chain in range(cfg.chains):
        rng = np.random.default_rng(seeds[chain])
        beta = beta_ols + (rng.normal(0.0, 0.1, p) if chain > 0 else 0.0)
        phi, tau = 0.0, 1.0
        for it in range(cfg.iterations):
            # beta | phi, tau via quasi-differencing
            shrink = math.sqrt(1.0 - phi**2)
            Xt = np.vstack([shrink * X[:1], X[1:] - phi * X[:-1]])
            yt = np.concatenate([shrink * y[:1], y[1:] - phi * y[:-1]])
            precision = tau * (Xt.T @ Xt) + np.eye(p) / cfg.sigma_beta2
            beta = _conjugate_normal_draw(precision, tau * (Xt.T @ yt), rng)

            u = y - X @ beta
            s_head = u[0] ** 2
            s_lead = float(np.sum(u[1:] ** 2))
            s_cross = float(np.sum(u[1:] * u[:-1]))
            s_lag = float(np.sum(u[:-1] ** 2))

            def quad(ph):
                return (1.0 - ph**2) * s_head + s_lead - 2.0 * ph * s_cross + ph**2 * s_lag

            # tau | beta, phi
            tau = float(rng.gamma(cfg.a + 0.5 * n, 1.0 / (cfg.b + 0.5 * quad(phi))))

            # phi | beta, tau on the grid
            log_w = 0.5 * np.log1p(-(phi_grid**2)) - 0.5 * tau * quad(phi_grid)
            log_w -= log_w.max()
            weights = np.exp(log_w)
            cdf = np.cumsum(weights) / weights.sum()
            idx = min(int(np.searchsorted(cdf, rng.random())), phi_grid.size - 1)
            phi = float(phi_grid[idx])

            if it >= burn:
                j = it - burn
                beta_out[chain, j] = beta
                phi_out[chain, j] = phi
                tau_out[chain, j] = tau
                u_last = y[-1] - X[-1] @ beta
                powers = np.array([phi**k for k in horizons])
                fc_parts[chain, j] = future @ beta + powers * u_last

    forecasts = fc_parts.reshape(-1, len(horizons)).mean(axis=0)
    return BaselineFit(
        beta_draws=beta_out.reshape(-1, p),
        extra={"phi": phi_out.ravel(), "tau": tau_out.ravel()},
        horizons=horizons,
        forecasts=forecasts,
    )


def _arch_log_target(log_a0, logit_a1, u, n):
    a0 = math.exp(log_a0)
    a1 = 1.0 / (1.0 + math.exp(-logit_a1))
    h = np.empty(n)
    h[0] = a0 / (1.0 - a1)
    h[1:] = a0 + a1 * u[:-1] ** 2
    loglik = -0.5 * float(np.sum(np.log(h) + u**2 / h))
    # Flat priors on (a0, a1) with the change-of-variables Jacobian.
    jacobian = log_a0 + math.log(a1) + math.log1p(-a1)
    return loglik + jacobian, h


def barch1_fit_forecast(
    data: RegressionDataset, horizons, config: BaselineConfig | None = None, x_future=None
) -> BaselineFit:
    """Gibbs-within-Metropolis sampler for the ARCH(1)-error regression.

    beta is conjugate given the conditional-variance weights of the previous
    iteration's residuals; (alpha0, alpha1) move jointly by random walk on
    (log, logit) scales. The point forecast is the posterior-mean regression
    line, since ARCH errors are serially uncorrelated.
    """
    cfg = config if config is not None else BaselineConfig()
    horizons = tuple(int(k) for k in np.atleast_1d(horizons))
    _check_design(data.X)
    future = _resolve_future(data, x_future, horizons)
    X, y, n, p = data.X, data.y, data.n, data.p
    if n < 3:
        raise InvalidInputError("need at least 3 observations")

    keep = cfg.retain
    burn = cfg.iterations - keep
    beta_out = np.empty((cfg.chains, keep, p))
    a0_out = np.empty((cfg.chains, keep))
    a1_out = np.empty((cfg.chains, keep))
    accept_rates = np.zeros(cfg.chains)

    beta_ols, *_ = np.linalg.lstsq(X, y, rcond=None)
    u0 = y - X @ beta_ols
    base_var = max(float(np.var(u0)), 1e-8)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.chains)
    for chain in range(cfg.chains):
        rng = np.random.default_rng(seeds[chain])
        beta = beta_ols + (rng.normal(0.0, 0.1, p) if chain > 0 else 0.0)
        log_a0 = math.log(0.5 * base_var)
        logit_a1 = 0.0
        u = y - X @ beta
        scale = cfg.proposal_scale
        window_accepts = 0
        kept_accepts = 0
        for it in range(cfg.iterations):
            # beta | h with weights from the current residual path
            _, h = _arch_log_target(log_a0, logit_a1, u, n)
            Xw = X / h[:, None]
            precision = Xw.T @ X + np.eye(p) / cfg.sigma_beta2
            precision = 0.5 * (precision + precision.T)
            beta = _conjugate_normal_draw(precision, Xw.T @ y, rng)
            u = y - X @ beta

            # joint random-walk move for the variance parameters
            target, h = _arch_log_target(log_a0, logit_a1, u, n)
            prop = (
                log_a0 + scale * rng.standard_normal(),
                logit_a1 + scale * rng.standard_normal(),
            )
            log_u = math.log(rng.random())
            cand, _ = _arch_log_target(prop[0], prop[1], u, n)
            accepted = not math.isnan(cand - target) and log_u < cand - target
            if accepted:
                log_a0, logit_a1 = prop

            if it < burn:
                window_accepts += accepted
                if (it + 1) % cfg.adapt_interval == 0:
                    rate = window_accepts / cfg.adapt_interval
                    if rate < 0.15:
                        scale *= 0.7
                    elif rate > 0.5:
                        scale *= 1.4
                    scale = float(np.clip(scale, 1e-3, 5.0))
                    window_accepts = 0
            else:
                j = it - burn
                kept_accepts += accepted
                beta_out[chain, j] = beta
                a0_out[chain, j] = math.exp(log_a0)
                a1_out[chain, j] = 1.0 / (1.0 + math.exp(-logit_a1))
        accept_rates[chain] = kept_accepts / keep

    beta_draws = beta_out.reshape(-1, p)
    forecasts = future @ beta_draws.mean(axis=0)
    return BaselineFit(
        beta_draws=beta_draws,
        extra={
            "alpha0": a0_out.ravel(),
            "alpha1": a1_out.ravel(),
            "mh_acceptance": accept_rates,
        },
        horizons=horizons,
        forecasts=forecasts,
    )
