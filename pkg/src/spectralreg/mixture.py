"""Five-component Gaussian mixture for log-periodogram noise, and label sampling.

The ratio periodogram/spectral-density is asymptotically standard exponential
at the Fourier frequencies, so the additive noise on the log scale follows the
log of an Exp(1) variable. That skewed density is approximated by a mixture of
five normals; the mixture component actually responsible for each frequency is
a latent label sampled inside the Gibbs sweep.

The shipped table lives in assets/log_exp1_mixture.json and is validated
mechanically by `validate_mixture` (see scripts/fit_mixture_table.py for how
it was produced).
"""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.stats import ks_2samp

from .errors import InvalidInputError

N_COMPONENTS = 5

LOG_EXP1_MEAN = -np.euler_gamma


@dataclass(frozen=True)
class MixtureTable:
    """Component probabilities, mean offsets, and standard deviations."""

    probs: np.ndarray
    means: np.ndarray
    sds: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        means = np.asarray(self.means, dtype=float)
        sds = np.asarray(self.sds, dtype=float)
        if not (probs.shape == means.shape == sds.shape == (N_COMPONENTS,)):
            raise InvalidInputError(f"mixture table must have exactly {N_COMPONENTS} components")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise InvalidInputError("component probabilities must be >= 0 and sum to 1")
        if np.any(sds <= 0):
            raise InvalidInputError("component standard deviations must be positive")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sds", sds)


@dataclass(frozen=True)
class MixtureDiagnostics:
    mixture_mean: float
    mean_error: float
    ks_statistic: float


def load_default_table() -> MixtureTable:
    """Load the shipped log-Exp(1) mixture table."""
    raw = json.loads(
        resources.files("spectralreg").joinpath("assets/log_exp1_mixture.json").read_text()
    )
    rows = raw["components"]
    return MixtureTable(
        probs=np.array([r["p"] for r in rows]),
        means=np.array([r["k"] for r in rows]),
        sds=np.array([r["v"] for r in rows]),
    )


def _component_log_weights(resid: np.ndarray, table: MixtureTable) -> np.ndarray:
    """Unnormalised log weights, shape (len(resid), 5); -inf where p = 0."""
    resid = np.atleast_1d(np.asarray(resid, dtype=float))
    z = (resid[:, None] - table.means[None, :]) / table.sds[None, :]
    with np.errstate(divide="ignore"):
        log_p = np.where(table.probs > 0, np.log(table.probs), -np.inf)
    return log_p[None, :] - np.log(table.sds)[None, :] - 0.5 * z**2


def mixture_log_density(xi, table: MixtureTable):
    """Log density of the normalised mixture at `xi` (scalar or vector)."""
    lw = _component_log_weights(xi, table) - 0.5 * np.log(2.0 * np.pi)
    top = lw.max(axis=1)
    out = top + np.log(np.exp(lw - top[:, None]).sum(axis=1))
    return float(out[0]) if np.isscalar(xi) or np.ndim(xi) == 0 else out


def label_probabilities(resid: np.ndarray, table: MixtureTable) -> np.ndarray:
    """Normalised posterior label probabilities, shape (len(resid), 5)."""
    lw = _component_log_weights(resid, table)
    lw = lw - lw.max(axis=1, keepdims=True)
    w = np.exp(lw)
    return w / w.sum(axis=1, keepdims=True)


def sample_labels(
    phi: np.ndarray, theta: np.ndarray, table: MixtureTable, rng: np.random.Generator
) -> np.ndarray:
    """Draw one mixture label in 1..5 per frequency from its 5-point categorical.

    Probabilities are computed in log space with max subtraction, so the draw
    is well defined whenever at least one component has positive weight.
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if phi.shape != theta.shape:
        raise InvalidInputError("phi and theta must have the same length")
    probs = label_probabilities(phi - theta, table)
    cdf = np.cumsum(probs, axis=1)
    u = rng.random(phi.size)
    return 1 + (u[:, None] > cdf[:, :-1]).sum(axis=1)


def sample_mixture(table: MixtureTable, size: int, rng: np.random.Generator) -> np.ndarray:
    """Direct draws from the mixture distribution."""
    comp = rng.choice(N_COMPONENTS, size=size, p=table.probs)
    return rng.normal(table.means[comp], table.sds[comp])


def validate_mixture(
    table: MixtureTable, rng: np.random.Generator, n_draws: int = 100_000
) -> MixtureDiagnostics:
    """Compare mixture draws against genuine log-Exp(1) samples.

    Returns the mixture sample mean, its error against the analytic log-Exp(1)
    mean (-Euler gamma), and the two-sample Kolmogorov-Smirnov statistic.
    """
    mix = sample_mixture(table, n_draws, rng)
    ref = np.log(rng.exponential(size=n_draws))
    mean = float(mix.mean())
    return MixtureDiagnostics(
        mixture_mean=mean,
        mean_error=mean - LOG_EXP1_MEAN,
        ks_statistic=float(ks_2samp(mix, ref).statistic),
    )
