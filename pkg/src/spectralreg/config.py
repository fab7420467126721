"""TOML-backed run configuration with full defaults.

Every setting has a default, so a missing file or empty table is valid.
Unknown keys are rejected rather than silently ignored. Thread-count
resolution order: command-line flag, config file, SPECTRALREG_THREADS
environment variable, then 1.
"""

import os
from dataclasses import dataclass, field, fields

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .baselines import BaselineConfig
from .errors import InvalidInputError
from .evaluate import EvalPlan
from .gibbs import Hyperparams, SamplerConfig

THREADS_ENV_VAR = "SPECTRALREG_THREADS"


@dataclass
class SimulateSettings:
    volatility: str = "sinusoidal"
    error: str = "ar2"
    T: int = 200
    holdout: int = 5
    replicates: int = 1


@dataclass
class DatasetSettings:
    path: str | None = None
    intercept: bool = True


@dataclass
class PanelSettings:
    path: str | None = None
    half_width: int = 3
    synthetic_n: int = 360
    synthetic_seed: int = 0
    predict_strength: float = 0.5


@dataclass
class ForecastSettings:
    horizons: tuple = (1, 2, 3, 4, 5)


@dataclass
class AppConfig:
    seed: int = 0
    threads: int | None = None
    out_dir: str = "out"
    variant: str = "btv"
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    priors: Hyperparams = field(default_factory=Hyperparams)
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    simulate: SimulateSettings = field(default_factory=SimulateSettings)
    dataset: DatasetSettings = field(default_factory=DatasetSettings)
    panel: PanelSettings = field(default_factory=PanelSettings)
    evaluate: EvalPlan = field(default_factory=EvalPlan)
    forecast: ForecastSettings = field(default_factory=ForecastSettings)


def _build(cls, values: dict, section: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(values) - allowed
    if unknown:
        raise InvalidInputError(
            f"unknown keys in [{section}]: {', '.join(sorted(unknown))}"
        )
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad [{section}] settings: {exc}") from exc


def _tuplify(values: dict, *keys):
    for key in keys:
        if key in values and isinstance(values[key], list):
            values[key] = tuple(values[key])
    return values


def _build_priors(values: dict) -> Hyperparams:
    values = dict(values)
    rho_min = values.pop("rho_min", 0.1)
    rho_max = values.pop("rho_max", 100.0)
    rho_points = values.pop("rho_points", 50)
    if "rho_grid" in values:
        raise InvalidInputError("set rho_min/rho_max/rho_points instead of rho_grid")
    if not (0 < rho_min < rho_max) or rho_points < 1:
        raise InvalidInputError("need 0 < rho_min < rho_max and rho_points >= 1")
    grid = np.geomspace(rho_min, rho_max, int(rho_points))
    hp = _build(Hyperparams, values, "priors")
    hp.rho_grid = grid
    return hp


def load_config(path=None) -> AppConfig:
    """Parse a TOML file into the full configuration; None gives defaults."""
    if path is None:
        return AppConfig()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise InvalidInputError(f"cannot parse config {path}: {exc}") from exc

    sections = {
        "sampler": lambda v: _build(SamplerConfig, v, "sampler"),
        "priors": _build_priors,
        "baseline": lambda v: _build(BaselineConfig, v, "baseline"),
        "simulate": lambda v: _build(SimulateSettings, v, "simulate"),
        "dataset": lambda v: _build(DatasetSettings, v, "dataset"),
        "panel": lambda v: _build(PanelSettings, v, "panel"),
        "evaluate": lambda v: _build(
            EvalPlan, _tuplify(v, "horizons", "models"), "evaluate"
        ),
        "forecast": lambda v: _build(ForecastSettings, _tuplify(v, "horizons"), "forecast"),
    }
    kwargs = {}
    for name, builder in sections.items():
        raw = data.pop(name, None)
        if raw is not None:
            if not isinstance(raw, dict):
                raise InvalidInputError(f"[{name}] must be a table")
            kwargs[name] = builder(dict(raw))

    scalars = {"seed", "threads", "out_dir", "variant"}
    unknown = set(data) - scalars
    if unknown:
        raise InvalidInputError(f"unknown top-level keys: {', '.join(sorted(unknown))}")
    kwargs.update(data)
    return AppConfig(**kwargs)


def resolve_threads(cli_value, config: AppConfig) -> int:
    """Flag beats config file beats environment beats single-threaded."""
    if cli_value is not None:
        value = cli_value
    elif config.threads is not None:
        value = config.threads
    else:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is not None:
            try:
                value = int(env)
            except ValueError:
                raise InvalidInputError(
                    f"{THREADS_ENV_VAR} must be an integer, got {env!r}"
                ) from None
        else:
            value = 1
    value = int(value)
    if value < 1:
        raise InvalidInputError("thread count must be at least 1")
    return value
