"""Tests for TOML configuration loading and thread resolution."""

import numpy as np
import pytest

from spectralreg import InvalidInputError
from spectralreg.config import THREADS_ENV_VAR, AppConfig, load_config, resolve_threads


def write_config(tmp_path, text):
    """Write a TOML snippet to a file and return its path."""
    path = tmp_path / "config.toml"
    path.write_text(text)
    return path


class TestDefaults:
    def test_none_gives_defaults(self):
        """No file at all yields the full default configuration."""
        cfg = load_config(None)
        assert cfg.seed == 0
        assert cfg.threads is None
        assert cfg.out_dir == "out"
        assert cfg.variant == "btv"
        assert cfg.sampler.chains == 3
        assert cfg.sampler.iterations == 4000
        assert cfg.sampler.retain == 1000
        assert cfg.sampler.spline_dim == 10
        assert cfg.priors.sigma_beta2 == 100.0
        assert cfg.priors.rho_grid.shape == (50,)
        assert cfg.baseline.phi_grid_size == 99
        assert cfg.simulate.T == 200
        assert cfg.simulate.holdout == 5
        assert cfg.dataset.path is None
        assert cfg.dataset.intercept is True
        assert cfg.panel.half_width == 3
        assert cfg.panel.synthetic_n == 360
        assert cfg.evaluate.window == 320
        assert cfg.evaluate.horizons == (1, 3, 6, 12)
        assert cfg.forecast.horizons == (1, 2, 3, 4, 5)

    def test_empty_file(self, tmp_path):
        """An empty TOML file is equivalent to no file."""
        cfg = load_config(write_config(tmp_path, ""))
        base = AppConfig()
        assert cfg.seed == base.seed
        assert cfg.variant == base.variant
        assert cfg.sampler == base.sampler
        assert cfg.evaluate == base.evaluate
        np.testing.assert_allclose(cfg.priors.rho_grid, base.priors.rho_grid)

    def test_missing_file(self, tmp_path):
        """A nonexistent path raises a readable error."""
        with pytest.raises(InvalidInputError, match="cannot read config"):
            load_config(tmp_path / "absent.toml")

    def test_unparseable_file(self, tmp_path):
        """Broken TOML syntax raises a parse error."""
        with pytest.raises(InvalidInputError, match="cannot parse config"):
            load_config(write_config(tmp_path, "seed = [unclosed"))


FULL_TOML = """
seed = 7
threads = 2
out_dir = "results"
variant = "bfv"

[sampler]
chains = 2
iterations = 500
retain = 100
spline_dim = 6
proposal_scale = 0.2

[priors]
sigma_beta2 = 25.0
a = 0.5
b = 0.5
rho_min = 1.0
rho_max = 4.0
rho_points = 3

[baseline]
chains = 1
iterations = 300
retain = 50

[simulate]
volatility = "fixed"
error = "arma11"
T = 64
holdout = 3
replicates = 2

[dataset]
path = "data.csv"
intercept = false

[panel]
half_width = 2
synthetic_n = 120
synthetic_seed = 4
predict_strength = 0.25

[evaluate]
window = 40
n_origins = 3
horizons = [1, 2]
models = ["rw", "ols"]

[forecast]
horizons = [1, 4]
"""


class TestFullFile:
    def test_every_section(self, tmp_path):
        """A file touching every section lands in the right dataclasses."""
        cfg = load_config(write_config(tmp_path, FULL_TOML))
        assert cfg.seed == 7
        assert cfg.threads == 2
        assert cfg.out_dir == "results"
        assert cfg.variant == "bfv"
        assert cfg.sampler.chains == 2
        assert cfg.sampler.iterations == 500
        assert cfg.sampler.retain == 100
        assert cfg.sampler.spline_dim == 6
        assert cfg.sampler.proposal_scale == 0.2
        assert cfg.priors.sigma_beta2 == 25.0
        assert cfg.priors.a == 0.5
        assert cfg.baseline.chains == 1
        assert cfg.baseline.retain == 50
        assert cfg.simulate.volatility == "fixed"
        assert cfg.simulate.error == "arma11"
        assert cfg.simulate.T == 64
        assert cfg.simulate.replicates == 2
        assert cfg.dataset.path == "data.csv"
        assert cfg.dataset.intercept is False
        assert cfg.panel.half_width == 2
        assert cfg.panel.synthetic_n == 120
        assert cfg.panel.predict_strength == 0.25
        assert cfg.evaluate.window == 40
        assert cfg.evaluate.n_origins == 3
        assert cfg.evaluate.horizons == (1, 2)
        assert cfg.evaluate.models == ("rw", "ols")
        assert cfg.forecast.horizons == (1, 4)

    def test_rho_grid_geometric(self, tmp_path):
        """rho_min/rho_max/rho_points define a geometric candidate grid."""
        cfg = load_config(write_config(tmp_path, FULL_TOML))
        np.testing.assert_allclose(cfg.priors.rho_grid, np.geomspace(1.0, 4.0, 3))

    def test_horizons_become_tuples(self, tmp_path):
        """TOML arrays arrive as lists and are converted to tuples."""
        cfg = load_config(write_config(tmp_path, FULL_TOML))
        assert isinstance(cfg.evaluate.horizons, tuple)
        assert isinstance(cfg.evaluate.models, tuple)
        assert isinstance(cfg.forecast.horizons, tuple)


class TestRejection:
    def test_unknown_section_key(self, tmp_path):
        """A typo inside a section names that section."""
        path = write_config(tmp_path, "[sampler]\nchanis = 2\n")
        with pytest.raises(InvalidInputError, match=r"unknown keys in \[sampler\]: chanis"):
            load_config(path)

    def test_unknown_top_level_key(self, tmp_path):
        """A stray top-level scalar is rejected."""
        path = write_config(tmp_path, "sede = 3\n")
        with pytest.raises(InvalidInputError, match="unknown top-level keys: sede"):
            load_config(path)

    def test_literal_rho_grid_rejected(self, tmp_path):
        """The grid is configured through its endpoints, not listed inline."""
        path = write_config(tmp_path, "[priors]\nrho_grid = [1.0, 2.0]\n")
        with pytest.raises(InvalidInputError, match="rho_min/rho_max/rho_points"):
            load_config(path)

    def test_bad_rho_range(self, tmp_path):
        """Inverted endpoints are rejected."""
        path = write_config(tmp_path, "[priors]\nrho_min = 5.0\nrho_max = 1.0\n")
        with pytest.raises(InvalidInputError, match="0 < rho_min < rho_max"):
            load_config(path)

    def test_bad_section_value(self, tmp_path):
        """Dataclass validation errors surface with the section name."""
        path = write_config(tmp_path, "[sampler]\niterations = 10\nretain = 20\n")
        with pytest.raises(InvalidInputError, match="retain must not exceed iterations"):
            load_config(path)

    def test_section_must_be_table(self, tmp_path):
        """A scalar where a table belongs is rejected."""
        path = write_config(tmp_path, "sampler = 3\n")
        with pytest.raises(InvalidInputError, match=r"\[sampler\] must be a table"):
            load_config(path)


class TestThreadResolution:
    def test_flag_wins(self, monkeypatch):
        """The command-line flag beats config and environment."""
        monkeypatch.setenv(THREADS_ENV_VAR, "8")
        cfg = AppConfig(threads=4)
        assert resolve_threads(2, cfg) == 2

    def test_config_beats_env(self, monkeypatch):
        """With no flag the config value beats the environment."""
        monkeypatch.setenv(THREADS_ENV_VAR, "8")
        cfg = AppConfig(threads=4)
        assert resolve_threads(None, cfg) == 4

    def test_env_beats_default(self, monkeypatch):
        """With no flag or config value the environment applies."""
        monkeypatch.setenv(THREADS_ENV_VAR, "8")
        assert resolve_threads(None, AppConfig()) == 8

    def test_default_is_one(self, monkeypatch):
        """With nothing set the count is one."""
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
        assert resolve_threads(None, AppConfig()) == 1

    def test_bad_env_value(self, monkeypatch):
        """A non-integer environment value is a configuration error."""
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        with pytest.raises(InvalidInputError, match="must be an integer"):
            resolve_threads(None, AppConfig())

    def test_nonpositive_rejected(self, monkeypatch):
        """Thread counts below one are rejected wherever they come from."""
        monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
        with pytest.raises(InvalidInputError, match="at least 1"):
            resolve_threads(0, AppConfig())
