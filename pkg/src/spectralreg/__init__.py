"""Bayesian time-series regression with spectrally modelled errors."""

from .baselines import (
    BaselineConfig,
    BaselineFit,
    bar1_fit_forecast,
    barch1_fit_forecast,
    ols_fit_forecast,
    rw_forecast,
)
from .dataset import RegressionDataset
from .dgp import (
    DgpSpec,
    SimulatedDataset,
    ar2_error_sd,
    raw_spectrum,
    simulate,
    synthetic_fx_panel,
    true_spectrum,
    volatility_path,
)
from .errors import (
    InvalidInputError,
    NumericError,
    SingularCovarianceError,
    SpectralregError,
)
from .evaluate import EvalPlan, EvaluationResult, run_evaluation
from .forecast import ForecastResult, forecast, serial_correction
from .fxdata import FxPanel, build_regression, impute_neighborhood, impute_panel, load_panel
from .gibbs import (
    ChainState,
    GibbsSampler,
    Hyperparams,
    ModelVariant,
    PosteriorSamples,
    SamplerConfig,
    run_gibbs,
    sample_theta_conditional,
)
from .metrics import (
    MetricsReport,
    coefficient_metrics,
    compute_metrics,
    mspe,
    ratio_table,
    rmspe,
    rw_win_rate,
)
from .mixture import (
    LOG_EXP1_MEAN,
    MixtureDiagnostics,
    MixtureTable,
    label_probabilities,
    load_default_table,
    mixture_log_density,
    sample_labels,
    sample_mixture,
    validate_mixture,
)
from .spectral import (
    AutocovSequence,
    FourierGrid,
    Periodogram,
    SpectralCurve,
    autocov_normalize,
    circulant_logdet,
    circulant_matvec,
    circulant_solve,
    extend_to_full_grid,
    fourier_frequencies,
    log_periodogram,
    periodogram,
    refine_curve,
    spectral_to_autocov,
)
from .splines import SplineBasis, basis_rows_at, build_basis, volatility_curve

__version__ = "1.0.0"
