"""Rolling-origin forecast evaluation over a panel.

For each model, origin offset l, and horizon k, the driver fits on the rows
(l+1)..(l+T) of the panel, forecasts the level s at the origin date plus k
months, and scores against the realised value. Every cell derives its own RNG
seed from (seed, model, l, k), so results do not depend on execution order or
the number of workers, and each cell sees only its own window: the truth is
attached outside the forecasting step.
"""

import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from .baselines import (
    BaselineConfig,
    bar1_fit_forecast,
    barch1_fit_forecast,
    ols_fit_forecast,
    rw_forecast,
)
from .errors import InvalidInputError, SpectralregError
from .forecast import forecast as spectral_forecast
from .fxdata import FxPanel, build_regression, impute_panel
from .gibbs import Hyperparams, SamplerConfig, run_gibbs
from .metrics import ratio_table, rmspe, rw_win_rate

MODEL_ORDER = ("rw", "ols", "bar1", "barch1", "bfv", "btv")


@dataclass(frozen=True)
class EvalPlan:
    window: int = 320
    n_origins: int = 6
    horizons: tuple = (1, 3, 6, 12)
    models: tuple = MODEL_ORDER

    def __post_init__(self):
        if self.window < 8:
            raise InvalidInputError("window must be at least 8")
        if self.n_origins < 1:
            raise InvalidInputError("need at least one origin")
        if not self.horizons or any(int(k) < 1 for k in self.horizons):
            raise InvalidInputError("horizons must be positive")
        unknown = set(self.models) - set(MODEL_ORDER)
        if unknown:
            raise InvalidInputError(f"unknown models: {sorted(unknown)}")


@dataclass(frozen=True)
class EvaluationResult:
    cells: pd.DataFrame
    rmspe_table: pd.DataFrame
    rwr_table: pd.DataFrame
    ratio_table: pd.DataFrame


def _cell_seed(seed: int, model: str, l: int, k: int) -> int:
    ss = np.random.SeedSequence([seed, MODEL_ORDER.index(model), l, k])
    return int(ss.generate_state(1)[0])


def _forecast_cell(args):
    """Forecast the level change for one (model, origin, horizon) cell.

    Receives only the fitting window, so future information cannot reach any
    model. Returns the forecast LEVEL of s at horizon k past the window end.
    """
    sub, model, k, cell_seed, sampler_config, baseline_config, hyper = args
    origin_level = sub.s[-1]
    if model == "rw":
        return float(rw_forecast(sub.s, (k,))[0])
    dataset = build_regression(sub, k)
    if model == "ols":
        _, preds = ols_fit_forecast(dataset, (k,))
        return float(origin_level + preds[0])
    if model == "bar1":
        fit = bar1_fit_forecast(dataset, (k,), replace(baseline_config, seed=cell_seed))
        return float(origin_level + fit.forecasts[0])
    if model == "barch1":
        fit = barch1_fit_forecast(dataset, (k,), replace(baseline_config, seed=cell_seed))
        return float(origin_level + fit.forecasts[0])
    variant = {"bfv": "bfv", "btv": "btv"}[model]
    samples = run_gibbs(dataset, variant, hyper, replace(sampler_config, seed=cell_seed))
    result = spectral_forecast(samples, (k,))
    return float(origin_level + result.forecasts[0])


def run_evaluation(
    panel: FxPanel,
    plan: EvalPlan | None = None,
    sampler_config: SamplerConfig | None = None,
    baseline_config: BaselineConfig | None = None,
    seed: int = 0,
    threads: int = 1,
    hyper: Hyperparams | None = None,
) -> EvaluationResult:
    plan = plan if plan is not None else EvalPlan()
    sampler_config = sampler_config if sampler_config is not None else SamplerConfig()
    baseline_config = baseline_config if baseline_config is not None else BaselineConfig()
    panel = impute_panel(panel)

    max_k = max(int(k) for k in plan.horizons)
    needed = (plan.n_origins - 1) + plan.window + max_k
    if panel.n < needed:
        raise InvalidInputError(
            f"plan violates l + T + max(k) <= n: l_max={plan.n_origins - 1}, "
            f"T={plan.window}, max(k)={max_k} needs {needed} rows but the panel has {panel.n}"
        )

    tasks = []
    meta = []
    for model in plan.models:
        for l in range(plan.n_origins):
            sub = panel.window(l, plan.window)
            origin_idx = l + plan.window - 1
            for k in plan.horizons:
                k = int(k)
                tasks.append(
                    (
                        sub,
                        model,
                        k,
                        _cell_seed(seed, model, l, k),
                        sampler_config,
                        baseline_config,
                        hyper,
                    )
                )
                meta.append((model, l, k, origin_idx))

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(_safe_cell, tasks))
    else:
        raw = [_safe_cell(t) for t in tasks]

    rows = []
    for (model, l, k, origin_idx), (value, error_msg) in zip(meta, raw):
        truth = float(panel.s[origin_idx + k])
        if error_msg is not None:
            warnings.warn(
                f"cell (model={model}, l={l}, k={k}) failed and is excluded: {error_msg}"
            )
            rows.append((model, l, k, str(panel.dates[origin_idx]), np.nan, truth, np.nan, "failed"))
        else:
            rows.append(
                (model, l, k, str(panel.dates[origin_idx]), value, truth, value - truth, "ok")
            )
    cells = pd.DataFrame(
        rows,
        columns=["model", "l", "k", "origin", "forecast", "truth", "error", "status"],
    )
    return EvaluationResult(cells=cells, **summarize_cells(cells, plan))


def _safe_cell(args):
    try:
        return _forecast_cell(args), None
    except SpectralregError as exc:
        return np.nan, str(exc)


def summarize_cells(cells: pd.DataFrame, plan: EvalPlan | None = None) -> dict:
    """RMSPE, random-walk win rate, and ratio tables from the cell frame."""
    models = list(plan.models) if plan is not None else sorted(
        cells["model"].unique(), key=MODEL_ORDER.index
    )
    horizons = (
        [int(k) for k in plan.horizons] if plan is not None else sorted(cells["k"].unique())
    )
    ok = cells[cells["status"] == "ok"]
    rmspe_frame = pd.DataFrame(index=models, columns=horizons, dtype=float)
    rwr_frame = pd.DataFrame(index=models, columns=horizons, dtype=float)
    for k in horizons:
        rw_cells = ok[(ok["model"] == "rw") & (ok["k"] == k)].set_index("l")
        for model in models:
            sel = ok[(ok["model"] == model) & (ok["k"] == k)]
            if len(sel):
                rmspe_frame.loc[model, k] = rmspe(
                    sel["forecast"].to_numpy(), sel["truth"].to_numpy()
                )
            if len(sel) and len(rw_cells):
                joined = sel.set_index("l").join(rw_cells, rsuffix="_rw", how="inner")
                if len(joined):
                    rwr_frame.loc[model, k] = rw_win_rate(
                        joined["error"].to_numpy(), joined["error_rw"].to_numpy()
                    )
    ratio_frame = ratio_table(rmspe_frame)
    return {
        "rmspe_table": rmspe_frame,
        "rwr_table": rwr_frame,
        "ratio_table": ratio_frame,
    }
