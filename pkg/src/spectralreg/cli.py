"""Command-line entry point.

Subcommands: simulate (replicate study), fit (posterior for one dataset),
forecast (fit plus k-step forecasts), evaluate (rolling-origin comparison on
a panel), report (re-aggregate a forecast cell file). Exit codes: 0 success,
1 invalid input, 2 numeric failure.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from .baselines import bar1_fit_forecast, barch1_fit_forecast, ols_fit_forecast, rw_forecast
from .config import AppConfig, load_config, resolve_threads
from .dataset import RegressionDataset
from .dgp import DgpSpec, simulate, synthetic_fx_panel
from .errors import InvalidInputError, NumericError, SpectralregError
from .evaluate import run_evaluation, summarize_cells
from .forecast import forecast as spectral_forecast
from .fxdata import FxPanel, impute_panel, load_panel
from .gibbs import run_gibbs
from .metrics import coefficient_metrics

TABLE_FLOAT_FORMAT = "%.10g"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectralreg",
        description="Bayesian time-series regression with spectrally modelled errors",
    )
    parser.add_argument("--config", type=str, default=None, help="TOML configuration file")
    parser.add_argument("--seed", type=int, default=None, help="override the run seed")
    parser.add_argument("--threads", type=int, default=None, help="worker process count")
    parser.add_argument("--out-dir", type=str, default=None, help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", help="replicate study on simulated data").set_defaults(
        handler=cmd_simulate
    )
    sub.add_parser("fit", help="posterior sampling for one dataset").set_defaults(
        handler=cmd_fit
    )
    sub.add_parser("forecast", help="fit and forecast ahead").set_defaults(
        handler=cmd_forecast
    )
    sub.add_parser("evaluate", help="rolling-origin panel evaluation").set_defaults(
        handler=cmd_evaluate
    )
    report = sub.add_parser("report", help="re-aggregate a forecast cell file")
    report.add_argument(
        "cells", nargs="?", default=None, help="forecast cell CSV (default: <out-dir>/forecasts.csv)"
    )
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out_dir is not None:
            cfg.out_dir = args.out_dir
        threads = resolve_threads(args.threads, cfg)
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        return args.handler(cfg, threads, out_dir, args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except SpectralregError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


# -- dataset loading ---------------------------------------------------------


def _load_dataset_csv(path, intercept: bool) -> RegressionDataset:
    """Generic regression CSV: column y is the response, the rest covariates.

    Rows with an empty y cell are future covariate rows and must come after
    every observed row. Unparseable or non-finite cells are errors naming the
    offending line (header is line 1).
    """
    try:
        raw = pd.read_csv(path, dtype=str)
    except (OSError, pd.errors.ParserError) as exc:
        raise InvalidInputError(f"cannot read dataset {path}: {exc}") from exc
    if "y" not in raw.columns:
        raise InvalidInputError("dataset file needs a 'y' column")
    covariate_cols = [c for c in raw.columns if c != "y"]

    def parse_cell(cell, line, col):
        text = "" if cell is None or pd.isna(cell) else str(cell).strip()
        if not text:
            raise InvalidInputError(f"line {line}: empty {col} cell")
        try:
            value = float(text)
        except ValueError:
            raise InvalidInputError(f"line {line}: cannot parse {col} value {text!r}") from None
        if not np.isfinite(value):
            raise InvalidInputError(f"line {line}: non-finite {col} value {text!r}")
        return value

    y_vals, x_rows, future_rows = [], [], []
    seen_future = False
    for i in range(len(raw)):
        line = i + 2
        y_cell = raw["y"].iloc[i]
        y_text = "" if y_cell is None or pd.isna(y_cell) else str(y_cell).strip()
        row = [parse_cell(raw[c].iloc[i], line, c) for c in covariate_cols]
        if y_text:
            if seen_future:
                raise InvalidInputError(
                    f"line {line}: observed row after future (empty-y) rows"
                )
            y_vals.append(parse_cell(y_cell, line, "y"))
            x_rows.append(row)
        else:
            seen_future = True
            future_rows.append(row)

    if not x_rows:
        raise InvalidInputError("dataset has no observed rows")
    X = np.asarray(x_rows, dtype=float)
    x_future = np.asarray(future_rows, dtype=float) if future_rows else None
    if intercept:
        X = np.column_stack([np.ones(len(X)), X])
        if x_future is not None:
            x_future = np.column_stack([np.ones(len(x_future)), x_future])
    if X.shape[1] == 0:
        raise InvalidInputError("dataset has no covariate columns")
    return RegressionDataset(y=np.asarray(y_vals), X=X, x_future=x_future)


def _resolve_dataset(cfg: AppConfig):
    """Dataset from the configured CSV, or a simulated one when no path is set.

    Returns (dataset, future_truth or None).
    """
    if cfg.dataset.path is not None:
        return _load_dataset_csv(cfg.dataset.path, cfg.dataset.intercept), None
    sim_cfg = cfg.simulate
    total = sim_cfg.T + sim_cfg.holdout
    sim = simulate(DgpSpec(sim_cfg.volatility, sim_cfg.error, total, cfg.seed))
    dataset = sim.as_regression(sim_cfg.T)
    truth = sim.y[sim_cfg.T :] if sim_cfg.holdout else None
    return dataset, truth


def _write_csv(frame: pd.DataFrame, path: Path, label: str):
    frame.to_csv(path, index=False, float_format=TABLE_FLOAT_FORMAT)
    print(f"wrote {label}: {path}")


def _write_table(frame: pd.DataFrame, path: Path, label: str):
    out = frame.copy()
    out.columns = [f"k{k}" for k in out.columns]
    out.insert(0, "model", out.index)
    _write_csv(out.reset_index(drop=True), path, label)


def _curve_summary(draws: np.ndarray, axis_name: str, axis_values) -> pd.DataFrame:
    lo, hi = np.quantile(draws, [0.025, 0.975], axis=0)
    return pd.DataFrame(
        {
            axis_name: axis_values,
            "mean": draws.mean(axis=0),
            "lo_2.5": lo,
            "hi_97.5": hi,
        }
    )


# -- subcommands -------------------------------------------------------------


def cmd_fit(cfg: AppConfig, threads, out_dir: Path, args) -> int:
    dataset, _ = _resolve_dataset(cfg)
    samples = run_gibbs(dataset, cfg.variant, cfg.priors, replace(cfg.sampler, seed=cfg.seed))
    _write_csv(samples.to_frame(), out_dir / "posterior_samples.csv", "posterior draws")

    cycles = samples.grid.frequencies / (2.0 * np.pi)
    _write_csv(
        _curve_summary(samples.normalized_log_spectra(), "frequency_cycles", cycles),
        out_dir / "theta_curve.csv",
        "log spectrum summary",
    )
    times = np.arange(1, dataset.n + 1)
    _write_csv(
        _curve_summary(samples.log_variance_curves(), "t", times),
        out_dir / "sigma_curve.csv",
        "log variance summary",
    )
    rates = ", ".join(f"{r:.2f}" for r in samples.mh_acceptance)
    print(
        f"fit done: variant={samples.variant.value}, n={dataset.n}, "
        f"chains={samples.chains}, retained={samples.retained} per chain, "
        f"MH acceptance [{rates}]"
    )
    return 0


def cmd_forecast(cfg: AppConfig, threads, out_dir: Path, args) -> int:
    dataset, future_truth = _resolve_dataset(cfg)
    horizons = tuple(int(k) for k in cfg.forecast.horizons)
    if dataset.x_future is None:
        raise InvalidInputError("forecasting needs future covariate rows (empty-y rows)")
    if dataset.x_future.shape[0] < max(horizons):
        raise InvalidInputError(
            f"horizon {max(horizons)} exceeds the {dataset.x_future.shape[0]} future rows"
        )
    samples = run_gibbs(dataset, cfg.variant, cfg.priors, replace(cfg.sampler, seed=cfg.seed))
    result = spectral_forecast(samples, horizons)
    rows = []
    for k, value in result.as_rows():
        truth = (
            float(future_truth[k - 1])
            if future_truth is not None and k <= len(future_truth)
            else np.nan
        )
        rows.append((dataset.n, k, value, truth, value - truth if np.isfinite(truth) else np.nan))
    frame = pd.DataFrame(rows, columns=["origin", "horizon", "forecast", "truth", "error"])
    _write_csv(frame, out_dir / "forecasts.csv", "forecasts")
    return 0


def cmd_simulate(cfg: AppConfig, threads, out_dir: Path, args) -> int:
    sim_cfg = cfg.simulate
    if sim_cfg.replicates < 1:
        raise InvalidInputError("need at least one replicate")
    horizons = tuple(range(1, sim_cfg.holdout + 1)) if sim_cfg.holdout else ()
    models = [m for m in cfg.evaluate.models]
    ledger_rows = []
    estimates = {m: [] for m in models if m != "rw"}
    sq_errors = {m: [] for m in models} if horizons else {}

    for rep in range(sim_cfg.replicates):
        rep_seed = int(np.random.SeedSequence([cfg.seed, rep]).generate_state(1)[0])
        total = sim_cfg.T + sim_cfg.holdout
        sim = simulate(DgpSpec(sim_cfg.volatility, sim_cfg.error, total, rep_seed))
        dataset = sim.as_regression(sim_cfg.T)
        truth = sim.y[sim_cfg.T :]

        def record(model, coef, preds):
            if coef is not None:
                estimates[model].append(np.asarray(coef))
                for j, value in enumerate(np.asarray(coef)):
                    ledger_rows.append(
                        (sim_cfg.volatility, sim_cfg.error, rep_seed, model, "coef", f"beta_{j}", value)
                    )
            if horizons and preds is not None:
                sq = (np.asarray(preds) - truth[: len(preds)]) ** 2
                sq_errors[model].append(sq)
                for k, value in zip(horizons, sq):
                    ledger_rows.append(
                        (sim_cfg.volatility, sim_cfg.error, rep_seed, model, "sqerr", f"k{k}", value)
                    )

        for model in models:
            cell_seed = int(
                np.random.SeedSequence([cfg.seed, rep, models.index(model)]).generate_state(1)[0]
            )
            if model == "rw":
                record(model, None, rw_forecast(dataset.y, horizons) if horizons else None)
            elif model == "ols":
                coef, preds = ols_fit_forecast(dataset, horizons or (1,))
                record(model, coef, preds if horizons else None)
            elif model == "bar1":
                fit = bar1_fit_forecast(
                    dataset, horizons or (1,), replace(cfg.baseline, seed=cell_seed)
                )
                record(model, fit.beta_draws.mean(axis=0), fit.forecasts if horizons else None)
            elif model == "barch1":
                fit = barch1_fit_forecast(
                    dataset, horizons or (1,), replace(cfg.baseline, seed=cell_seed)
                )
                record(model, fit.beta_draws.mean(axis=0), fit.forecasts if horizons else None)
            else:
                samples = run_gibbs(
                    dataset, model, cfg.priors, replace(cfg.sampler, seed=cell_seed)
                )
                beta_mean = samples.stacked("beta").mean(axis=0)
                preds = (
                    spectral_forecast(samples, horizons).forecasts if horizons else None
                )
                record(model, beta_mean, preds)
        print(f"replicate {rep + 1}/{sim_cfg.replicates} done")

    ledger = pd.DataFrame(
        ledger_rows,
        columns=["volatility", "error", "seed", "model", "quantity", "name", "value"],
    )
    _write_csv(ledger, out_dir / "simulation_ledger.csv", "replicate ledger")

    est_rows = []
    truth_beta = sim.beta
    for model, mats in estimates.items():
        if not mats:
            continue
        bias, rmse_vals = coefficient_metrics(np.vstack([m[None, :] for m in mats]), truth_beta)
        for j in range(truth_beta.size):
            est_rows.append((model, f"beta_{j}", bias[j], rmse_vals[j]))
    _write_csv(
        pd.DataFrame(est_rows, columns=["model", "coefficient", "bias", "rmse"]),
        out_dir / "estimation_table.csv",
        "coefficient metrics",
    )

    if horizons:
        mspe_rows = []
        for model in models:
            if sq_errors[model]:
                means = np.vstack(sq_errors[model]).mean(axis=0)
                mspe_rows.append((model, *means))
        frame = pd.DataFrame(mspe_rows, columns=["model", *[f"k{k}" for k in horizons]])
        _write_csv(frame, out_dir / "mspe_table.csv", "MSPE table")
    return 0


def _resolve_panel(cfg: AppConfig) -> FxPanel:
    if cfg.panel.path is not None:
        panel = load_panel(cfg.panel.path)
        return impute_panel(panel, cfg.panel.half_width)
    columns = synthetic_fx_panel(
        cfg.panel.synthetic_n, cfg.panel.synthetic_seed, cfg.panel.predict_strength
    )
    return FxPanel(
        dates=pd.PeriodIndex(columns["date"], freq="M"),
        s=columns["s"],
        m=columns["m"],
        m_star=columns["m_star"],
        y=columns["y"],
        y_star=columns["y_star"],
        missing={},
    )


def cmd_evaluate(cfg: AppConfig, threads, out_dir: Path, args) -> int:
    panel = _resolve_panel(cfg)
    result = run_evaluation(
        panel,
        cfg.evaluate,
        sampler_config=cfg.sampler,
        baseline_config=cfg.baseline,
        seed=cfg.seed,
        threads=threads,
        hyper=cfg.priors,
    )
    _write_csv(result.cells, out_dir / "forecasts.csv", "forecast cells")
    _write_table(result.rmspe_table, out_dir / "rmspe_table.csv", "RMSPE table")
    _write_table(result.rwr_table, out_dir / "rwr_table.csv", "random-walk win rates")
    _write_table(result.ratio_table, out_dir / "ratio_table.csv", "RMSPE ratios")
    n_failed = int((result.cells["status"] == "failed").sum())
    print(f"evaluation done: {len(result.cells)} cells, {n_failed} failed")
    return 0


def cmd_report(cfg: AppConfig, threads, out_dir: Path, args) -> int:
    cells_path = Path(args.cells) if args.cells else out_dir / "forecasts.csv"
    try:
        cells = pd.read_csv(cells_path)
    except (OSError, pd.errors.ParserError) as exc:
        raise InvalidInputError(f"cannot read cell file {cells_path}: {exc}") from exc
    needed = {"model", "l", "k", "forecast", "truth", "error", "status"}
    missing = needed - set(cells.columns)
    if missing:
        raise InvalidInputError(
            f"cell file missing columns: {', '.join(sorted(missing))}"
        )
    tables = summarize_cells(cells)
    _write_table(tables["rmspe_table"], out_dir / "rmspe_table.csv", "RMSPE table")
    _write_table(tables["rwr_table"], out_dir / "rwr_table.csv", "random-walk win rates")
    _write_table(tables["ratio_table"], out_dir / "ratio_table.csv", "RMSPE ratios")
    return 0


if __name__ == "__main__":
    sys.exit(main())
