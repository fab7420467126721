"""Evaluation summaries: coefficient accuracy and forecast accuracy."""

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import InvalidInputError


@dataclass(frozen=True)
class MetricsReport:
    bias: np.ndarray | None
    rmse: np.ndarray | None
    mspe: float | None
    rmspe: float | None
    rwr: float | None


def coefficient_metrics(estimates, truth):
    """Bias and RMSE per coefficient over replicates; estimates is (R, p)."""
    estimates = np.asarray(estimates, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimates.ndim != 2 or estimates.shape[1] != truth.size:
        raise InvalidInputError("estimates must be (replicates, coefficients)")
    deviations = estimates - truth
    return deviations.mean(axis=0), np.sqrt(np.mean(deviations**2, axis=0))


def prediction_errors(forecasts, truths) -> np.ndarray:
    forecasts = np.asarray(forecasts, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if forecasts.shape != truths.shape:
        raise InvalidInputError("forecasts and truths must align")
    return forecasts - truths


def mspe(forecasts, truths) -> float:
    errors = prediction_errors(forecasts, truths)
    if errors.size == 0:
        raise InvalidInputError("need at least one forecast")
    return float(np.mean(errors**2))


def rmspe(forecasts, truths) -> float:
    return float(np.sqrt(mspe(forecasts, truths)))


def rw_win_rate(model_errors, rw_errors) -> float:
    """Fraction of cells where the model beats the random walk strictly.

    Ties count as losses, so the random walk scored against itself gives 0.
    """
    model_errors = np.abs(np.asarray(model_errors, dtype=float))
    rw_errors = np.abs(np.asarray(rw_errors, dtype=float))
    if model_errors.shape != rw_errors.shape or model_errors.size == 0:
        raise InvalidInputError("error vectors must align and be nonempty")
    return float(np.mean(model_errors < rw_errors))


def ratio_table(rmspe_frame: pd.DataFrame) -> pd.DataFrame:
    """RMSPE relative to the best model per column (horizon)."""
    if rmspe_frame.empty:
        raise InvalidInputError("rmspe table is empty")
    return rmspe_frame / rmspe_frame.min(axis=0)


def compute_metrics(
    forecasts=None, truths=None, estimates=None, true_params=None, rw_forecasts=None
) -> MetricsReport:
    """Bundle whichever summaries the supplied pieces allow."""
    bias = rmse = None
    if estimates is not None and true_params is not None:
        bias, rmse = coefficient_metrics(estimates, true_params)
    mspe_val = rmspe_val = rwr_val = None
    if forecasts is not None and truths is not None:
        mspe_val = mspe(forecasts, truths)
        rmspe_val = float(np.sqrt(mspe_val))
        if rw_forecasts is not None:
            rwr_val = rw_win_rate(
                prediction_errors(forecasts, truths),
                prediction_errors(rw_forecasts, truths),
            )
    return MetricsReport(bias=bias, rmse=rmse, mspe=mspe_val, rmspe=rmspe_val, rwr=rwr_val)
