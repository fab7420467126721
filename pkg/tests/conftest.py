"""Shared helpers for the test suite."""

import numpy as np
import pandas as pd

from spectralreg import FxPanel, synthetic_fx_panel


def make_panel(n, seed, predict_strength=0.5):
    """Build an in-memory panel from the synthetic column generator."""
    cols = synthetic_fx_panel(n, seed, predict_strength)
    return FxPanel(
        dates=pd.PeriodIndex(cols["date"], freq="M"),
        s=np.asarray(cols["s"], dtype=float),
        m=np.asarray(cols["m"], dtype=float),
        m_star=np.asarray(cols["m_star"], dtype=float),
        y=np.asarray(cols["y"], dtype=float),
        y_star=np.asarray(cols["y_star"], dtype=float),
        missing={},
    )


def write_panel_csv(path, cols):
    """Dump generator columns to a loader-compatible CSV file."""
    pd.DataFrame(cols).to_csv(path, index=False)
