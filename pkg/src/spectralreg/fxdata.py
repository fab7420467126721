"""Monthly exchange-rate panel: loading, imputation, regression assembly.

A panel holds the log spot rate s plus the money and income series of both
countries (m, m_star, y, y_star) on a monthly date axis. The monetary
fundamental is f = m - m_star - (y - y_star), and the regression couples the
k-month change in s to the fundamental-spot gap z = f - s.
"""

from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from .dataset import RegressionDataset
from .errors import InvalidInputError

SERIES_COLUMNS = ("s", "m", "m_star", "y", "y_star")
REQUIRED_COLUMNS = ("date",) + SERIES_COLUMNS
DEFAULT_HALF_WIDTH = 3


@dataclass(frozen=True)
class FxPanel:
    dates: pd.PeriodIndex
    s: np.ndarray
    m: np.ndarray
    m_star: np.ndarray
    y: np.ndarray
    y_star: np.ndarray
    missing: dict

    @property
    def n(self) -> int:
        return len(self.dates)

    def series(self, name: str) -> np.ndarray:
        if name not in SERIES_COLUMNS:
            raise InvalidInputError(f"unknown series {name!r}")
        return getattr(self, name)

    @property
    def fundamental(self) -> np.ndarray:
        return self.m - self.m_star - (self.y - self.y_star)

    def window(self, start: int, length: int) -> "FxPanel":
        """Contiguous sub-panel of `length` rows beginning at row `start`."""
        if start < 0 or length < 1 or start + length > self.n:
            raise InvalidInputError(
                f"window [{start}, {start + length}) outside panel of length {self.n}"
            )
        sl = slice(start, start + length)
        return FxPanel(
            dates=self.dates[sl],
            s=self.s[sl],
            m=self.m[sl],
            m_star=self.m_star[sl],
            y=self.y[sl],
            y_star=self.y_star[sl],
            missing={},
        )


def load_panel(path) -> FxPanel:
    """Read a panel CSV, validating dates and recording missing cells.

    Columns are matched by name. Dates must parse as yyyy-mm, be unique, and
    increase monotonically. Blank numeric cells are recorded as missing for
    later imputation; any other unparseable cell is an error naming the line.
    """
    try:
        raw = pd.read_csv(path, dtype=str, skip_blank_lines=False)
    except (OSError, pd.errors.ParserError) as exc:
        raise InvalidInputError(f"cannot read panel file {path}: {exc}") from exc
    missing_cols = [c for c in REQUIRED_COLUMNS if c not in raw.columns]
    if missing_cols:
        raise InvalidInputError(f"panel file missing columns: {', '.join(missing_cols)}")

    # Header is line 1, so data row i (0-based) sits on line i + 2.
    periods = []
    for i, value in enumerate(raw["date"]):
        text = str(value).strip() if value is not None and not pd.isna(value) else ""
        try:
            if not text:
                raise ValueError("empty")
            periods.append(pd.Period(text, freq="M"))
        except Exception:
            raise InvalidInputError(
                f"line {i + 2}: cannot parse date {text!r} (expected yyyy-mm)"
            ) from None
    dates = pd.PeriodIndex(periods, freq="M")
    if dates.duplicated().any():
        dupe = dates[dates.duplicated()][0]
        raise InvalidInputError(f"duplicate date {dupe} in panel")
    if not dates.is_monotonic_increasing:
        raise InvalidInputError("panel dates must increase monotonically")

    series = {}
    missing = {}
    for col in SERIES_COLUMNS:
        values = np.full(len(raw), np.nan)
        gaps = []
        for i, cell in enumerate(raw[col]):
            text = "" if cell is None or pd.isna(cell) else str(cell).strip()
            if not text:
                gaps.append(i)
                continue
            try:
                values[i] = float(text)
            except ValueError:
                raise InvalidInputError(
                    f"line {i + 2}: cannot parse {col} value {text!r}"
                ) from None
        series[col] = values
        if gaps:
            missing[col] = gaps

    return FxPanel(dates=dates, missing=missing, **series)


def impute_neighborhood(values, gap_indices, half_width: int = DEFAULT_HALF_WIDTH):
    """Fill each gap with the mean of its nearest observed neighbours.

    Up to `half_width` observed values are taken from each side; a gap with no
    observed value on one side (an edge gap) is an error.
    """
    values = np.asarray(values, dtype=float).copy()
    if half_width < 1:
        raise InvalidInputError("half_width must be at least 1")
    gap_set = set(int(g) for g in gap_indices)
    if not gap_set:
        return values
    if any(g < 0 or g >= values.size for g in gap_set):
        raise InvalidInputError("gap index outside the series")
    observed = np.array(sorted(set(range(values.size)) - gap_set), dtype=int)
    if observed.size == 0:
        raise InvalidInputError("series has no observed values")
    for g in sorted(gap_set):
        left = observed[observed < g]
        right = observed[observed > g]
        if left.size == 0 or right.size == 0:
            raise InvalidInputError(
                f"gap at position {g} touches the series edge; no neighbourhood to average"
            )
        picks = np.concatenate([left[-half_width:], right[:half_width]])
        values[g] = float(values[picks].mean())
    return values


def impute_panel(panel: FxPanel, half_width: int = DEFAULT_HALF_WIDTH) -> FxPanel:
    """Apply neighbourhood imputation to every recorded gap; result has none."""
    if not panel.missing:
        return panel
    filled = {}
    for col in SERIES_COLUMNS:
        gaps = panel.missing.get(col, [])
        filled[col] = (
            impute_neighborhood(panel.series(col), gaps, half_width)
            if gaps
            else panel.series(col)
        )
    return replace(panel, missing={}, **filled)


def build_regression(panel: FxPanel, k: int) -> RegressionDataset:
    """k-month-change regression rows plus the end-of-sample forecast row.

    Response: s_{t+k} - s_t for every t with t + k inside the panel. Design:
    intercept and the gap z_t = f_t - s_t. The future row carries z at the
    final panel date, the origin for a k-step forecast.
    """
    if k < 1:
        raise InvalidInputError("horizon k must be positive")
    if panel.missing:
        raise InvalidInputError("panel has unimputed gaps; impute before building")
    n = panel.n
    if n <= k:
        raise InvalidInputError(f"panel of length {n} cannot support horizon {k}")
    z = panel.fundamental - panel.s
    response = panel.s[k:] - panel.s[:-k]
    design = np.column_stack([np.ones(n - k), z[: n - k]])
    # Step j ahead of the last response row sits at calendar time n - k + j - 1,
    # so the horizon-k row carries the gap at the final panel date.
    x_future = np.column_stack([np.ones(k), z[n - k :]])
    return RegressionDataset(y=response, X=design, x_future=x_future)
