"""Regression dataset container shared by the sampler, forecaster, and baselines."""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class RegressionDataset:
    """Response vector, T x p design matrix, and optional future design rows."""

    y: np.ndarray
    X: np.ndarray
    x_future: np.ndarray | None = field(default=None)

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        X = np.asarray(self.X, dtype=float)
        if y.ndim != 1 or X.ndim != 2 or X.shape[0] != y.size:
            raise InvalidInputError(
                f"incompatible shapes: y {y.shape}, X {X.shape}"
            )
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(X))):
            raise InvalidInputError("dataset contains NaN or Inf")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "X", X)
        if self.x_future is not None:
            xf = np.atleast_2d(np.asarray(self.x_future, dtype=float))
            if xf.shape[1] != X.shape[1]:
                raise InvalidInputError(
                    f"future design rows have {xf.shape[1]} columns, expected {X.shape[1]}"
                )
            if not np.all(np.isfinite(xf)):
                raise InvalidInputError("future design rows contain NaN or Inf")
            object.__setattr__(self, "x_future", xf)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def p(self) -> int:
        return self.X.shape[1]
