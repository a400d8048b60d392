"""Baseline-range estimation from overlapping moving blocks.

After the slopes are fixed, every length-w block of consecutive rows gets
its own intercept (the block mean of the slope residuals); the min and
max of those block intercepts estimate the lower and upper end of the
baseline range. Prediction intervals simply shift that envelope by the
linear predictor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import FIXED_N0, BoundsEstimate, Dataset, WindowPlan
from ._kernels import sliding_means

__all__ = [
    "PredictionInterval",
    "intercept_bounds",
    "moving_block_bounds",
    "moving_block_intercepts",
    "predict_interval",
    "predict_intervals",
    "true_block_mean_bounds",
]


@dataclass(frozen=True)
class PredictionInterval:
    lower: float
    upper: float
    point_center: float  # interval midpoint, convenience only

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"lower={self.lower} > upper={self.upper}")


def _check_block_length(w: int, n: int) -> None:
    if not 2 <= w <= n:
        raise ValueError(f"block length must satisfy 2 <= w <= {n}, got {w}")


def moving_block_intercepts(data: Dataset, beta: np.ndarray, w: int) -> np.ndarray:
    """Intercept of each of the n - w + 1 overlapping length-w blocks.

    Block l's intercept is the mean of y - x @ beta over rows l..l+w-1.
    """
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (data.p,):
        raise ValueError(f"beta must have length {data.p}, got shape {beta.shape}")
    _check_block_length(w, data.n)
    return sliding_means(data.y - data.x @ beta, w)


def intercept_bounds(block_intercepts: np.ndarray, w: int | None = None) -> BoundsEstimate:
    """Envelope of the block intercepts: their min and max."""
    a = np.asarray(block_intercepts, dtype=np.float64)
    if a.size == 0:
        raise ValueError("no block intercepts")
    return BoundsEstimate(
        block_intercepts=a,
        mu_lower_hat=float(np.min(a)),
        mu_upper_hat=float(np.max(a)),
        w=w,
    )


def moving_block_bounds(
    data: Dataset, beta: np.ndarray, w: int, plan: WindowPlan | None = None
) -> BoundsEstimate:
    """Scan blocks and take the envelope in one call.

    When the slopes came from a fixed-n0 plan, the block length must
    exceed n0 (blocks shorter than the fit windows only add noise).
    """
    if plan is not None and plan.source == FIXED_N0 and w <= plan.n0:
        raise ValueError(f"block length {w} must exceed the window size n0={plan.n0}")
    return intercept_bounds(moving_block_intercepts(data, beta, w), w=w)


def true_block_mean_bounds(intercept_path: np.ndarray, w: int) -> tuple[float, float]:
    """Envelope of length-w block means of a known intercept path.

    This is the population target the moving-block estimator chases; it is
    only computable in simulations, where the expected per-row intercepts
    are known. Returns (lower, upper).
    """
    path = np.asarray(intercept_path, dtype=np.float64)
    _check_block_length(w, path.shape[0])
    means = sliding_means(path, w)
    return float(np.min(means)), float(np.max(means))


def predict_interval(
    x_new: np.ndarray, beta: np.ndarray, bounds: BoundsEstimate
) -> PredictionInterval:
    """Interval for the conditional mean of y at a new covariate vector."""
    x_new = np.asarray(x_new, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if x_new.shape != beta.shape:
        raise ValueError(
            f"covariate vector has shape {x_new.shape}, expected {beta.shape}"
        )
    center = float(x_new @ beta)
    return PredictionInterval(
        lower=center + bounds.mu_lower_hat,
        upper=center + bounds.mu_upper_hat,
        point_center=center + 0.5 * (bounds.mu_lower_hat + bounds.mu_upper_hat),
    )


def predict_intervals(
    x_new: np.ndarray, beta: np.ndarray, bounds: BoundsEstimate
) -> np.ndarray:
    """Row-wise intervals for a matrix of new covariates: (m, 3) of lower, upper, center."""
    x_new = np.asarray(x_new, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if x_new.ndim != 2 or x_new.shape[1] != beta.shape[0]:
        raise ValueError(
            f"covariate matrix must have {beta.shape[0]} columns, got shape {x_new.shape}"
        )
    center = x_new @ beta
    out = np.empty((x_new.shape[0], 3))
    out[:, 0] = center + bounds.mu_lower_hat
    out[:, 1] = center + bounds.mu_upper_hat
    out[:, 2] = center + 0.5 * (bounds.mu_lower_hat + bounds.mu_upper_hat)
    return out
