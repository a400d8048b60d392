"""Vectorized numpy implementations of the inner kernels.

Drop-in equivalents of the compiled routines in ``_ext``; selected at
import time when the extension is unavailable or when
``DRIFTBAND_BACKEND=numpy`` is set.
"""

from __future__ import annotations

import numpy as np


def group_means(values: np.ndarray, starts: np.ndarray, stops: np.ndarray) -> np.ndarray:
    """Mean of ``values`` over each half-open [start, stop) slice.

    The slices must tile the array consecutively (starts[0] == 0,
    starts[j+1] == stops[j], stops[-1] == len(values)).
    """
    sums = np.add.reduceat(values, starts)
    return sums / (stops - starts)


def within_moments(
    x: np.ndarray, y: np.ndarray, starts: np.ndarray, stops: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pooled centered second moments over consecutive windows.

    Returns ``(scatter, cross, xbar, ybar)`` with
    ``scatter = sum_j sum_i (x_i - xbar_j)(x_i - xbar_j)^T`` and
    ``cross = sum_j sum_i (x_i - xbar_j)(y_i - ybar_j)``, the sums running
    over windows j and the rows i inside window j.
    """
    lengths = stops - starts
    denom = lengths.astype(np.float64)
    xbar = np.add.reduceat(x, starts, axis=0) / denom[:, None]
    ybar = np.add.reduceat(y, starts) / denom
    xc = x - np.repeat(xbar, lengths, axis=0)
    yc = y - np.repeat(ybar, lengths)
    scatter = xc.T @ xc
    cross = xc.T @ yc
    return scatter, cross, xbar, ybar


def sliding_means(values: np.ndarray, w: int) -> np.ndarray:
    """Means of all n - w + 1 contiguous length-``w`` blocks."""
    c = np.cumsum(values)
    sums = c[w - 1 :].copy()
    sums[1:] -= c[:-w]
    return sums / w
