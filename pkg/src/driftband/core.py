"""Shared domain types: validated datasets, window plans, fit containers.

Every container is immutable after construction (arrays are marked
read-only) and safe to share across concurrent tasks. Row order is
meaningful throughout the package: observations are consecutive in time
and are never reordered.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "BoundsEstimate",
    "DataValidationError",
    "Dataset",
    "EmFit",
    "EmStep",
    "EstimatorDiagnostics",
    "ModelParams",
    "WindowPlan",
    "partition_windows",
    "plan_from_groups",
    "validate_dataset",
]

FIXED_N0 = "fixed-n0"
KNOWN_GROUPS = "known-groups"


class DataValidationError(ValueError):
    """Raised when raw inputs violate the dataset contract.

    Carries ``row``/``column`` (0-based) when a specific cell is at fault.
    """

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        super().__init__(message)
        self.row = row
        self.column = column


def _owned_float_array(a, ndim: int, what: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, order="C", copy=True)
    if arr.ndim != ndim:
        raise DataValidationError(f"{what} must be {ndim}-dimensional, got ndim={arr.ndim}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """Design matrix plus response, in temporal row order.

    ``x`` is (n, p) float64, ``y`` is (n,) float64, ``names`` labels the
    p columns. Construct through :func:`validate_dataset` to get the full
    finiteness scan; the constructor itself only normalizes and checks
    shapes.
    """

    x: np.ndarray
    y: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", _owned_float_array(self.x, 2, "x"))
        object.__setattr__(self, "y", _owned_float_array(self.y, 1, "y"))
        object.__setattr__(self, "names", tuple(str(s) for s in self.names))
        n, p = self.x.shape
        if n != self.y.shape[0]:
            raise DataValidationError(
                f"x has {n} rows but y has {self.y.shape[0]} entries"
            )
        if n < 2:
            raise DataValidationError(f"need at least 2 observations, got {n}")
        if p < 1:
            raise DataValidationError("x must have at least one column")
        if len(self.names) != p:
            raise DataValidationError(
                f"{len(self.names)} column names for {p} columns"
            )

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def validate_dataset(x, y, names=None) -> Dataset:
    """Build a :class:`Dataset`, rejecting non-finite values.

    The error for a non-finite entry names the first offending cell in
    row-major order (0-based row and column; the response reports its row).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if names is None:
        names = tuple(f"x{j + 1}" for j in range(x.shape[1] if x.ndim == 2 else 1))
    ds = Dataset(x=x, y=y, names=tuple(names))
    bad = np.argwhere(~np.isfinite(ds.x))
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise DataValidationError(
            f"non-finite value in x at ({i}, {j}) [column {ds.names[j]!r}]",
            row=i,
            column=j,
        )
    bad = np.flatnonzero(~np.isfinite(ds.y))
    if bad.size:
        i = int(bad[0])
        raise DataValidationError(f"non-finite value in y at row {i}", row=i)
    return ds


@dataclass(frozen=True, eq=False)
class WindowPlan:
    """Consecutive, disjoint windows covering rows 0..n-1 (half-open).

    ``starts``/``stops`` are parallel int64 arrays; window j is the slice
    ``starts[j]:stops[j]``. Every window has at least 2 rows so that
    within-window centering leaves signal.
    """

    starts: np.ndarray
    stops: np.ndarray
    source: str
    n0: int | None = None

    def __post_init__(self):
        starts = np.array(self.starts, dtype=np.int64, copy=True)
        stops = np.array(self.stops, dtype=np.int64, copy=True)
        starts.setflags(write=False)
        stops.setflags(write=False)
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "stops", stops)
        if self.source not in (FIXED_N0, KNOWN_GROUPS):
            raise ValueError(f"unknown window source {self.source!r}")
        if self.source == FIXED_N0 and self.n0 is None:
            raise ValueError("fixed-n0 plans must record n0")
        if starts.ndim != 1 or starts.shape != stops.shape or starts.size == 0:
            raise ValueError("starts/stops must be equal-length nonempty 1-d arrays")
        if starts[0] != 0:
            raise ValueError("first window must start at row 0")
        if np.any(starts[1:] != stops[:-1]):
            raise ValueError("windows must be consecutive and disjoint")
        if np.any(stops - starts < 2):
            raise ValueError("every window needs at least 2 rows")

    @property
    def T(self) -> int:
        return self.starts.shape[0]

    @property
    def n(self) -> int:
        return int(self.stops[-1])

    @property
    def lengths(self) -> np.ndarray:
        return self.stops - self.starts

    def expand(self, per_window: np.ndarray) -> np.ndarray:
        """Repeat a length-T vector out to length n, window by window."""
        return np.repeat(np.asarray(per_window), self.lengths)

    def check_covers(self, n: int) -> None:
        if self.n != n:
            raise ValueError(f"window plan covers {self.n} rows, dataset has {n}")


def partition_windows(n: int, n0: int) -> WindowPlan:
    """Split rows 0..n-1 into floor(n/n0) consecutive windows of size n0.

    A remainder of r = n mod n0 rows is folded into the final window
    (short trailing windows would inflate the variance of its intercept).
    When n < 2*n0 this degenerates to a single window over all rows.
    """
    if n0 < 2:
        raise ValueError(f"window size must be at least 2, got {n0}")
    if n0 > n:
        raise ValueError(f"window size {n0} exceeds the number of rows {n}")
    t = n // n0
    starts = np.arange(t, dtype=np.int64) * n0
    stops = np.append(starts[1:], n)
    return WindowPlan(starts=starts, stops=stops, source=FIXED_N0, n0=int(n0))


def plan_from_groups(group_sizes) -> WindowPlan:
    """One window per known group, in the given order."""
    sizes = np.asarray(list(group_sizes), dtype=np.int64)
    if sizes.size == 0:
        raise ValueError("need at least one group")
    if np.any(sizes < 2):
        j = int(np.flatnonzero(sizes < 2)[0])
        raise ValueError(f"group {j} has size {int(sizes[j])}; every group needs >= 2 rows")
    stops = np.cumsum(sizes)
    starts = stops - sizes
    return WindowPlan(starts=starts, stops=stops, source=KNOWN_GROUPS)


@dataclass(frozen=True)
class ModelParams:
    """True or estimated model parameters: slopes plus the uncertainty bands."""

    beta: np.ndarray
    mu_lower: float
    mu_upper: float
    sigma_lower2: float | None = None
    sigma_upper2: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "beta", _owned_float_array(self.beta, 1, "beta"))
        if not self.mu_lower <= self.mu_upper:
            raise ValueError(f"mu_lower={self.mu_lower} > mu_upper={self.mu_upper}")
        if (self.sigma_lower2 is None) != (self.sigma_upper2 is None):
            raise ValueError("set both variance bounds or neither")
        if self.sigma_lower2 is not None:
            if not 0 < self.sigma_lower2 <= self.sigma_upper2:
                raise ValueError(
                    f"need 0 < sigma_lower2 <= sigma_upper2, got "
                    f"({self.sigma_lower2}, {self.sigma_upper2})"
                )


class EmStep(NamedTuple):
    """One iteration of the alternating fit: step size and objective."""

    beta_diff: float
    objective: float


@dataclass(frozen=True, eq=False)
class EmFit:
    """Result of a window-intercept fit.

    ``nu_hat`` expands ``window_intercepts`` to one value per row; the
    residuals are ``y - x @ beta_hat - nu_hat``. At a converged fit the
    residuals sum to zero within every window and are orthogonal to the
    covariates (both up to tolerance).
    """

    beta_hat: np.ndarray
    nu_hat: np.ndarray
    window_intercepts: np.ndarray
    residuals: np.ndarray
    iterations: int
    converged: bool
    plan: WindowPlan
    trace: tuple[EmStep, ...] = ()

    def __post_init__(self):
        for field, ndim in (
            ("beta_hat", 1),
            ("nu_hat", 1),
            ("window_intercepts", 1),
            ("residuals", 1),
        ):
            object.__setattr__(self, field, _owned_float_array(getattr(self, field), ndim, field))
        if self.nu_hat.shape[0] != self.plan.n or self.residuals.shape[0] != self.plan.n:
            raise ValueError("nu_hat/residuals must have one entry per row of the plan")
        if self.window_intercepts.shape[0] != self.plan.T:
            raise ValueError("window_intercepts must have one entry per window")


@dataclass(frozen=True, eq=False)
class EstimatorDiagnostics:
    """Byproducts of the closed-form solve used by inference and checks."""

    within_scatter: np.ndarray  # (p, p) pooled centered scatter
    window_x_means: np.ndarray  # (T, p)
    window_y_means: np.ndarray  # (T,)
    score: np.ndarray  # (p,) gradient at the fit, ~0 on success

    def __post_init__(self):
        object.__setattr__(
            self, "within_scatter", _owned_float_array(self.within_scatter, 2, "within_scatter")
        )
        object.__setattr__(
            self, "window_x_means", _owned_float_array(self.window_x_means, 2, "window_x_means")
        )
        object.__setattr__(
            self, "window_y_means", _owned_float_array(self.window_y_means, 1, "window_y_means")
        )
        object.__setattr__(self, "score", _owned_float_array(self.score, 1, "score"))


@dataclass(frozen=True, eq=False)
class BoundsEstimate:
    """Block intercepts plus their envelope (the estimated baseline range)."""

    block_intercepts: np.ndarray
    mu_lower_hat: float
    mu_upper_hat: float
    w: int | None = None

    def __post_init__(self):
        object.__setattr__(
            self,
            "block_intercepts",
            _owned_float_array(self.block_intercepts, 1, "block_intercepts"),
        )
        if self.block_intercepts.size == 0:
            raise ValueError("no block intercepts")
        lo = float(np.min(self.block_intercepts))
        hi = float(np.max(self.block_intercepts))
        if not (np.isclose(self.mu_lower_hat, lo) and np.isclose(self.mu_upper_hat, hi)):
            raise ValueError("bounds must be the min/max of the block intercepts")
