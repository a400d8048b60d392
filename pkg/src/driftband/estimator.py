"""Slope estimation with window-level nuisance intercepts.

Two routes lead to the same slope estimate: an alternating least-squares
loop (:func:`fit_em`) that treats the per-window intercepts as missing
data, and the equivalent one-shot within-window centered solve
(:func:`fit_closed_form`). The closed form is the production path; the
loop is kept to validate the fixed point and to expose an iteration
trace. An ordinary least squares baseline and a variance-weighted variant
for known group partitions complete the module.

All functions are pure: inputs are never mutated and fits can run
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    KNOWN_GROUPS,
    Dataset,
    EmFit,
    EmStep,
    EstimatorDiagnostics,
    WindowPlan,
)
from ._kernels import group_means, within_moments

__all__ = [
    "DegenerateGroupError",
    "EmConfig",
    "RankDeficiencyError",
    "SINGULAR_RTOL",
    "estep_intercepts",
    "fit_closed_form",
    "fit_em",
    "fit_given_beta",
    "fit_ols",
    "fit_weighted_groups",
    "mstep_beta",
]

# A matrix counts as singular when its smallest singular value falls below
# this fraction of the largest (scale-free rank test).
SINGULAR_RTOL = 1e-10


class RankDeficiencyError(ValueError):
    """A normal-equation matrix is numerically singular."""

    def __init__(self, what: str, smallest: float, largest: float):
        super().__init__(
            f"{what} is rank deficient: smallest singular value {smallest:.3e} "
            f"(largest {largest:.3e})"
        )
        self.smallest_singular_value = smallest


class DegenerateGroupError(ValueError):
    """A group's residual variance estimate collapsed to zero."""

    def __init__(self, group: int):
        super().__init__(f"group {group} has zero within-group residual variance")
        self.group = group


@dataclass(frozen=True)
class EmConfig:
    """Iteration controls for the alternating fit.

    ``init`` selects the starting slopes: ``"ols"`` (default), ``"zeros"``,
    or an explicit vector for degenerate designs where OLS fails.
    """

    max_iter: int = 500
    tol: float = 1e-8
    init: object = "ols"

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


def _checked_solve(mat: np.ndarray, rhs: np.ndarray, what: str) -> np.ndarray:
    svals = np.linalg.svd(mat, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] < SINGULAR_RTOL * svals[0]:
        raise RankDeficiencyError(what, float(svals[-1]), float(svals[0]))
    return np.linalg.solve(mat, rhs)


def estep_intercepts(data: Dataset, beta: np.ndarray, plan: WindowPlan) -> np.ndarray:
    """Per-window intercepts at fixed slopes: window means of y - x @ beta."""
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (data.p,):
        raise ValueError(f"beta must have length {data.p}, got shape {beta.shape}")
    plan.check_covers(data.n)
    resid = data.y - data.x @ beta
    return group_means(resid, plan.starts, plan.stops)


def mstep_beta(data: Dataset, nu: np.ndarray) -> np.ndarray:
    """Slopes at fixed intercepts: least squares of y - nu on x (no constant)."""
    nu = np.asarray(nu, dtype=np.float64)
    if nu.shape != (data.n,):
        raise ValueError(f"nu must have length {data.n}, got shape {nu.shape}")
    xtx = data.x.T @ data.x
    return _checked_solve(xtx, data.x.T @ (data.y - nu), "x'x")


def _init_beta(data: Dataset, cfg: EmConfig) -> np.ndarray:
    if isinstance(cfg.init, str):
        if cfg.init == "ols":
            return fit_ols(data)[1]
        if cfg.init == "zeros":
            return np.zeros(data.p)
        raise ValueError(f"unknown init {cfg.init!r}")
    beta0 = np.asarray(cfg.init, dtype=np.float64)
    if beta0.shape != (data.p,):
        raise ValueError(f"init vector must have length {data.p}")
    return beta0


def fit_em(data: Dataset, plan: WindowPlan, cfg: EmConfig | None = None) -> EmFit:
    """Alternate per-window intercepts and slopes until the slopes settle.

    Each sweep computes the window intercepts at the current slopes (an
    exact minimization) and then re-solves the slope normal equations at
    those intercepts, so the squared-residual objective never increases.
    Convergence is declared on the Euclidean distance between successive
    slope vectors; the intercepts are recomputed once at the final slopes.

    Returns an :class:`EmFit` with ``converged=False`` (rather than
    raising) when ``max_iter`` sweeps were not enough.
    """
    cfg = cfg or EmConfig()
    plan.check_covers(data.n)
    x, y = data.x, data.y

    xtx = x.T @ x
    svals = np.linalg.svd(xtx, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] < SINGULAR_RTOL * svals[0]:
        raise RankDeficiencyError("x'x", float(svals[-1]), float(svals[0]))
    # The fixed point additionally needs the pooled centered scatter to be
    # invertible, otherwise the iteration stalls along its null direction.
    scatter = within_moments(x, y, plan.starts, plan.stops)[0]
    ssv = np.linalg.svd(scatter, compute_uv=False)
    if ssv[0] == 0.0 or ssv[-1] < SINGULAR_RTOL * ssv[0]:
        raise RankDeficiencyError("within-window scatter", float(ssv[-1]), float(ssv[0]))

    beta = _init_beta(data, cfg)
    trace: list[EmStep] = []
    converged = False
    iterations = 0
    for _ in range(cfg.max_iter):
        iterations += 1
        a = group_means(y - x @ beta, plan.starts, plan.stops)
        nu = plan.expand(a)
        beta_new = np.linalg.solve(xtx, x.T @ (y - nu))
        diff = float(np.linalg.norm(beta_new - beta))
        resid = y - nu - x @ beta_new
        trace.append(EmStep(beta_diff=diff, objective=float(resid @ resid)))
        beta = beta_new
        if diff < cfg.tol:
            converged = True
            break

    return fit_given_beta(
        data, plan, beta, iterations=iterations, converged=converged, trace=tuple(trace)
    )


def fit_given_beta(
    data: Dataset,
    plan: WindowPlan,
    beta: np.ndarray,
    iterations: int = 0,
    converged: bool = True,
    trace: tuple[EmStep, ...] = (),
) -> EmFit:
    """Complete a fit at fixed slopes: intercepts, expanded path, residuals."""
    a = estep_intercepts(data, beta, plan)
    nu = plan.expand(a)
    resid = data.y - data.x @ np.asarray(beta, dtype=np.float64) - nu
    return EmFit(
        beta_hat=beta,
        nu_hat=nu,
        window_intercepts=a,
        residuals=resid,
        iterations=iterations,
        converged=converged,
        plan=plan,
        trace=trace,
    )


def fit_closed_form(
    data: Dataset, plan: WindowPlan
) -> tuple[np.ndarray, EstimatorDiagnostics]:
    """Solve the window-intercept model in one shot.

    Centering x and y within each window eliminates the intercepts, so the
    slopes solve ``scatter @ beta = cross`` with the pooled within-window
    moments. Equivalent to the fixed point of :func:`fit_em`.
    """
    plan.check_covers(data.n)
    scatter, cross, xbar, ybar = within_moments(data.x, data.y, plan.starts, plan.stops)
    beta = _checked_solve(scatter, cross, "within-window scatter")
    diag = EstimatorDiagnostics(
        within_scatter=scatter,
        window_x_means=xbar,
        window_y_means=ybar,
        score=cross - scatter @ beta,
    )
    return beta, diag


def fit_ols(data: Dataset) -> tuple[float, np.ndarray]:
    """Ordinary least squares with a constant: returns (intercept, slopes)."""
    design = np.column_stack([np.ones(data.n), data.x])
    svals = np.linalg.svd(design, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] < SINGULAR_RTOL * svals[0]:
        raise RankDeficiencyError("[1 x] design", float(svals[-1]), float(svals[0]))
    coef, *_ = np.linalg.lstsq(design, data.y, rcond=None)
    return float(coef[0]), coef[1:]


def fit_weighted_groups(
    data: Dataset, plan: WindowPlan, cfg: EmConfig | None = None
) -> EmFit:
    """Known-group fit with inverse-variance weighting of the slope step.

    Requires a known-groups plan with every group of size >= p + 2. Each
    sweep re-estimates the within-group residual variances (denominator
    n_j - 1) and solves the weighted slope normal equations, so the
    weights are fully iterative rather than one-shot.
    """
    cfg = cfg or EmConfig()
    if plan.source != KNOWN_GROUPS:
        raise ValueError("weighted fit requires a known-groups window plan")
    plan.check_covers(data.n)
    if np.any(plan.lengths < data.p + 2):
        j = int(np.flatnonzero(plan.lengths < data.p + 2)[0])
        raise ValueError(
            f"group {j} has {int(plan.lengths[j])} rows; need at least p + 2 = {data.p + 2}"
        )
    x, y = data.x, data.y

    beta = _init_beta(data, cfg)
    trace: list[EmStep] = []
    converged = False
    iterations = 0
    for _ in range(cfg.max_iter):
        iterations += 1
        a = group_means(y - x @ beta, plan.starts, plan.stops)
        nu = plan.expand(a)
        resid = y - x @ beta - nu
        ss = group_means(resid * resid, plan.starts, plan.stops) * plan.lengths
        s2 = ss / (plan.lengths - 1)
        if np.any(s2 == 0.0):
            raise DegenerateGroupError(int(np.flatnonzero(s2 == 0.0)[0]))
        weights = plan.expand(1.0 / s2)
        xw = x * weights[:, None]
        beta_new = _checked_solve(xw.T @ x, xw.T @ (y - nu), "weighted x'x")
        diff = float(np.linalg.norm(beta_new - beta))
        r_new = y - nu - x @ beta_new
        trace.append(EmStep(beta_diff=diff, objective=float(r_new @ r_new)))
        beta = beta_new
        if diff < cfg.tol:
            converged = True
            break

    return fit_given_beta(
        data, plan, beta, iterations=iterations, converged=converged, trace=tuple(trace)
    )
