"""Standard errors, z tests, and fit statistics for window-intercept fits.

The slope covariance is estimated as sigma2 * scatter^{-1}, with sigma2
the pooled residual variance and scatter the pooled within-window centered
scatter. Because the scatter of T windows of size n0 concentrates around
n * (1 - 1/n0) * Var(x), this finite-sample form carries the n0/(n0-1)
variance inflation that window centering costs relative to OLS with a
constant intercept. The reference distribution is normal throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset, EmFit, EstimatorDiagnostics
from .estimator import SINGULAR_RTOL, RankDeficiencyError

__all__ = [
    "CoefTable",
    "coef_inference",
    "fit_statistics",
    "ols_inference",
    "pooled_error_variance",
    "render_coef_table",
    "weighted_group_inference",
]


@dataclass(frozen=True)
class CoefTable:
    """Coefficient estimates with normal-theory standard errors and tests."""

    names: tuple[str, ...]
    estimates: np.ndarray
    se: np.ndarray
    z: np.ndarray
    p_values: np.ndarray
    sigma2: float
    r2: float | None = None
    adj_r2: float | None = None

    def __post_init__(self):
        for field in ("estimates", "se", "z", "p_values"):
            arr = np.array(getattr(self, field), dtype=np.float64, copy=True)
            arr.setflags(write=False)
            object.__setattr__(self, field, arr)
        k = len(self.names)
        if not all(a.shape == (k,) for a in (self.estimates, self.se, self.z, self.p_values)):
            raise ValueError("per-coefficient fields must match the number of names")


def _two_sided_p(z: np.ndarray) -> np.ndarray:
    return np.array([math.erfc(abs(v) / math.sqrt(2.0)) for v in z])


def _table_from_covariance(
    names, estimates, cov, sigma2, r2=None, adj_r2=None
) -> CoefTable:
    se = np.sqrt(np.diag(cov))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, estimates / se, 0.0)
    return CoefTable(
        names=tuple(names),
        estimates=np.asarray(estimates, dtype=np.float64),
        se=se,
        z=z,
        p_values=_two_sided_p(z),
        sigma2=float(sigma2),
        r2=r2,
        adj_r2=adj_r2,
    )


def pooled_error_variance(fit: EmFit) -> float:
    """Residual variance with n - T - p degrees of freedom.

    T window intercepts and p slopes were estimated, so both are charged
    against the sample size.
    """
    if not fit.converged:
        raise ValueError("variance estimate requires a converged fit")
    n = fit.plan.n
    df = n - fit.plan.T - fit.beta_hat.shape[0]
    if df <= 0:
        raise ValueError(f"nonpositive degrees of freedom: n={n}, T={fit.plan.T}, p={fit.beta_hat.shape[0]}")
    return float(fit.residuals @ fit.residuals) / df


def coef_inference(
    fit: EmFit, diag: EstimatorDiagnostics, data: Dataset | None = None
) -> CoefTable:
    """Standard errors and two-sided z tests for the fitted slopes.

    Passing the dataset fills in coefficient names and the fit statistics;
    otherwise names default to x1..xp and r2 stays unset.
    """
    scatter = diag.within_scatter
    svals = np.linalg.svd(scatter, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] < SINGULAR_RTOL * svals[0]:
        raise RankDeficiencyError("within-window scatter", float(svals[-1]), float(svals[0]))
    sigma2 = pooled_error_variance(fit)
    cov = sigma2 * np.linalg.inv(scatter)
    p = fit.beta_hat.shape[0]
    names = data.names if data is not None else tuple(f"x{j + 1}" for j in range(p))
    r2 = adj_r2 = None
    if data is not None:
        r2, adj_r2 = fit_statistics(fit, data)
    return _table_from_covariance(names, fit.beta_hat, cov, sigma2, r2, adj_r2)


def fit_statistics(fit: EmFit, data: Dataset) -> tuple[float, float]:
    """R-squared and adjusted R-squared with the window intercepts included.

    Fitted values are x @ beta_hat + nu_hat; the total sum of squares is
    taken about the global mean of y, and the adjustment charges the T
    intercepts plus p slopes.
    """
    if not fit.converged:
        raise ValueError("fit statistics require a converged fit")
    fit.plan.check_covers(data.n)
    tss = float(np.sum((data.y - data.y.mean()) ** 2))
    if tss == 0.0:
        raise ValueError("response is constant (zero total sum of squares)")
    rss = float(fit.residuals @ fit.residuals)
    r2 = 1.0 - rss / tss
    n, p = data.n, data.p
    df = n - fit.plan.T - p - 1
    if df <= 0:
        raise ValueError(f"nonpositive degrees of freedom for adjusted R2: {df}")
    adj = 1.0 - (1.0 - r2) * (n - 1) / df
    return r2, adj


def weighted_group_inference(fit: EmFit, data: Dataset) -> CoefTable:
    """Coefficient table for a known-group inverse-variance-weighted fit.

    The covariance is the weighted normal-equation inverse at the
    converged weights (within-group variances with denominator n_j - 1),
    which is the usual estimated-weights generalized least squares form.
    """
    if not fit.converged:
        raise ValueError("inference requires a converged fit")
    plan = fit.plan
    plan.check_covers(data.n)
    sq = fit.residuals * fit.residuals
    ss = np.add.reduceat(sq, plan.starts)
    s2 = ss / (plan.lengths - 1)
    if np.any(s2 == 0.0):
        raise ValueError("a group has zero residual variance")
    weights = np.repeat(1.0 / s2, plan.lengths)
    xw = data.x * weights[:, None]
    info = xw.T @ data.x
    svals = np.linalg.svd(info, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] < SINGULAR_RTOL * svals[0]:
        raise RankDeficiencyError("weighted x'x", float(svals[-1]), float(svals[0]))
    cov = np.linalg.inv(info)
    r2_stat, adj = fit_statistics(fit, data)
    return _table_from_covariance(
        data.names, fit.beta_hat, cov, pooled_error_variance(fit), r2_stat, adj
    )


def ols_inference(data: Dataset) -> CoefTable:
    """Normal-theory OLS table (constant first), for side-by-side reports."""
    from .estimator import fit_ols  # local import: avoids a cycle at module load

    beta0, beta = fit_ols(data)
    design = np.column_stack([np.ones(data.n), data.x])
    coef = np.concatenate([[beta0], beta])
    resid = data.y - design @ coef
    df = data.n - data.p - 1
    if df <= 0:
        raise ValueError("not enough rows for OLS inference")
    sigma2 = float(resid @ resid) / df
    cov = sigma2 * np.linalg.inv(design.T @ design)
    tss = float(np.sum((data.y - data.y.mean()) ** 2))
    if tss == 0.0:
        raise ValueError("response is constant (zero total sum of squares)")
    r2 = 1.0 - float(resid @ resid) / tss
    adj = 1.0 - (1.0 - r2) * (data.n - 1) / df
    names = ("(intercept)",) + data.names
    return _table_from_covariance(names, coef, cov, sigma2, r2, adj)


def _fmt_p(p: float) -> str:
    return "<0.001" if p < 0.001 else f"{p:.3f}"


def render_coef_table(
    tables: dict[str, CoefTable],
    fmt: str = "markdown",
    bounds: dict[str, tuple[float, float]] | None = None,
) -> str:
    """Side-by-side coefficient report: one estimate and p-value per method.

    ``bounds`` adds per-method baseline-range rows (mu_lower / mu_upper).
    Rows are the union of coefficient names in first-seen order; methods
    missing a coefficient get blank cells. CSV carries full precision,
    markdown rounds to 4 decimals.
    """
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")
    bounds = bounds or {}
    methods = list(tables)
    rows: list[str] = []
    for t in tables.values():
        for name in t.names:
            if name not in rows:
                rows.append(name)

    def cell(method: str, name: str) -> tuple[str, str]:
        t = tables[method]
        if name not in t.names:
            return "", ""
        i = t.names.index(name)
        if fmt == "csv":
            return repr(float(t.estimates[i])), repr(float(t.p_values[i]))
        return f"{t.estimates[i]:.4f}", _fmt_p(float(t.p_values[i]))

    header = ["parameter"]
    for m in methods:
        header += [f"{m}_coef", f"{m}_p"]
    lines = []
    body: list[list[str]] = []
    for name in rows:
        row = [name]
        for m in methods:
            row += list(cell(m, name))
        body.append(row)
    for m in methods:
        if m in bounds:
            lo, hi = bounds[m]
            if fmt == "csv":
                lo_s, hi_s = repr(float(lo)), repr(float(hi))
            else:
                lo_s, hi_s = f"{lo:.4f}", f"{hi:.4f}"
            body.append(
                ["mu_upper"] + sum(([hi_s, ""] if mm == m else ["", ""] for mm in methods), [])
            )
            body.append(
                ["mu_lower"] + sum(([lo_s, ""] if mm == m else ["", ""] for mm in methods), [])
            )
    stats_rows = []
    for label, attr in (("r2", "r2"), ("adj_r2", "adj_r2")):
        row = [label]
        for m in methods:
            v = getattr(tables[m], attr)
            if v is None:
                row += ["", ""]
            elif fmt == "csv":
                row += [repr(float(v)), ""]
            else:
                row += [f"{v:.3f}", ""]
        stats_rows.append(row)
    body += stats_rows

    if fmt == "csv":
        lines.append(",".join(header))
        lines += [",".join(r) for r in body]
    else:
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "|".join(["---"] * len(header)) + "|")
        lines += ["| " + " | ".join(r) + " |" for r in body]
    return "\n".join(lines) + "\n"
