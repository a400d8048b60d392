"""Synthetic-data generators and the Monte Carlo comparison harness.

Three built-in scenarios, all of the form y = x @ beta + nu + eps with
segment-constant intercepts nu and segment-constant noise scales:

- ``sim1``: two iid standard normal covariates; k equal segments of size
  m; the first and last segment intercepts are pinned at -10 and 30 so
  the intercept range is exactly realized, interior intercepts are drawn
  uniformly from (-10, 30); segment noise scales are uniform on (1, 2).
- ``sim2``: like sim1 but three covariates drawn from a correlated
  zero-mean normal (variances 4, 4, 9; covariance 2 between the first
  two).
- ``sim3``: no heterogeneity at all; constant intercept -3 and unit
  noise. The no-uncertainty control case.

Interior intercepts and noise scales are redrawn independently on every
repetition; the harness records that choice in the summary notes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bounds import moving_block_bounds
from .core import Dataset, partition_windows, validate_dataset
from .estimator import fit_closed_form, fit_ols

__all__ = [
    "DgpSpec",
    "GroundTruth",
    "McSummary",
    "SIM2_COVARIANCE",
    "VARIANTS",
    "default_beta",
    "emit_table",
    "generate",
    "run_monte_carlo",
    "segment_dataset",
]

VARIANTS = ("sim1", "sim2", "sim3")

SIM2_COVARIANCE = np.array(
    [
        [4.0, 2.0, 0.0],
        [2.0, 4.0, 0.0],
        [0.0, 0.0, 9.0],
    ]
)

_DEFAULT_BETA = {
    "sim1": (1.5, -0.6),
    "sim2": (3.0, -1.5, 0.6),
    "sim3": (1.5, -0.6),
}

INTERCEPT_LOW = -10.0
INTERCEPT_HIGH = 30.0
SIM3_INTERCEPT = -3.0


def default_beta(variant: str) -> np.ndarray:
    return np.array(_DEFAULT_BETA[variant])


@dataclass(frozen=True)
class DgpSpec:
    """Generator description: scenario, segment layout, slopes, seed."""

    variant: str
    k: int
    m: int = 100
    beta: tuple[float, ...] | None = None
    seed: object = None  # int or numpy SeedSequence

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.m < 2:
            raise ValueError(f"segment size m must be at least 2, got {self.m}")
        k_min = 2 if self.variant in ("sim1", "sim2") else 1
        if self.k < k_min:
            raise ValueError(f"{self.variant} needs k >= {k_min}, got {self.k}")
        if self.beta is not None:
            object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))

    @property
    def n(self) -> int:
        return self.k * self.m

    def resolved_beta(self) -> np.ndarray:
        if self.beta is None:
            return default_beta(self.variant)
        return np.array(self.beta)


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """What the generator knows: per-row intercepts, noise scales, targets."""

    beta: np.ndarray
    intercept_path: np.ndarray  # E[nu_i] per row
    sigma_path: np.ndarray
    mu_bounds: tuple[float, float]


def segment_dataset(
    rng: np.random.Generator,
    beta: np.ndarray,
    segment_means: np.ndarray,
    segment_sigmas: np.ndarray,
    m: int,
    cov_factor: np.ndarray | None = None,
) -> tuple[Dataset, GroundTruth]:
    """Generate k segments of m rows each with the given intercepts/scales.

    Covariates are iid standard normal, or z @ cov_factor.T when a
    factor of the target covariance is supplied.
    """
    beta = np.asarray(beta, dtype=np.float64)
    segment_means = np.asarray(segment_means, dtype=np.float64)
    segment_sigmas = np.asarray(segment_sigmas, dtype=np.float64)
    k = segment_means.shape[0]
    n, p = k * m, beta.shape[0]
    z = rng.standard_normal((n, p))
    x = z @ cov_factor.T if cov_factor is not None else z
    nu = np.repeat(segment_means, m)
    sigma = np.repeat(segment_sigmas, m)
    eps = rng.standard_normal(n) * sigma
    y = x @ beta + nu + eps
    data = validate_dataset(x, y)
    truth = GroundTruth(
        beta=beta.copy(),
        intercept_path=nu,
        sigma_path=sigma,
        mu_bounds=(float(np.min(segment_means)), float(np.max(segment_means))),
    )
    return data, truth


def generate(spec: DgpSpec) -> tuple[Dataset, GroundTruth]:
    """Draw one dataset; deterministic given the spec's seed."""
    rng = np.random.default_rng(spec.seed)
    beta = spec.resolved_beta()
    if spec.variant == "sim3":
        means = np.full(spec.k, SIM3_INTERCEPT)
        sigmas = np.ones(spec.k)
        return segment_dataset(rng, beta, means, sigmas, spec.m)
    means = np.empty(spec.k)
    means[0] = INTERCEPT_LOW
    means[-1] = INTERCEPT_HIGH
    if spec.k > 2:
        means[1:-1] = rng.uniform(INTERCEPT_LOW, INTERCEPT_HIGH, spec.k - 2)
    sigmas = rng.uniform(1.0, 2.0, spec.k)
    factor = np.linalg.cholesky(SIM2_COVARIANCE) if spec.variant == "sim2" else None
    return segment_dataset(rng, beta, means, sigmas, spec.m, cov_factor=factor)


@dataclass(frozen=True)
class McSummary:
    """Aggregate of one Monte Carlo configuration, one row per method."""

    variant: str
    k: int
    m: int
    n: int
    n0: int
    w: int
    reps: int
    seed: int
    emmb_bias: tuple[float, ...]
    emmb_mse: tuple[float, ...]
    ols_bias: tuple[float, ...]
    ols_mse: tuple[float, ...]
    mean_mu_lower: float
    mean_mu_upper: float
    mean_ols_intercept: float
    notes: str = "interior intercepts and noise scales redrawn each repetition"


def run_monte_carlo(
    spec: DgpSpec, reps: int, n0: int, w: int, seed: int = 0
) -> McSummary:
    """Repeat generate -> fit -> bounds and aggregate bias/MSE per method.

    Per-repetition RNG streams are spawned from the master seed by
    repetition index, so results do not depend on execution order and a
    failing repetition can be rerun in isolation (failures abort the run
    and name the repetition).
    """
    if reps < 1:
        raise ValueError(f"reps must be at least 1, got {reps}")
    n = spec.n
    plan = partition_windows(n, n0)
    if not (2 <= w <= n):
        raise ValueError(f"block length must satisfy 2 <= w <= {n}, got {w}")
    if w <= n0:
        raise ValueError(f"block length {w} must exceed the window size n0={n0}")

    beta_true = spec.resolved_beta()
    p = beta_true.shape[0]
    emmb = np.empty((reps, p))
    ols = np.empty((reps, p))
    lowers = np.empty(reps)
    uppers = np.empty(reps)
    intercepts = np.empty(reps)
    for r in range(reps):
        try:
            child = np.random.SeedSequence(entropy=seed, spawn_key=(r,))
            data, _ = generate(replace(spec, seed=child))
            beta_hat, _ = fit_closed_form(data, plan)
            be = moving_block_bounds(data, beta_hat, w, plan=plan)
            b0, b_ols = fit_ols(data)
        except Exception as exc:
            raise RuntimeError(f"repetition {r} failed: {exc}") from exc
        emmb[r] = beta_hat
        ols[r] = b_ols
        lowers[r] = be.mu_lower_hat
        uppers[r] = be.mu_upper_hat
        intercepts[r] = b0

    def _bias(est):
        return tuple(float(v) for v in est.mean(axis=0) - beta_true)

    def _mse(est):
        return tuple(float(v) for v in ((est - beta_true) ** 2).mean(axis=0))

    return McSummary(
        variant=spec.variant,
        k=spec.k,
        m=spec.m,
        n=n,
        n0=n0,
        w=w,
        reps=reps,
        seed=int(seed),
        emmb_bias=_bias(emmb),
        emmb_mse=_mse(emmb),
        ols_bias=_bias(ols),
        ols_mse=_mse(ols),
        mean_mu_lower=float(lowers.mean()),
        mean_mu_upper=float(uppers.mean()),
        mean_ols_intercept=float(intercepts.mean()),
    )


def emit_table(summaries: list[McSummary], fmt: str = "markdown") -> str:
    """Render summaries as one block per configuration, methods as rows.

    CSV keeps full precision (values re-parse exactly); markdown rounds
    to 4 decimals.
    """
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")
    if not summaries:
        raise ValueError("no summaries to render")
    p = len(summaries[0].emmb_bias)
    if any(len(s.emmb_bias) != p for s in summaries):
        raise ValueError("summaries have inconsistent coefficient counts")

    if fmt == "csv":
        cols = ["variant", "k", "m", "n", "w", "n0", "reps", "seed", "method"]
        for j in range(p):
            cols += [f"bias_b{j + 1}", f"mse_b{j + 1}"]
        cols += ["mu_lower_mean", "mu_upper_mean", "intercept_mean"]
        lines = [",".join(cols)]
        for s in summaries:
            base = [s.variant, s.k, s.m, s.n, s.w, s.n0, s.reps, s.seed]
            emmb_row = [*map(str, base), "EMMB"]
            ols_row = [*map(str, base), "OLS"]
            for j in range(p):
                emmb_row += [repr(s.emmb_bias[j]), repr(s.emmb_mse[j])]
                ols_row += [repr(s.ols_bias[j]), repr(s.ols_mse[j])]
            emmb_row += [repr(s.mean_mu_lower), repr(s.mean_mu_upper), ""]
            ols_row += ["", "", repr(s.mean_ols_intercept)]
            lines.append(",".join(emmb_row))
            lines.append(",".join(ols_row))
        return "\n".join(lines) + "\n"

    header = ["Method"]
    for j in range(p):
        header += [f"Bias b{j + 1}", f"MSE b{j + 1}"]
    header.append("Mean (mu_lower, mu_upper) / intercept")
    sep = "|" + "|".join(["---"] * len(header)) + "|"
    blocks = []
    for s in summaries:
        lines = [
            f"**{s.variant}, (n, w, n0) = ({s.n}, {s.w}, {s.n0})**, "
            f"{s.reps} repetitions, seed {s.seed}",
            "",
            "| " + " | ".join(header) + " |",
            sep,
        ]
        emmb_cells = ["EMMB"]
        ols_cells = ["OLS"]
        for j in range(p):
            emmb_cells += [f"{s.emmb_bias[j]:.4f}", f"{s.emmb_mse[j]:.4f}"]
            ols_cells += [f"{s.ols_bias[j]:.4f}", f"{s.ols_mse[j]:.4f}"]
        emmb_cells.append(f"({s.mean_mu_lower:.4f}, {s.mean_mu_upper:.4f})")
        ols_cells.append(f"{s.mean_ols_intercept:.4f}")
        lines.append("| " + " | ".join(emmb_cells) + " |")
        lines.append("| " + " | ".join(ols_cells) + " |")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
