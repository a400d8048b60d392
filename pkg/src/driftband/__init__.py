"""Regression with a drifting baseline.

Estimates the slopes of a linear model whose intercept wanders within an
unknown range and whose noise scale may change along the sample, without
knowing where the changes happen. Slopes come from within-window centered
least squares (equivalently, an alternating minimization over per-window
intercepts); the baseline range comes from the envelope of overlapping
moving-block intercepts.
"""

from ._kernels import BACKEND
from .bounds import (
    PredictionInterval,
    intercept_bounds,
    moving_block_bounds,
    moving_block_intercepts,
    predict_interval,
    predict_intervals,
    true_block_mean_bounds,
)
from .core import (
    BoundsEstimate,
    DataValidationError,
    Dataset,
    EmFit,
    EmStep,
    EstimatorDiagnostics,
    ModelParams,
    WindowPlan,
    partition_windows,
    plan_from_groups,
    validate_dataset,
)
from .estimator import (
    DegenerateGroupError,
    EmConfig,
    RankDeficiencyError,
    estep_intercepts,
    fit_closed_form,
    fit_em,
    fit_given_beta,
    fit_ols,
    fit_weighted_groups,
    mstep_beta,
)
from .inference import (
    CoefTable,
    coef_inference,
    fit_statistics,
    ols_inference,
    pooled_error_variance,
    render_coef_table,
)
from .simulation import (
    DgpSpec,
    GroundTruth,
    McSummary,
    emit_table,
    generate,
    run_monte_carlo,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundsEstimate",
    "CoefTable",
    "DataValidationError",
    "Dataset",
    "DegenerateGroupError",
    "DgpSpec",
    "EmConfig",
    "EmFit",
    "EmStep",
    "EstimatorDiagnostics",
    "GroundTruth",
    "McSummary",
    "ModelParams",
    "PredictionInterval",
    "RankDeficiencyError",
    "WindowPlan",
    "__version__",
    "coef_inference",
    "emit_table",
    "estep_intercepts",
    "fit_closed_form",
    "fit_em",
    "fit_given_beta",
    "fit_ols",
    "fit_statistics",
    "fit_weighted_groups",
    "generate",
    "intercept_bounds",
    "moving_block_bounds",
    "moving_block_intercepts",
    "mstep_beta",
    "ols_inference",
    "partition_windows",
    "plan_from_groups",
    "pooled_error_variance",
    "predict_interval",
    "predict_intervals",
    "render_coef_table",
    "run_monte_carlo",
    "true_block_mean_bounds",
    "validate_dataset",
]
