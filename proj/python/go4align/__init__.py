"""Risk-guided adaptive group task weighting for multi-task learning."""

from ._core import (
    DEFAULT_BETA,
    Error,
    Grouping,
    Weighter,
    WeighterOutput,
    WeightServer,
    agrm_wrap,
    convergence_difference,
    delta_m,
    elbow_select,
    group_indicator,
    group_weights,
    init_smoothness,
    kmeans_1d_exact,
    kmeans_lloyd,
    run_config,
    scale_vector,
    smoothness_update,
    task_weights,
)

__all__ = [
    "DEFAULT_BETA",
    "Error",
    "Grouping",
    "Weighter",
    "WeighterOutput",
    "WeightServer",
    "agrm_wrap",
    "convergence_difference",
    "delta_m",
    "elbow_select",
    "group_indicator",
    "group_weights",
    "init_smoothness",
    "kmeans_1d_exact",
    "kmeans_lloyd",
    "run_config",
    "scale_vector",
    "smoothness_update",
    "task_weights",
]
