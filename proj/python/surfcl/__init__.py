"""Narrow-band solver for conservation laws on implicit curves and surfaces."""

from ._surfcl import (
    SurfclError,
    closest_point,
    convergence_rate,
    error_norms,
    experiment_ids,
    list_experiments,
    pushforward_matrix,
    run_experiment,
    signed_distance,
)

__all__ = [
    "SurfclError",
    "closest_point",
    "convergence_rate",
    "error_norms",
    "experiment_ids",
    "list_experiments",
    "pushforward_matrix",
    "run_experiment",
    "signed_distance",
]
