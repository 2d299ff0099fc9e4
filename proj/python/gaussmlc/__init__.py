"""Gaussian multiclass linear classification lab.

Python bindings over the C++ core: geometry primitives, synthetic labeled
sources, the pairwise/localization learners, and decision-boundary geometry
estimators. Everything is seeded and replays bit-exactly.
"""

from gaussmlc._core import (
    GaussMlcError,
    angle_between,
    apply_localization,
    binary_margin,
    boundary_mass,
    correlation_bound_check,
    critical_angle,
    draw_dataset,
    gaussian_tail,
    halfspace_bias_bounds,
    hard_instance_predict,
    localized_accept_prob,
    mlc_predict,
    multiclass_margin,
    normalize,
    pairwise_boundary_direction,
    pgd_inequality_check,
    project_orthogonal,
    pseudo_predict,
    random_mlc,
    sample_gaussian,
    sample_hyperplane_gaussian,
    sphere_retract,
    train_aggregate,
    train_perceptron,
)

__all__ = [
    "GaussMlcError",
    "angle_between",
    "apply_localization",
    "binary_margin",
    "boundary_mass",
    "correlation_bound_check",
    "critical_angle",
    "draw_dataset",
    "gaussian_tail",
    "halfspace_bias_bounds",
    "hard_instance_predict",
    "localized_accept_prob",
    "mlc_predict",
    "multiclass_margin",
    "normalize",
    "pairwise_boundary_direction",
    "pgd_inequality_check",
    "project_orthogonal",
    "pseudo_predict",
    "random_mlc",
    "sample_gaussian",
    "sample_hyperplane_gaussian",
    "sphere_retract",
    "train_aggregate",
    "train_perceptron",
]
