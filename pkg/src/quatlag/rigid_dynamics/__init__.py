"""Euler-Newton plant, 4-DOF Lagrangian operators, regressors, and bound constants."""

from quatlag.rigid_dynamics.bounds import (
    BoundConstants,
    TrajectorySummary,
    estimate_bounds,
)
from quatlag.rigid_dynamics.lagrangian import (
    c_matrix,
    c_matrix_product_form,
    d_matrix,
    d_matrix_dot,
    lagrangian_accel,
)
from quatlag.rigid_dynamics.model import (
    U_BAR,
    BodyState,
    InertiaModel,
    euler_newton_deriv,
    generalized_to_torque,
    omega_from_qdot,
    qdot_from_omega,
    torque_to_generalized,
)
from quatlag.rigid_dynamics.regressors import (
    disturbance_generalized,
    f_map,
    regressor_bar,
    regressor_bar_dot,
    regressors,
    residual_dynamics,
)

__all__ = [
    "U_BAR",
    "BodyState",
    "BoundConstants",
    "InertiaModel",
    "TrajectorySummary",
    "c_matrix",
    "c_matrix_product_form",
    "d_matrix",
    "d_matrix_dot",
    "disturbance_generalized",
    "estimate_bounds",
    "euler_newton_deriv",
    "f_map",
    "generalized_to_torque",
    "lagrangian_accel",
    "omega_from_qdot",
    "qdot_from_omega",
    "regressor_bar",
    "regressor_bar_dot",
    "regressors",
    "residual_dynamics",
    "torque_to_generalized",
]
