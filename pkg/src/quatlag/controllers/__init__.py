"""Hybrid mode logic, tracking and adaptive control laws, and their analysis tools."""

from quatlag.controllers.analysis import (
    GainCheck,
    admissible_alpha,
    check_gains_theorem2,
    check_gains_theorem3,
    lyapunov_adaptive_of,
    lyapunov_adaptive_sf,
    lyapunov_state_feedback,
    pe_metric,
)
from quatlag.controllers.hybrid import (
    HybridLogic,
    gap,
    initial_mode,
    jump_rule,
    potential,
    tracking_error,
)
from quatlag.controllers.laws import (
    adaptive_sf_regressor_filters_step,
    asf_regressor_input,
    control_adaptive_of,
    control_adaptive_sf,
    control_state_feedback,
    damping_filter_step,
    desired_regressor_bar,
    desired_regressor_bar_dot,
    filtered_regressor,
    init_adaptive_of,
    init_adaptive_sf,
    regressor_bar_dot_fd,
    tanh_filter_step,
)
from quatlag.controllers.types import (
    AdaptiveOFState,
    AdaptiveSFState,
    DesiredPoint,
    GainsAdaptiveOF,
    GainsAdaptiveSF,
    GainsStateFeedback,
)

__all__ = [
    "AdaptiveOFState",
    "AdaptiveSFState",
    "DesiredPoint",
    "GainCheck",
    "GainsAdaptiveOF",
    "GainsAdaptiveSF",
    "GainsStateFeedback",
    "HybridLogic",
    "adaptive_sf_regressor_filters_step",
    "admissible_alpha",
    "asf_regressor_input",
    "check_gains_theorem2",
    "check_gains_theorem3",
    "control_adaptive_of",
    "control_adaptive_sf",
    "control_state_feedback",
    "damping_filter_step",
    "desired_regressor_bar",
    "desired_regressor_bar_dot",
    "filtered_regressor",
    "gap",
    "init_adaptive_of",
    "init_adaptive_sf",
    "initial_mode",
    "jump_rule",
    "lyapunov_adaptive_of",
    "lyapunov_adaptive_sf",
    "lyapunov_state_feedback",
    "pe_metric",
    "potential",
    "regressor_bar_dot_fd",
    "tanh_filter_step",
    "tracking_error",
]
