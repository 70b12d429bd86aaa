"""Closed-loop scenario simulation, perturbation models, and run metrics."""

from quatlag.simulation.config import PRESETS, ScenarioConfig, preset
from quatlag.simulation.perturbations import (
    DisturbanceModel,
    NoiseModel,
    disturbance,
    disturbance_path,
    measure,
    noise_draws,
)
from quatlag.simulation.runner import (
    CSV_COLUMNS,
    Jump,
    SimRecord,
    SimResult,
    convergence_time,
    csv_text,
    energy,
    jump_times,
    metrics,
    metrics_path,
    run,
    theta_true,
    write_csv,
    write_metrics,
)
from quatlag.simulation.trajectory import DesiredTrajectory, TrajectorySpec, gen_desired

__all__ = [
    "CSV_COLUMNS",
    "PRESETS",
    "DesiredTrajectory",
    "DisturbanceModel",
    "Jump",
    "NoiseModel",
    "ScenarioConfig",
    "SimRecord",
    "SimResult",
    "TrajectorySpec",
    "convergence_time",
    "csv_text",
    "disturbance",
    "disturbance_path",
    "energy",
    "gen_desired",
    "jump_times",
    "measure",
    "metrics",
    "metrics_path",
    "noise_draws",
    "preset",
    "run",
    "theta_true",
    "write_csv",
    "write_metrics",
]
