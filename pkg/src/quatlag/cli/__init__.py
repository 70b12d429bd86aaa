"""Command-line front end and its reusable pieces."""

from quatlag.cli.main import build_parser, gain_report, load_config, main, run_sweep
from quatlag.cli.verify import VerifyReport, VerifyRow, run_verify
from quatlag.simulation.config import PRESETS, ScenarioConfig

__all__ = [
    "PRESETS",
    "ScenarioConfig",
    "VerifyReport",
    "VerifyRow",
    "build_parser",
    "gain_report",
    "load_config",
    "main",
    "run_sweep",
    "run_verify",
]
