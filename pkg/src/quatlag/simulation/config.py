"""Scenario configuration with a flat JSON key set, plus the built-in presets."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import numpy as np

from quatlag.controllers.types import GainsAdaptiveOF, GainsAdaptiveSF, GainsStateFeedback
from quatlag.controllers.analysis import admissible_alpha
from quatlag.errors import ConfigError, QuatlagError
from quatlag.quatmath import UnitQuaternion
from quatlag.rigid_dynamics.model import U_BAR, InertiaModel
from quatlag.simulation.perturbations import DisturbanceModel, NoiseModel
from quatlag.simulation.trajectory import TrajectorySpec

CONTROLLERS = ("free", "continuous", "hybrid", "adaptive_sf", "adaptive_of")
PLANT_FORMS = ("euler_newton", "lagrangian")
SIGMA_DEFAULT = float(np.sqrt(0.2))


def _list(x) -> Any:
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


@dataclass
class ScenarioConfig:
    """Everything a run needs. Matrix-valued gains accept a scalar, a diagonal, or a full matrix.

    ``controller = "free"`` applies zero control torque (open-loop propagation).
    """

    controller: str = "hybrid"
    delta: float = 0.4
    h0: int | None = None

    # state feedback
    Lambda: Any = 0.1
    Ks: Any = 1.0
    alpha: float | None = None

    # adaptive state feedback (kp is shared with the attitude-only law)
    Kd: Any = 3.0
    kp: float = 0.7
    gamma1: float = 1.0
    gamma2: float = 1.0
    lambda_f: float = 1.0

    # adaptive attitude-only feedback
    Kf: Any = 0.1
    kv: float = 3.0
    Gamma: Any = field(default_factory=lambda: [1000.0] * 3 + [1.0] * 6)
    theta_hat0: Any = field(default_factory=lambda: [0.0] * 9)

    # plant
    M: Any = field(default_factory=lambda: (10.0 * U_BAR).tolist())
    m0: float = 1.0
    plant_form: str = "euler_newton"
    q0: Any = field(default_factory=lambda: [0.0, *U_BAR.tolist()])
    omega0: Any = field(default_factory=lambda: [0.0, 0.0, 0.0])

    # desired path
    traj_kind: str = "constant_omega"
    qd0: Any = field(default_factory=lambda: [1.0, 0.0, 0.0, 0.0])
    omega_d0: Any = field(default_factory=lambda: [0.0, 0.0, 0.0])
    traj_amplitude: float = 0.0
    traj_frequency: float = 0.0

    # perturbations
    noise_n_max: float = 0.0
    noise_sigma: float = SIGMA_DEFAULT
    dist_kind: str = "none"
    p0: Any = field(default_factory=lambda: [0.0, 0.0, 0.0])
    sigma_w: float = SIGMA_DEFAULT

    # integration
    dt: float = 1e-3
    horizon: float = 100.0
    output_decimation: int = 10
    seed: int = 0

    # ------------------------------------------------------------ (de)serialization

    @classmethod
    def from_dict(cls, data: dict) -> ScenarioConfig:
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str | Path) -> ScenarioConfig:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {k: _list(v) for k, v in asdict(self).items()}

    def replace(self, **changes) -> ScenarioConfig:
        cfg = replace(self, **changes)
        cfg.validate()
        return cfg

    # ------------------------------------------------------------ typed views

    def validate(self) -> None:
        if self.controller not in CONTROLLERS:
            raise ConfigError(f"controller must be one of {CONTROLLERS}, got {self.controller!r}")
        if self.plant_form not in PLANT_FORMS:
            raise ConfigError(f"plant_form must be one of {PLANT_FORMS}")
        if not (np.isfinite(self.delta) and self.delta >= 0.0):
            raise ConfigError("delta must be a non-negative number")
        if self.h0 not in (None, -1, 1):
            raise ConfigError("h0 must be -1, 1, or null")
        if not self.dt > 0.0:
            raise ConfigError("dt must be positive")
        if not self.horizon > 0.0:
            raise ConfigError("horizon must be positive")
        if int(self.output_decimation) != self.output_decimation or self.output_decimation < 1:
            raise ConfigError("output_decimation must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if np.asarray(self.theta_hat0, dtype=float).shape != (9,):
            raise ConfigError("theta_hat0 must have 9 entries")
        try:
            self.inertia()
            self.initial_state()
            self.trajectory()
            self.noise()
            self.disturbance()
            self.gains()
        except ConfigError:
            raise
        except (QuatlagError, ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt))

    def inertia(self) -> InertiaModel:
        m = np.asarray(self.M, dtype=np.float64)
        if m.shape == (3,):
            m = np.diag(m)
        if m.shape != (3, 3):
            raise ConfigError("M must be a length-3 diagonal or a 3x3 matrix")
        return InertiaModel(m, float(self.m0))

    def initial_state(self) -> tuple[UnitQuaternion, np.ndarray]:
        w = np.asarray(self.omega0, dtype=np.float64)
        if w.shape != (3,):
            raise ConfigError("omega0 must have 3 entries")
        return UnitQuaternion(self.q0), w

    def trajectory(self) -> TrajectorySpec:
        return TrajectorySpec(
            self.traj_kind, UnitQuaternion(self.qd0), np.asarray(self.omega_d0, float),
            float(self.traj_amplitude), float(self.traj_frequency),
        )

    def noise(self) -> NoiseModel:
        return NoiseModel(float(self.noise_n_max), float(self.noise_sigma), int(self.seed))

    def disturbance(self) -> DisturbanceModel:
        return DisturbanceModel(self.dist_kind, np.asarray(self.p0, float),
                                float(self.sigma_w), int(self.seed))

    def gains(self):
        if self.controller == "free":
            return None
        if self.controller in ("continuous", "hybrid"):
            return GainsStateFeedback(self.Lambda, self.Ks)
        if self.controller == "adaptive_sf":
            return GainsAdaptiveSF(self.Kd, self.kp, self.gamma1, self.gamma2, self.lambda_f)
        return GainsAdaptiveOF(self.Kf, self.kv, self.kp, self.Gamma)

    def lyapunov_alpha(self) -> float:
        if self.alpha is not None:
            return float(self.alpha)
        return admissible_alpha(GainsStateFeedback(self.Lambda, self.Ks))


_SCENARIO_1 = dict(
    Lambda=0.1, Ks=1.0, q0=[0.0, *U_BAR.tolist()], qd0=[1.0, 0.0, 0.0, 0.0],
    traj_kind="constant_omega", omega_d0=[0.0, 0.0, 0.0], horizon=100.0,
)

_SCENARIO_2 = dict(
    controller="adaptive_of", kv=3.0, kp=0.7, Kf=0.1, Gamma=[1000.0] * 3 + [1.0] * 6,
    q0=[0.0, 0.0, 1.0, 0.0], omega0=U_BAR.tolist(), qd0=[1.0, 0.0, 0.0, 0.0],
    traj_kind="sinusoid", traj_amplitude=0.1, traj_frequency=0.2 * np.pi,
    h0=1, dist_kind="constant", p0=[0.2, -0.1, -0.05], horizon=100.0,
)

PRESETS: dict[str, dict] = {
    "1.1": {**_SCENARIO_1, "controller": "hybrid", "delta": 0.4,
            "omega0": (0.5 * U_BAR).tolist(), "noise_n_max": 0.0},
    "1.2": {**_SCENARIO_1, "controller": "hybrid", "delta": 0.4,
            "omega0": [0.0, 0.0, 0.0], "noise_n_max": 0.1},
    "2.1": {**_SCENARIO_2, "delta": 0.9},
    "2.2": {**_SCENARIO_2, "delta": 0.4},
    "2.3": {**_SCENARIO_2, "delta": 0.4, "noise_n_max": 0.1},
    "2.4": {**_SCENARIO_2, "delta": 0.4, "dist_kind": "random_walk"},
    "2.1-sf": {**_SCENARIO_2, "controller": "adaptive_sf", "delta": 0.9,
               "Kd": 3.0, "kp": 0.7, "gamma1": 10.0, "gamma2": 1.0, "lambda_f": 5.0},
}


def preset(name: str, **overrides) -> ScenarioConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return ScenarioConfig.from_dict({**PRESETS[name], **overrides})
