"""Attitude measurement noise and body-frame torque disturbances.

Both are pre-drawn per integration step from seeded generators, so a run is a
pure function of its configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from quatlag.errors import ConfigError, DegenerateQuaternion
from quatlag.quatmath import ZERO_NORM, UnitQuaternion, as_quat_array

DISTURBANCE_KINDS = ("none", "constant", "random_walk")

# Sub-streams of one scenario seed.
NOISE_STREAM = 1
DISTURBANCE_STREAM = 2


@dataclass(frozen=True)
class NoiseModel:
    """Measurement ``normalize(q + n v/|v|)`` with ``n ~ U[0, n_max]``, ``v ~ N(0, sigma^2 I4)``."""

    n_max: float = 0.0
    sigma: float = float(np.sqrt(0.2))
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.n_max >= 0.0:
            raise ConfigError("noise n_max must be non-negative")
        if not self.sigma >= 0.0:
            raise ConfigError("noise sigma must be non-negative")

    @property
    def active(self) -> bool:
        return self.n_max > 0.0 and self.sigma > 0.0


@dataclass(frozen=True)
class DisturbanceModel:
    kind: str = "none"
    p0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    sigma_w: float = float(np.sqrt(0.2))
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in DISTURBANCE_KINDS:
            raise ConfigError(f"disturbance kind must be one of {DISTURBANCE_KINDS}")
        p0 = np.array(self.p0, dtype=np.float64)
        if p0.shape != (3,):
            raise ConfigError("p0 must have 3 entries")
        if not self.sigma_w >= 0.0:
            raise ConfigError("sigma_w must be non-negative")
        p0.flags.writeable = False
        object.__setattr__(self, "p0", p0)


def stream(seed: int, which: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), which])


def _unit_directions(v: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(v, axis=-1, keepdims=True)
    return np.divide(v, norms, out=np.zeros_like(v), where=norms > 0.0)


def measure(q_true, noise: NoiseModel, rng_state: np.random.Generator | None = None) -> UnitQuaternion:
    """One noisy attitude sample; ``n_max = 0`` returns the input unchanged."""
    q = as_quat_array(q_true)
    if noise.n_max == 0.0:
        return UnitQuaternion(q)
    rng = stream(noise.seed, NOISE_STREAM) if rng_state is None else rng_state
    v = _unit_directions(rng.normal(0.0, noise.sigma, 4))
    n = rng.uniform(0.0, noise.n_max)
    x = q + n * v
    norm = np.linalg.norm(x)
    if norm <= ZERO_NORM:
        raise DegenerateQuaternion("perturbed attitude has zero norm")
    return UnitQuaternion(x / norm)


def noise_draws(noise: NoiseModel, n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-step scale ``n`` (N,) and direction ``v/|v|`` (N, 4); zeros when inactive."""
    if not noise.active:
        return np.zeros(n_steps), np.zeros((n_steps, 4))
    rng = stream(noise.seed, NOISE_STREAM)
    v = _unit_directions(rng.normal(0.0, noise.sigma, (n_steps, 4)))
    n = rng.uniform(0.0, noise.n_max, n_steps)
    return n, v


def disturbance_path(model: DisturbanceModel, n_steps: int, dt: float,
                     rng_state: np.random.Generator | None = None) -> np.ndarray:
    """Disturbance at each step start, shape (n_steps + 1, 3).

    The random walk holds its rate ``v ~ N(0, sigma_w^2 I3)`` over each step.
    """
    if model.kind == "none":
        return np.zeros((n_steps + 1, 3))
    path = np.tile(model.p0, (n_steps + 1, 1))
    if model.kind == "random_walk" and model.sigma_w > 0.0 and n_steps > 0:
        rng = stream(model.seed, DISTURBANCE_STREAM) if rng_state is None else rng_state
        steps = rng.normal(0.0, model.sigma_w, (n_steps, 3)) * dt
        path[1:] += np.cumsum(steps, axis=0)
    return path


def disturbance(model: DisturbanceModel, t: float, dt: float,
                rng_state: np.random.Generator | None = None) -> np.ndarray:
    """Disturbance held over the step containing ``t``."""
    k = int(np.floor(t / dt + 1e-9))
    return disturbance_path(model, k, dt, rng_state)[k]
