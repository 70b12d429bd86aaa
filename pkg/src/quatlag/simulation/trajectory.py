"""Desired attitude paths generated from a prescribed angular velocity."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from quatlag.controllers.types import DesiredPoint
from quatlag.errors import ConfigError
from quatlag.quatmath import UnitQuaternion, _jv

KINDS = ("constant_omega", "sinusoid")


@dataclass(frozen=True)
class TrajectorySpec:
    """``constant_omega``: omega_d = omega_d0. ``sinusoid``: omega_d = a sin(f t) [1, 1, 1]."""

    kind: str = "constant_omega"
    qd0: UnitQuaternion = field(default_factory=UnitQuaternion.identity)
    omega_d0: np.ndarray = field(default_factory=lambda: np.zeros(3))
    amplitude: float = 0.0
    frequency: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"trajectory kind must be one of {KINDS}, got {self.kind!r}")
        if not isinstance(self.qd0, UnitQuaternion):
            object.__setattr__(self, "qd0", UnitQuaternion(self.qd0))
        w = np.array(self.omega_d0, dtype=np.float64)
        if w.shape != (3,):
            raise ConfigError("omega_d0 must have 3 entries")
        w.flags.writeable = False
        object.__setattr__(self, "omega_d0", w)

    @property
    def kind_code(self) -> int:
        return KINDS.index(self.kind)


@njit(cache=True)
def _omega_derivs(kind, w0, a, f, t):
    """Angular velocity and its first two time derivatives."""
    if kind == 0:
        return w0.copy(), np.zeros(3), np.zeros(3)
    one = np.ones(3)
    return a * np.sin(f * t) * one, a * f * np.cos(f * t) * one, -a * f * f * np.sin(f * t) * one


@njit(cache=True)
def _qd_rate(q, w):
    return 0.5 * _jv(q, w)


@njit(cache=True)
def _desired_grid(kind, qd0, w0, a, f, step, n):
    """Attitude and three derivatives at ``t = i * step`` for i in [0, n].

    The attitude comes from renormalized RK4; the derivatives follow
    analytically from the attitude and the angular-velocity derivatives.
    """
    qs = np.empty((n + 1, 4))
    q1 = np.empty((n + 1, 4))
    q2 = np.empty((n + 1, 4))
    q3 = np.empty((n + 1, 4))
    q = qd0.copy()
    for i in range(n + 1):
        t = i * step
        w, wd, wdd = _omega_derivs(kind, w0, a, f, t)
        d1 = 0.5 * _jv(q, w)
        d2 = 0.5 * _jv(d1, w) + 0.5 * _jv(q, wd)
        d3 = 0.5 * _jv(d2, w) + _jv(d1, wd) + 0.5 * _jv(q, wdd)
        qs[i] = q
        q1[i] = d1
        q2[i] = d2
        q3[i] = d3
        if i == n:
            break
        wm, _, _ = _omega_derivs(kind, w0, a, f, t + 0.5 * step)
        we, _, _ = _omega_derivs(kind, w0, a, f, t + step)
        k1 = _qd_rate(q, w)
        k2 = _qd_rate(q + 0.5 * step * k1, wm)
        k3 = _qd_rate(q + 0.5 * step * k2, wm)
        k4 = _qd_rate(q + step * k3, we)
        q = q + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        q = q / np.sqrt(np.dot(q, q))
    return qs, q1, q2, q3


class DesiredTrajectory:
    """Desired path tabulated on a uniform grid of spacing ``dt_internal``.

    Off-grid requests integrate one partial RK4 step from the grid point below.
    """

    def __init__(self, spec: TrajectorySpec, horizon: float, dt_internal: float):
        if not dt_internal > 0.0:
            raise ConfigError("dt_internal must be positive")
        if horizon < 0.0:
            raise ConfigError("horizon must be non-negative")
        self.spec = spec
        self.step = float(dt_internal)
        n = int(np.ceil(horizon / self.step - 1e-9))
        self.qd, self.qd_dot, self.qd_ddot, self.qd_dddot = _desired_grid(
            spec.kind_code, spec.qd0.array, spec.omega_d0, float(spec.amplitude),
            float(spec.frequency), self.step, max(n, 0),
        )

    def omega(self, t: float):
        s = self.spec
        return _omega_derivs(s.kind_code, s.omega_d0, float(s.amplitude), float(s.frequency), t)

    def point(self, t: float) -> DesiredPoint:
        if t < 0.0:
            raise ValueError("t must be non-negative")
        i = min(int(np.floor(t / self.step + 1e-9)), len(self.qd) - 1)
        rest = t - i * self.step
        q = self.qd[i]
        if rest > 1e-12:
            s = self.spec
            q = _partial_step(
                s.kind_code, s.omega_d0, float(s.amplitude), float(s.frequency),
                q, i * self.step, rest,
            )
        w, wd, wdd = self.omega(t)
        return DesiredPoint.from_angular(q, w, wd, wdd)


@njit(cache=True)
def _partial_step(kind, w0, a, f, q, t0, rest):
    w, _, _ = _omega_derivs(kind, w0, a, f, t0)
    wm, _, _ = _omega_derivs(kind, w0, a, f, t0 + 0.5 * rest)
    we, _, _ = _omega_derivs(kind, w0, a, f, t0 + rest)
    k1 = _qd_rate(q, w)
    k2 = _qd_rate(q + 0.5 * rest * k1, wm)
    k3 = _qd_rate(q + 0.5 * rest * k2, wm)
    k4 = _qd_rate(q + rest * k3, we)
    out = q + rest / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out / np.sqrt(np.dot(out, out))


def gen_desired(spec: TrajectorySpec, t: float, dt_internal: float) -> DesiredPoint:
    """Desired point at time ``t`` from a fresh tabulation at ``dt_internal``."""
    return DesiredTrajectory(spec, t, dt_internal).point(t)
