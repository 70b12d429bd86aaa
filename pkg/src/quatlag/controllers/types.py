"""Desired-trajectory samples, gain sets, and per-controller internal state."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from quatlag.errors import ConfigError
from quatlag.quatmath import UnitQuaternion, _jmat


def as_gain_matrix(value, n: int, name: str) -> np.ndarray:
    """Accept a scalar (times identity), a diagonal, or a full matrix; require SPD."""
    a = np.asarray(value, dtype=np.float64)
    if a.ndim == 0:
        a = float(a) * np.eye(n)
    elif a.shape == (n,):
        a = np.diag(a)
    if a.shape != (n, n):
        raise ConfigError(f"{name} must be a scalar, a length-{n} diagonal, or {n}x{n}")
    if not np.allclose(a, a.T, atol=1e-12):
        raise ConfigError(f"{name} must be symmetric")
    a = 0.5 * (a + a.T)
    if np.linalg.eigvalsh(a)[0] <= 0.0:
        raise ConfigError(f"{name} must be positive definite")
    return a


def _positive(value, name: str) -> float:
    v = float(value)
    if not v > 0.0:
        raise ConfigError(f"{name} must be positive, got {value}")
    return v


@dataclass(frozen=True)
class DesiredPoint:
    """One sample of the desired attitude path and its derivatives.

    ``qd_dddot`` is optional; when present, the adaptive attitude-feedback law
    differentiates its regressor analytically.
    """

    qd: UnitQuaternion
    qd_dot: np.ndarray
    qd_ddot: np.ndarray
    omega_d: np.ndarray
    omega_d_dot: np.ndarray
    qd_dddot: np.ndarray | None = None

    @classmethod
    def from_angular(cls, qd, omega_d, omega_d_dot, omega_d_ddot=None) -> DesiredPoint:
        """Build the quaternion derivatives from the desired angular motion."""
        q = qd if isinstance(qd, UnitQuaternion) else UnitQuaternion(qd)
        w = np.asarray(omega_d, dtype=np.float64)
        wd = np.asarray(omega_d_dot, dtype=np.float64)
        j = _jmat(q.array)
        q1 = 0.5 * j @ w
        q2 = 0.5 * _jmat(q1) @ w + 0.5 * j @ wd
        q3 = None
        if omega_d_ddot is not None:
            wdd = np.asarray(omega_d_ddot, dtype=np.float64)
            q3 = 0.5 * _jmat(q2) @ w + _jmat(q1) @ wd + 0.5 * j @ wdd
        return cls(q, q1, q2, w, wd, q3)

    @classmethod
    def stationary(cls, qd) -> DesiredPoint:
        z = np.zeros(3)
        return cls.from_angular(qd, z, z, z)


@dataclass(frozen=True)
class GainsStateFeedback:
    Lambda: np.ndarray
    Ks: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "Lambda", as_gain_matrix(self.Lambda, 4, "Lambda"))
        object.__setattr__(self, "Ks", as_gain_matrix(self.Ks, 4, "Ks"))


@dataclass(frozen=True)
class GainsAdaptiveSF:
    Kd: np.ndarray
    kp: float
    gamma1: float
    gamma2: float
    lambda_f: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "Kd", as_gain_matrix(self.Kd, 4, "Kd"))
        for name in ("kp", "gamma1", "gamma2", "lambda_f"):
            object.__setattr__(self, name, _positive(getattr(self, name), name))


@dataclass(frozen=True)
class GainsAdaptiveOF:
    """Gains of the attitude-only adaptive law.

    ``kv`` is validated only for finiteness so that the gain-condition checker
    can report on non-positive values instead of refusing them.
    """

    Kf: np.ndarray
    kv: float
    kp: float
    Gamma: np.ndarray
    Gamma_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "Kf", as_gain_matrix(self.Kf, 4, "Kf"))
        object.__setattr__(self, "Gamma", as_gain_matrix(self.Gamma, 9, "Gamma"))
        object.__setattr__(self, "Gamma_inv", np.linalg.inv(self.Gamma))
        kv = float(self.kv)
        if not np.isfinite(kv):
            raise ConfigError("kv must be finite")
        object.__setattr__(self, "kv", kv)
        object.__setattr__(self, "kp", _positive(self.kp, "kp"))


@dataclass(frozen=True)
class AdaptiveSFState:
    """Estimate and filter memory of the adaptive state-feedback law.

    ``Xf`` is the filtered 4x6 regressor block, ``tau_f`` the filtered
    generalized torque, ``q_f`` the filtered attitude.
    """

    theta_hat: np.ndarray
    Xf: np.ndarray
    tau_f: np.ndarray
    q_f: np.ndarray

    def replace(self, **changes) -> AdaptiveSFState:
        return replace(self, **changes)


@dataclass(frozen=True)
class AdaptiveOFState:
    """Memory of the attitude-only adaptive law.

    ``theta_hat`` is an algebraic output of ``mu``; ``g`` is the state of the
    linear damping filter and ``nu = g - kv e``.
    """

    theta_hat: np.ndarray
    mu: np.ndarray
    g: np.ndarray
    nu: np.ndarray

    def replace(self, **changes) -> AdaptiveOFState:
        return replace(self, **changes)
