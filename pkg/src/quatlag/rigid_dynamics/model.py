"""Inertia model, Euler-Newton plant, and torque/rate maps."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from quatlag.errors import ConfigError, TangencyViolation
from quatlag.quatmath import UnitQuaternion, _cross, _jmat, as_quat_array

TANGENCY_TOL = 1e-6

# Normalized direction [1, 2, 3]/sqrt(14) used throughout the reference scenarios.
U_BAR = np.array([1.0, 2.0, 3.0]) / np.sqrt(14.0)


@dataclass(frozen=True)
class InertiaModel:
    """Body inertia ``M`` (kg m^2) plus the virtual scalar inertia ``m0``.

    ``theta`` orders the six distinct entries of ``M`` as
    ``[m11, m22, m33, m23, m13, m12]``.
    """

    M: np.ndarray
    m0: float = 1.0
    M_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        M = np.array(self.M, dtype=np.float64)
        if M.shape != (3, 3) or not np.all(np.isfinite(M)):
            raise ConfigError(f"inertia must be a finite 3x3 matrix, got shape {M.shape}")
        if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(M).max())):
            raise ConfigError("inertia matrix must be symmetric")
        M = 0.5 * (M + M.T)
        if np.linalg.eigvalsh(M)[0] <= 0.0:
            raise ConfigError("inertia matrix must be positive definite")
        if not self.m0 > 0.0:
            raise ConfigError(f"virtual inertia m0 must be positive, got {self.m0}")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "m0", float(self.m0))
        M_inv = np.linalg.inv(M)
        M_inv.setflags(write=False)
        object.__setattr__(self, "M_inv", M_inv)

    @classmethod
    def from_theta(cls, theta, m0: float = 1.0) -> InertiaModel:
        m11, m22, m33, m23, m13, m12 = np.asarray(theta, dtype=np.float64)
        return cls(np.array([[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]]), m0)

    @classmethod
    def diagonal(cls, diag, m0: float = 1.0) -> InertiaModel:
        return cls(np.diag(np.asarray(diag, dtype=np.float64)), m0)

    @classmethod
    def reference(cls, m0: float = 1.0) -> InertiaModel:
        """The reference spacecraft: ``M = diag(10 * [1, 2, 3]/sqrt(14))``."""
        return cls.diagonal(10.0 * U_BAR, m0)

    @property
    def theta(self) -> np.ndarray:
        M = self.M
        return np.array([M[0, 0], M[1, 1], M[2, 2], M[1, 2], M[0, 2], M[0, 1]])

    @property
    def m_bar(self) -> float:
        return max(self.m0, float(np.linalg.eigvalsh(self.M)[-1]))

    @property
    def m_lower(self) -> float:
        return min(self.m0, float(np.linalg.eigvalsh(self.M)[0]))

    def with_m0(self, m0: float) -> InertiaModel:
        return InertiaModel(self.M, m0)


@dataclass(frozen=True)
class BodyState:
    """Attitude and body-frame angular velocity (rad/s)."""

    q: UnitQuaternion
    omega: np.ndarray

    def __post_init__(self) -> None:
        if not isinstance(self.q, UnitQuaternion):
            object.__setattr__(self, "q", UnitQuaternion(self.q))
        w = np.array(self.omega, dtype=np.float64)
        if w.shape != (3,):
            raise ValueError(f"omega must have 3 components, got shape {w.shape}")
        object.__setattr__(self, "omega", w)


def check_tangent(q: np.ndarray, qdot: np.ndarray, tol: float = TANGENCY_TOL) -> None:
    """Raise TangencyViolation unless ``|q . qdot| < tol``."""
    r = float(np.dot(q, qdot))
    if not abs(r) < tol:
        raise TangencyViolation(f"q^T qdot = {r:.3e} exceeds tangency tolerance {tol:g}")


@njit(cache=True)
def _euler_newton(q, w, tau, M, M_inv):
    qdot = 0.5 * (_jmat(q) @ w)
    wdot = M_inv @ (_cross(M @ w, w) + tau)
    return qdot, wdot


def omega_from_qdot(q, qdot) -> np.ndarray:
    """Body angular velocity ``omega = 2 J(q)^T qdot``."""
    qa = as_quat_array(q)
    qd = np.asarray(qdot, dtype=np.float64)
    check_tangent(qa, qd)
    return 2.0 * _jmat(qa).T @ qd


def qdot_from_omega(q, omega) -> np.ndarray:
    """Kinematics ``qdot = J(q) omega / 2``."""
    return 0.5 * _jmat(as_quat_array(q)) @ np.asarray(omega, dtype=np.float64)


def euler_newton_deriv(state: BodyState, tau, inertia: InertiaModel):
    """Time derivatives ``(qdot, omegadot)`` of the Euler-Newton plant.

    ``M omegadot = S(M omega) omega + tau``.
    """
    return _euler_newton(
        state.q.array,
        state.omega,
        np.asarray(tau, dtype=np.float64),
        inertia.M,
        inertia.M_inv,
    )


def torque_to_generalized(q, tau) -> np.ndarray:
    """Generalized torque ``tau_bar = J(q) tau / 2``."""
    return 0.5 * _jmat(as_quat_array(q)) @ np.asarray(tau, dtype=np.float64)


def generalized_to_torque(q, tau_bar) -> np.ndarray:
    """Body torque ``tau = 2 J(q)^T tau_bar``; only the tangent part of tau_bar survives."""
    return 2.0 * _jmat(as_quat_array(q)).T @ np.asarray(tau_bar, dtype=np.float64)
