"""The 4-DOF Lagrangian form ``D(q) qddot + C(q, qdot) qdot = tau_bar``.

``D(q) = Q(q) M0 Q(q)^T`` with ``M0 = diag(m0, M)``. The Coriolis-like matrix
is evaluated with the closed form

    C(q, qdot) = -J(q) S(M w) J(q)^T + J(q) M J(qdot)^T + m0 q qdot^T,

``w = 2 J(q)^T qdot``, which matches the product definition
``-J S(M w) J^T - D Q(qdot) Q(q)^T`` on the tangent bundle of the sphere.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from quatlag.quatmath import _cross, _jmat, _jtv, _jv, _mv, _qmat, _skew, as_quat_array
from quatlag.rigid_dynamics.model import InertiaModel, check_tangent


@njit(cache=True)
def _d_matrix(q, M, m0):
    j = _jmat(q)
    return j @ M @ j.T + m0 * np.outer(q, q)


@njit(cache=True)
def _c_matrix(q, qdot, M, m0):
    j = _jmat(q)
    w = 2.0 * (j.T @ qdot)
    return -j @ _skew(M @ w) @ j.T + j @ M @ _jmat(qdot).T + m0 * np.outer(q, qdot)


@njit(cache=True)
def _c_matrix_product_form(q, qdot, M, m0):
    j = _jmat(q)
    w = 2.0 * (j.T @ qdot)
    return -j @ _skew(M @ w) @ j.T - _d_matrix(q, M, m0) @ _qmat(qdot) @ _qmat(q).T


@njit(cache=True)
def _d_matrix_dot(q, qdot, M, m0):
    m0mat = np.zeros((4, 4))
    m0mat[0, 0] = m0
    m0mat[1:, 1:] = M
    a = _qmat(qdot) @ m0mat @ _qmat(q).T
    return a + a.T


@njit(cache=True)
def _d_inverse(q, M_inv, m0):
    j = _jmat(q)
    return j @ M_inv @ j.T + np.outer(q, q) / m0


# Matrix-free products used on the simulation hot path.


@njit(cache=True)
def _d_apply(q, v, M, m0):
    return _jv(q, _mv(M, _jtv(q, v))) + (m0 * np.dot(q, v)) * q


@njit(cache=True)
def _c_apply(q, qdot, v, M, m0):
    w = 2.0 * _jtv(q, qdot)
    jtv = _jtv(q, v)
    return (
        -_jv(q, _cross(_mv(M, w), jtv))
        + _jv(q, _mv(M, _jtv(qdot, v)))
        + (m0 * np.dot(qdot, v)) * q
    )


@njit(cache=True)
def _dinv_apply(q, v, M_inv, m0):
    return _jv(q, _mv(M_inv, _jtv(q, v))) + (np.dot(q, v) / m0) * q


@njit(cache=True)
def _lagrangian_accel(q, qdot, tau_bar, M, M_inv, m0):
    rhs = tau_bar - _c_apply(q, qdot, qdot, M, m0)
    return _dinv_apply(q, rhs, M_inv, m0)


def _prep(q, qdot):
    qa = as_quat_array(q)
    qd = np.asarray(qdot, dtype=np.float64)
    check_tangent(qa, qd)
    return qa, qd


def d_matrix(q, inertia: InertiaModel) -> np.ndarray:
    """Inertia-like matrix D(q); symmetric with spectrum in [m_lower, m_bar]."""
    return _d_matrix(as_quat_array(q), inertia.M, inertia.m0)


def c_matrix(q, qdot, inertia: InertiaModel) -> np.ndarray:
    """Coriolis-centrifugal-like matrix C(q, qdot).

    Raises:
        TangencyViolation: if ``|q . qdot| >= 1e-6``.
    """
    qa, qd = _prep(q, qdot)
    return _c_matrix(qa, qd, inertia.M, inertia.m0)


def c_matrix_product_form(q, qdot, inertia: InertiaModel) -> np.ndarray:
    """C(q, qdot) from its defining product ``-J S(Mw) J^T - D Q(qdot) Q(q)^T``."""
    qa, qd = _prep(q, qdot)
    return _c_matrix_product_form(qa, qd, inertia.M, inertia.m0)


def d_matrix_dot(q, qdot, inertia: InertiaModel) -> np.ndarray:
    """Analytic time derivative ``Q(qdot) M0 Q(q)^T + Q(q) M0 Q(qdot)^T``."""
    return _d_matrix_dot(
        as_quat_array(q), np.asarray(qdot, dtype=np.float64), inertia.M, inertia.m0
    )


def lagrangian_accel(q, qdot, tau_bar, inertia: InertiaModel) -> np.ndarray:
    """Quaternion acceleration ``D^{-1}(q) (tau_bar - C(q, qdot) qdot)``.

    ``D^{-1} = Q(q) M0^{-1} Q(q)^T`` is used directly. For ``tau_bar`` in the
    range of ``J(q)`` the result does not depend on ``m0``.
    """
    qa, qd = _prep(q, qdot)
    tb = np.asarray(tau_bar, dtype=np.float64)
    return _lagrangian_accel(qa, qd, tb, inertia.M, inertia.M_inv, inertia.m0)
