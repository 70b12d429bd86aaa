"""Linear parametrization of the Lagrangian dynamics and the residual dynamics.

``D(q) qddot + C(q, qdot) qdot = Y0 m0 + Y theta`` with

    Y0 = (q . qddot + qdot . qdot) q
    Y  = J(q) (F(wdot) + 2 S(w) F(w)),   w = J(q)^T qdot,  wdot = J(q)^T qddot

and ``F(u) theta = M u``. Appending ``-J(q)/2`` gives the 4x9 regressor that
also absorbs a constant body-frame disturbance ``p``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from quatlag.quatmath import _jmat, _jtv, _mm, _qmat, _skew, as_quat_array
from quatlag.rigid_dynamics.lagrangian import _c_matrix, _d_matrix
from quatlag.rigid_dynamics.model import InertiaModel, check_tangent


@njit(cache=True)
def _f_map(u):
    f = np.zeros((3, 6))
    f[0, 0] = u[0]
    f[0, 4] = u[2]
    f[0, 5] = u[1]
    f[1, 1] = u[1]
    f[1, 3] = u[2]
    f[1, 5] = u[0]
    f[2, 2] = u[2]
    f[2, 3] = u[1]
    f[2, 4] = u[0]
    return f


@njit(cache=True)
def _regressors(q, qdot, qddot):
    j = _jmat(q)
    w = _jtv(q, qdot)
    wdot = _jtv(q, qddot)
    y0 = (np.dot(q, qddot) + np.dot(qdot, qdot)) * q
    y = _mm(j, _f_map(wdot) + 2.0 * _mm(_skew(w), _f_map(w)))
    return y0, y


@njit(cache=True)
def _regressor_bar(q, qdot, qddot):
    out = np.empty((4, 9))
    _, y = _regressors(q, qdot, qddot)
    out[:, :6] = y
    out[:, 6:] = -0.5 * _jmat(q)
    return out


@njit(cache=True)
def _regressor_bar_dot(q, qdot, qddot, qdddot):
    # d/dt of [Y, -J(q)/2] along a smooth path; J^T(qdot) qdot = 0 kills one term of wddot.
    j = _jmat(q)
    jd = _jmat(qdot)
    w = _jtv(q, qdot)
    wd = _jtv(q, qddot)
    wdd = _jtv(qdot, qddot) + _jtv(q, qdddot)
    fw = _f_map(w)
    fwd = _f_map(wd)
    inner = fwd + 2.0 * _mm(_skew(w), fw)
    inner_dot = _f_map(wdd) + 2.0 * _mm(_skew(wd), fw) + 2.0 * _mm(_skew(w), fwd)
    out = np.empty((4, 9))
    out[:, :6] = _mm(jd, inner) + _mm(j, inner_dot)
    out[:, 6:] = -0.5 * jd
    return out


@njit(cache=True)
def _residual_dynamics(qd, qd_dot, qd_ddot, q, qdot, p_bar, M, m0):
    dd = (_d_matrix(qd, M, m0) - _d_matrix(q, M, m0)) @ qd_ddot
    cc = (_c_matrix(qd, qd_dot, M, m0) - _c_matrix(q, qdot, M, m0)) @ qd_dot
    pp = 0.5 * ((_qmat(qd) - _qmat(q)) @ p_bar)
    return dd + cc - pp


def f_map(u) -> np.ndarray:
    """3x6 map with ``f_map(u) @ theta == M @ u`` for every symmetric M."""
    return _f_map(np.asarray(u, dtype=np.float64))


def _triple(q, qdot, qddot):
    qa = as_quat_array(q)
    qd = np.asarray(qdot, dtype=np.float64)
    qdd = np.asarray(qddot, dtype=np.float64)
    check_tangent(qa, qd)
    return qa, qd, qdd


def regressors(q, qdot, qddot) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Y0, Y)``, shapes (4,) and (4, 6)."""
    return _regressors(*_triple(q, qdot, qddot))


def regressor_bar(q, qdot, qddot) -> np.ndarray:
    """Augmented 4x9 regressor ``[Y, -J(q)/2]`` acting on ``[theta; p]``."""
    return _regressor_bar(*_triple(q, qdot, qddot))


def regressor_bar_dot(q, qdot, qddot, qdddot) -> np.ndarray:
    """Exact time derivative of :func:`regressor_bar` given the jerk ``qdddot``."""
    qa, qd, qdd = _triple(q, qdot, qddot)
    return _regressor_bar_dot(qa, qd, qdd, np.asarray(qdddot, dtype=np.float64))


def disturbance_generalized(q, p) -> np.ndarray:
    """Generalized disturbance ``d = J(q) p / 2 = Q(q) [0; p] / 2``."""
    return 0.5 * _jmat(as_quat_array(q)) @ np.asarray(p, dtype=np.float64)


def residual_dynamics(traj_point, q, qdot, p_bar, inertia: InertiaModel) -> np.ndarray:
    """Mismatch between desired-path and actual-path Lagrangian operators.

    ``traj_point`` is ``(qd, qd_dot, qd_ddot)`` or any object exposing those
    attributes. ``p_bar = [0; p]`` is the padded disturbance.
    """
    if hasattr(traj_point, "qd_ddot"):
        qd, qd_dot, qd_ddot = traj_point.qd, traj_point.qd_dot, traj_point.qd_ddot
    else:
        qd, qd_dot, qd_ddot = traj_point
    return _residual_dynamics(
        as_quat_array(qd),
        np.asarray(qd_dot, dtype=np.float64),
        np.asarray(qd_ddot, dtype=np.float64),
        as_quat_array(q),
        np.asarray(qdot, dtype=np.float64),
        np.asarray(p_bar, dtype=np.float64),
        inertia.M,
        inertia.m0,
    )
