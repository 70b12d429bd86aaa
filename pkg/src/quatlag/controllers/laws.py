"""The four control laws, their filters, and jitted kernels shared with the simulator.

Every law is written in generalized (4-vector) coordinates and returns the
commanded generalized torque ``tau_bar``; the plant realizes ``2 J(q)^T tau_bar``.
The desired path is reassigned by the mode ``h`` (``h qd``), which scales the
desired regressors by ``h``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from quatlag.controllers.types import (
    AdaptiveOFState,
    AdaptiveSFState,
    DesiredPoint,
    GainsAdaptiveOF,
    GainsAdaptiveSF,
    GainsStateFeedback,
)
from quatlag.quatmath import _jmat, _jtv, _mm, _mtv, _mv, _skew, as_quat_array
from quatlag.rigid_dynamics.lagrangian import _c_apply, _d_apply
from quatlag.rigid_dynamics.model import check_tangent
from quatlag.rigid_dynamics.regressors import (
    _f_map,
    _regressor_bar,
    _regressor_bar_dot,
    _regressors,
)

# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _sf_control(q, qdot, qd, qd_dot, qd_ddot, h, lam, ks, M, m0):
    e = q - h * qd
    edot = qdot - h * qd_dot
    lam_e = _mv(lam, e)
    qr_dot = h * qd_dot - lam_e
    qr_ddot = h * qd_ddot - _mv(lam, edot)
    s = edot + lam_e
    return _d_apply(q, qr_ddot, M, m0) + _c_apply(q, qdot, qr_dot, M, m0) - _mv(ks, s)


@njit(cache=True)
def _asf_x(q, qdot, lf):
    j = _jmat(q)
    w = _jtv(q, qdot)
    fw = _f_map(w)
    return lf * _mm(j, fw) - 2.0 * _mm(j, _mm(_skew(w), fw)) + _mm(_jmat(qdot), fw)


@njit(cache=True)
def _asf_yf(q, qdot, xf, qf, lf):
    w = _jtv(q, qdot)
    out = np.empty((4, 9))
    out[:, :6] = lf * _mm(_jmat(q), _f_map(w)) - xf
    out[:, 6:] = -0.5 * _jmat(qf)
    return out


@njit(cache=True)
def _desired_regressors(qd, qd_dot, qd_ddot, h):
    y0, _ = _regressors(qd, qd_dot, qd_ddot)
    return h * y0, h * _regressor_bar(qd, qd_dot, qd_ddot)


@njit(cache=True)
def _asf_control(q, qdot, qd, qd_dot, qd_ddot, h, theta_hat, yf, tau_f, kd, kp, g1, g2, m0):
    e = q - h * qd
    eta1 = qdot - h * qd_dot + e
    y0d, ybd = _desired_regressors(qd, qd_dot, qd_ddot, h)
    tau = y0d * m0 + _mv(ybd, theta_hat) - _mv(kd, eta1) - kp * e
    th_dot = -g1 * _mtv(yf, _mv(yf, theta_hat) - tau_f) - g2 * _mtv(ybd, eta1)
    return tau, th_dot


@njit(cache=True)
def _aof_theta_hat(e, mu, ybd, gamma):
    return -_mv(gamma, _mtv(ybd, e) + mu)


@njit(cache=True)
def _aof_control(q, qd, qd_dot, qd_ddot, h, mu, g, gamma, kv, kp, m0, ybd_dot):
    """Return ``(tau_bar, mu_dot, theta_hat, nu)``; ``ybd_dot`` is already h-scaled."""
    e = q - h * qd
    nu = g - kv * e
    y0d, ybd = _desired_regressors(qd, qd_dot, qd_ddot, h)
    th = _aof_theta_hat(e, mu, ybd, gamma)
    tau = y0d * m0 + _mv(ybd, th) + kv * nu - kp * e
    mu_dot = _mtv(ybd, e + nu) - _mtv(ybd_dot, e)
    return tau, mu_dot, th, nu


@njit(cache=True)
def _damping_g_dot(g, e, kf, kv, kp):
    return -_mv(kf, g - kv * e) - kv * (g + (1.0 - kv) * e) + kp * e


@njit(cache=True)
def _tanh_ef_dot(ef, e, edot, kf, kv, kp):
    nu = np.tanh(ef)
    eta2 = edot + e + nu
    c2 = np.cosh(ef) ** 2
    return -c2 * (kf @ nu + kv * eta2 - kp * e)


# ---------------------------------------------------------------- public API


def _desired(d: DesiredPoint):
    return d.qd.array, np.asarray(d.qd_dot, float), np.asarray(d.qd_ddot, float)


def control_state_feedback(q, qdot, d: DesiredPoint, h: int, gains: GainsStateFeedback, inertia):
    """Passivity-based tracking law; with ``h`` frozen it is the continuous law."""
    qa = as_quat_array(q)
    qdot = np.asarray(qdot, dtype=np.float64)
    check_tangent(qa, qdot)
    qd, qd1, qd2 = _desired(d)
    return _sf_control(
        qa, qdot, qd, qd1, qd2, float(h), gains.Lambda, gains.Ks, inertia.M, inertia.m0
    )


def asf_regressor_input(q, qdot, lambda_f: float) -> np.ndarray:
    """The 4x6 signal whose low-pass version is ``Xf``."""
    qa = as_quat_array(q)
    return _asf_x(qa, np.asarray(qdot, dtype=np.float64), float(lambda_f))


def filtered_regressor(state: AdaptiveSFState, q, qdot, lambda_f: float) -> np.ndarray:
    """``Yf = [lambda_f J(q) F(w) - Xf, -J(q_f)/2]``, shape (4, 9)."""
    qa = as_quat_array(q)
    return _asf_yf(qa, np.asarray(qdot, float), state.Xf, state.q_f, float(lambda_f))


def init_adaptive_sf(theta_hat0, q, qdot, tau_bar0, lambda_f: float) -> AdaptiveSFState:
    """Filters start at their inputs so ``tau_f - Yf theta`` decays from t = 0."""
    qa = as_quat_array(q)
    return AdaptiveSFState(
        theta_hat=np.array(theta_hat0, dtype=np.float64),
        Xf=asf_regressor_input(qa, qdot, lambda_f),
        tau_f=np.array(tau_bar0, dtype=np.float64),
        q_f=qa.copy(),
    )


def adaptive_sf_regressor_filters_step(
    state: AdaptiveSFState, q, qdot, tau_bar, dt: float, lambda_f: float
) -> AdaptiveSFState:
    """Advance the three first-order filters by ``dt`` with inputs held.

    The held-input update ``x_f += (x - x_f)(1 - exp(-lambda_f dt))`` is exact
    for piecewise-constant inputs and stable for any step. ``theta_hat`` is
    left untouched; it is integrated by the caller from the returned rate.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    a = 1.0 - np.exp(-lambda_f * dt)
    qa = as_quat_array(q)
    x = asf_regressor_input(qa, qdot, lambda_f)
    tau_bar = np.asarray(tau_bar, dtype=np.float64)
    return state.replace(
        Xf=state.Xf + a * (x - state.Xf),
        tau_f=state.tau_f + a * (tau_bar - state.tau_f),
        q_f=state.q_f + a * (qa - state.q_f),
    )


def control_adaptive_sf(
    q, qdot, d: DesiredPoint, h: int, state: AdaptiveSFState, gains: GainsAdaptiveSF, m0: float
):
    """Return ``(tau_bar, theta_hat_dot)`` of the composite adaptive law."""
    qa = as_quat_array(q)
    qdot = np.asarray(qdot, dtype=np.float64)
    check_tangent(qa, qdot)
    qd, qd1, qd2 = _desired(d)
    yf = _asf_yf(qa, qdot, state.Xf, state.q_f, gains.lambda_f)
    return _asf_control(
        qa, qdot, qd, qd1, qd2, float(h), state.theta_hat, yf, state.tau_f,
        gains.Kd, gains.kp, gains.gamma1, gains.gamma2, float(m0),
    )


def desired_regressor_bar(d: DesiredPoint, h: int) -> np.ndarray:
    qd, qd1, qd2 = _desired(d)
    return h * _regressor_bar(qd, qd1, qd2)


def desired_regressor_bar_dot(d: DesiredPoint, h: int) -> np.ndarray:
    """Analytic rate of the h-scaled desired regressor; needs ``d.qd_dddot``."""
    if d.qd_dddot is None:
        raise ValueError("desired point carries no third derivative")
    qd, qd1, qd2 = _desired(d)
    return h * _regressor_bar_dot(qd, qd1, qd2, np.asarray(d.qd_dddot, float))


def regressor_bar_dot_fd(point_at, t: float, h: int, step: float = 1e-4) -> np.ndarray:
    """Central difference of the desired regressor; ``point_at(t)`` returns a DesiredPoint."""
    hi = desired_regressor_bar(point_at(t + step), h)
    lo = desired_regressor_bar(point_at(t - step), h)
    return (hi - lo) / (2.0 * step)


def init_adaptive_of(theta_hat0, e0, ybar_d0, gains: GainsAdaptiveOF) -> AdaptiveOFState:
    """Start with ``nu = 0`` and ``mu`` chosen so the estimate equals ``theta_hat0``."""
    th = np.array(theta_hat0, dtype=np.float64)
    e0 = np.asarray(e0, dtype=np.float64)
    mu = -gains.Gamma_inv @ th - np.asarray(ybar_d0).T @ e0
    return AdaptiveOFState(theta_hat=th, mu=mu, g=gains.kv * e0, nu=np.zeros(4))


def damping_filter_step(
    state: AdaptiveOFState, e, gains: GainsAdaptiveOF, dt: float, e_next=None, e_mid=None
) -> AdaptiveOFState:
    """Advance the linear damping filter by one RK4 step.

    Without ``e_next`` the error is held over the step. With it, the midpoint
    defaults to the average of the two ends unless ``e_mid`` is supplied.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    e0 = np.asarray(e, dtype=np.float64)
    e1 = e0 if e_next is None else np.asarray(e_next, dtype=np.float64)
    em = 0.5 * (e0 + e1) if e_mid is None else np.asarray(e_mid, dtype=np.float64)
    g = state.g
    args = (gains.Kf, gains.kv, gains.kp)
    k1 = _damping_g_dot(g, e0, *args)
    k2 = _damping_g_dot(g + 0.5 * dt * k1, em, *args)
    k3 = _damping_g_dot(g + 0.5 * dt * k2, em, *args)
    k4 = _damping_g_dot(g + dt * k3, e1, *args)
    g_new = g + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state.replace(g=g_new, nu=g_new - gains.kv * e1)


def tanh_filter_step(ef, e, edot, gains: GainsAdaptiveOF, dt: float, e_next, edot_next,
                     e_mid=None, edot_mid=None) -> np.ndarray:
    """RK4 step of the bounded-output filter ``nu = tanh(e_f)``; needs ``edot``.

    This form uses the error rate, so it is an analysis reference for the
    velocity-free linear form rather than something the controller can run.
    """
    e_mid = 0.5 * (np.asarray(e) + np.asarray(e_next)) if e_mid is None else e_mid
    edot_mid = 0.5 * (np.asarray(edot) + np.asarray(edot_next)) if edot_mid is None else edot_mid
    args = (gains.Kf, gains.kv, gains.kp)
    ef = np.asarray(ef, dtype=np.float64)
    k1 = _tanh_ef_dot(ef, e, edot, *args)
    k2 = _tanh_ef_dot(ef + 0.5 * dt * k1, e_mid, edot_mid, *args)
    k3 = _tanh_ef_dot(ef + 0.5 * dt * k2, e_mid, edot_mid, *args)
    k4 = _tanh_ef_dot(ef + dt * k3, e_next, edot_next, *args)
    return ef + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def control_adaptive_of(
    q_meas, d: DesiredPoint, h: int, state: AdaptiveOFState, gains: GainsAdaptiveOF,
    m0: float, ybar_d_dot,
):
    """Velocity-free adaptive law. Returns ``(tau_bar, mu_dot, theta_hat)``.

    ``ybar_d_dot`` is the time derivative of the h-scaled desired regressor.
    """
    qa = as_quat_array(q_meas)
    qd, qd1, qd2 = _desired(d)
    tau, mu_dot, th, _ = _aof_control(
        qa, qd, qd1, qd2, float(h), state.mu, state.g, gains.Gamma, gains.kv, gains.kp,
        float(m0), np.asarray(ybar_d_dot, dtype=np.float64),
    )
    return tau, mu_dot, th
