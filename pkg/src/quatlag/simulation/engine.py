"""Fixed-step RK4 closed-loop propagation.

The plant state is ``(q, omega)`` for the Euler-Newton form or ``(q, qdot)``
for the Lagrangian form. Controller memory (estimates, filters) is integrated
in the same RK4 step, and the control law is evaluated at every stage, so the
closed loop is a single smooth ODE between mode jumps.

Per step ``k`` (time ``t_k = k dt``):

1. the jump condition is checked once, on the measured attitude;
2. the stage-one control is recorded (every ``output_decimation`` steps);
3. one RK4 step advances plant and controller, then ``q`` is renormalized.

Measurement noise is drawn once per step and held over its four stages.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from quatlag.controllers.hybrid import _gap_and_best
from quatlag.controllers.laws import (
    _aof_control,
    _aof_theta_hat,
    _asf_control,
    _asf_x,
    _asf_yf,
    _damping_g_dot,
    _desired_regressors,
    _sf_control,
)
from quatlag.quatmath import _cross, _jtv, _jv, _mv
from quatlag.rigid_dynamics.lagrangian import _d_matrix, _lagrangian_accel
from quatlag.rigid_dynamics.regressors import _regressor_bar_dot

KIND_CODES = {"free": -1, "continuous": 0, "hybrid": 1, "adaptive_sf": 2, "adaptive_of": 3}
PLANT_CODES = {"euler_newton": 0, "lagrangian": 1}
Z_SIZE = 41  # adaptive state feedback: theta_hat 9, Xf 24, tau_f 4, q_f 4

COLUMNS = (
    "t", "q0", "q1", "q2", "q3", "w1", "w2", "w3", "h", "e_norm", "eps0", "nu_norm",
    "eta_norm", "theta_err_norm", "tau1", "tau2", "tau3",
    "taubar1", "taubar2", "taubar3", "taubar4", "energy", "V_lyap",
)
NCOL = len(COLUMNS)
DIVERGENCE_LIMIT = 1e6


@njit(cache=True)
def _measured(q, nn, vbar):
    if nn == 0.0:
        return q.copy()
    x = q + nn * vbar
    return x / np.sqrt(np.dot(x, x))


@njit(cache=True)
def _plant_kinematics(plant, x):
    q = x[:4].copy()
    if plant == 0:
        w = x[4:7].copy()
        qdot = 0.5 * _jv(q, w)
    else:
        qdot = x[4:8].copy()
        w = 2.0 * _jtv(q, qdot)
    return q, qdot, w


@njit(cache=True)
def _rhs(kind, plant, x, z, qd, qd1, qd2, qd3, h, p, nn, vbar, M, M_inv, m0,
         lam, ks, kd, kp, g1, g2, lf, kf, kv, gamma):
    q, qdot, w = _plant_kinematics(plant, x)
    qm = _measured(q, nn, vbar)
    qdot_m = 0.5 * _jv(qm, w)
    dz = np.zeros(z.shape[0])
    if kind < 0:
        tau_bar = np.zeros(4)
    elif kind <= 1:
        tau_bar = _sf_control(qm, qdot_m, qd, qd1, qd2, h, lam, ks, M, m0)
    elif kind == 2:
        xf = np.ascontiguousarray(z[9:33]).reshape((4, 6))
        tf = z[33:37].copy()
        qf = z[37:41].copy()
        yf = _asf_yf(qm, qdot_m, xf, qf, lf)
        tau_bar, th_dot = _asf_control(
            qm, qdot_m, qd, qd1, qd2, h, z[:9].copy(), yf, tf, kd, kp, g1, g2, m0
        )
        # The filters see the torque the plant can realize (tangent projection).
        tau_real = _jv(qm, _jtv(qm, tau_bar))
        dz[:9] = th_dot
        dz[9:33] = (lf * (_asf_x(qm, qdot_m, lf) - xf)).ravel()
        dz[33:37] = lf * (tau_real - tf)
        dz[37:41] = lf * (qm - qf)
    else:
        ybd_dot = h * _regressor_bar_dot(qd, qd1, qd2, qd3)
        g = z[9:13].copy()
        tau_bar, mu_dot, _, _ = _aof_control(
            qm, qd, qd1, qd2, h, z[:9].copy(), g, gamma, kv, kp, m0, ybd_dot
        )
        dz[:9] = mu_dot
        dz[9:13] = _damping_g_dot(g, qm - h * qd, kf, kv, kp)
    tau = 2.0 * _jtv(qm, tau_bar)
    dx = np.zeros(x.shape[0])
    if plant == 0:
        dx[:4] = qdot
        dx[4:7] = _mv(M_inv, _cross(_mv(M, w), w) + tau + p)
    else:
        dx[:4] = qdot
        dx[4:8] = _lagrangian_accel(q, qdot, 0.5 * _jv(q, tau + p), M, M_inv, m0)
    return dx, dz, tau, tau_bar


@njit(cache=True)
def _theta_true(theta6, p):
    out = np.empty(9)
    out[:6] = theta6
    out[6:] = p
    return out


@njit(cache=True)
def _diagnostics(kind, plant, x, z, qd, qd1, qd2, h, p, nn, vbar, M, m0, theta6,
                 lam, alpha, kp, g2, kv, gamma, gamma_inv):
    """Return ``(e_norm, eps0, nu_norm, eta_norm, theta_err_norm, V)`` on the true state."""
    q, qdot, _ = _plant_kinematics(plant, x)
    e = q - h * qd
    edot = qdot - h * qd1
    eps0 = np.dot(qd, q)
    dmat = _d_matrix(q, M, m0)
    nan = np.nan
    if kind < 0:
        return np.sqrt(np.dot(e, e)), eps0, nan, nan, nan, nan
    if kind <= 1:
        s = edot + lam @ e
        v = 0.5 * np.dot(s, dmat @ s) + 0.5 * alpha * np.dot(e, e)
        return np.sqrt(np.dot(e, e)), eps0, nan, np.sqrt(np.dot(s, s)), nan, v
    th_true = _theta_true(theta6, p)
    if kind == 2:
        eta = edot + e
        th_err = z[:9] - th_true
        v = (0.5 * np.dot(eta, dmat @ eta) + 0.5 * kp * np.dot(e, e)
             + 0.5 / g2 * np.dot(th_err, th_err))
        return (np.sqrt(np.dot(e, e)), eps0, nan, np.sqrt(np.dot(eta, eta)),
                np.sqrt(np.dot(th_err, th_err)), v)
    qm = _measured(q, nn, vbar)
    e_m = qm - h * qd
    _, ybd = _desired_regressors(qd, qd1, qd2, h)
    th = _aof_theta_hat(e_m, z[:9].copy(), ybd, gamma)
    nu = z[9:13] - kv * e_m
    eta = edot + e + nu
    th_err = th - th_true
    v = (0.5 * np.dot(eta, dmat @ eta) + 0.5 * kp * np.dot(e, e) + 0.5 * np.dot(nu, nu)
         + 0.5 * np.dot(th_err, gamma_inv @ th_err))
    return (np.sqrt(np.dot(e, e)), eps0, np.sqrt(np.dot(nu, nu)), np.sqrt(np.dot(eta, eta)),
            np.sqrt(np.dot(th_err, th_err)), v)


@njit(cache=True, nogil=True)
def _simulate(kind, plant, jumps_on, delta, dt, n_steps, decim, x0, z0, h0,
              QD, QD1, QD2, QD3, P, NN, VB, theta6, M, M_inv, m0,
              lam, ks, alpha, kd, kp, g1, g2, lf, kf, kv, gamma, gamma_inv):
    n_rec = n_steps // decim + 1
    rec = np.full((n_rec, 23), np.nan)
    jumps = np.empty((n_steps + 1, 4))  # t, new h, V before, V after
    n_jumps = 0
    x = x0.copy()
    z = z0.copy()
    h = float(h0)
    energy_int = 0.0
    tau_prev_sq = 0.0
    n_written = 0
    status = 0
    for k in range(n_steps + 1):
        t = k * dt
        i = 2 * k
        qd = QD[i]
        qd1 = QD1[i]
        qd2 = QD2[i]
        nn = NN[k]
        vb = VB[k]
        p = P[k]

        if jumps_on:
            q_now = x[:4].copy()
            qm = _measured(q_now, nn, vb)
            gap, best = _gap_and_best(qm, qd, h)
            if gap >= delta and best != h:
                v_before = _diagnostics(kind, plant, x, z, qd, qd1, qd2, h, p, nn, vb, M, m0,
                                        theta6, lam, alpha, kp, g2, kv, gamma, gamma_inv)[5]
                if kind == 3:
                    # Keep the estimate and the damping signal continuous across the jump.
                    e_old = qm - h * qd
                    _, ybd_old = _desired_regressors(qd, qd1, qd2, h)
                    th = _aof_theta_hat(e_old, z[:9].copy(), ybd_old, gamma)
                    nu = z[9:13] - kv * e_old
                    e_new = qm - best * qd
                    _, ybd_new = _desired_regressors(qd, qd1, qd2, float(best))
                    z[:9] = -(gamma_inv @ th) - ybd_new.T @ e_new
                    z[9:13] = nu + kv * e_new
                h = float(best)
                v_after = _diagnostics(kind, plant, x, z, qd, qd1, qd2, h, p, nn, vb, M, m0,
                                       theta6, lam, alpha, kp, g2, kv, gamma, gamma_inv)[5]
                jumps[n_jumps, 0] = t
                jumps[n_jumps, 1] = h
                jumps[n_jumps, 2] = v_before
                jumps[n_jumps, 3] = v_after
                n_jumps += 1

        k1x, k1z, tau, tau_bar = _rhs(kind, plant, x, z, qd, qd1, qd2, QD3[i], h, p, nn, vb,
                                      M, M_inv, m0, lam, ks, kd, kp, g1, g2, lf, kf, kv, gamma)
        sq = np.dot(tau, tau)
        if k > 0:
            energy_int += 0.5 * dt * (tau_prev_sq + sq)
        tau_prev_sq = sq

        if k % decim == 0:
            r = rec[n_written]
            _, _, w = _plant_kinematics(plant, x)
            d = _diagnostics(kind, plant, x, z, qd, qd1, qd2, h, p, nn, vb, M, m0, theta6,
                             lam, alpha, kp, g2, kv, gamma, gamma_inv)
            r[0] = t
            r[1:5] = x[:4]
            r[5:8] = w
            r[8] = h
            r[9] = d[0]
            r[10] = d[1]
            r[11] = d[2]
            r[12] = d[3]
            r[13] = d[4]
            r[14:17] = tau
            r[17:21] = tau_bar
            r[21] = np.sqrt(energy_int)
            r[22] = d[5]
            n_written += 1

        if k == n_steps:
            break

        im = i + 1
        ie = i + 2
        k2x, k2z, _, _ = _rhs(kind, plant, x + 0.5 * dt * k1x, z + 0.5 * dt * k1z,
                              QD[im], QD1[im], QD2[im], QD3[im], h, p, nn, vb, M, M_inv, m0,
                              lam, ks, kd, kp, g1, g2, lf, kf, kv, gamma)
        k3x, k3z, _, _ = _rhs(kind, plant, x + 0.5 * dt * k2x, z + 0.5 * dt * k2z,
                              QD[im], QD1[im], QD2[im], QD3[im], h, p, nn, vb, M, M_inv, m0,
                              lam, ks, kd, kp, g1, g2, lf, kf, kv, gamma)
        k4x, k4z, _, _ = _rhs(kind, plant, x + dt * k3x, z + dt * k3z,
                              QD[ie], QD1[ie], QD2[ie], QD3[ie], h, p, nn, vb, M, M_inv, m0,
                              lam, ks, kd, kp, g1, g2, lf, kf, kv, gamma)
        x = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        z = z + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        q = x[:4] / np.sqrt(np.dot(x[:4], x[:4]))
        x[:4] = q
        if plant == 1:
            x[4:8] = x[4:8] - np.dot(q, x[4:8]) * q

        _, _, w_new = _plant_kinematics(plant, x)
        wn = np.sqrt(np.dot(w_new, w_new))
        if not (wn <= DIVERGENCE_LIMIT) or not np.all(np.isfinite(z)):
            status = 1
            break
    return rec[:n_written], jumps[:n_jumps], status, energy_int
