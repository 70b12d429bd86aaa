"""Scenario execution, result containers, summary metrics, and CSV output."""

from __future__ import annotations

import io
import json
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from quatlag.controllers.hybrid import initial_mode
from quatlag.controllers.laws import _desired_regressors, asf_regressor_input
from quatlag.controllers.types import GainsAdaptiveOF, GainsAdaptiveSF, GainsStateFeedback
from quatlag.errors import EmptyRecords, NumericalDivergence
from quatlag.quatmath import _jmat
from quatlag.simulation.config import ScenarioConfig
from quatlag.simulation.engine import COLUMNS, KIND_CODES, PLANT_CODES, Z_SIZE, _rhs, _simulate
from quatlag.simulation.perturbations import disturbance_path, noise_draws
from quatlag.simulation.trajectory import DesiredTrajectory

CSV_COLUMNS = (
    "t", "q0", "q1", "q2", "q3", "w1", "w2", "w3", "h", "e_norm", "eps0", "nu_norm",
    "eta_norm", "theta_err_norm", "tau1", "tau2", "tau3", "energy", "V_lyap",
)
_COL = {name: i for i, name in enumerate(COLUMNS)}
CONVERGENCE_THRESHOLD = 0.02
UNWINDING_FACTOR = 1.5


@dataclass(frozen=True)
class SimRecord:
    t: float
    q: np.ndarray
    omega: np.ndarray
    h: int
    e_norm: float
    eps0: float
    nu_norm: float
    eta_norm: float
    theta_err_norm: float
    tau: np.ndarray
    tau_bar: np.ndarray
    energy: float
    V_lyap: float


@dataclass(frozen=True)
class Jump:
    t: float
    h: int
    V_before: float
    V_after: float


class SimResult(Sequence):
    """Recorded samples backed by one (n, 23) array; indexing yields :class:`SimRecord`."""

    def __init__(self, data: np.ndarray, jumps: np.ndarray, config: ScenarioConfig,
                 omega_d: np.ndarray, energy_full: float):
        self.data = data
        self.jump_table = jumps
        self.config = config
        self.omega_d = omega_d
        self.energy_full = energy_full

    def __len__(self) -> int:
        return len(self.data)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        r = self.data[i]
        return SimRecord(
            t=float(r[0]), q=r[1:5].copy(), omega=r[5:8].copy(), h=int(r[8]),
            e_norm=float(r[9]), eps0=float(r[10]), nu_norm=float(r[11]),
            eta_norm=float(r[12]), theta_err_norm=float(r[13]), tau=r[14:17].copy(),
            tau_bar=r[17:21].copy(), energy=float(r[21]), V_lyap=float(r[22]),
        )

    def column(self, name: str) -> np.ndarray:
        return self.data[:, _COL[name]]

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    @property
    def q(self) -> np.ndarray:
        return self.data[:, 1:5]

    @property
    def omega(self) -> np.ndarray:
        return self.data[:, 5:8]

    @property
    def tau(self) -> np.ndarray:
        return self.data[:, 14:17]

    @property
    def jumps(self) -> list[Jump]:
        return [Jump(float(a), int(b), float(c), float(d)) for a, b, c, d in self.jump_table]


def _theta6(M: np.ndarray) -> np.ndarray:
    return np.array([M[0, 0], M[1, 1], M[2, 2], M[1, 2], M[0, 2], M[0, 1]])


def _initial_controller_state(cfg: ScenarioConfig, gains, traj: DesiredTrajectory, x0, h0,
                              kind: int, plant: int, inertia, nn0, vb0, p0):
    z = np.zeros(Z_SIZE)
    th0 = np.asarray(cfg.theta_hat0, dtype=np.float64)
    q0 = x0[:4]
    w0 = x0[4:7] if plant == 0 else 2.0 * _jmat(q0).T @ x0[4:8]
    qm = q0 if nn0 == 0.0 else (q0 + nn0 * vb0) / np.linalg.norm(q0 + nn0 * vb0)
    qd, qd1, qd2, qd3 = traj.qd[0], traj.qd_dot[0], traj.qd_ddot[0], traj.qd_dddot[0]
    if kind == 2:
        qdot_m = 0.5 * _jmat(qm) @ w0
        z[:9] = th0
        z[9:33] = asf_regressor_input(qm, qdot_m, gains.lambda_f).ravel()
        z[37:41] = qm
        # tau_f starts at the realized torque of the first control evaluation.
        _, _, _, tau_bar = _rhs(
            2, plant, x0, z, qd, qd1, qd2, qd3, float(h0), p0, nn0, vb0,
            inertia.M, inertia.M_inv, inertia.m0, np.eye(4), np.eye(4), gains.Kd,
            gains.kp, gains.gamma1, gains.gamma2, gains.lambda_f, np.eye(4), 0.0, np.eye(9),
        )
        jm = _jmat(qm)
        z[33:37] = jm @ (jm.T @ tau_bar)
    elif kind == 3:
        e0 = qm - h0 * qd
        _, ybd = _desired_regressors(qd, qd1, qd2, float(h0))
        z[:9] = -gains.Gamma_inv @ th0 - ybd.T @ e0
        z[9:13] = gains.kv * e0
    return z


def run(scenario: ScenarioConfig) -> SimResult:
    """Simulate one scenario; raises :class:`NumericalDivergence` if the state blows up."""
    cfg = scenario
    cfg.validate()
    inertia = cfg.inertia()
    gains = cfg.gains()
    kind = KIND_CODES[cfg.controller]
    plant = PLANT_CODES[cfg.plant_form]
    n = cfg.n_steps
    dt = float(cfg.dt)

    traj = DesiredTrajectory(cfg.trajectory(), n * dt, 0.5 * dt)
    q0, w0 = cfg.initial_state()
    q0 = q0.array.copy()
    if plant == 0:
        x0 = np.concatenate([q0, w0])
    else:
        x0 = np.concatenate([q0, 0.5 * _jmat(q0) @ w0])
    nn, vb = noise_draws(cfg.noise(), n + 1)
    P = disturbance_path(cfg.disturbance(), n, dt)

    if cfg.h0 is not None:
        h0 = int(cfg.h0)
    else:
        qm0 = q0 if nn[0] == 0.0 else (q0 + nn[0] * vb[0]) / np.linalg.norm(q0 + nn[0] * vb[0])
        h0 = initial_mode(float(traj.qd[0] @ qm0))

    lam = np.eye(4)
    ks = np.eye(4)
    kd = np.eye(4)
    kp = g1 = g2 = lf = 1.0
    kf = np.eye(4)
    kv = 0.0
    gamma = np.eye(9)
    gamma_inv = np.eye(9)
    if isinstance(gains, GainsStateFeedback):
        lam, ks = gains.Lambda, gains.Ks
    elif isinstance(gains, GainsAdaptiveSF):
        kd, kp, g1, g2, lf = gains.Kd, gains.kp, gains.gamma1, gains.gamma2, gains.lambda_f
    elif isinstance(gains, GainsAdaptiveOF):
        kf, kv, kp, gamma, gamma_inv = gains.Kf, gains.kv, gains.kp, gains.Gamma, gains.Gamma_inv
    alpha = cfg.lyapunov_alpha() if 0 <= kind <= 1 else 0.0

    z0 = _initial_controller_state(cfg, gains, traj, x0, h0, kind, plant, inertia,
                                   nn[0], vb[0], P[0])
    rec, jumps, status, energy_int = _simulate(
        kind, plant, kind > 0, float(cfg.delta), dt, n, int(cfg.output_decimation), x0, z0,
        h0, traj.qd, traj.qd_dot, traj.qd_ddot, traj.qd_dddot, P, nn, vb,
        _theta6(inertia.M), inertia.M, inertia.M_inv, inertia.m0,
        lam, ks, float(alpha), kd, float(kp), float(g1), float(g2), float(lf), kf, float(kv),
        gamma, gamma_inv,
    )
    omega_d = np.array([traj.omega(t)[0] for t in rec[:, 0]]) if len(rec) else np.zeros((0, 3))
    result = SimResult(rec, jumps, cfg, omega_d, float(np.sqrt(energy_int)))
    if status != 0:
        raise NumericalDivergence(
            f"angular rate exceeded 1e6 rad/s or state became non-finite after "
            f"t = {rec[-1, 0] if len(rec) else 0.0:.6g} s",
            result,
        )
    return result


def theta_true(cfg: ScenarioConfig, t: float = 0.0) -> np.ndarray:
    """True parameter vector at ``t`` (the disturbance part may drift)."""
    n = int(np.floor(t / cfg.dt + 1e-9))
    p = disturbance_path(cfg.disturbance(), n, cfg.dt)[n]
    return np.concatenate([_theta6(cfg.inertia().M), p])


# ---------------------------------------------------------------- metrics


def energy(t: np.ndarray, tau: np.ndarray) -> float:
    """``sqrt(int tau^T tau dt)`` by the trapezoidal rule."""
    if len(t) < 2:
        return 0.0
    sq = np.einsum("ij,ij->i", tau, tau)
    return float(np.sqrt(np.sum(0.5 * np.diff(t) * (sq[1:] + sq[:-1]))))


def convergence_time(t: np.ndarray, e_norm: np.ndarray, threshold: float) -> float | None:
    """First time after which ``e_norm`` stays below ``threshold`` to the horizon."""
    above = np.nonzero(~(e_norm < threshold))[0]
    if len(above) == 0:
        return float(t[0])
    last = above[-1]
    if last == len(t) - 1:
        return None
    return float(t[last + 1])


def _records_arrays(records):
    if isinstance(records, SimResult):
        return records.data, records.omega_d
    recs = list(records)
    data = np.array([
        [r.t, *r.q, *r.omega, r.h, r.e_norm, r.eps0, r.nu_norm, r.eta_norm,
         r.theta_err_norm, *r.tau, *r.tau_bar, r.energy, r.V_lyap]
        for r in recs
    ]) if recs else np.zeros((0, len(COLUMNS)))
    return data, None


def metrics(records, threshold: float = CONVERGENCE_THRESHOLD, omega_d=None) -> dict:
    """Summary numbers of a run.

    ``unwinding_flag`` is set when the loop converges yet the body rotated
    (integral of ``|omega - omega_d|``) more than 1.5 times the initial
    geodesic error angle.
    """
    data, od = _records_arrays(records)
    if len(data) == 0:
        raise EmptyRecords("no records to summarize")
    if omega_d is not None:
        od = np.asarray(omega_d, dtype=np.float64)
    if od is None:
        od = np.zeros((len(data), 3))
    t = data[:, 0]
    h = data[:, 8]
    e = data[:, 9]
    if isinstance(records, SimResult):
        # A jump at t = 0 precedes the first record, so count the jump log.
        jump_count = len(records.jump_table)
    else:
        jump_count = int(np.count_nonzero(np.diff(h) != 0))
    conv = convergence_time(t, e, threshold)
    rate = np.linalg.norm(data[:, 5:8] - od, axis=1)
    travelled = float(np.sum(0.5 * np.diff(t) * (rate[1:] + rate[:-1]))) if len(t) > 1 else 0.0
    eps0_start = float(np.clip(abs(data[0, 10]), 0.0, 1.0))
    initial_angle = 2.0 * np.arccos(eps0_start)
    theta_err = data[-1, 13]
    return {
        "energy_final": energy(t, data[:, 14:17]),
        "convergence_time": conv,
        "jump_count": jump_count,
        "unwinding_flag": bool(conv is not None and travelled > UNWINDING_FACTOR * initial_angle),
        "theta_err_final": None if np.isnan(theta_err) else float(theta_err),
        "rotation_travelled": travelled,
        "initial_error_angle": float(initial_angle),
    }


def jump_times(result: SimResult) -> np.ndarray:
    return result.jump_table[:, 0].copy()


# ---------------------------------------------------------------- output


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_text(result: SimResult) -> str:
    idx = [_COL[c] for c in CSV_COLUMNS]
    buf = io.StringIO()
    buf.write(",".join(CSV_COLUMNS) + "\n")
    for row in result.data[:, idx]:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def write_csv(result: SimResult, path: str | Path) -> None:
    Path(path).write_text(csv_text(result))


def metrics_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".metrics.json")


def write_metrics(summary: dict, path: str | Path) -> None:
    Path(path).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
