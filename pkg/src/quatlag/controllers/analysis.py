"""Sufficient gain conditions, the excitation metric, and Lyapunov functions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from quatlag.controllers.types import GainsAdaptiveOF, GainsAdaptiveSF, GainsStateFeedback
from quatlag.errors import InsufficientHistory
from quatlag.rigid_dynamics.bounds import BoundConstants


@dataclass(frozen=True)
class GainCheck:
    passed: bool
    margin: float
    threshold: float
    value: float
    terms: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "pass": self.passed,
            "margin": self.margin,
            "threshold": self.threshold,
            "value": self.value,
            **self.terms,
        }


def check_gains_theorem2(gains: GainsAdaptiveSF, bounds: BoundConstants) -> GainCheck:
    """Damping condition of the adaptive state-feedback law.

    Requires ``lambda_min(Kd) > (a1 + a2)^2 / (4 kp) + a1``.
    """
    a1 = bounds.k_h1 + 2.0 * bounds.k_c1 + bounds.m_bar
    a2 = bounds.k_h2 + bounds.k_c1 * bounds.sup_qd_dot
    threshold = (a1 + a2) ** 2 / (4.0 * gains.kp) + a1
    value = float(np.linalg.eigvalsh(gains.Kd)[0])
    return GainCheck(value > threshold, value - threshold, threshold, value,
                     {"alpha1": a1, "alpha2": a2})


def check_gains_theorem3(gains: GainsAdaptiveOF, bounds: BoundConstants) -> GainCheck:
    """Velocity-gain condition of the attitude-only law: ``kv > (beta + a1) / m_lower``.

    The three ``a`` terms differ from the state-feedback ones of the same name.
    """
    kp = gains.kp
    kf_min = float(np.linalg.eigvalsh(gains.Kf)[0])
    kf_norm = float(np.linalg.norm(gains.Kf + np.eye(4), ord=2))
    b = bounds
    a1 = b.k_h1 + 4.0 * b.k_c1 + b.m_bar
    a2 = b.k_h1 + b.k_h2 + b.k_c1 * b.sup_qd_dot + 4.0 * b.k_c1 + b.m_bar * abs(kp - 1.0)
    a3 = b.k_h1 + b.k_c1 * b.sup_qd_dot + 4.0 * b.k_c1 + b.m_bar * kf_norm
    beta = max(a2**2 / (4.0 * kp), (a3**2 * kp + a2**2 * kf_min) / (4.0 * kp * kf_min))
    threshold = (beta + a1) / b.m_lower
    return GainCheck(gains.kv > threshold, gains.kv - threshold, threshold, gains.kv,
                     {"alpha1": a1, "alpha2": a2, "alpha3": a3, "beta": beta})


def pe_metric(yf_history: Sequence[np.ndarray] | np.ndarray, window_T: float, dt: float) -> float:
    """Smallest eigenvalue of the windowed Gram integral, minimized over window starts.

    Uses trapezoidal accumulation over uniformly spaced samples.
    """
    ys = np.asarray(yf_history, dtype=np.float64)
    n_win = int(round(window_T / dt))
    if n_win < 1 or len(ys) < n_win + 1:
        raise InsufficientHistory(
            f"need {n_win + 1} samples for a {window_T} s window, have {len(ys)}"
        )
    grams = np.einsum("kij,kil->kjl", ys, ys)
    # Cumulative trapezoid so every window integral is a difference of two prefixes.
    cum = np.concatenate([np.zeros((1, *grams.shape[1:])),
                          np.cumsum(0.5 * dt * (grams[1:] + grams[:-1]), axis=0)])
    windows = cum[n_win:] - cum[:-n_win]
    return float(np.linalg.eigvalsh(windows)[:, 0].min())


def admissible_alpha(gains: GainsStateFeedback) -> float:
    """Half of the largest weight that keeps the state-feedback derivative negative."""
    return 2.0 * float(np.linalg.eigvalsh(gains.Ks)[0] * np.linalg.eigvalsh(gains.Lambda)[0])


def lyapunov_state_feedback(s, e, D, alpha: float) -> float:
    """``s^T D s / 2 + alpha |e|^2 / 2``; covers both the continuous and hybrid laws."""
    s = np.asarray(s, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    return float(0.5 * s @ D @ s + 0.5 * alpha * e @ e)


def lyapunov_adaptive_sf(eta1, e, D, kp: float, gamma2: float, theta_err) -> float:
    eta1 = np.asarray(eta1, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    th = np.asarray(theta_err, dtype=np.float64)
    return float(0.5 * eta1 @ D @ eta1 + 0.5 * kp * e @ e + 0.5 / gamma2 * th @ th)


def lyapunov_adaptive_of(eta2, e, nu, D, kp: float, Gamma_inv, theta_err) -> float:
    eta2 = np.asarray(eta2, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    th = np.asarray(theta_err, dtype=np.float64)
    return float(0.5 * eta2 @ D @ eta2 + 0.5 * kp * e @ e + 0.5 * nu @ nu
                 + 0.5 * th @ Gamma_inv @ th)
