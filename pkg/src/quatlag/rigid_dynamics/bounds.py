"""Bound constants of the Lagrangian operators, estimated by seeded sampling.

The Lipschitz-type constants ``k_M``, ``k_c1`` and ``k_c2`` are defined as
suprema without closed forms, so they are estimated as ``safety`` times the
largest ratio seen over random unit quaternions. Ratios are sampled both for
independent pairs and for nearby pairs, since the supremum of a difference
quotient is approached as the pair collapses.

``k_M`` is sampled on the unit sphere only: off the sphere the entries of
``D(z)`` grow quadratically and the literal supremum over R^4 is unbounded.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Mapping

import numpy as np

from quatlag.rigid_dynamics.model import InertiaModel

MIN_SAMPLES = 1000


@dataclass(frozen=True)
class TrajectorySummary:
    """Suprema of the desired quaternion rate and acceleration norms."""

    sup_qd_dot: float
    sup_qd_ddot: float


@dataclass(frozen=True)
class BoundConstants:
    m_bar: float
    m_lower: float
    k_M: float
    k_c1: float
    k_c2: float
    k_h1: float
    k_h2: float
    s1: float
    s2: float
    rho: float
    sup_qd_dot: float
    sup_qd_ddot: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


# Batched operators. Shapes: quaternions (N, 4), J (N, 4, 3).


def jmat_batch(x: np.ndarray) -> np.ndarray:
    x0, x1, x2, x3 = x[:, 0], x[:, 1], x[:, 2], x[:, 3]
    return np.stack(
        [
            np.stack([-x1, -x2, -x3], axis=-1),
            np.stack([x0, -x3, x2], axis=-1),
            np.stack([x3, x0, -x1], axis=-1),
            np.stack([-x2, x1, x0], axis=-1),
        ],
        axis=1,
    )


def skew_batch(u: np.ndarray) -> np.ndarray:
    z = np.zeros(len(u))
    return np.stack(
        [
            np.stack([z, -u[:, 2], u[:, 1]], axis=-1),
            np.stack([u[:, 2], z, -u[:, 0]], axis=-1),
            np.stack([-u[:, 1], u[:, 0], z], axis=-1),
        ],
        axis=1,
    )


def d_matrix_batch(q: np.ndarray, inertia: InertiaModel) -> np.ndarray:
    j = jmat_batch(q)
    return j @ inertia.M @ j.transpose(0, 2, 1) + inertia.m0 * np.einsum("ni,nj->nij", q, q)


def c_matrix_batch(q: np.ndarray, x: np.ndarray, inertia: InertiaModel) -> np.ndarray:
    """Closed-form C(q, x) for each row; linear in ``x`` for any x in R^4."""
    j = jmat_batch(q)
    jt = j.transpose(0, 2, 1)
    w = 2.0 * np.einsum("nij,nj->ni", jt, x)
    s = skew_batch(w @ inertia.M.T)
    return (
        -j @ s @ jt
        + j @ inertia.M @ jmat_batch(x).transpose(0, 2, 1)
        + inertia.m0 * np.einsum("ni,nj->nij", q, x)
    )


def random_unit(rng: np.random.Generator, n: int, dim: int = 4) -> np.ndarray:
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_tangent(rng: np.random.Generator, q: np.ndarray) -> np.ndarray:
    """Unit-norm vectors orthogonal to each row of ``q``."""
    v = rng.standard_normal(q.shape)
    v -= np.sum(v * q, axis=1, keepdims=True) * q
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _pairs(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Half independent pairs, half nearby pairs at log-uniform separations."""
    x = random_unit(rng, n)
    y = random_unit(rng, n)
    near = np.arange(n) % 2 == 1
    eps = 10.0 ** rng.uniform(-5.0, -1.0, size=near.sum())
    y_near = x[near] + eps[:, None] * rng.standard_normal((near.sum(), 4))
    y[near] = y_near / np.linalg.norm(y_near, axis=1, keepdims=True)
    return x, y


def _spec_norm(a: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a, ord=2, axis=(1, 2))


def sample_km_ratios(inertia: InertiaModel, n: int, rng: np.random.Generator) -> np.ndarray:
    x, y = _pairs(rng, n)
    diff = d_matrix_batch(x, inertia) - d_matrix_batch(y, inertia)
    return _spec_norm(diff) / np.linalg.norm(x - y, axis=1)


def sample_kc1_ratios(inertia: InertiaModel, n: int, rng: np.random.Generator) -> np.ndarray:
    q = random_unit(rng, n)
    x = random_unit(rng, n)
    return _spec_norm(c_matrix_batch(q, x, inertia))


def sample_kc2_ratios(inertia: InertiaModel, n: int, rng: np.random.Generator) -> np.ndarray:
    x, y = _pairs(rng, n)
    z = random_unit(rng, n)
    diff = c_matrix_batch(x, z, inertia) - c_matrix_batch(y, z, inertia)
    return _spec_norm(diff) / np.linalg.norm(x - y, axis=1)


def residual_constants(
    k_M: float, k_c1: float, k_c2: float, m_bar: float, rho: float, sup_dot: float, sup_ddot: float
) -> tuple[float, float, float, float]:
    """Return ``(k_h1, k_h2, s1, s2)`` at the smallest admissible values."""
    k_h1 = k_c1 * sup_dot
    s1 = 8.0 * rho + k_M * sup_ddot + k_c2 * sup_dot**2
    s2 = 2.0 * (0.5 * rho + m_bar * sup_ddot + k_c2 * sup_dot**2)
    if s2 == 0.0:
        k_h2 = 0.0
    elif s1 == 0.0:
        k_h2 = s2
    else:
        k_h2 = s2 / np.tanh(s2 / s1)
    return k_h1, float(k_h2), s1, s2


def _summary(traj_summary) -> TrajectorySummary:
    if isinstance(traj_summary, TrajectorySummary):
        return traj_summary
    if isinstance(traj_summary, Mapping):
        return TrajectorySummary(
            float(traj_summary["sup_qd_dot"]), float(traj_summary["sup_qd_ddot"])
        )
    a, b = traj_summary
    return TrajectorySummary(float(a), float(b))


def estimate_bounds(
    inertia: InertiaModel,
    traj_summary,
    rho: float,
    samples: int = 5000,
    seed: int = 0,
    safety: float = 1.5,
) -> BoundConstants:
    """Estimate every bound constant needed by the gain conditions.

    ``m_bar`` and ``m_lower`` are exact. ``k_M``, ``k_c1`` and ``k_c2`` are
    ``safety`` times the largest sampled ratio; the residual-dynamics
    constants follow from them and from the trajectory suprema.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"estimate_bounds needs at least {MIN_SAMPLES} samples, got {samples}")
    ts = _summary(traj_summary)
    rng = np.random.default_rng(seed)
    k_M = safety * float(sample_km_ratios(inertia, samples, rng).max())
    k_c1 = safety * float(sample_kc1_ratios(inertia, samples, rng).max())
    k_c2 = safety * float(sample_kc2_ratios(inertia, samples, rng).max())
    m_bar, m_lower = inertia.m_bar, inertia.m_lower
    k_h1, k_h2, s1, s2 = residual_constants(
        k_M, k_c1, k_c2, m_bar, rho, ts.sup_qd_dot, ts.sup_qd_ddot
    )
    return BoundConstants(
        m_bar=m_bar,
        m_lower=m_lower,
        k_M=k_M,
        k_c1=k_c1,
        k_c2=k_c2,
        k_h1=k_h1,
        k_h2=k_h2,
        s1=s1,
        s2=s2,
        rho=float(rho),
        sup_qd_dot=ts.sup_qd_dot,
        sup_qd_ddot=ts.sup_qd_ddot,
    )
