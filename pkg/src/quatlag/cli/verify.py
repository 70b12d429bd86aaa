"""Seeded numeric checks of the quaternion and rigid-body identities.

Each check returns one :class:`VerifyRow`; the report passes iff every row does.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from quatlag.quatmath import _qmat
from quatlag.rigid_dynamics.bounds import (
    c_matrix_batch,
    d_matrix_batch,
    jmat_batch,
    random_tangent,
    random_unit,
    sample_km_ratios,
)
from quatlag.rigid_dynamics.lagrangian import _c_matrix_product_form, _d_matrix_dot, _lagrangian_accel
from quatlag.rigid_dynamics.model import InertiaModel
from quatlag.rigid_dynamics.regressors import _regressors

MIN_VERIFY_SAMPLES = 100
IDENTITY_TOL = 1e-10
M0_TOL = 1e-9
FAULTS = ("c-sign",)


@dataclass(frozen=True)
class VerifyRow:
    name: str
    samples: int
    max_residual: float
    threshold: float
    passed: bool


@dataclass(frozen=True)
class VerifyReport:
    rows: tuple[VerifyRow, ...]
    seed: int

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    def as_dict(self) -> dict:
        return {"pass": self.passed, "seed": self.seed, "rows": [asdict(r) for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def to_text(self) -> str:
        width = max(len(r.name) for r in self.rows)
        lines = [f"{'property':<{width}}  {'n':>6}  {'max residual':>12}  {'limit':>8}  result"]
        for r in self.rows:
            lines.append(f"{r.name:<{width}}  {r.samples:>6}  {r.max_residual:>12.3e}  "
                         f"{r.threshold:>8.0e}  {'PASS' if r.passed else 'FAIL'}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _row(name: str, n: int, residual, threshold: float) -> VerifyRow:
    r = float(np.max(residual)) if np.size(residual) else 0.0
    return VerifyRow(name, n, r, threshold, bool(r < threshold))


def _qmat_batch(x: np.ndarray) -> np.ndarray:
    return np.concatenate([x[:, :, None], jmat_batch(x)], axis=2)


def _spec_norm(a: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a, ord=2, axis=(1, 2))


def _quaternion_rows(rng: np.random.Generator, n: int) -> list[VerifyRow]:
    x = rng.standard_normal((n, 4))
    y = rng.standard_normal((n, 4))
    jx, jy = jmat_batch(x), jmat_batch(y)
    anti = np.einsum("nji,nj->ni", jx, y) + np.einsum("nji,nj->ni", jy, x)
    rows = [_row("J antisymmetric pairing", n, np.linalg.norm(anti, axis=1), IDENTITY_TOL)]
    rows.append(_row("J norm equals vector norm", n,
                     np.abs(_spec_norm(jx) - np.linalg.norm(x, axis=1)), IDENTITY_TOL))

    xu = random_unit(rng, n)
    yu = random_tangent(rng, xu)
    qx, qy = _qmat_batch(xu), _qmat_batch(yu)
    sym = qy @ qx.transpose(0, 2, 1) + qx @ qy.transpose(0, 2, 1)
    rows.append(_row("Q cross term vanishes when orthogonal", n, _spec_norm(sym), IDENTITY_TOL))

    # Non-orthogonal pairs: the cross term must not vanish; score the shortfall.
    zu = random_unit(rng, n)
    dots = np.einsum("ni,ni->n", xu, zu)
    keep = np.abs(dots) > 1e-3
    qz = _qmat_batch(zu[keep])
    qk = qx[keep]
    cross = _spec_norm(qz @ qk.transpose(0, 2, 1) + qk @ qz.transpose(0, 2, 1))
    rows.append(_row("Q cross term non-degenerate", int(keep.sum()),
                     np.maximum(np.abs(dots[keep]) - cross, 0.0), IDENTITY_TOL))

    a, b = rng.standard_normal(n), rng.standard_normal(n)
    lin = (_qmat_batch(a[:, None] * x + b[:, None] * y)
           - a[:, None, None] * _qmat_batch(x) - b[:, None, None] * _qmat_batch(y))
    scale = 1.0 + np.abs(a) * np.linalg.norm(x, axis=1) + np.abs(b) * np.linalg.norm(y, axis=1)
    rows.append(_row("Q linear", n, _spec_norm(lin) / scale, IDENTITY_TOL))

    # Q(x + h xdot) - Q(x) - h Q(xdot) is zero for any step h because Q is linear.
    hs = 10.0 ** rng.uniform(-6.0, 0.0, n)
    xdot = rng.standard_normal((n, 4))
    comm = (_qmat_batch(x + hs[:, None] * xdot) - _qmat_batch(x)
            - hs[:, None, None] * _qmat_batch(xdot))
    rows.append(_row("Q commutes with differentiation", n, _spec_norm(comm), IDENTITY_TOL))

    # Spot check that the compiled kernel agrees with the batched one.
    kern = max(np.max(np.abs(_qmat(xu[i]) - qx[i])) for i in range(min(n, 50)))
    rows.append(_row("Q kernel matches batch form", min(n, 50), kern, IDENTITY_TOL))
    return rows


def _dynamics_rows(rng: np.random.Generator, n: int, inertia: InertiaModel,
                   fault: str | None) -> list[VerifyRow]:
    c_sign = -1.0 if fault == "c-sign" else 1.0
    M, M_inv, m0 = inertia.M, inertia.M_inv, inertia.m0
    q = random_unit(rng, n)
    qdot = random_tangent(rng, q) * rng.uniform(0.1, 2.0, (n, 1))
    x = rng.standard_normal((n, 4))

    d = d_matrix_batch(q, inertia)
    eig = np.linalg.eigvalsh(d)
    slack = np.maximum(np.maximum(inertia.m_lower - eig[:, 0], eig[:, -1] - inertia.m_bar), 0.0)
    rows = [_row("D eigenvalues within bounds", n, slack, IDENTITY_TOL)]

    c = c_sign * c_matrix_batch(q, qdot, inertia)
    d_dot = np.stack([_d_matrix_dot(q[i], qdot[i], M, m0) for i in range(n)])
    skew_form = np.einsum("ni,nij,nj->n", x, d_dot - 2.0 * c, x)
    rows.append(_row("x^T (Ddot - 2C) x vanishes", n, np.abs(skew_form), IDENTITY_TOL))
    rows.append(_row("Ddot equals C + C^T", n,
                     _spec_norm(d_dot - c - c.transpose(0, 2, 1)), IDENTITY_TOL))

    product = np.stack([_c_matrix_product_form(q[i], qdot[i], M, m0) for i in range(n)])
    rows.append(_row("C closed form matches product form", n, _spec_norm(c - product),
                     IDENTITY_TOL))

    # Lipschitz bound of D, with the constant fitted on an independent stream.
    k_m = 1.5 * float(sample_km_ratios(inertia, max(n, 1000), np.random.default_rng(
        int(rng.integers(2**31)))).max())
    ratios = sample_km_ratios(inertia, n, rng)
    rows.append(_row("D Lipschitz bound", n, np.maximum(ratios - k_m, 0.0), IDENTITY_TOL))

    # Linear parametrization on consistent (q, qdot, qddot) triples.
    theta = inertia.theta
    tau = rng.standard_normal((n, 3))
    tau_bar = 0.5 * np.einsum("nij,nj->ni", jmat_batch(q), tau)
    lp = np.empty(n)
    m0_res = np.empty(n)
    for i in range(n):
        qdd = _lagrangian_accel(q[i], qdot[i], tau_bar[i], M, M_inv, m0)
        y0, y = _regressors(q[i], qdot[i], qdd)
        lhs = d[i] @ qdd + c[i] @ qdot[i]
        lp[i] = np.linalg.norm(lhs - (y0 * m0 + y @ theta))
        acc = [_lagrangian_accel(q[i], qdot[i], tau_bar[i], M, M_inv, mm)
               for mm in (0.1, 1.0, 10.0)]
        m0_res[i] = max(np.max(np.abs(acc[1] - acc[0])), np.max(np.abs(acc[2] - acc[0])))
    rows.append(_row("linear parametrization residual", n, lp, IDENTITY_TOL))
    rows.append(_row("acceleration independent of m0", n, m0_res, M0_TOL))
    return rows


def run_verify(samples: int = 1000, seed: int = 0, inertia: InertiaModel | None = None,
               fault: str | None = None) -> VerifyReport:
    """Run every identity check on ``samples`` seeded draws.

    ``fault`` corrupts one operator on purpose so tests can confirm the
    suite notices; ``"c-sign"`` flips the sign of C.
    """
    if samples < MIN_VERIFY_SAMPLES:
        raise ValueError(f"samples must be at least {MIN_VERIFY_SAMPLES}, got {samples}")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    inertia = InertiaModel.reference() if inertia is None else inertia
    rng = np.random.default_rng(seed)
    rows = _quaternion_rows(rng, samples) + _dynamics_rows(rng, samples, inertia, fault)
    return VerifyReport(tuple(rows), seed)
