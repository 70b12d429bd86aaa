"""Unit-quaternion algebra and the J(.)/Q(.) matrix machinery.

Quaternions are scalar-first 4-vectors ``[q0, q1, q2, q3]``. For any
``x = [x0, xv]`` in R^4::

    J(x) = [   -xv^T        ]      Q(x) = [x  J(x)]
           [ x0*I3 + S(xv)  ]

``J`` is 4x3 and linear in ``x``; ``Q`` is 4x4, linear in ``x``, and a
rotation of R^4 whenever ``x`` is a unit quaternion.

The ``_``-prefixed functions are numba kernels shared with the simulation
engine. They take float64 arrays and do no validation.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from quatlag.errors import DegenerateQuaternion

UNIT_TOL = 1e-9
RENORM_LIMIT = 1e-3
ZERO_NORM = 1e-12


@njit(cache=True)
def _skew(u):
    s = np.zeros((3, 3))
    s[0, 1] = -u[2]
    s[0, 2] = u[1]
    s[1, 0] = u[2]
    s[1, 2] = -u[0]
    s[2, 0] = -u[1]
    s[2, 1] = u[0]
    return s


@njit(cache=True)
def _jmat(x):
    j = np.empty((4, 3))
    j[0, 0] = -x[1]
    j[0, 1] = -x[2]
    j[0, 2] = -x[3]
    j[1, 0] = x[0]
    j[1, 1] = -x[3]
    j[1, 2] = x[2]
    j[2, 0] = x[3]
    j[2, 1] = x[0]
    j[2, 2] = -x[1]
    j[3, 0] = -x[2]
    j[3, 1] = x[1]
    j[3, 2] = x[0]
    return j


@njit(cache=True)
def _mv(a, x):
    """``a @ x`` by explicit loops; avoids BLAS call overhead on tiny operands."""
    n, m = a.shape
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for k in range(m):
            acc += a[i, k] * x[k]
        out[i] = acc
    return out


@njit(cache=True)
def _mtv(a, x):
    """``a.T @ x`` by explicit loops."""
    n, m = a.shape
    out = np.zeros(m)
    for i in range(n):
        xi = x[i]
        for k in range(m):
            out[k] += a[i, k] * xi
    return out


@njit(cache=True)
def _mm(a, b):
    """``a @ b`` by explicit loops."""
    n, m = a.shape
    p = b.shape[1]
    out = np.zeros((n, p))
    for i in range(n):
        for k in range(m):
            aik = a[i, k]
            if aik != 0.0:
                for j in range(p):
                    out[i, j] += aik * b[k, j]
    return out


@njit(cache=True)
def _jv(x, w):
    """``J(x) @ w`` without forming J."""
    out = np.empty(4)
    out[0] = -x[1] * w[0] - x[2] * w[1] - x[3] * w[2]
    out[1] = x[0] * w[0] - x[3] * w[1] + x[2] * w[2]
    out[2] = x[3] * w[0] + x[0] * w[1] - x[1] * w[2]
    out[3] = -x[2] * w[0] + x[1] * w[1] + x[0] * w[2]
    return out


@njit(cache=True)
def _jtv(x, v):
    """``J(x).T @ v`` without forming J."""
    out = np.empty(3)
    out[0] = -x[1] * v[0] + x[0] * v[1] + x[3] * v[2] - x[2] * v[3]
    out[1] = -x[2] * v[0] - x[3] * v[1] + x[0] * v[2] + x[1] * v[3]
    out[2] = -x[3] * v[0] + x[2] * v[1] - x[1] * v[2] + x[0] * v[3]
    return out


@njit(cache=True)
def _qmat(x):
    m = np.empty((4, 4))
    m[:, 0] = x
    m[:, 1:] = _jmat(x)
    return m


@njit(cache=True)
def _cross(a, b):
    c = np.empty(3)
    c[0] = a[1] * b[2] - a[2] * b[1]
    c[1] = a[2] * b[0] - a[0] * b[2]
    c[2] = a[0] * b[1] - a[1] * b[0]
    return c


@njit(cache=True)
def _normalize(x):
    return x / np.sqrt(np.dot(x, x))


def _vec(x, n: int) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.shape != (n,):
        raise ValueError(f"expected a vector of length {n}, got shape {a.shape}")
    return a


class UnitQuaternion:
    """An attitude on the unit 3-sphere, stored scalar-first.

    Construction accepts any 4-vector whose norm is within ``1e-3`` of one;
    small drift (above ``1e-9``) is renormalized silently, anything larger is
    rejected because it signals a logic error rather than integrator drift.
    Use :func:`normalize` for arbitrary nonzero vectors.
    """

    __slots__ = ("_a",)

    def __init__(self, values) -> None:
        a = np.array(values, dtype=np.float64).reshape(-1)
        if a.shape != (4,):
            raise ValueError(f"a quaternion has 4 components, got {a.shape[0]}")
        if not np.all(np.isfinite(a)):
            raise DegenerateQuaternion("quaternion has non-finite entries")
        n = float(np.linalg.norm(a))
        if abs(n - 1.0) > RENORM_LIMIT:
            raise DegenerateQuaternion(
                f"norm {n:.6g} is too far from 1 to be a unit quaternion; use normalize()"
            )
        if abs(n - 1.0) > UNIT_TOL:
            a = a / n
        a.setflags(write=False)
        self._a = a

    @property
    def q0(self) -> float:
        return float(self._a[0])

    @property
    def qv(self) -> np.ndarray:
        return self._a[1:]

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a.copy()
        return self._a.astype(dtype)

    def __neg__(self) -> UnitQuaternion:
        return UnitQuaternion(-self._a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnitQuaternion):
            return NotImplemented
        return bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash(self._a.tobytes())

    def __repr__(self) -> str:
        return f"UnitQuaternion({self._a.tolist()})"

    @classmethod
    def identity(cls) -> UnitQuaternion:
        return cls([1.0, 0.0, 0.0, 0.0])


def as_quat_array(q) -> np.ndarray:
    """Return a float64 4-vector from a UnitQuaternion or array-like."""
    if isinstance(q, UnitQuaternion):
        return q.array
    return _vec(q, 4)


def skew(u) -> np.ndarray:
    """Cross-product matrix: ``skew(u) @ v == np.cross(u, v)``."""
    return _skew(_vec(u, 3))


def jmat(x) -> np.ndarray:
    """The 4x3 matrix J(x); defined for any 4-vector, not only unit ones."""
    return _jmat(as_quat_array(x))


def qmat(x) -> np.ndarray:
    """The 4x4 matrix Q(x) = [x J(x)]."""
    return _qmat(as_quat_array(x))


def normalize(x) -> UnitQuaternion:
    """Scale a nonzero 4-vector onto the unit sphere.

    Raises:
        DegenerateQuaternion: if ``||x|| <= 1e-12``.
    """
    a = as_quat_array(x)
    n = float(np.linalg.norm(a))
    if not np.isfinite(n) or n <= ZERO_NORM:
        raise DegenerateQuaternion(f"cannot normalize a 4-vector of norm {n:.3g}")
    return UnitQuaternion(a / n)


def quat_error(qd, q) -> np.ndarray:
    """Quaternion error ``eps = Q(qd)^T q``; ``eps == [1, 0, 0, 0]`` when q == qd."""
    return _qmat(as_quat_array(qd)).T @ as_quat_array(q)


def rotation_matrix(q) -> np.ndarray:
    """Rodrigues formula ``R(q) = I + 2 q0 S(qv) + 2 S(qv)^2``; R(q) == R(-q)."""
    a = as_quat_array(q)
    s = _skew(a[1:])
    return np.eye(3) + 2.0 * a[0] * s + 2.0 * s @ s


def geodesic_angle(qa, qb) -> float:
    """Physical rotation angle in [0, pi] between two attitudes (sign-agnostic)."""
    c = abs(float(np.dot(as_quat_array(qa), as_quat_array(qb))))
    return 2.0 * float(np.arccos(min(1.0, c)))
