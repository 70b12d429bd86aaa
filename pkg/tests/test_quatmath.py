from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import hamilton
from quatlag.errors import DegenerateQuaternion
from quatlag.quatmath import (
    UnitQuaternion,
    geodesic_angle,
    jmat,
    normalize,
    qmat,
    quat_error,
    rotation_matrix,
    skew,
)

finite = st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False)
vec4 = arrays(np.float64, 4, elements=finite)
vec3 = arrays(np.float64, 3, elements=finite)


def conj(q):
    return np.array([q[0], -q[1], -q[2], -q[3]])


def unit(v):
    n = np.linalg.norm(v)
    return None if n < 1e-3 else v / n


# -- oracles: the matrices against the component quaternion product ----------


@given(vec4, vec4)
def test_qmat_is_left_product(x, y):
    assert np.allclose(qmat(x) @ y, hamilton(x, y), atol=1e-12)


@given(vec4, vec3)
def test_jmat_is_product_with_pure_quaternion(x, w):
    assert np.allclose(jmat(x) @ w, hamilton(x, np.concatenate([[0.0], w])), atol=1e-12)


def test_jmat_layout():
    j = jmat([1.0, 2.0, 3.0, 4.0])
    expected = np.array([[-2, -3, -4], [1, -4, 3], [4, 1, -2], [-3, 2, 1]], dtype=float)
    assert np.array_equal(j, expected)
    assert np.array_equal(qmat([1.0, 2.0, 3.0, 4.0])[:, 0], [1.0, 2.0, 3.0, 4.0])


@given(vec3, vec3)
def test_skew_is_cross_product(u, v):
    assert np.allclose(skew(u) @ v, np.cross(u, v), atol=1e-12)
    assert np.array_equal(skew(u), -skew(u).T)


# -- algebraic identities (property tests) ------------------------------------


@given(vec4, vec4)
def test_j_antisymmetric_pairing(x, y):
    assert np.linalg.norm(jmat(x).T @ y + jmat(y).T @ x) < 1e-10


@given(vec4)
def test_j_columns_orthogonal_with_norm_of_x(x):
    j = jmat(x)
    assert np.allclose(j.T @ j, (x @ x) * np.eye(3), atol=1e-10)
    assert np.allclose(j.T @ x, 0.0, atol=1e-10)
    assert abs(np.linalg.norm(j, 2) - np.linalg.norm(x)) < 1e-10


@given(vec4, vec4)
def test_q_cross_term_closed_form(x, y):
    sym = qmat(y) @ qmat(x).T + qmat(x) @ qmat(y).T
    assert np.allclose(sym, 2.0 * (x @ y) * np.eye(4), atol=1e-9)


@given(vec4, vec4)
def test_q_cross_term_vanishes_for_orthogonal_units(x, y):
    xu = unit(x)
    if xu is None:
        return
    yu = unit(y - (y @ xu) * xu)
    if yu is None:
        return
    sym = qmat(yu) @ qmat(xu).T + qmat(xu) @ qmat(yu).T
    assert np.linalg.norm(sym, 2) < 1e-10


@given(vec4, vec4, finite, finite)
def test_q_is_linear(x, y, a, b):
    assert np.allclose(qmat(a * x + b * y), a * qmat(x) + b * qmat(y), atol=1e-9)


# -- unit quaternion value type ------------------------------------------------


def test_unit_quaternion_renormalizes_small_drift():
    q = UnitQuaternion([1.0 + 1e-6, 0.0, 0.0, 0.0])
    assert q.q0 == 1.0
    raw = np.array([1.0 + 1e-12, 0.0, 0.0, 0.0])
    assert UnitQuaternion(raw).q0 == raw[0]


@pytest.mark.parametrize("bad", [[1.01, 0, 0, 0], [0, 0, 0, 0], [np.nan, 0, 0, 0], [2, 0, 0, 0]])
def test_unit_quaternion_rejects_far_from_sphere(bad):
    with pytest.raises(DegenerateQuaternion):
        UnitQuaternion(bad)


def test_unit_quaternion_shape_and_immutability():
    with pytest.raises(ValueError):
        UnitQuaternion([1.0, 0.0, 0.0])
    q = UnitQuaternion.identity()
    with pytest.raises(ValueError):
        q.array[0] = 2.0
    assert (-q).q0 == -1.0
    assert q == UnitQuaternion([1, 0, 0, 0]) and hash(q) == hash(UnitQuaternion([1, 0, 0, 0]))


def test_normalize():
    assert np.allclose(normalize([0.0, 3.0, 0.0, 4.0]).array, [0.0, 0.6, 0.0, 0.8])
    with pytest.raises(DegenerateQuaternion):
        normalize([0.0, 0.0, 0.0, 1e-13])


# -- attitude helpers ----------------------------------------------------------


@given(vec4, vec4)
def test_quat_error_is_conjugate_product(a, b):
    qa, qb = unit(a), unit(b)
    if qa is None or qb is None:
        return
    assert np.allclose(quat_error(qa, qb), hamilton(conj(qa), qb), atol=1e-12)
    assert np.allclose(quat_error(qa, qa), [1.0, 0.0, 0.0, 0.0], atol=1e-12)


@given(vec4, vec3)
def test_rotation_matrix_matches_sandwich_product(a, v):
    q = unit(a)
    if q is None:
        return
    rotated = hamilton(hamilton(q, np.concatenate([[0.0], v])), conj(q))[1:]
    r = rotation_matrix(q)
    assert np.allclose(r @ v, rotated, atol=1e-9)
    assert np.allclose(r.T @ r, np.eye(3), atol=1e-12)
    assert np.allclose(rotation_matrix(-q), r, atol=1e-15)


@settings(max_examples=50)
@given(st.floats(0.0, np.pi), vec3)
def test_geodesic_angle_of_axis_angle(angle, axis):
    n = axis / np.linalg.norm(axis) if np.linalg.norm(axis) > 1e-3 else np.array([1.0, 0, 0])
    q = np.concatenate([[np.cos(angle / 2)], np.sin(angle / 2) * n])
    ident = [1.0, 0.0, 0.0, 0.0]
    assert geodesic_angle(ident, q) == pytest.approx(angle, abs=1e-7)
    assert geodesic_angle(ident, -q) == pytest.approx(angle, abs=1e-7)
