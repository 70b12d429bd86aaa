from __future__ import annotations

import json
from functools import lru_cache

import numpy as np
import pytest
from hypothesis import settings

from quatlag.rigid_dynamics import InertiaModel
from quatlag.simulation import preset, run

# Compiled kernels load on first call, which would trip per-example deadlines.
settings.register_profile("quatlag", deadline=None, max_examples=100)
settings.load_profile("quatlag")


@lru_cache(maxsize=None)
def _cached(name: str, items: str):
    return run(preset(name, **json.loads(items)))


def run_preset(name: str, **overrides):
    """Run a preset once per session for each distinct override set."""
    return _cached(name, json.dumps(overrides, sort_keys=True))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def inertia():
    return InertiaModel.reference()


def random_unit(rng, n=None):
    v = rng.standard_normal(4 if n is None else (n, 4))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_tangent(rng, q, scale=1.0):
    v = rng.standard_normal(4)
    v -= (v @ q) * q
    return scale * v


def random_spd3(rng):
    a = rng.standard_normal((3, 3))
    return a @ a.T + 3.0 * np.eye(3)


def hamilton(a, b):
    """Scalar-first quaternion product, written out from the component formula."""
    a0, av = a[0], np.asarray(a[1:])
    b0, bv = b[0], np.asarray(b[1:])
    return np.concatenate([[a0 * b0 - av @ bv], a0 * bv + b0 * av + np.cross(av, bv)])
