from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_unit, run_preset
from quatlag.errors import ConfigError, EmptyRecords, NumericalDivergence
from quatlag.quatmath import jmat
from quatlag.rigid_dynamics import InertiaModel
from quatlag.simulation import (
    CSV_COLUMNS,
    PRESETS,
    DesiredTrajectory,
    DisturbanceModel,
    NoiseModel,
    ScenarioConfig,
    TrajectorySpec,
    convergence_time,
    csv_text,
    disturbance,
    disturbance_path,
    energy,
    gen_desired,
    measure,
    metrics,
    noise_draws,
    preset,
    run,
    theta_true,
)

# -- desired paths -------------------------------------------------------------


@pytest.mark.parametrize("spec", [
    TrajectorySpec("sinusoid", amplitude=0.1, frequency=0.2 * np.pi),
    TrajectorySpec("constant_omega", qd0=[0.0, 0.6, 0.0, 0.8], omega_d0=[0.3, -0.1, 0.2]),
])
def test_desired_path_is_consistent(spec):
    traj = DesiredTrajectory(spec, horizon=12.0, dt_internal=1e-3)
    step = 1e-4
    for t in (0.0123, 4.5, 11.0):
        p = traj.point(t)
        assert np.linalg.norm(p.qd.array) == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(p.qd_dot, 0.5 * jmat(p.qd.array) @ p.omega_d, atol=1e-12)
        fd = (traj.point(t + step).qd.array - traj.point(t - step).qd.array) / (2 * step)
        assert np.allclose(fd, p.qd_dot, atol=1e-7)
        fd2 = (traj.point(t + step).qd_dot - traj.point(t - step).qd_dot) / (2 * step)
        assert np.allclose(fd2, p.qd_ddot, atol=1e-7)


def test_constant_rate_path_matches_closed_form():
    w = np.array([0.0, 0.0, 0.4])
    spec = TrajectorySpec("constant_omega", omega_d0=w)
    t = 7.3
    p = gen_desired(spec, t, 1e-3)
    expected = np.array([np.cos(0.2 * t), 0.0, 0.0, np.sin(0.2 * t)])
    assert np.allclose(p.qd.array, expected, atol=1e-11)


def test_sinusoid_rate():
    spec = TrajectorySpec("sinusoid", amplitude=0.1, frequency=2.0)
    traj = DesiredTrajectory(spec, 5.0, 1e-3)
    w, wd, wdd = traj.omega(0.7)
    assert np.allclose(w, 0.1 * np.sin(1.4) * np.ones(3))
    assert np.allclose(wd, 0.2 * np.cos(1.4) * np.ones(3))
    assert np.allclose(wdd, -0.4 * np.sin(1.4) * np.ones(3))


def test_trajectory_validation():
    with pytest.raises(ConfigError):
        TrajectorySpec("spiral")
    with pytest.raises(ConfigError):
        DesiredTrajectory(TrajectorySpec(), 1.0, 0.0)
    with pytest.raises(ValueError):
        DesiredTrajectory(TrajectorySpec(), 1.0, 1e-3).point(-1.0)


# -- perturbations -------------------------------------------------------------


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 0.5))
def test_measurement_noise_is_bounded(seed, n_max):
    rng = np.random.default_rng(seed)
    q = random_unit(rng)
    noise = NoiseModel(n_max, seed=seed % 1000)
    got = measure(q, noise, rng).array
    assert np.linalg.norm(got) == pytest.approx(1.0, abs=1e-12)
    # q + n v lies within angle arcsin(n) of q, so the chord is at most 2 sin(arcsin(n) / 2).
    assert np.linalg.norm(got - q) <= 2 * np.sin(0.5 * np.arcsin(n_max)) + 1e-12


def test_zero_noise_is_exact(rng):
    q = random_unit(rng)
    assert np.array_equal(measure(q, NoiseModel(0.0)).array, q)
    n, v = noise_draws(NoiseModel(0.0), 5)
    assert not n.any() and not v.any()


def test_noise_draws_are_seeded():
    a = noise_draws(NoiseModel(0.1, seed=4), 100)
    b = noise_draws(NoiseModel(0.1, seed=4), 100)
    c = noise_draws(NoiseModel(0.1, seed=5), 100)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not np.array_equal(a[0], c[0])
    assert np.all((a[0] >= 0.0) & (a[0] <= 0.1))
    assert np.allclose(np.linalg.norm(a[1], axis=1), 1.0)


def test_random_walk_statistics():
    model = DisturbanceModel("random_walk", np.array([0.2, -0.1, -0.05]), np.sqrt(0.2), seed=3)
    dt = 1e-2
    path = disturbance_path(model, 200_000, dt)
    assert np.array_equal(path[0], model.p0)
    steps = np.diff(path, axis=0) / dt
    assert np.allclose(steps.mean(axis=0), 0.0, atol=0.01)
    assert np.allclose(steps.std(axis=0), np.sqrt(0.2), rtol=0.01)
    assert np.array_equal(disturbance(model, 0.55, dt), path[55])


def test_constant_and_absent_disturbance():
    p0 = np.array([0.2, -0.1, -0.05])
    assert np.array_equal(disturbance_path(DisturbanceModel("constant", p0), 10, 0.1)[-1], p0)
    assert not disturbance_path(DisturbanceModel("none", p0), 10, 0.1).any()
    with pytest.raises(ConfigError):
        DisturbanceModel("gusty")
    with pytest.raises(ConfigError):
        NoiseModel(-0.1)


# -- configuration -------------------------------------------------------------


@pytest.mark.parametrize("name", list(PRESETS))
def test_preset_round_trip(name, tmp_path):
    cfg = preset(name)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ScenarioConfig.from_json(path) == cfg


@pytest.mark.parametrize("changes", [
    {"controller": "pid"}, {"delta": -0.1}, {"dt": 0.0}, {"horizon": -1.0},
    {"output_decimation": 0}, {"seed": -1}, {"h0": 0}, {"M": [[1, 2], [3, 4]]},
    {"M": [1.0, -1.0, 1.0]}, {"q0": [0, 0, 0, 0]}, {"omega0": [1.0]}, {"Ks": -1.0},
    {"plant_form": "hamiltonian"}, {"theta_hat0": [0.0] * 8}, {"dist_kind": "gusty"},
])
def test_invalid_configs_are_rejected(changes):
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict(changes)


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="unknown config keys: bogus"):
        ScenarioConfig.from_dict({"bogus": 1})
    with pytest.raises(ConfigError):
        preset("9.9")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        ScenarioConfig.from_json(bad)
    with pytest.raises(ConfigError):
        ScenarioConfig.from_json(tmp_path / "missing.json")


def test_default_lyapunov_weight_is_admissible():
    assert preset("1.1").lyapunov_alpha() == pytest.approx(0.2)
    assert preset("1.1", alpha=0.05).lyapunov_alpha() == 0.05


# -- runs ----------------------------------------------------------------------


def test_runs_are_deterministic_and_seed_sensitive():
    a = run(preset("1.2", horizon=5.0, seed=11))
    b = run(preset("1.2", horizon=5.0, seed=11))
    c = run(preset("1.2", horizon=5.0, seed=12))
    assert csv_text(a) == csv_text(b)
    assert csv_text(a) != csv_text(c)


@pytest.mark.parametrize("name", ["1.1", "2.3", "2.1-sf"])
def test_attitude_stays_on_sphere(name):
    r = run_preset(name, horizon=20.0)
    assert np.abs(np.linalg.norm(r.q, axis=1) - 1.0).max() < 1e-9


def test_record_layout_and_jump_log():
    r = run_preset("1.1", output_decimation=1, horizon=5.0)
    assert len(r) == 5001
    assert r.t[0] == 0.0 and r.t[-1] == pytest.approx(5.0)
    rec = r[100]
    assert rec.t == pytest.approx(0.1) and rec.q.shape == (4,) and rec.h in (-1, 1)
    assert len(r[:3]) == 3
    jumps = r.jumps
    assert len(jumps) == 1
    j = jumps[0]
    assert j.h == -1 and j.V_after < j.V_before
    # The mode flips in the records right at the logged time.
    h = r.column("h")
    k = int(np.argmax(h != h[0]))
    assert r.t[k] == pytest.approx(j.t)
    assert metrics(r)["jump_count"] == 1


def test_jump_at_start_is_counted():
    r = run_preset("1.1", delta=0.0, horizon=2.0)
    assert r.jump_table[0, 0] == 0.0
    assert r.column("h")[0] == -1
    assert metrics(r)["jump_count"] == len(r.jump_table)


def test_mode_is_fixed_without_hybrid_logic():
    r = run_preset("1.1", controller="continuous", horizon=20.0)
    assert len(r.jump_table) == 0 and np.all(r.column("h") == 1)


def test_free_body_conserves_energy_and_momentum_norm():
    cfg = ScenarioConfig(controller="free", q0=[1.0, 0, 0, 0], omega0=[0.4, -1.0, 0.7],
                         horizon=20.0)
    r = run(cfg)
    M = cfg.inertia().M
    w = r.omega
    kinetic = 0.5 * np.einsum("ij,jk,ik->i", w, M, w)
    momentum = np.linalg.norm(w @ M, axis=1)
    assert np.ptp(kinetic) < 1e-9 * kinetic[0]
    assert np.ptp(momentum) < 1e-9 * momentum[0]
    assert not r.tau.any()


def test_divergence_carries_partial_result():
    with pytest.raises(NumericalDivergence) as info:
        run(preset("1.1", Ks=1e5, dt=0.1, horizon=50.0))
    partial = info.value.partial
    assert partial is not None and len(partial) >= 1


def test_true_parameters():
    cfg = preset("2.4", horizon=2.0)
    th0 = theta_true(cfg)
    M = cfg.inertia().M
    assert np.allclose(th0[:6], [M[0, 0], M[1, 1], M[2, 2], 0.0, 0.0, 0.0])
    assert np.allclose(th0[6:], cfg.p0)
    assert not np.allclose(theta_true(cfg, 1.0)[6:], cfg.p0)


# -- metrics -------------------------------------------------------------------


def test_energy_quadrature():
    t = np.linspace(0.0, 2.0, 2001)
    tau = np.stack([np.ones_like(t), t, np.zeros_like(t)], axis=1)
    # integral of 1 + t^2 over [0, 2] is 2 + 8/3
    assert energy(t, tau) == pytest.approx(np.sqrt(2 + 8 / 3), rel=1e-6)
    assert energy(t[:1], tau[:1]) == 0.0


def test_convergence_time():
    t = np.arange(6.0)
    assert convergence_time(t, np.array([1, 0.01, 1, 0.01, 0.01, 0.01]), 0.02) == 3.0
    assert convergence_time(t, np.full(6, 0.01), 0.02) == 0.0
    assert convergence_time(t, np.array([0.01] * 5 + [1.0]), 0.02) is None


def test_metrics_accept_record_lists():
    r = run_preset("1.1", horizon=10.0)
    a = metrics(r)
    b = metrics(list(r))
    assert a["energy_final"] == pytest.approx(b["energy_final"])
    assert a["convergence_time"] == b["convergence_time"]
    assert b["jump_count"] == 1
    assert set(a) >= {"energy_final", "convergence_time", "jump_count", "unwinding_flag"}
    with pytest.raises(EmptyRecords):
        metrics([])


def test_csv_format():
    r = run_preset("1.1", horizon=1.0)
    lines = csv_text(r).splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert len(lines) == len(r) + 1
    row = np.array(lines[50].split(","), dtype=float)
    idx = [list(CSV_COLUMNS).index(c) for c in ("q0", "q1", "q2", "q3")]
    # 17 significant digits round-trip float64 exactly.
    assert np.array_equal(row[idx], r.q[49])


def test_inertia_model_validation():
    with pytest.raises(ConfigError):
        InertiaModel(np.eye(2))
    with pytest.raises(ConfigError):
        InertiaModel(np.array([[1.0, 0.5, 0], [0, 1, 0], [0, 0, 1]]))
    with pytest.raises(ConfigError):
        InertiaModel(-np.eye(3))
    with pytest.raises(ConfigError):
        InertiaModel(np.eye(3), m0=0.0)
