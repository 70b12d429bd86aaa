"""``quatlag`` command line: run, verify, check-gains, sweep.

Exit codes: 0 success, 1 failed check, 2 usage or configuration error,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields
from pathlib import Path

import numpy as np

from quatlag.cli.verify import FAULTS, MIN_VERIFY_SAMPLES, run_verify
from quatlag.controllers.analysis import check_gains_theorem2, check_gains_theorem3
from quatlag.errors import ConfigError, NumericalDivergence
from quatlag.rigid_dynamics.bounds import TrajectorySummary, estimate_bounds
from quatlag.simulation import (
    PRESETS,
    ScenarioConfig,
    csv_text,
    metrics,
    metrics_path,
    preset,
    run,
    write_metrics,
)
from quatlag.simulation.perturbations import disturbance_path
from quatlag.simulation.trajectory import DesiredTrajectory

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DIVERGED = 3

METRIC_KEYS = ("energy_final", "convergence_time", "jump_count", "unwinding_flag")
AGGREGATE_KEYS = ("energy_final", "convergence_time", "jump_count")

# Config fields a sweep may address: plain numbers, plus gains that accept a scalar.
_SCALAR_GAINS = {"Lambda", "Ks", "Kd", "Kf"}
_INT_FIELDS = {"h0", "output_decimation"}


def _err(msg: str) -> None:
    print(f"quatlag: error: {msg}", file=sys.stderr)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _overrides(pairs: list[str] | None) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = _parse_value(value)
    return out


def load_config(args) -> ScenarioConfig:
    """Resolve ``--preset``/``--config`` plus ``--set`` and ``--seed`` overrides."""
    if (args.preset is None) == (args.config is None):
        raise ConfigError("give exactly one of --preset or --config")
    extra = _overrides(getattr(args, "set", None))
    if getattr(args, "seed", None) is not None:
        extra["seed"] = args.seed
    if args.preset is not None:
        return preset(args.preset, **extra)
    cfg = ScenarioConfig.from_json(args.config)
    return ScenarioConfig.from_dict({**cfg.to_dict(), **extra}) if extra else cfg


def _summary(result) -> dict:
    m = metrics(result, omega_d=result.omega_d)
    m["energy_full"] = result.energy_full
    m["jump_times"] = [float(t) for t in result.jump_table[:, 0]]
    return m


def _execute(cfg: ScenarioConfig, out: Path) -> tuple[int, dict]:
    """Run one scenario and write its CSV and metrics sidecar."""
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        result = run(cfg)
        code = EXIT_OK
        summary = _summary(result)
    except NumericalDivergence as exc:
        result = exc.partial
        code = EXIT_DIVERGED
        summary = {"diverged": True, "message": str(exc)}
    if result is not None and len(result):
        out.write_text(csv_text(result))
    summary["seed"] = cfg.seed
    write_metrics(summary, metrics_path(out))
    return code, summary


# ---------------------------------------------------------------- run


def cmd_run(args) -> int:
    try:
        cfg = load_config(args)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.dump_config:
        Path(args.dump_config).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
    out = Path(args.out)
    code, summary = _execute(cfg, out)
    if code == EXIT_DIVERGED:
        _err(summary["message"])
        return code
    print(json.dumps({k: summary[k] for k in METRIC_KEYS}, indent=2))
    print(f"wrote {out} and {metrics_path(out)}")
    return EXIT_OK


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    if args.samples < MIN_VERIFY_SAMPLES:
        _err(f"--samples must be at least {MIN_VERIFY_SAMPLES}")
        return EXIT_USAGE
    report = run_verify(args.samples, args.seed, fault=args.fault)
    print(report.to_json() if args.json else report.to_text())
    return EXIT_OK if report.passed else EXIT_FAIL


# ---------------------------------------------------------------- check-gains


def gain_report(cfg: ScenarioConfig, samples: int = 5000, seed: int = 0) -> dict:
    """Sampled bound constants and the sufficient gain condition of an adaptive law."""
    if cfg.controller not in ("adaptive_sf", "adaptive_of"):
        raise ConfigError(f"check-gains needs an adaptive controller, got {cfg.controller!r}")
    traj = DesiredTrajectory(cfg.trajectory(), cfg.n_steps * cfg.dt, 0.5 * cfg.dt)
    summary = TrajectorySummary(float(np.linalg.norm(traj.qd_dot, axis=1).max()),
                                float(np.linalg.norm(traj.qd_ddot, axis=1).max()))
    # The disturbance bound is the largest norm of this seed's realized path.
    rho = float(np.linalg.norm(disturbance_path(cfg.disturbance(), cfg.n_steps, cfg.dt),
                               axis=1).max())
    bounds = estimate_bounds(cfg.inertia(), summary, rho, samples=samples, seed=seed)
    if cfg.controller == "adaptive_sf":
        check = check_gains_theorem2(cfg.gains(), bounds)
        condition = "lambda_min(Kd) > (alpha1 + alpha2)^2 / (4 kp) + alpha1"
    else:
        check = check_gains_theorem3(cfg.gains(), bounds)
        condition = "kv > (beta + alpha1) / m_lower"
    return {"controller": cfg.controller, "condition": condition,
            "bounds": bounds.as_dict(), **check.as_dict()}


def cmd_check_gains(args) -> int:
    try:
        cfg = load_config(args)
        report = gain_report(cfg, args.samples, args.bound_seed)
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        print(f"controller: {report['controller']}")
        print("sampled bounds:")
        for k, v in report["bounds"].items():
            print(f"  {k:<12} {v:.6g}")
        print(f"condition: {report['condition']}")
        print(f"value:     {report['value']:.6g}")
        print(f"threshold: {report['threshold']:.6g}")
        print(f"margin:    {report['margin']:.6g}")
        print(f"verdict:   {'PASS' if report['pass'] else 'FAIL'}")
    if args.strict and not report["pass"]:
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------- sweep


def sweep_fields() -> set[str]:
    base = ScenarioConfig()
    out = set(_SCALAR_GAINS) | {"alpha", "h0"}
    for f in fields(ScenarioConfig):
        v = getattr(base, f.name)
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            out.add(f.name)
    out.discard("seed")
    return out


def _coerce(param: str, text: str):
    value = _parse_value(text)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"sweep value {text!r} is not a number")
    if param in _INT_FIELDS:
        return int(value)
    return float(value)


def _thread_count(jobs: int) -> int:
    env = os.environ.get("QUATLAG_THREADS")
    limit = os.cpu_count() or 1
    if env:
        try:
            limit = max(1, int(env))
        except ValueError:
            pass
    return max(1, min(limit, jobs))


def _stats(values: list) -> dict:
    xs = [v for v in values if v is not None]
    if not xs:
        return {"mean": None, "std": None, "n": 0}
    a = np.asarray(xs, dtype=np.float64)
    return {"mean": float(a.mean()), "std": float(a.std()), "n": len(xs)}


def run_sweep(base: ScenarioConfig, param: str, values: list, seeds: int, out_dir: Path,
              threads: int | None = None) -> dict:
    """Fan out over ``values x seeds`` (seed_i = base seed + i) and aggregate.

    Returns the aggregate table; per-run CSV and metrics land in ``out_dir``.
    """
    if param not in sweep_fields():
        raise ConfigError(f"cannot sweep {param!r}; choose from {', '.join(sorted(sweep_fields()))}")
    if seeds < 1:
        raise ConfigError("--seeds must be at least 1")
    jobs = []
    for value in values:
        for i in range(seeds):
            cfg = ScenarioConfig.from_dict({**base.to_dict(), param: value, "seed": base.seed + i})
            path = out_dir / f"{param}={value}" / f"seed_{cfg.seed}.csv"
            jobs.append((value, cfg, path))
    workers = threads or _thread_count(len(jobs))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(lambda job: _execute(job[1], job[2]), jobs))

    rows = []
    for value in values:
        runs = [s for (v, _, _), (_, s) in zip(jobs, outcomes) if v == value]
        ok = [s for s in runs if not s.get("diverged")]
        row = {"param": param, "value": value, "runs": len(runs),
               "diverged": len(runs) - len(ok)}
        for key in AGGREGATE_KEYS:
            row[key] = _stats([s[key] for s in ok])
        rows.append(row)
    table = {"param": param, "values": values, "seeds": seeds, "base_seed": base.seed,
             "rows": rows}
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "aggregate.json").write_text(json.dumps(table, indent=2) + "\n")
    lines = ["value,runs,diverged," + ",".join(f"{k}_mean,{k}_std" for k in AGGREGATE_KEYS)]
    for row in rows:
        cells = [str(row["value"]), str(row["runs"]), str(row["diverged"])]
        for k in AGGREGATE_KEYS:
            cells += ["" if row[k]["mean"] is None else format(row[k]["mean"], ".17g"),
                      "" if row[k]["std"] is None else format(row[k]["std"], ".17g")]
        lines.append(",".join(cells))
    (out_dir / "aggregate.csv").write_text("\n".join(lines) + "\n")
    return table


def cmd_sweep(args) -> int:
    try:
        base = load_config(args)
        values = [_coerce(args.param, v) for v in args.values.split(",") if v.strip()]
        if not values:
            raise ConfigError("--values is empty")
        table = run_sweep(base, args.param, values, args.seeds, Path(args.out))
    except ConfigError as exc:
        _err(str(exc))
        return EXIT_USAGE
    for row in table["rows"]:
        parts = [f"{args.param}={row['value']}", f"runs={row['runs']}"]
        for k in AGGREGATE_KEYS:
            s = row[k]
            parts.append(f"{k}={s['mean']:.6g}+-{s['std']:.3g}" if s["mean"] is not None
                         else f"{k}=n/a")
        print("  ".join(parts))
    diverged = sum(r["diverged"] for r in table["rows"])
    return EXIT_DIVERGED if diverged else EXIT_OK


# ---------------------------------------------------------------- parser


def _add_source(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", help=f"built-in scenario: {', '.join(PRESETS)}")
    p.add_argument("--config", help="JSON config file with the flat key set")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override one config key (value parsed as JSON); repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatlag", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and write CSV + metrics")
    _add_source(p)
    p.add_argument("--out", default="run.csv", help="CSV path; metrics go next to it")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--dump-config", metavar="PATH", help="also write the resolved config JSON")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="check the quaternion and dynamics identities")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.add_argument("--fault", choices=FAULTS, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check-gains", help="test an adaptive law's sufficient gain condition")
    _add_source(p)
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--samples", type=int, default=5000, help="samples per bound constant")
    p.add_argument("--bound-seed", type=int, default=0, help="seed of the bound sampler")
    p.add_argument("--strict", action="store_true", help="exit 1 when the condition fails")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check_gains)

    p = sub.add_parser("sweep", help="run a parameter x seed grid and aggregate metrics")
    _add_source(p)
    p.add_argument("--seed", type=int, help="base seed (run i uses base + i)")
    p.add_argument("--param", required=True, help="scalar config key to vary")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--seeds", type=int, default=1, help="runs per value")
    p.add_argument("--out", default="sweep", help="output directory")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
