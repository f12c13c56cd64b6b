"""Experiment orchestration and deterministic CSV emission.

Every experiment writes its data files plus ``effective_config.json`` (the
fully defaulted configuration, suitable for byte-identical re-runs) and
``manifest.json`` (config hash, tool version, seed, timestamps, file
list). Numeric CSV cells use shortest round-trip decimal formatting, so
reloading loses no precision and identical (config, seed) runs produce
byte-identical data files.
"""

from __future__ import annotations

import json
import os
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .bifurcation import SweepSpec, find_critical, sweep
from .config import ConfigError, ExperimentConfig, RunManifest, config_hash
from .estimator import EstimatorConfig
from .network import (
    BurstScenario,
    NetworkSpec,
    complete_edges,
    line_edges,
    load_edge_list,
    network_critical,
    ring_edges,
    run_network,
    star_edges,
)
from .objective import evaluate_J
from .schedules import SolarConfig, constant_schedule, piecewise_schedule, pseudo_solar
from .sde import run_single
from .version import __version__

__all__ = ["run_experiment", "resolve_jobs"]

JOBS_ENV_VAR = "RATCHET_GRID_JOBS"

SINGLE_COLUMNS = "t,x,u_star,d_true,d_hat,phi_loss,entropy_loss,j_value"
NODE_COLUMNS = SINGLE_COLUMNS + ",coupling_flux"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return repr(float(value))


def _write_csv(path: Path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def resolve_jobs(explicit, config_jobs) -> int:
    """--jobs flag, then config, then RATCHET_GRID_JOBS, then cpu count."""
    for candidate in (explicit, config_jobs):
        if candidate is not None:
            if candidate < 1:
                raise ConfigError(f"jobs must be >= 1, got {candidate}")
            return candidate
    env = os.environ.get(JOBS_ENV_VAR)
    if env is not None:
        try:
            jobs = int(env)
        except ValueError:
            raise ConfigError(f"{JOBS_ENV_VAR} must be an integer, got {env!r}") from None
        if jobs < 1:
            raise ConfigError(f"{JOBS_ENV_VAR} must be >= 1, got {jobs}")
        return jobs
    return os.cpu_count() or 1


def _build_schedule(config: ExperimentConfig):
    sched = config.section("schedule")
    kind = sched["kind"]
    if kind == "constant":
        return constant_schedule(p_mean=sched["p_mean"], d=sched["d"])
    if kind == "piecewise":
        return piecewise_schedule(sched["times"], sched["p_values"], sched["d_values"])
    solar = SolarConfig(
        p0=sched["p0"],
        t_day=sched["t_day"],
        d_base=sched["d_base"],
        d_cloud=sched["d_cloud"],
        grid_dt=sched["grid_dt"],
        relax_frac=sched["relax_frac"],
        cloud_std=sched["cloud_std"],
    )
    return pseudo_solar(solar, seed=config.seed)


def _build_edges(topology: str, n_nodes: int, edge_file):
    if topology == "line":
        return line_edges(n_nodes)
    if topology == "ring":
        return ring_edges(n_nodes)
    if topology == "star":
        return star_edges(n_nodes)
    if topology == "complete":
        return complete_edges(n_nodes)
    if edge_file is None:
        raise ConfigError("network.edge_file: required when topology is 'file'")
    return load_edge_list(edge_file)


def _run_single_experiment(config, out_dir, jobs):
    run = config.section("run")
    records = run_single(
        params=config.router_params(),
        est_cfg=EstimatorConfig(**config.section("estimator")),
        schedule=_build_schedule(config),
        t_end=run["t_end"],
        dt=run["dt"],
        control_interval=run["control_interval"],
        seed=config.seed,
        p_load=run["p_load"],
        x_max=run["x_max"],
        x0=run["x0"],
        u0=run["u0"],
    )
    path = out_dir / "single.csv"
    _write_csv(
        path,
        SINGLE_COLUMNS,
        (
            (r.t, r.x, r.u_star, r.d_true, r.d_hat, r.phi_loss, r.entropy_loss, r.j_value)
            for r in records
        ),
    )
    return [path]


def _run_sweep_experiment(config, out_dir, jobs):
    sw = config.section("sweep")
    spec = SweepSpec(
        d_min=sw["d_min"],
        d_max=sw["d_max"],
        n_points=sw["n_points"],
        params=config.router_params(),
        jump_threshold=sw["jump_threshold"],
    )
    points = sweep(spec, jobs=jobs)
    path = out_dir / "sweep.csv"
    _write_csv(
        path,
        "D,u_star,j_star,abandoned",
        ((p.d, p.u_star, p.j_star, p.abandoned) for p in points),
    )
    return [path]


def _run_critical_experiment(config, out_dir, jobs):
    crit = config.section("critical")
    cp = find_critical(
        config.router_params(), crit["d_lo"], crit["d_hi"], tol=crit["tol"]
    )
    path = out_dir / "critical.csv"
    _write_csv(
        path,
        "d_c,u_before,u_after,order",
        [(cp.d_c, cp.u_before, cp.u_after, cp.order)],
    )
    return [path]


def _run_landscape_experiment(config, out_dir, jobs):
    land = config.section("landscape")
    params = config.router_params()
    u = np.linspace(0.0, 1.0, land["n_points"])
    paths = []
    for d in land["d_values"]:
        j = evaluate_J(u, float(d), params)
        path = out_dir / f"landscape_d{d:g}.csv"
        _write_csv(path, "u,j", zip(u.tolist(), j.tolist()))
        paths.append(path)
    return paths


def _run_network_experiment(config, out_dir, jobs):
    net = config.section("network")
    run = config.section("run")
    sched = config.section("schedule")
    edges = _build_edges(net["topology"], net["n_nodes"], net["edge_file"])
    base = _build_schedule(config)
    schedules = [base] * net["n_nodes"]
    if net["burst_node"] is not None:
        if sched["kind"] != "constant":
            raise ConfigError(
                "network.burst_node: burst overlay needs schedule.kind 'constant'"
            )
        if not (0 <= net["burst_node"] < net["n_nodes"]):
            raise ConfigError(
                f"network.burst_node: outside [0, {net['n_nodes']})"
            )
        if not (net["burst_t_on"] < net["burst_t_off"]):
            raise ConfigError("network.burst_t_on: must be < burst_t_off")
        schedules[net["burst_node"]] = piecewise_schedule(
            times=[0.0, net["burst_t_on"], net["burst_t_off"]],
            p_values=[sched["p_mean"]] * 3,
            d_values=[sched["d"], net["burst_d"], sched["d"]],
        )
    spec = NetworkSpec(
        n_nodes=net["n_nodes"],
        edges=edges,
        g=net["g"],
        node_params=config.router_params(),
        schedules=schedules,
    )
    per_node = run_network(
        spec,
        est_cfg=EstimatorConfig(**config.section("estimator")),
        t_end=run["t_end"],
        dt=run["dt"],
        control_interval=run["control_interval"],
        seed=config.seed,
        p_load=run["p_load"],
        x_max=run["x_max"],
        x0=run["x0"],
        u0=run["u0"],
    )
    paths = []
    for i, records in enumerate(per_node):
        path = out_dir / f"node_{i}.csv"
        _write_csv(
            path,
            NODE_COLUMNS,
            (
                (
                    r.t,
                    r.x,
                    r.u_star,
                    r.d_true,
                    r.d_hat,
                    r.phi_loss,
                    r.entropy_loss,
                    r.j_value,
                    r.coupling_flux,
                )
                for r in records
            ),
        )
        paths.append(path)
    return paths


def _run_network_critical_experiment(config, out_dir, jobs):
    nc = config.section("network_critical")
    edges = _build_edges(nc["topology"], nc["n_nodes"], nc["edge_file"])
    scenario = BurstScenario(
        node=nc["node"],
        base_d=nc["base_d"],
        p_mean=nc["p_mean"],
        t_warm=nc["t_warm"],
        t_burst=nc["t_burst"],
        t_measure=nc["t_measure"],
        dt=nc["dt"],
        control_interval=nc["control_interval"],
        window_len=nc["window_len"],
        est_dt=nc["est_dt"],
        floor=nc["floor"],
        p_load=nc["p_load"],
        x0=nc["x0"],
        x_max=nc["x_max"],
        u0=nc["u0"],
    )
    seeds = tuple(config.seed + i for i in range(nc["n_seeds"]))
    rows = []
    for g in nc["g_values"]:
        spec = NetworkSpec(
            n_nodes=nc["n_nodes"],
            edges=edges,
            g=float(g),
            node_params=config.router_params(),
        )
        d_c = network_critical(
            spec, scenario, nc["d_lo"], nc["d_hi"], tol=nc["tol"], seeds=seeds
        )
        rows.append((float(g), d_c))
    path = out_dir / "network_critical.csv"
    _write_csv(path, "g,d_c_network", rows)
    return [path]


_DISPATCH = {
    "single": _run_single_experiment,
    "sweep": _run_sweep_experiment,
    "critical": _run_critical_experiment,
    "landscape": _run_landscape_experiment,
    "network": _run_network_experiment,
    "network_critical": _run_network_critical_experiment,
}


def run_experiment(config: ExperimentConfig, out_dir=None, jobs=None) -> list:
    """Dispatch one experiment; returns the list of written paths."""
    out = Path(out_dir) if out_dir is not None else Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = resolve_jobs(jobs, config.jobs)
    started = datetime.now(timezone.utc).isoformat()

    data_paths = _DISPATCH[config.experiment](config, out, jobs)

    effective = out / "effective_config.json"
    effective.write_text(json.dumps(config.effective_dict(), indent=2, sort_keys=True) + "\n")
    finished = datetime.now(timezone.utc).isoformat()
    manifest = RunManifest(
        config_hash=config_hash(config),
        tool_version=__version__,
        seed=config.seed,
        started_at=started,
        finished_at=finished,
        outputs=[p.name for p in data_paths] + [effective.name],
    )
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")
    return data_paths + [effective, manifest_path]
