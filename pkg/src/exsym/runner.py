"""Run orchestration: execute a validated config and persist the report.

Outputs per run directory:

* ``timeseries.csv`` -- one diagnostics record per row, frozen column order;
* ``summary.json`` -- structured outcome (drifts, residual maxima,
  sign-persistence verdict, runtime, output inventory);
* ``*.svg`` figures rendered from the time series;
* optional ``checkpoint_*.sym`` wavefunction snapshots.

Mixed-null experiments write ``projection_decay.csv`` (round, norm) instead of
the diagnostics time series.

Reruns with the same config and seed are bitwise reproducible: every
reduction uses numpy's fixed-order pairwise summation and floats are
serialized by shortest round-trip repr.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass

from . import plots
from .config import (
    EXPERIMENT_MIXED_NULL,
    RunConfig,
    Scenario,
    build_scenario,
    load_config,
    parse_config,
)
from .diagnostics import CSV_COLUMNS, sign_persistence
from .grid import save_checkpoint
from .propagator import Trajectory, evolve
from .symmetry import MixedSymmetryReport, mixed_symmetry_null_check


@dataclass
class RunResult:
    """Everything a caller (CLI, gallery checks, tests) needs post-run."""

    scenario: Scenario
    trajectory: Trajectory | None
    collapse: MixedSymmetryReport | None
    summary: dict
    out_dir: str


def _write_timeseries(out_dir, trajectory: Trajectory) -> str:
    path = os.path.join(out_dir, "timeseries.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in trajectory.records:
            fh.write(rec.to_csv_row() + "\n")
    return path


def _write_decay(out_dir, report: MixedSymmetryReport) -> str:
    path = os.path.join(out_dir, "projection_decay.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("round,norm\n")
        for k, val in enumerate(report.norms):
            fh.write(f"{k},{val!r}\n")
    return path


def _grid_summary(rc: RunConfig) -> dict:
    return {
        "num_particles": rc.grid_spec.num_particles,
        "dims_per_particle": rc.grid_spec.dims_per_particle,
        "points_per_axis": [a.points for a in rc.grid_spec.axes],
        "boundary": rc.grid_spec.boundary,
        "total_points": rc.grid_spec.total_points,
    }


def _evolution_summary(rc: RunConfig, trajectory: Trajectory) -> dict:
    records = trajectory.records
    s0 = records[0].s
    persistence = sign_persistence(trajectory, tol=rc.s_drift_tol)
    return {
        "records": len(records),
        "t_final": trajectory.times[-1],
        "s0": [s0.real, s0.imag],
        "max_s_drift": trajectory.max_s_drift(),
        "final_norm": records[-1].norm,
        "max_norm_drift": max(abs(r.norm - 1.0) for r in records),
        "max_continuity_residual": max(r.continuity_residual for r in records),
        "max_boundary_mass": max(r.boundary_mass for r in records),
        "max_phase_grad_integral": max(r.phase_grad_integral for r in records),
        "sector_initial": [records[0].sector_sym, records[0].sector_anti],
        "sector_drift": max(
            max(abs(r.sector_sym - records[0].sector_sym),
                abs(r.sector_anti - records[0].sector_anti)) for r in records),
        "sign_persistence": {
            "initial_sign": persistence.initial_sign,
            "violations": len(persistence.violations),
            "first_violation_time": persistence.first_violation_time,
            "tolerance": persistence.tolerance,
            "passed": persistence.passed,
        },
    }


def execute_run(config_path, out_dir, *, deterministic: bool = False,
                seed: int | None = None, budget: int | None = None,
                extra_observers=()) -> RunResult:
    """Load, validate, build, run, and persist one experiment."""
    rc = parse_config(load_config(config_path))
    os.makedirs(out_dir, exist_ok=True)
    scenario = build_scenario(rc, budget=budget, seed_override=seed)
    started = time.perf_counter()

    summary = {
        "config": str(config_path),
        "experiment": rc.experiment,
        "grid": _grid_summary(rc),
        "deterministic": bool(deterministic),
        "seed": seed if seed is not None else rc.mixed_seed,
    }
    outputs = {}
    trajectory = None
    collapse = None

    if rc.experiment == EXPERIMENT_MIXED_NULL:
        collapse = mixed_symmetry_null_check(
            scenario.psi0, rc.mixed_iterations,
            threshold=rc.collapse_norm_tol)
        outputs["decay"] = _write_decay(out_dir, collapse)
        outputs["plots"] = plots.render_decay_figure(out_dir, collapse.norms)
        summary["collapse"] = {
            "iterations": collapse.iterations,
            "final_norm": collapse.final_norm,
            "threshold": collapse.threshold,
            "verdict": collapse.verdict,
        }
    else:
        trajectory = evolve(
            scenario.psi0, scenario.hamiltonian, rc.scheme, rc.t_final,
            record_every=rc.record_every, snapshot_every=rc.snapshot_every,
            pair=rc.pair, observers=tuple(extra_observers),
            mask_eps=rc.mask_eps, sign_tol=rc.sign_tol)
        summary["scheme"] = {"kind": rc.scheme.kind, "dt": rc.scheme.dt,
                             "solver_tol": rc.scheme.solver_tol}
        summary.update(_evolution_summary(rc, trajectory))
        outputs["timeseries"] = _write_timeseries(out_dir, trajectory)
        outputs["plots"] = plots.render_evolution_figures(
            out_dir, trajectory.times, trajectory.records)
        checkpoint_paths = []
        for t, snap in trajectory.snapshots:
            path = os.path.join(out_dir, f"checkpoint_{t:012.6f}.sym")
            save_checkpoint(snap, path)
            checkpoint_paths.append(path)
        if checkpoint_paths:
            outputs["checkpoints"] = checkpoint_paths

    summary["runtime_seconds"] = time.perf_counter() - started
    summary["outputs"] = outputs
    with open(os.path.join(out_dir, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return RunResult(scenario, trajectory, collapse, summary, str(out_dir))
