"""Bundled scenario gallery: one runnable claim check per conservation law.

Each scenario pairs a config file with machine-checkable claims evaluated on
the finished run (PASS/FAIL recorded in summary.json). The negative-control
and collapse scenarios additionally cross-check against the dense oracle.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import UnknownScenario
from .grid import GridSpec, build_grid
from .oracle import EigenPropagator, alternating_projection_decay_rate, dense_hamiltonian
from .runner import RunResult, execute_run

S_DRIFT_TOL = 1e-6
NEGATIVE_CONTROL_DRIFT = 1e-3
ORACLE_MATCH_TOL = 1e-4
COLLAPSE_NORM_TOL = 1e-8


@dataclass
class ClaimCheck:
    name: str
    passed: bool
    details: str


def _drift_claims(result: RunResult, expected_sign: int) -> list[ClaimCheck]:
    summary = result.summary
    persistence = summary["sign_persistence"]
    sign_label = {1: "+1", -1: "-1"}[expected_sign]
    return [
        ClaimCheck("initial_sector",
                   persistence["initial_sign"] == expected_sign,
                   f"exchange sign {persistence['initial_sign']} "
                   f"(expected {sign_label})"),
        ClaimCheck("sign_persistence", persistence["passed"],
                   f"{persistence['violations']} violations"),
        ClaimCheck("overlap_conserved",
                   summary["max_s_drift"] <= S_DRIFT_TOL,
                   f"max |S - S0| = {summary['max_s_drift']:.3e} "
                   f"(tol {S_DRIFT_TOL:.0e})"),
    ]


def _check_fermion(result: RunResult) -> list[ClaimCheck]:
    return _drift_claims(result, -1)


def _check_boson(result: RunResult) -> list[ClaimCheck]:
    return _drift_claims(result, +1)


def _check_em(result: RunResult) -> list[ClaimCheck]:
    claims = _drift_claims(result, -1)
    amp = result.scenario.hamiltonian.vector is not None
    claims.append(ClaimCheck("field_active", amp,
                             "uniform vector potential present"))
    return claims


def _check_negative_control(result: RunResult) -> list[ClaimCheck]:
    summary = result.summary
    traj = result.trajectory
    first = summary["sign_persistence"]["first_violation_time"]
    s = traj.s_series()
    drift = np.abs(s - s[0])
    crossed = bool(np.any(drift > NEGATIVE_CONTROL_DRIFT))

    dense = dense_hamiltonian(result.scenario.grid,
                              result.scenario.hamiltonian)
    s_oracle = EigenPropagator(dense).overlap_series(
        result.scenario.psi0, traj.times)
    mismatch = float(np.max(np.abs(s - s_oracle)))

    confirmed = first is not None and crossed and mismatch <= ORACLE_MATCH_TOL
    result.summary["verdict"] = ("NEGATIVE-CONTROL-CONFIRMED" if confirmed
                                 else "NEGATIVE-CONTROL-FAILED")
    return [
        ClaimCheck("violation_detected", first is not None and first > 0,
                   f"first violation at t = {first}"),
        ClaimCheck("drift_exceeds_threshold", crossed,
                   f"max |S - S0| = {float(drift.max()):.3e} "
                   f"(> {NEGATIVE_CONTROL_DRIFT:.0e} expected)"),
        ClaimCheck("oracle_match", mismatch <= ORACLE_MATCH_TOL,
                   f"max |S - S_oracle| = {mismatch:.3e} "
                   f"(tol {ORACLE_MATCH_TOL:.0e})"),
    ]


def _check_mixed_null(result: RunResult) -> list[ClaimCheck]:
    collapse = result.summary["collapse"]
    oracle_grid = build_grid(GridSpec.cube(3, 1, -6.0, 6.0, 12))
    rate = alternating_projection_decay_rate(oracle_grid)
    return [
        ClaimCheck("norm_collapses",
                   collapse["final_norm"] <= COLLAPSE_NORM_TOL,
                   f"norm after {collapse['iterations']} rounds = "
                   f"{collapse['final_norm']:.3e}"),
        ClaimCheck("oracle_decay_rate", rate < 1.0,
                   f"projector-product spectral radius = {rate:.6f} (< 1)"),
    ]


@dataclass
class GalleryScenario:
    name: str
    config_file: str
    claim: str
    checker: object


SCENARIOS: dict[str, GalleryScenario] = {
    "fermion_harmonic": GalleryScenario(
        "fermion_harmonic", "fermion_harmonic.cfg",
        "antisymmetric pair in a symmetric trap keeps sign -1 and constant S(t)",
        _check_fermion),
    "boson_harmonic": GalleryScenario(
        "boson_harmonic", "boson_harmonic.cfg",
        "symmetric pair in a symmetric trap keeps sign +1 and constant S(t)",
        _check_boson),
    "interacting_pair": GalleryScenario(
        "interacting_pair", "interacting_pair.cfg",
        "exchange overlap stays constant under a symmetric interacting potential",
        _check_fermion),
    "em_uniform_A": GalleryScenario(
        "em_uniform_A", "em_uniform_A.cfg",
        "S(t) conservation survives minimal coupling to a uniform A(t)",
        _check_em),
    "broken_symmetry": GalleryScenario(
        "broken_symmetry", "broken_symmetry.cfg",
        "asymmetric trap breaks S(t) conservation (negative control, "
        "oracle-matched)",
        _check_negative_control),
    "mixed_null": GalleryScenario(
        "mixed_null", "mixed_null.cfg",
        "a state symmetric in (0,1) and antisymmetric in (1,2) collapses to zero",
        _check_mixed_null),
}


def scenario_config_path(item: GalleryScenario):
    return resources.files("exsym").joinpath("scenarios", item.config_file)


def list_scenarios() -> list[tuple[str, str]]:
    return [(name, item.claim) for name, item in sorted(SCENARIOS.items())]


def run_scenario(name: str, out_dir, *, deterministic: bool = False,
                 seed: int | None = None) -> tuple[RunResult, list[ClaimCheck]]:
    """Run a bundled scenario and evaluate its claims.

    Appends the claims table to summary.json; the caller maps failed claims
    to exit status 3.
    """
    if name not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise UnknownScenario(f"unknown scenario {name!r}; choose from: {known}")
    item = SCENARIOS[name]
    with resources.as_file(scenario_config_path(item)) as cfg_path:
        result = execute_run(cfg_path, out_dir, deterministic=deterministic,
                             seed=seed)
    claims = item.checker(result)
    result.summary["scenario"] = name
    result.summary["claim"] = item.claim
    result.summary["claims"] = [
        {"name": c.name, "passed": c.passed, "details": c.details}
        for c in claims]
    result.summary["all_claims_passed"] = all(c.passed for c in claims)
    with open(os.path.join(result.out_dir, "summary.json"), "w",
              encoding="utf-8") as fh:
        json.dump(result.summary, fh, indent=2)
        fh.write("\n")
    return result, claims
