"""End-to-end runs of the bundled claim-check scenarios."""

import json

from exsym.gallery import run_scenario


def claims_by_name(claims):
    return {c.name: c for c in claims}


def test_fermion_harmonic_scenario(tmp_path):
    result, claims = run_scenario("fermion_harmonic", tmp_path / "out")
    named = claims_by_name(claims)
    assert named["initial_sector"].passed
    assert named["sign_persistence"].passed
    assert named["overlap_conserved"].passed
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["sign_persistence"]["initial_sign"] == -1
    assert summary["max_s_drift"] <= 1e-6
    assert summary["all_claims_passed"] is True


def test_em_uniform_field_scenario(tmp_path):
    result, claims = run_scenario("em_uniform_A", tmp_path / "out")
    assert all(c.passed for c in claims)
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["max_s_drift"] <= 1e-6
    # the field really was on
    assert result.scenario.hamiltonian.vector is not None


def test_broken_symmetry_scenario(tmp_path):
    result, claims = run_scenario("broken_symmetry", tmp_path / "out")
    assert all(c.passed for c in claims)
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["verdict"] == "NEGATIVE-CONTROL-CONFIRMED"
    assert summary["sign_persistence"]["first_violation_time"] > 0.0
    assert summary["max_s_drift"] > 1e-3


def test_boson_harmonic_scenario(tmp_path):
    result, claims = run_scenario("boson_harmonic", tmp_path / "out")
    assert all(c.passed for c in claims)
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["sign_persistence"]["initial_sign"] == +1
