"""Smoke tests for the python module and the CLI."""

import json
import math
import os
import subprocess
from pathlib import Path

import numpy as np
import pytest

import rydrelay as rr


def test_defaults_reproduce_forster_calibration():
    params = rr.PhysicalParams()
    params.F = 1.6
    assert abs(rr.forster_detuning(params)) < 1e-9
    params.F = 3.5
    assert abs(rr.forster_detuning(params)) == pytest.approx(548.5509, rel=1e-6)


def test_magic_angle_kills_the_coupling():
    assert rr.near_field_coupling(1000.0, 8.0, rr.MAGIC_ANGLE) == pytest.approx(0.0, abs=1e-12)


def test_pair_exponent_matches_the_reference_value():
    params = rr.PhysicalParams()
    points = []
    r = 10.0
    while r <= 30.0 + 1e-9:
        array = rr.build_pair_mirrored(r, 6.0, math.pi / 2)
        coupling = rr.effective_couplings(array, params)
        points.append((r, abs(coupling[0, 1])))
        r += 0.5
    fit = rr.fit_power_law(points, 10.0, 30.0)
    assert fit.exponent == pytest.approx(5.1, abs=0.2)


def test_coupling_matrix_is_symmetric_with_zero_diagonal():
    params = rr.PhysicalParams()
    chain = rr.build_chain_mirrored(6, 10.0, 9.0, 1.2)
    assert chain.num_main == 6
    assert chain.num_relay == 10
    coupling = rr.effective_couplings(chain, params)
    assert np.array_equal(coupling, coupling.T)
    assert np.all(np.diag(coupling) == 0.0)


def test_effective_exchange_dynamics():
    params = rr.PhysicalParams()
    array = rr.build_pair_mirrored(15.0, 6.0, math.pi / 2)
    model = rr.build_effective_model(array, params)
    coupling = abs(model.coupling[0, 1])
    transfer_time = 1.0 / (4.0 * coupling)
    trajectory = rr.evolve_effective(
        model, rr.excitation_state_spins(2, 0), [0.0, transfer_time], False
    )
    assert trajectory.series_for("p_up_1")[-1] == pytest.approx(1.0, abs=1e-4)


def test_array_json_round_trip():
    array = rr.build_pair_mirrored(12.0, 7.0, 0.3)
    restored = rr.AtomArray.from_json(array.to_json())
    assert len(restored) == len(array)
    assert restored.num_main == array.num_main


def _cli():
    path = os.environ.get("RYDRELAY_CLI")
    if not path or not Path(path).exists():
        pytest.skip("RYDRELAY_CLI not set")
    return path


def test_cli_couplings_is_deterministic(tmp_path):
    cli = _cli()
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        result = subprocess.run(
            [cli, "--out", str(out), "couplings", "--kind", "pair"],
            capture_output=True,
            text=True,
        )
        assert result.returncode == 0, result.stderr
        fit = json.loads((out / "fit.json").read_text())
        assert fit["exponent"] == pytest.approx(5.1, abs=0.2)
        outputs.append((out / "couplings_pair.csv").read_bytes())
        assert (out / "config.json").exists()
    assert outputs[0] == outputs[1]


def test_cli_rejects_bad_config(tmp_path):
    cli = _cli()
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"geometry": {"kind": "pair", "bogus": 1}}))
    result = subprocess.run(
        [cli, "--config", str(config), "--out", str(tmp_path / "out"), "couplings"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 2
    assert "bogus" in result.stderr
    assert not (tmp_path / "out").exists()


def test_cli_scan_reports_failed_grids(tmp_path):
    cli = _cli()
    out = tmp_path / "scan"
    config = tmp_path / "scan.json"
    # a 1x3 chain grid centered on the chain axis: every relay collides
    # with a main atom, so under 90% of the points succeed
    config.write_text(
        json.dumps(
            {
                "scan": {
                    "kind": "chain",
                    "n_r": 3,
                    "n_theta": 1,
                    "r_min": 9.9,
                    "r_max": 10.1,
                    "theta_min": rr.MAGIC_ANGLE,
                    "theta_max": rr.MAGIC_ANGLE,
                }
            }
        )
    )
    result = subprocess.run(
        [cli, "--config", str(config), "--out", str(out), "scan"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 3
    rows = (out / "scan.csv").read_text().splitlines()
    assert len(rows) == 4  # header + one row per grid point
    assert "nan" in rows[1]


def test_cli_validity_files(tmp_path):
    cli = _cli()
    out = tmp_path / "validity"
    result = subprocess.run(
        [cli, "--out", str(out), "validity"], capture_output=True, text=True
    )
    assert result.returncode == 0, result.stderr
    header = (out / "adiabaticity.csv").read_text().splitlines()[0]
    assert header.startswith("theta_imu,r_munu,lambda_lowest_mhz")
    assert (out / "nf_vs_full.csv").exists()
