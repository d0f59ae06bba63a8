import math
import os
import subprocess
import sys
import tempfile

import pytest

import becsim


def make_trap(n_total=200, temperature_nk=15.0, cutoff=10.0):
    t = becsim.TrapModel()
    t.omega_x = 2 * math.pi * 42.0
    t.omega_y = 2 * math.pi * 42.0
    t.omega_z = 2 * math.pi * 120.0
    t.mass = 86.909180527 * 1.66053906892e-27
    t.scattering_length = 5.7e-9
    t.temperature = temperature_nk * 1e-9
    t.gamma = 34.0
    t.n_total = n_total
    t.energy_cutoff = cutoff
    t.validate()
    return t


def test_version():
    assert becsim.__version__ == "0.1.0"


def test_critical_temperature():
    t = make_trap(n_total=2000)
    tc = becsim.critical_temperature(t)
    assert abs(tc - 33.86e-9) / 33.86e-9 < 5e-3


def test_spectrum_and_broadened_delta():
    t = make_trap()
    spec = becsim.enumerate_modes(t)
    assert spec.size() > 100
    # The table lists non-condensate modes only; the ground mode is separate.
    assert spec.modes[0].energy > spec.ground_energy
    # Gaussian peak value: sqrt(pi) / (2 gamma).
    assert becsim.broadened_delta(0.0, 2.0) == pytest.approx(
        math.sqrt(math.pi) / 4.0, rel=1e-14
    )


def test_steady_state_matches_thermal_marginal():
    t = make_trap(n_total=40, temperature_nk=8.0, cutoff=6.0)
    spec = becsim.enumerate_modes(t)
    overlaps = becsim.OverlapTable(t, spec, 0)
    table = becsim.build_rate_table(t, spec, overlaps)
    steady = becsim.steady_state(table)
    canon = becsim.canonical_partition_table(spec, t.n_total, t.temperature)
    marg = becsim.thermal_marginal(spec, canon, t.n_total)
    assert becsim.total_variation(steady, marg.dist) < 0.05


def test_config_errors_are_collected():
    with pytest.raises(becsim.ConfigError) as err:
        becsim.parse_config_text("bogus_key = 1\nn_total = -3\n")
    msg = str(err.value)
    assert "bogus_key" in msg and "n_total" in msg


def test_cli_spectrum_runs():
    cli = os.environ.get("BECSIM_CLI")
    cfg_dir = os.environ.get("BECSIM_CONFIG_DIR")
    if not cli or not cfg_dir:
        pytest.skip("CLI paths not exported")
    with tempfile.TemporaryDirectory() as out:
        proc = subprocess.run(
            [cli, "spectrum", "--config", os.path.join(cfg_dir, "tiny4.ini"),
             "--out", out],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        assert os.path.exists(os.path.join(out, "spectrum.csv"))
        assert os.path.exists(os.path.join(out, "manifest.json"))


def test_cli_rejects_bad_config():
    cli = os.environ.get("BECSIM_CLI")
    if not cli:
        pytest.skip("CLI path not exported")
    with tempfile.TemporaryDirectory() as out:
        bad = os.path.join(out, "bad.ini")
        with open(bad, "w") as f:
            f.write("nonsense = 1\n")
        proc = subprocess.run(
            [cli, "spectrum", "--config", bad, "--out", out],
            capture_output=True, text=True)
        assert proc.returncode == 2
        assert "nonsense" in proc.stderr


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
