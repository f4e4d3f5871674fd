"""Command-line interface: dispatch, config resolution, file output, exit codes."""

import json
import subprocess
import sys

import pytest

from rapsim.cli import main


def run_cli(*argv):
    return main([str(a) for a in argv])


# ---------------------------------------------------------------- simulate

def test_simulate_defaults(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    assert run_cli("simulate", "--out", out) == 0
    stdout = capsys.readouterr().out
    assert "final_p1=0.999895183" in stdout
    assert "adiabatic=yes" in stdout
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ")
    assert "duration_s=0.00015" in lines[0]
    assert lines[1] == "t_s,rx,ry,rz,p1"


def test_simulate_fast_chirp_flags_nonadiabatic(tmp_path, capsys):
    assert run_cli("simulate", "--chirp-span-hz", "1400e3", "--out", tmp_path / "t.csv") == 0
    assert "adiabatic=no" in capsys.readouterr().out


def test_simulate_dark_pulse(tmp_path, capsys):
    assert run_cli("simulate", "--peak-rabi-hz", "0", "--out", tmp_path / "t.csv") == 0
    assert "final_p1=0.000000000" in capsys.readouterr().out


def test_simulate_invalid_duration_names_field(tmp_path, capsys):
    code = run_cli("simulate", "--duration-s", "-1", "--out", tmp_path / "t.csv")
    assert code == 2
    assert "duration_s" in capsys.readouterr().err


# ---------------------------------------------------------------- sweep

def test_sweep_explicit_values(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--values", "200e3,300e3,400e3", "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "axis_value,efficiency,peak_adiabaticity_metric,status"
    assert len(lines) == 2 + 3
    assert all(row.endswith(",ok") for row in lines[2:])


def test_sweep_single_point(tmp_path):
    out = tmp_path / "one.csv"
    assert run_cli("sweep", "--values", "0", "--out", out) == 0
    assert len(out.read_text().splitlines()) == 3


def test_sweep_empty_axis_is_usage_error(tmp_path, capsys):
    assert run_cli("sweep", "--values", "", "--out", tmp_path / "s.csv") == 2
    assert "empty" in capsys.readouterr().err


def test_sweep_peak_axis(tmp_path, capsys):
    assert run_cli("sweep", "--axis", "peak_rabi", "--values", "0,512e3",
                   "--out", tmp_path / "p.csv") == 0
    assert "min_eff=0.000000" in capsys.readouterr().out


# ---------------------------------------------------------------- rabi

def test_rabi_noiseless_roundtrip(tmp_path, capsys):
    out = tmp_path / "fit.json"
    assert run_cli("rabi", "--noiseless", "--guess-hz", "500e3", "--out", out) == 0
    report = json.loads(out.read_text())
    assert set(report) == {"fitted_rabi_hz", "amplitude", "offset", "phase_rad",
                           "residual_rms", "iterations"}
    assert abs(report["fitted_rabi_hz"] - 512e3) / 512e3 < 1e-6


def test_rabi_seeded_noise_within_half_percent(tmp_path):
    out = tmp_path / "fit.json"
    assert run_cli("rabi", "--guess-hz", "500e3", "--out", out) == 0
    report = json.loads(out.read_text())
    assert abs(report["fitted_rabi_hz"] - 512e3) / 512e3 < 0.005


def test_rabi_too_few_points_is_usage_error(tmp_path, capsys):
    assert run_cli("rabi", "--points", "5", "--out", tmp_path / "f.json") == 2
    assert "points" in capsys.readouterr().err


# ---------------------------------------------------------------- cool

def test_cool_rap_defaults(tmp_path, capsys):
    out = tmp_path / "cool.csv"
    trapped = tmp_path / "trapped.json"
    assert run_cli("cool", "--out", out, "--trapped-out", trapped) == 0
    stdout = capsys.readouterr().out
    assert "final_p_ground=0.99" in stdout
    assert json.loads(trapped.read_text()) == []
    lines = out.read_text().splitlines()
    assert lines[1] == "cycle,mean_n,p_ground"
    assert len(lines) == 2 + 41


def test_cool_pi_fixed_reports_trapped_levels(tmp_path):
    trapped = tmp_path / "trapped.json"
    assert run_cli("cool", "--strategy", "pi_fixed", "--cycles", "10",
                   "--out", tmp_path / "c.csv", "--trapped-out", trapped) == 0
    levels = json.loads(trapped.read_text())
    assert levels == [4, 16, 36]


def test_cool_zero_cycles_is_usage_error(tmp_path, capsys):
    assert run_cli("cool", "--cycles", "0", "--out", tmp_path / "c.csv") == 2
    assert "cycles" in capsys.readouterr().err


# ---------------------------------------------------------------- waveform

def test_waveform_row_count(tmp_path, capsys):
    out = tmp_path / "wf.csv"
    assert run_cli("waveform", "--out", out) == 0
    assert "samples=151" in capsys.readouterr().out
    assert len(out.read_text().splitlines()) == 2 + 151


def test_waveform_quantized_amplitudes_sit_on_grid(tmp_path):
    out = tmp_path / "wf.csv"
    assert run_cli("waveform", "--bits", "16", "--out", out) == 0
    for line in out.read_text().splitlines()[2:]:
        amp = float(line.split(",")[1])
        assert abs(amp * 65535 - round(amp * 65535)) < 1e-9


def test_waveform_zero_rate_is_usage_error(tmp_path, capsys):
    assert run_cli("waveform", "--sample-rate-hz", "0", "--out", tmp_path / "w.csv") == 2
    assert "sample_rate_hz" in capsys.readouterr().err


# ---------------------------------------------------------------- config file

def test_config_section_feeds_subcommand(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[simulate]\nchirp_span_hz = 1400e3\n")
    assert run_cli("simulate", "--config", cfg, "--out", tmp_path / "t.csv") == 0
    assert "adiabatic=no" in capsys.readouterr().out


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[simulate]\nchirp_span_hz = 1400e3\n")
    assert run_cli("simulate", "--config", cfg, "--chirp-span-hz", "400e3",
                   "--out", tmp_path / "t.csv") == 0
    assert "adiabatic=yes" in capsys.readouterr().out


def test_unknown_config_key_is_rejected(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[simulate]\nchirp_mhz = 1\n")
    assert run_cli("simulate", "--config", cfg, "--out", tmp_path / "t.csv") == 2
    assert "chirp_mhz" in capsys.readouterr().err


def test_missing_config_file_is_rejected(tmp_path, capsys):
    code = run_cli("simulate", "--config", tmp_path / "nope.ini", "--out", tmp_path / "t.csv")
    assert code == 2


def test_sections_for_other_subcommands_are_ignored(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[simulate]\nchirp_span_hz = 400e3\n\n[waveform]\nbits = 16\n")
    assert run_cli("waveform", "--config", cfg, "--out", tmp_path / "w.csv") == 0


# ---------------------------------------------------------------- determinism

def test_repeated_runs_write_identical_bytes(tmp_path):
    out = tmp_path / "wf.csv"
    assert run_cli("waveform", "--out", out) == 0
    first = out.read_bytes()
    assert run_cli("waveform", "--out", out) == 0
    assert out.read_bytes() == first


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "rapsim", "--help"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    for command in ("simulate", "sweep", "rabi", "cool", "waveform"):
        assert command in proc.stdout
