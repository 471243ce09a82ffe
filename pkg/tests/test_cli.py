"""Exercises the simulate driver end to end on tiny grids."""

import json
import os
import re
import subprocess
import sys

import numpy as np
import pytest

from dressedlight.cli import OUTPUT_ENV_VAR, main

FLOAT_FIELD = re.compile(r"-?\d\.\d{12}e[+-]\d{2,3}$")


def _write_config(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def _chart_config(**overrides):
    cfg = {
        "model": {"n_emitters": 1, "limit": "tc", "n_max": 12},
        "grid": {"g_min": 0.1, "g_max": 0.3, "g_steps": 3,
                 "T_min": 0.1, "T_max": 0.2, "T_steps": 2},
    }
    cfg.update(overrides)
    return cfg


def _read_rows(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    return header, rows


def test_g2chart_writes_csv_summary_and_plot(tmp_path):
    cfg = _write_config(tmp_path, _chart_config())
    out = tmp_path / "run"
    assert main(["g2chart", "--config", cfg, "--out", str(out)]) == 0

    header, rows = _read_rows(out / "g2chart.csv")
    assert header == ["g", "T", "g2_zero", "collision_count", "degenerate",
                      "status"]
    assert len(rows) == 6
    for row in rows:
        assert row["status"] == "0"
        assert FLOAT_FIELD.match(row["g2_zero"])
        assert float(row["g2_zero"]) > 0

    summary = json.loads((out / "summary.json").read_text())
    assert summary["task"] == "g2chart"
    assert summary["metrics"]["n_points"] == 6
    assert summary["metrics"]["n_failed"] == 0
    assert "g2chart.csv" in summary["files"]

    script = (out / "plot_g2chart.py").read_text()
    assert "g2chart.csv" in script
    compile(script, "plot_g2chart.py", "exec")


def test_grid_rows_iterate_temperature_fastest(tmp_path):
    cfg = _write_config(tmp_path, _chart_config())
    out = tmp_path / "run"
    main(["g2chart", "--config", cfg, "--out", str(out)])
    _, rows = _read_rows(out / "g2chart.csv")
    g = [float(r["g"]) for r in rows]
    t = [float(r["T"]) for r in rows]
    assert g == [0.1, 0.1, 0.2, 0.2, 0.3, 0.3]
    assert t == [0.1, 0.2] * 3


def test_repeated_runs_are_byte_identical(tmp_path):
    cfg = _write_config(tmp_path, _chart_config())
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["g2chart", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["g2chart", "--config", cfg, "--out", str(out2)]) == 0
    assert (out1 / "g2chart.csv").read_bytes() == \
        (out2 / "g2chart.csv").read_bytes()


def test_worker_count_does_not_change_output(tmp_path):
    cfg = _write_config(tmp_path, _chart_config())
    serial, parallel = tmp_path / "serial", tmp_path / "parallel"
    assert main(["g2chart", "--config", cfg, "--out", str(serial)]) == 0
    assert main(["g2chart", "--config", cfg, "--out", str(parallel),
                 "--workers", "2"]) == 0
    assert (serial / "g2chart.csv").read_bytes() == \
        (parallel / "g2chart.csv").read_bytes()


def test_missing_model_block_is_config_error(tmp_path, capsys):
    cfg = _write_config(tmp_path, {"grid": _chart_config()["grid"]})
    assert main(["g2chart", "--config", cfg,
                 "--out", str(tmp_path / "run")]) == 2
    err = capsys.readouterr().err
    assert "model" in err
    assert not (tmp_path / "run").exists()


def test_config_errors_list_every_field_path(tmp_path, capsys):
    broken = _chart_config()
    broken["model"]["n_emitters"] = "two"
    broken["model"]["typo_field"] = 1
    broken["grid"]["g_steps"] = 2.5
    broken["unexpected"] = {}
    cfg = _write_config(tmp_path, broken)
    assert main(["g2chart", "--config", cfg,
                 "--out", str(tmp_path / "run")]) == 2
    err = capsys.readouterr().err
    for path in ("model.n_emitters", "model.typo_field", "grid.g_steps",
                 "unexpected"):
        assert path in err


def test_limit_and_g_prime_are_exclusive(tmp_path, capsys):
    broken = _chart_config()
    broken["model"]["g_prime"] = 0.0
    cfg = _write_config(tmp_path, broken)
    assert main(["g2chart", "--config", cfg,
                 "--out", str(tmp_path / "run")]) == 2


def test_invalid_json_and_missing_file_are_config_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["g2chart", "--config", str(bad),
                 "--out", str(tmp_path / "run")]) == 2
    assert main(["g2chart", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "run")]) == 2


def test_nonpositive_workers_flag_rejected(tmp_path, capsys):
    cfg = _write_config(tmp_path, _chart_config())
    assert main(["g2chart", "--config", cfg, "--out", str(tmp_path / "run"),
                 "--workers", "0"]) == 2


def test_dark_ground_state_column_fails_partially(tmp_path, capsys):
    # at T=0 the stationary state cannot emit, so that column errors out
    cfg = _write_config(tmp_path, _chart_config(
        grid={"g_min": 0.1, "g_max": 0.2, "g_steps": 2,
              "T_min": 0.0, "T_max": 0.1, "T_steps": 2}))
    out = tmp_path / "run"
    assert main(["g2chart", "--config", cfg, "--out", str(out)]) == 3

    _, rows = _read_rows(out / "g2chart.csv")
    assert len(rows) == 4
    for row in rows:
        if float(row["T"]) == 0.0:
            assert row["status"] == "1"
            assert row["g2_zero"] == "nan"
        else:
            assert row["status"] == "0"
            assert np.isfinite(float(row["g2_zero"]))

    summary = json.loads((out / "summary.json").read_text())
    assert summary["metrics"]["n_failed"] == 2
    assert len(summary["metrics"]["failures"]) == 2
    assert "failed" in capsys.readouterr().err


def test_spectrum_reports_dominant_peak(tmp_path):
    cfg = _write_config(tmp_path, {
        "model": {"n_emitters": 2, "limit": "dicke", "g": 0.5,
                  "temperature": 0.07, "n_max": 60},
        "omega_grid": {"omega_min": 0.0, "omega_max": 2.0, "points": 400},
    })
    out = tmp_path / "run"
    assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0

    header, rows = _read_rows(out / "spectrum.csv")
    assert header == ["omega", "spectrum"]
    assert len(rows) == 400
    assert all(float(r["spectrum"]) >= 0 for r in rows)

    summary = json.loads((out / "summary.json").read_text())
    assert summary["metrics"]["dominant_weight_fraction"] > 0.95
    assert summary["metrics"]["integrated_emission"] > 0
    compile((out / "plot_spectrum.py").read_text(), "plot_spectrum.py", "exec")


def test_g2time_curve_relaxes_to_thermal(tmp_path):
    cfg = _write_config(tmp_path, {
        "model": {"n_emitters": 2, "limit": "tc", "g": 0.5,
                  "temperature": 0.07, "n_max": 30},
        "t_grid": {"t_max": 5000.0, "points": 50},
    })
    out = tmp_path / "run"
    assert main(["g2time", "--config", cfg, "--out", str(out)]) == 0

    _, rows = _read_rows(out / "g2time.csv")
    assert len(rows) == 50
    summary = json.loads((out / "summary.json").read_text())
    assert abs(float(rows[0]["g2"]) - summary["metrics"]["g2_zero"]) < 1e-12
    assert abs(summary["metrics"]["g2_final"] - 1.0) < 1e-3
    assert summary["metrics"]["max_imag"] < 1e-8


def test_eigen_rows_per_coupling_and_level(tmp_path):
    cfg = _write_config(tmp_path, {
        "model": {"n_emitters": 2, "limit": "tc", "n_max": 6},
        "grid": {"g_min": 0.1, "g_max": 0.5, "g_steps": 3},
        "levels": 8,
    })
    out = tmp_path / "run"
    assert main(["eigen", "--config", cfg, "--out", str(out)]) == 0

    header, rows = _read_rows(out / "eigen.csv")
    assert header == ["g", "level", "energy", "group"]
    assert len(rows) == 24
    for g in (0.1, 0.3, 0.5):
        energies = [float(r["energy"]) for r in rows if float(r["g"]) == g]
        assert energies == sorted(energies)
    compile((out / "plot_eigen.py").read_text(), "plot_eigen.py", "exec")


def test_qo_chart_is_thermal_without_counterrotating_terms(tmp_path):
    cfg = _write_config(tmp_path, {
        "model": {"n_emitters": 1, "limit": "tc"},
        "grid": {"g_min": 0.1, "g_max": 0.5, "g_steps": 2,
                 "T_min": 0.1, "T_max": 0.3, "T_steps": 2},
        "qo_n_max": 8,
    })
    out = tmp_path / "run"
    assert main(["qo-chart", "--config", cfg, "--out", str(out)]) == 0
    _, rows = _read_rows(out / "qo-chart.csv")
    assert len(rows) == 4
    for row in rows:
        assert abs(float(row["g2_zero"]) - 2.0) < 1e-5


def test_analytic_compare_reports_trusted_error(tmp_path):
    cfg = _write_config(tmp_path, {
        "model": {"n_emitters": 1, "limit": "tc", "n_max": 30},
        "grid": {"g_min": 0.1, "g_max": 0.3, "g_steps": 2,
                 "T_min": 0.05, "T_max": 0.1, "T_steps": 2},
    })
    out = tmp_path / "run"
    assert main(["analytic-compare", "--config", cfg, "--out", str(out)]) == 0

    header, rows = _read_rows(out / "analytic-compare.csv")
    assert "g2_refined" in header and "trusted" in header
    assert all(r["trusted"] == "1" for r in rows)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["metrics"]["max_rel_err_trusted"] < 0.2


def test_analytic_compare_rejects_multiple_emitters(tmp_path, capsys):
    cfg = _write_config(tmp_path, {
        "model": {"n_emitters": 2, "limit": "tc"},
        "grid": {"g_min": 0.1, "g_max": 0.3, "g_steps": 2,
                 "T_min": 0.05, "T_max": 0.1, "T_steps": 2},
    })
    assert main(["analytic-compare", "--config", cfg,
                 "--out", str(tmp_path / "run")]) == 2
    assert "n_emitters" in capsys.readouterr().err


def test_converge_tracks_cutoff_stability(tmp_path):
    cfg = _write_config(tmp_path, {
        "model": {"n_emitters": 1, "limit": "tc", "g": 0.3,
                  "temperature": 0.1},
        "n_max_pair": [20, 26],
    })
    out = tmp_path / "run"
    assert main(["converge", "--config", cfg, "--out", str(out)]) == 0

    _, rows = _read_rows(out / "converge.csv")
    metrics_named = [r["metric"] for r in rows]
    assert metrics_named == ["g2_zero", "integrated_emission",
                             "peak_weight_max_rel"]
    summary = json.loads((out / "summary.json").read_text())
    assert summary["metrics"]["g2_zero_abs_diff"] < 1e-6
    assert summary["metrics"]["peak_weight_max_rel_diff"] < 1e-4
    compile((out / "plot_converge.py").read_text(), "plot_converge.py",
            "exec")


def test_output_directory_precedence(tmp_path, monkeypatch):
    env_dir = tmp_path / "from_env"
    cfg_dir = tmp_path / "from_config"
    cli_dir = tmp_path / "from_flag"
    monkeypatch.setenv(OUTPUT_ENV_VAR, str(env_dir))

    with_dir = _chart_config(output_dir=str(cfg_dir))
    cfg = _write_config(tmp_path, with_dir, name="with_dir.json")
    assert main(["g2chart", "--config", cfg]) == 0
    assert (cfg_dir / "g2chart.csv").exists()

    assert main(["g2chart", "--config", cfg, "--out", str(cli_dir)]) == 0
    assert (cli_dir / "g2chart.csv").exists()

    bare = _write_config(tmp_path, _chart_config(), name="bare.json")
    assert main(["g2chart", "--config", bare]) == 0
    assert (env_dir / "g2chart.csv").exists()


def test_module_invocation_propagates_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    proc = subprocess.run(
        [sys.executable, "-m", "dressedlight.cli", "g2chart",
         "--config", str(bad), "--out", str(tmp_path / "run")],
        capture_output=True, text=True)
    assert proc.returncode == 2
    assert "config error" in proc.stderr
