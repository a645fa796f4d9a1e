"""End-to-end command tests run in process through cli.main, plus one
subprocess smoke check of the installed entry point. Covers exit codes,
config precedence, artifact determinism, and the JSON sidecar contract."""

import json
import shutil
import subprocess

import numpy as np
import pytest

from alvlab import cli
from alvlab.phase import phase_boundary_r


def run_cli(*argv, capsys=None):
    """-> (exit_code, stdout) running the CLI in process."""
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr().out if capsys else ""
    return code, out


# --------------------------------------------------------------- payoffs


def test_payoffs_gamma_zero_degenerate_rows(capsys):
    code, out = run_cli("payoffs", "--gamma", 0, "--r", 1, capsys=capsys)
    assert code == 0
    assert "max deviation" in out
    assert "effective-config:" in out  # print-only command echoes to stdout


def test_payoffs_near_critical_angle(capsys):
    code, out = run_cli("payoffs", "--gamma", 0.6155, "--r", 1, capsys=capsys)
    assert code == 0


def test_payoffs_bad_ordering_names_the_violation(capsys):
    code = cli.main(["payoffs", "--gamma", "0.3", "--T", "5",
                     "--R", "1", "--P", "1", "--S", "0"])
    err = capsys.readouterr().err
    assert code == 1
    assert "T > R > P > S" in err


def test_payoffs_requires_some_table(capsys):
    code = cli.main(["payoffs", "--gamma", "0.3"])
    assert code == 1
    assert "--r" in capsys.readouterr().err


def test_payoffs_rejects_mixed_table_spec(capsys):
    code = cli.main(["payoffs", "--gamma", "0.3", "--r", "1", "--T", "5",
                     "--R", "3", "--P", "1", "--S", "0"])
    assert code == 1
    assert "conflicts" in capsys.readouterr().err


# ------------------------------------------------------------- stability


def test_stability_below_crossing(capsys):
    code, out = run_cli("stability", "--gamma", 0.4, "--r", 1, capsys=capsys)
    assert code == 0
    assert "vertex D" in out and "-> stable" in out
    assert "vertex C" in out and "saddle" in out
    d_line = next(l for l in out.splitlines() if l.startswith("vertex D"))
    q_line = next(l for l in out.splitlines() if l.startswith("vertex Q"))
    assert d_line.endswith("stable")
    assert not q_line.endswith("-> stable")


def test_stability_above_crossing(capsys):
    code, out = run_cli("stability", "--gamma", 0.9, "--r", 1, capsys=capsys)
    assert code == 0
    q_line = next(l for l in out.splitlines() if l.startswith("vertex Q"))
    assert q_line.endswith("stable")


def test_stability_at_crossing_is_degenerate(capsys):
    gamma = float(np.arccos(np.sqrt(2.0 / 3.0)))
    code, out = run_cli("stability", "--gamma", repr(gamma), "--r", 1,
                        capsys=capsys)
    assert code == 0
    assert "degenerate" in out


# ------------------------------------------------------------ trajectory


def test_trajectory_vertex_start_is_constant(tmp_path, capsys):
    out_csv = tmp_path / "traj.csv"
    code, _ = run_cli("trajectory", "--gamma", 0.5, "--r", 1,
                      "--rho0", "0,1,0", "--t-end", 5, "--out", out_csv,
                      capsys=capsys)
    assert code == 0
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1, ndmin=2)
    assert np.all(data[:, 1:] == [0.0, 1.0, 0.0])


def test_trajectory_above_crossing_reaches_quantum(tmp_path, capsys):
    out_csv = tmp_path / "traj.csv"
    code, out = run_cli("trajectory", "--gamma", 0.9, "--r", 1,
                        "--out", out_csv, capsys=capsys)
    assert code == 0
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1, ndmin=2)
    assert data[-1, 3] > 0.99
    sidecar = tmp_path / "traj.config.json"
    cfg = json.loads(sidecar.read_text())
    assert cfg["command"] == "trajectory"
    assert cfg["backend"] in ("pure", "compiled")
    assert cfg["gamma"] == 0.9


def test_trajectory_rejects_bad_dt(tmp_path):
    code = cli.main(["trajectory", "--gamma", "0.5", "--r", "1",
                     "--dt", "0", "--out", str(tmp_path / "x.csv")])
    assert code == 1


def test_trajectory_huge_dt_is_numerical_breach(tmp_path, capsys):
    code = cli.main(["trajectory", "--gamma", "0.9", "--r", "1",
                     "--dt", "500", "--t-end", "1000",
                     "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "numerical contract breach" in capsys.readouterr().err


def test_trajectory_rejects_bad_rho0(tmp_path, capsys):
    code = cli.main(["trajectory", "--gamma", "0.5", "--r", "1",
                     "--rho0", "0.5,0.5", "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "rho0" in capsys.readouterr().err


# ----------------------------------------------------------------- phase


def test_phase_small_grid_artifacts(tmp_path, capsys):
    out_csv = tmp_path / "grid.csv"
    code, out = run_cli("phase", "--gamma-max", 1.0, "--gamma-steps", 9,
                        "--r-steps", 3, "--r-min", 0.5, "--r-max", 1.5,
                        "--t-end", 200, "--workers", 1, "--out", out_csv,
                        capsys=capsys)
    assert code == 0
    assert "wrote" in out
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1, ndmin=2)
    assert data.shape == (27, 6)

    # axis 0..1.0 has two samples past pi/4 where the boundary diverges
    boundary = json.loads((tmp_path / "grid_boundary.json").read_text())
    assert boundary["omitted_out_of_domain"] == 2
    assert "omitted" in out
    assert len(boundary["boundary"]) == 7
    for pt in boundary["boundary"]:
        assert pt["r_star"] == pytest.approx(
            phase_boundary_r(pt["gamma"]), abs=1e-12)
    assert (tmp_path / "grid.config.json").exists()


def test_phase_rejects_nonpositive_r_axis(tmp_path, capsys):
    code = cli.main(["phase", "--r-min", "0", "--out",
                     str(tmp_path / "g.csv")])
    assert code == 1
    assert "r_min" in capsys.readouterr().err


def test_phase_deterministic_bytes(tmp_path, capsys):
    args = ["phase", "--gamma-steps", "5", "--r-steps", "3",
            "--r-min", "0.5", "--r-max", "1.5", "--t-end", "50",
            "--workers", "2"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(args + ["--out", str(a)]) == 0
    assert cli.main(args + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a_boundary.json").read_bytes() == \
        (tmp_path / "b_boundary.json").read_bytes()


# -------------------------------------------------------------- simulate


SIM_ARGS = ["simulate", "--topology", "lattice", "--side", "6",
            "--r", "1", "--steps", "60", "--measure-window", "20",
            "--replicates", "2", "--gamma-steps", "3", "--workers", "1",
            "--seed", "5"]


def test_simulate_writes_scan_and_sidecar(tmp_path, capsys):
    out_csv = tmp_path / "scan.csv"
    code = cli.main(SIM_ARGS + ["--out", str(out_csv)])
    out = capsys.readouterr().out
    assert code == 0
    assert "crossing:" in out
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1, ndmin=2)
    assert data.shape == (3, 6)
    assert np.all(data[:, 5] == 2)
    cfg = json.loads((tmp_path / "scan.config.json").read_text())
    assert cfg["seed"] == 5 and cfg["topology"] == "lattice"


def test_simulate_same_seed_identical_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(SIM_ARGS + ["--out", str(a)]) == 0
    assert cli.main(SIM_ARGS + ["--out", str(b)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.csv"
    assert cli.main(SIM_ARGS[:-1] + ["6", "--out", str(c)]) == 0
    capsys.readouterr()
    assert a.read_bytes() != c.read_bytes()


def test_simulate_unknown_topology_lists_choices(capsys):
    # argparse rejects the choice at parse time, which exits the process
    with pytest.raises(SystemExit) as exc:
        cli.main(["simulate", "--topology", "ring", "--r", "1",
                  "--seed", "1", "--out", "x.csv"])
    err = capsys.readouterr().err
    assert exc.value.code == 1
    for name in cli.TOPOLOGIES:
        assert name in err


def test_simulate_requires_seed(tmp_path, capsys):
    code = cli.main(["simulate", "--topology", "lattice", "--r", "1",
                     "--out", str(tmp_path / "x.csv")])
    assert code == 1
    assert "--seed" in capsys.readouterr().err


def test_simulate_series_needs_gamma(tmp_path, capsys):
    code = cli.main(SIM_ARGS + ["--out", str(tmp_path / "s.csv"),
                                "--series-out", str(tmp_path / "ser.csv")])
    assert code == 1
    assert "--series-gamma" in capsys.readouterr().err


def test_simulate_series_output(tmp_path, capsys):
    code = cli.main(SIM_ARGS + ["--out", str(tmp_path / "s.csv"),
                                "--series-out", str(tmp_path / "ser.csv"),
                                "--series-gamma", "0.8"])
    capsys.readouterr()
    assert code == 0
    series = np.loadtxt(tmp_path / "ser.csv", delimiter=",", skiprows=1)
    assert series.shape == (61, 4)  # initial row + 60 sweeps
    assert np.allclose(series[:, 1:].sum(axis=1), 1.0)


# ---------------------------------------------------------------- oracle


def test_oracle_agrees_with_meanfield(tmp_path, capsys):
    out_csv = tmp_path / "occ.csv"
    code, out = run_cli("oracle", "--N", 20, "--gamma", 0.9, "--r", 1,
                        "--out", out_csv, capsys=capsys)
    assert code == 0
    assert "verdict: Q dominant, agrees with mean field" in out
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1, ndmin=2)
    assert np.allclose(data[:, 1:].sum(axis=1), 1.0, atol=1e-9)


def test_oracle_single_individual_is_stationary(tmp_path, capsys):
    # a lone defector never changes; at gamma=0.5 the mean field also
    # predicts D, so the verdict agrees
    out_csv = tmp_path / "occ1.csv"
    code, _ = run_cli("oracle", "--N", 1, "--gamma", 0.5, "--r", 1,
                      "--init", "0,1,0", "--out", out_csv, capsys=capsys)
    assert code == 0
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1, ndmin=2)
    assert np.allclose(data[:, 1:], [0.0, 1.0, 0.0], atol=1e-12)


def test_oracle_rejects_oversized_population(tmp_path, capsys):
    code = cli.main(["oracle", "--N", "100", "--gamma", "0.5", "--r", "1",
                     "--out", str(tmp_path / "x.csv")])
    assert code == 1


def test_oracle_disagreement_is_reported(tmp_path, capsys):
    # an all-C population is absorbing, but the mean field from the
    # interior predicts D at this angle: exit 2 plus a diagnostic
    out_csv = tmp_path / "occ.csv"
    code = cli.main(["oracle", "--N", "6", "--gamma", "0.5", "--r", "1",
                     "--init", "6,0,0", "--t-end", "1",
                     "--out", str(out_csv)])
    err = capsys.readouterr().err
    assert code == 2
    assert "mean field predicts D" in err
    data = np.loadtxt(out_csv, delimiter=",", skiprows=1, ndmin=2)
    assert np.allclose(data[:, 1:], [1.0, 0.0, 0.0], atol=1e-12)


# ---------------------------------------------------------------- config


def test_config_file_supplies_values(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma = 0.3\nr = 1  # table family\n")
    code, out = run_cli("payoffs", "--config", cfg, capsys=capsys)
    assert code == 0
    echoed = json.loads(out.split("effective-config: ", 1)[1].splitlines()[0])
    assert echoed["gamma"] == 0.3


def test_flags_override_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma=0.3\nr=1\n")
    code, out = run_cli("payoffs", "--config", cfg, "--gamma", 0.7,
                        capsys=capsys)
    assert code == 0
    echoed = json.loads(out.split("effective-config: ", 1)[1].splitlines()[0])
    assert echoed["gamma"] == 0.7


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma=0.3\nr=1\ncolor=red\n")
    code = cli.main(["payoffs", "--config", str(cfg)])
    assert code == 1
    assert "color" in capsys.readouterr().err


def test_config_rejects_unparseable_value(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma=fast\nr=1\n")
    code = cli.main(["payoffs", "--config", str(cfg)])
    assert code == 1
    assert "gamma" in capsys.readouterr().err


def test_missing_config_file(capsys):
    code = cli.main(["payoffs", "--gamma", "0.3", "--r", "1",
                     "--config", "/nonexistent/run.cfg"])
    assert code == 1


def test_dashed_config_keys_accepted(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("t-end = 5\ngamma = 0.5\nr = 1\n")
    code = cli.main(["trajectory", "--config", str(cfg),
                     "--out", str(tmp_path / "t.csv")])
    capsys.readouterr()
    assert code == 0


# ------------------------------------------------------------ entry point


def test_installed_entry_point_smoke():
    exe = shutil.which("alvlab")
    assert exe is not None, "console script not installed"
    out = subprocess.run([exe, "payoffs", "--gamma", "0.3", "--r", "1"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "max deviation" in out.stdout


def test_usage_error_exits_one():
    with pytest.raises(SystemExit) as exc:
        cli.main(["payoffs", "--gamma", "not-a-number", "--r", "1"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 1
