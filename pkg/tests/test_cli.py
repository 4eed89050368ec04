"""End-to-end checks of the command-line interface.

Each test drives ``main(argv)`` in-process and inspects exit codes plus
the artifacts written to --out.
"""

import json
import math

import numpy as np
import pytest

from lingrowth.cli import (EXIT_CONFIG, EXIT_HYPOTHESIS,
                           EXIT_NONCONVERGENCE, EXIT_OK, main)


def run(tmp_path, *argv, config=None, name="run"):
    out = tmp_path / name
    args = ["--out", str(out)]
    if config is not None:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(config))
        args += ["--config", str(path)]
    code = main(args + list(argv))
    return code, out


# -- density ------------------------------------------------------------------


def test_density_mu3_has_finite_integral_growth(tmp_path):
    code, out = run(tmp_path, "density", "--kind", "mu", "--mu", "3")
    assert code == EXIT_OK
    report = json.loads((out / "density_report.json").read_text())
    assert report["growth"] == "finite"
    assert report["hypotheses_ok"] is True


def test_density_mu2_has_infinite_growth(tmp_path):
    code, out = run(tmp_path, "density", "--kind", "mu", "--mu", "2")
    assert code == EXIT_OK
    report = json.loads((out / "density_report.json").read_text())
    assert report["growth"] == "infinite"


def test_density_rejects_mu_at_most_one(tmp_path):
    code, _ = run(tmp_path, "density", "--kind", "mu", "--mu", "0.5")
    assert code == EXIT_CONFIG


def test_density_requires_a_spec(tmp_path):
    code, _ = run(tmp_path, "density")
    assert code == EXIT_CONFIG


def test_quiet_suppresses_chatter(tmp_path, capsys):
    code, _ = run(tmp_path, "--quiet", "density", "--kind", "area")
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""


# -- catenoid -----------------------------------------------------------------


def test_catenoid_profile_csv_and_flux_residual(tmp_path):
    code, out = run(tmp_path, "catenoid", "--kind", "area", "--alpha", "1",
                    "--n", "2", "--rho-min", "1.01", "--rho-max", "5",
                    "--samples", "100")
    assert code == EXIT_OK
    lines = (out / "profile.csv").read_text().strip().splitlines()
    assert lines[0] == "rho,value,slope"
    assert len(lines) == 101
    meta = json.loads((out / "profile_meta.json").read_text())
    assert meta["rows"] == 100
    assert meta["ode_residual"] <= 1e-9
    assert meta["neck_radius"] == pytest.approx(1.0)
    # spot-check the first row against arcosh
    rho, value, _ = (float(x) for x in lines[1].split(","))
    assert value == pytest.approx(math.acosh(rho), abs=1e-10)


def test_catenoid_range_below_neck_is_hypothesis_violation(tmp_path, capsys):
    code, _ = run(tmp_path, "catenoid", "--kind", "area", "--alpha", "1",
                  "--rho-min", "0.5", "--rho-max", "5")
    assert code == EXIT_HYPOTHESIS
    assert "neck" in capsys.readouterr().out


def test_catenoid_reports_unbounded_neck_limit(tmp_path, capsys):
    code, _ = run(tmp_path, "catenoid", "--kind", "mu", "--mu", "2",
                  "--sign", "minus", "--convention", "unit",
                  "--alpha", "0.25", "--rho-min", "0.3", "--rho-max", "1.0",
                  "--samples", "40")
    assert code == EXIT_OK
    assert "without bound" in capsys.readouterr().out


# -- solve --------------------------------------------------------------------


def solve_config(**overrides):
    cfg = {
        "density": {"kind": "area"},
        "mesh": {"r_in": 0.5, "r_out": 1.0, "n_r": 8, "n_theta": 24},
        "boundary": {
            "outer": {"kind": "affine", "q": [0.5, 0.3], "c": 0.1},
            "inner": {"kind": "affine", "q": [0.5, 0.3], "c": 0.1},
        },
    }
    cfg.update(overrides)
    return cfg


def test_solve_reproduces_affine_data(tmp_path):
    code, out = run(tmp_path, "solve", config=solve_config())
    assert code == EXIT_OK
    rows = np.loadtxt(out / "solution.csv", delimiter=",", skiprows=1)
    want = 0.5 * rows[:, 1] + 0.3 * rows[:, 2] + 0.1
    assert np.max(np.abs(rows[:, 3] - want)) <= 1e-9
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["converged"] is True


def test_solve_on_annulus_requires_inner_data(tmp_path):
    code, _ = run(tmp_path, "solve", "--kind", "area")
    assert code == EXIT_CONFIG


def test_solve_nonconvergence_exit_code(tmp_path):
    angles = 2.0 * np.pi * np.arange(24) / 24
    cfg = solve_config(solver={"max_iter": 1})
    cfg["boundary"] = {
        "outer": {"kind": "samples", "values": np.cos(4.0 * angles).tolist()},
        "inner": {"kind": "constant", "value": 0.0},
    }
    code, out = run(tmp_path, "solve", config=cfg)
    assert code == EXIT_NONCONVERGENCE
    diag = json.loads((out / "diagnostics.json").read_text())
    assert diag["converged"] is False
    assert diag["iterations"] == 1


# -- experiment ---------------------------------------------------------------

FAST_SWEEP = {"kind": "removability", "epsilons": [0.3, 0.15],
              "n_r": 16, "n_theta": 24, "inner_layers": 4}


def test_experiment_removability_passes(tmp_path, capsys):
    cfg = {"density": {"kind": "area"}, "experiment": FAST_SWEEP}
    code, out = run(tmp_path, "experiment", config=cfg)
    assert code == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["kind"] == "removability"
    assert all(report["checks"].values())
    assert "[PASS]" in capsys.readouterr().out


def test_experiment_epsilon_probe_conflict_is_config_error(tmp_path):
    cfg = {"density": {"kind": "area"},
           "experiment": {**FAST_SWEEP, "epsilons": [0.6, 0.3]}}
    code, _ = run(tmp_path, "experiment", config=cfg)
    assert code == EXIT_CONFIG


def test_experiment_unknown_kind_is_config_error(tmp_path):
    cfg = {"density": {"kind": "area"}, "experiment": {"kind": "banana"}}
    code, _ = run(tmp_path, "experiment", config=cfg)
    assert code == EXIT_CONFIG


def test_experiment_comparison_runs(tmp_path):
    cfg = {"density": {"kind": "area"},
           "experiment": {"kind": "comparison", "trials": 2,
                          "n_r": 8, "n_theta": 24}}
    code, out = run(tmp_path, "--seed", "3", "experiment", config=cfg)
    assert code == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["checks"]["all_trials_hold"] is True
    assert len(report["records"]) == 2


def test_experiment_kind_flag_wins_over_config(tmp_path):
    cfg = {"density": {"kind": "area"},
           "experiment": {**FAST_SWEEP, "kind": "banana"}}
    code, out = run(tmp_path, "experiment",
                    "--experiment-kind", "removability", config=cfg)
    assert code == EXIT_OK
    echoed = json.loads((out / "config.json").read_text())
    assert echoed["experiment"]["kind"] == "removability"


# -- config plumbing ----------------------------------------------------------


def test_density_flags_win_over_config_file(tmp_path):
    cfg = {"density": {"kind": "mu", "mu": 3.0}}
    code, out = run(tmp_path, "density", "--kind", "area", config=cfg)
    assert code == EXIT_OK
    echoed = json.loads((out / "config.json").read_text())
    assert echoed["density"] == {"kind": "area"}
    assert echoed["command"] == "density"
    assert echoed["seed"] == 0


def test_unreadable_config_is_config_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("not json {")
    code = main(["--config", str(bad), "--out", str(tmp_path / "o"),
                 "density", "--kind", "area"])
    assert code == EXIT_CONFIG


def test_config_must_be_an_object(tmp_path):
    bad = tmp_path / "list.json"
    bad.write_text("[1, 2]")
    code = main(["--config", str(bad), "--out", str(tmp_path / "o"),
                 "density", "--kind", "area"])
    assert code == EXIT_CONFIG


def test_missing_subcommand_is_config_error(capsys):
    assert main([]) == EXIT_CONFIG
    capsys.readouterr()


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == EXIT_OK
    assert "density" in capsys.readouterr().out


# -- determinism --------------------------------------------------------------


def test_same_config_and_seed_reproduce_bytes(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "0")
    cfg = {"density": {"kind": "area"}, "experiment": FAST_SWEEP}
    _, first = run(tmp_path, "--quiet", "experiment", config=cfg, name="a")
    _, second = run(tmp_path, "--quiet", "experiment", config=cfg, name="b")
    for artifact in ("report.json", "report.csv", "config.json"):
        assert (first / artifact).read_bytes() == (second / artifact).read_bytes()
