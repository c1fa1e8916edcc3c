import json

import numpy as np
import pytest

from airformation import cli, config_io, engine
from airformation.engine import CostReport, SimTrace
from airformation.model import ConfigError, RandomStronglyConnected


HEX = config_io.preset("hexagon6")


def small_config_text(seed=3, max_rounds=6):
    doc = config_io.resolved_config_dict(HEX)
    doc.update(
        {
            "n": 3,
            "seed": seed,
            "max_rounds": max_rounds,
            "sample_rate": 4,
            "formation": {"displacements": [[1.0, 0.0], [-0.5, 0.5], [-0.5, -0.5]]},
            "params": {"a_x": 0.5, "a_y": 0.5, "b_x": 0.5, "b_y": 0.5, "sigma": 0.8},
        }
    )
    return config_io.dump_json(doc)


def test_sigma_boundary_rejected_with_named_constraint():
    doc = json.loads(small_config_text())
    doc["params"]["sigma"] = 1.0
    with pytest.raises(ConfigError, match=r"params\.sigma.*open interval"):
        config_io.parse_config_dict(doc)


def test_missing_formation_reported_with_path():
    doc = json.loads(small_config_text())
    del doc["formation"]
    with pytest.raises(ConfigError, match=r"formation\.displacements"):
        config_io.parse_config_dict(doc)


def test_malformed_displacements_rejected():
    doc = json.loads(small_config_text())
    doc["formation"]["displacements"] = [[1.0], [2.0], [3.0]]
    with pytest.raises(ConfigError, match=r"formation\.displacements"):
        config_io.parse_config_dict(doc)


def test_hexagon6_preset_parameters():
    cfg = HEX
    assert cfg.n == 6
    assert np.all(cfg.params.a_x == 0.5) and np.all(cfg.params.a_y == 0.5)
    assert np.all(cfg.params.b_x == 0.5) and np.all(cfg.params.b_y == 0.5)
    assert cfg.params.sigma == 0.8
    assert cfg.delta_bounds == (10.0, 30.0)
    assert (cfg.fading.lo, cfg.fading.hi) == (0.0, 1.0)
    assert isinstance(cfg.topology, RandomStronglyConnected)
    radii = np.linalg.norm(cfg.formation.displacements, axis=1)
    assert np.allclose(radii, 1.0)


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError, match="unknown preset"):
        config_io.preset("pentagon5")


def test_config_round_trip():
    text = small_config_text()
    cfg = config_io.parse_config(text)
    again = config_io.parse_config(config_io.config_json(cfg))
    assert again == cfg


def test_parse_config_from_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(small_config_text())
    cfg = config_io.parse_config(path)
    assert cfg.n == 3
    with pytest.raises(ConfigError, match="not found"):
        config_io.parse_config(tmp_path / "missing.json")


def test_empty_trace_gives_header_only_trajectory(tmp_path):
    trace = SimTrace(samples=[], round_summaries=[], converged_round=None, consensus_point=None)
    report = CostReport(per_round_broadcast=[], per_round_orthogonal=[])
    paths = config_io.emit_outputs(trace, report, HEX, tmp_path)
    assert paths["trajectory"].read_text() == config_io.TRAJECTORY_HEADER + "\n"


def test_metrics_carries_cumulative_broadcast_identity(tmp_path):
    cfg = config_io.parse_config(small_config_text())
    trace, report = cli._execute(cfg)
    paths = config_io.emit_outputs(trace, report, cfg, tmp_path)
    metrics = json.loads(paths["metrics"].read_text())
    assert metrics["g_broadcast_cumulative"] == 3 * trace.rounds_executed()
    assert metrics["rounds_executed"] == trace.rounds_executed()
    assert len(metrics["rounds"]) == trace.rounds_executed()
    assert metrics["formation"]["displacements"] == [
        list(row) for row in cfg.formation.displacements
    ]


def test_replay_from_emitted_config_is_byte_identical(tmp_path):
    cfg = config_io.parse_config(small_config_text(seed=11, max_rounds=12))
    trace, report = cli._execute(cfg)
    first = config_io.emit_outputs(trace, report, cfg, tmp_path / "a")

    replayed = config_io.parse_config(first["config"])
    trace2, report2 = cli._execute(replayed)
    second = config_io.emit_outputs(trace2, report2, replayed, tmp_path / "b")

    assert first["trajectory"].read_bytes() == second["trajectory"].read_bytes()
    assert first["metrics"].read_bytes() == second["metrics"].read_bytes()
    assert first["config"].read_bytes() == second["config"].read_bytes()


def test_cli_run_exit_codes(tmp_path, capsys):
    code = cli.main(["run", "--preset", "hexagon6", "--seed", "0", "--out", str(tmp_path / "ok")])
    assert code == cli.EXIT_OK
    assert "converged at round" in capsys.readouterr().out

    # one round on a tight tolerance cannot converge
    doc = json.loads(small_config_text())
    doc["max_rounds"] = 1
    doc["convergence_tol"] = 1e-15
    cfg_path = tmp_path / "hard.json"
    cfg_path.write_text(config_io.dump_json(doc))
    code = cli.main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "hard")])
    assert code == cli.EXIT_NOT_CONVERGED

    code = cli.main(["run", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
    assert code == cli.EXIT_CONFIG

    code = cli.main(["run", "--out", str(tmp_path)])  # neither preset nor config
    assert code == cli.EXIT_CONFIG


def test_cli_seed_flag_overrides_config(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert cli.main(["run", "--preset", "hexagon6", "--seed", "5", "--out", str(out_a)]) == 0
    assert cli.main(["run", "--preset", "hexagon6", "--seed", "5", "--out", str(out_b)]) == 0
    assert (out_a / "trajectory.csv").read_bytes() == (out_b / "trajectory.csv").read_bytes()
    cfg = json.loads((out_a / "config.json").read_text())
    assert cfg["seed"] == 5


def test_cli_out_dir_env_override(tmp_path, monkeypatch):
    target = tmp_path / "from_env"
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(target))
    assert cli.main(["run", "--preset", "hexagon6", "--seed", "2"]) == 0
    assert (target / "trajectory.csv").exists()


def test_cli_certify_matrix_file(tmp_path, capsys):
    path = tmp_path / "m.csv"
    path.write_text("0.5,0.5\n0.25,0.75\n")
    code = cli.main(["certify", str(path)])
    assert code == cli.EXIT_OK
    cert = json.loads(capsys.readouterr().out)
    assert cert["row_stochastic"] is True
    assert cert["irreducible"] is True
    assert cert["primitive"] is True

    missing = cli.main(["certify", str(tmp_path / "absent.csv")])
    assert missing == cli.EXIT_CONFIG


def test_cli_sweep_writes_summary_and_subdirs(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(small_config_text(max_rounds=20))
    out = tmp_path / "sweep"
    code = cli.main(
        ["sweep", "--config", str(cfg_path), "--seeds", "3", "--first-seed", "4", "--out", str(out)]
    )
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["seeds"] == 3 and summary["first_seed"] == 4
    assert len(summary["results"]) == 3
    for seed in (4, 5, 6):
        assert (out / f"seed_{seed:05d}" / "trajectory.csv").exists()
    if summary["n_converged"] == 3:
        assert code == cli.EXIT_OK
    else:
        assert code == cli.EXIT_NOT_CONVERGED


def test_trajectory_floats_have_full_precision(tmp_path):
    cfg = config_io.parse_config(small_config_text())
    trace, report = cli._execute(cfg)
    paths = config_io.emit_outputs(trace, report, cfg, tmp_path)
    lines = paths["trajectory"].read_text().splitlines()
    assert lines[0] == "t,agent,x,y,theta_x,theta_y"
    # reparse a row and compare against the in-memory sample exactly
    t, agent, x, y, tx, ty = lines[1 + 3].split(",")
    sample = trace.samples[3]
    assert float(t) == sample.t and int(agent) == sample.agent
    assert float(x) == sample.x and float(y) == sample.y
    assert float(tx) == sample.theta_x and float(ty) == sample.theta_y
