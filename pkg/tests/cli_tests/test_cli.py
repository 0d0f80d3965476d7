# Copyright (c) 2025 Oracle and/or its affiliates.
# Licensed under the Universal Permissive License v 1.0 as shown at https://oss.oracle.com/licenses/upl/

import json

import pytest

from aos_sched import SolverError
from aos_sched.cli import EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, main
from tests.cli_tests.common import small_config_path  # noqa: F401
from tests.cli_tests.common import SMALL_CONFIG, write_json


def _read_rows(path):
    return path.read_bytes().decode("utf-8").split("\r\n")


def test_solve_writes_relaxed_artifact(tmp_path, small_config_path):  # noqa: F811
    out = tmp_path / "policy.json"
    args = ["solve", "--config", str(small_config_path), "--N", "1", "--out", str(out)]
    assert main(args) == EXIT_OK
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["format"] == "aos-sched-policy/1"
    assert doc["mode"] == "relaxed"
    assert doc["D_re"] == pytest.approx(1.0, abs=1e-6)
    assert len(doc["nodes"]) == 3


def test_solve_at_fixed_price(tmp_path, small_config_path):  # noqa: F811
    out = tmp_path / "policy.json"
    args = ["solve", "--config", str(small_config_path), "--eta", "0.5", "--out", str(out)]
    assert main(args) == EXIT_OK
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["mode"] == "fixed_eta"
    assert doc["eta"] == 0.5
    assert {"J", "D"} <= set(doc)


def test_solve_is_byte_stable(tmp_path, small_config_path):  # noqa: F811
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for out in (first, second):
        main(["solve", "--config", str(small_config_path), "--out", str(out)])
    assert first.read_bytes() == second.read_bytes()


def test_solve_missing_config(tmp_path):
    out = tmp_path / "policy.json"
    args = ["solve", "--config", str(tmp_path / "nope.json"), "--out", str(out)]
    assert main(args) == EXIT_CONFIG
    assert not out.exists()


def test_solve_budget_above_node_count(tmp_path, small_config_path):  # noqa: F811
    out = tmp_path / "policy.json"
    args = ["solve", "--config", str(small_config_path), "--N", "4", "--out", str(out)]
    assert main(args) == EXIT_CONFIG


def test_unknown_config_key(tmp_path):
    config = write_json(tmp_path / "bad.json", {**SMALL_CONFIG, "horizon": 10})
    assert main(["simulate", "--config", str(config), "--greedy"]) == EXIT_CONFIG


def test_invalid_utf8_config_exit_code(tmp_path):
    config = tmp_path / "latin.json"
    config.write_bytes(b'{"N": 1, \xff\xfe}')
    assert main(["simulate", "--config", str(config), "--greedy"]) == EXIT_CONFIG


def test_malformed_preset_exit_code(tmp_path):
    config = write_json(tmp_path / "preset.json", {"N": 6, "T": 10, "paper_preset": {"q": "abc"}})
    assert main(["simulate", "--config", str(config), "--greedy"]) == EXIT_CONFIG


def test_solve_unwritable_output(tmp_path, small_config_path):  # noqa: F811
    out = tmp_path / "missing_dir" / "policy.json"
    args = ["solve", "--config", str(small_config_path), "--eta", "0.5", "--out", str(out)]
    assert main(args) == EXIT_CONFIG
    assert not out.exists()


def test_solver_failure_exit_code(mocker, tmp_path, small_config_path):  # noqa: F811
    mocker.patch("aos_sched.cli.relaxed_policy", side_effect=SolverError("boom", residual=1e-3))
    out = tmp_path / "policy.json"
    assert main(["solve", "--config", str(small_config_path), "--out", str(out)]) == EXIT_SOLVER


def test_simulate_greedy_is_reproducible(tmp_path, small_config_path):  # noqa: F811
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        args = ["simulate", "--config", str(small_config_path), "--greedy", "--seed", "7"]
        assert main(args + ["--out", str(out)]) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    rows = _read_rows(tmp_path / "a.csv")
    assert rows[0] == "scheduler,seed,T,J_avg,D_avg"
    assert rows[1].startswith("greedy,7,300,")
    assert rows[2] == ""


def test_simulate_with_policy_and_several_seeds(tmp_path, small_config_path):  # noqa: F811
    # ---- Arrange ----
    policy = tmp_path / "policy.json"
    main(["solve", "--config", str(small_config_path), "--out", str(policy)])
    out = tmp_path / "runs.csv"
    args = [
        "simulate",
        "--config",
        str(small_config_path),
        "--policy",
        str(policy),
        "--seed",
        "1",
        "2",
        "3",
        "--T",
        "400",
        "--burn-in",
        "100",
        "--out",
        str(out),
    ]

    # ---- Act ----
    exit_code = main(args)

    # ---- Assert ----
    assert exit_code == EXIT_OK
    rows = [row.split(",") for row in _read_rows(out) if row]
    assert [row[1] for row in rows[1:]] == ["1", "2", "3"]
    for row in rows[1:]:
        assert row[2] == "300"
        assert 0.0 <= float(row[4]) <= 1.0


def test_simulate_relaxed_scheduler_lifts_cap(tmp_path, small_config_path):  # noqa: F811
    out = tmp_path / "runs.csv"
    args = ["simulate", "--config", str(small_config_path), "--scheduler", "relaxed"]
    args += ["--out", str(out)]
    assert main(args) == EXIT_OK
    assert _read_rows(out)[1].startswith("relaxed,5,300,")


def test_simulate_rejects_mismatched_policy(tmp_path, small_config_path):  # noqa: F811
    other = write_json(tmp_path / "two.json", {**SMALL_CONFIG, "nodes": SMALL_CONFIG["nodes"][:2]})
    policy = tmp_path / "policy.json"
    main(["solve", "--config", str(other), "--out", str(policy)])
    args = ["simulate", "--config", str(small_config_path), "--policy", str(policy)]
    assert main(args) == EXIT_CONFIG


def test_sweep_without_values(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--mode", "q", "--values", "--out", str(out)]) == EXIT_CONFIG


def test_sweep_rejects_fractional_caps(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--mode", "n", "--values", "2.5", "--out", str(out)]) == EXIT_CONFIG


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])


@pytest.mark.slow
def test_sweep_is_reproducible(tmp_path):
    outputs = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        args = ["sweep", "--mode", "n", "--values", "4", "6", "--T", "2000", "--seeds", "2"]
        assert main(args + ["--out", str(out)]) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    rows = _read_rows(tmp_path / "a.csv")
    assert rows[0] == "x,J_ours_mean,J_ours_se,J_greedy_mean,J_greedy_se,J_lower"
    assert [row.split(",")[0] for row in rows[1:3]] == ["4", "6"]
