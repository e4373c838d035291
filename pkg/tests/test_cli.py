import json
from pathlib import Path

import pytest
import yaml

from occlusion_swarm.cli import main, parse_seeds
from occlusion_swarm.config import from_dict
from occlusion_swarm.logs import atomic_write, comparable_metadata, load_log

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
RECT = str(SCENARIOS / "rect_transport.yaml")
U_FILL = str(SCENARIOS / "u_fill.yaml")


def test_parse_seeds():
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    assert parse_seeds("3,1,7") == [3, 1, 7]
    assert parse_seeds("1..2,9") == [1, 2, 9]


def test_validate_prints_merged_config(capsys):
    assert main(["validate", "--config", U_FILL]) == 0
    data = yaml.safe_load(capsys.readouterr().out)
    assert data["shape"]["kind"] == "U" and data["controller"]["attach_count"] == 4


def test_validate_output_roundtrips(tmp_path, capsys):
    assert main(["validate", "--config", U_FILL, "--set", "robot_count=7", "--seed", "4"]) == 0
    merged = tmp_path / "merged.yaml"
    merged.write_text(capsys.readouterr().out)
    assert main(["validate", "--config", str(merged)]) == 0
    again = capsys.readouterr().out
    assert from_dict(yaml.safe_load(again)) == from_dict(yaml.safe_load(merged.read_text()))
    assert yaml.safe_load(again)["robot_count"] == 7


def test_missing_config_exit_1(capsys):
    assert main(["validate", "--config", "nope.yaml"]) == 1
    assert "not found" in capsys.readouterr().err


def test_unknown_override_lists_keys(capsys):
    assert main(["validate", "--config", U_FILL, "--set", "controller.kwall=1"]) == 1
    assert "controller.k_wall" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["launch"]) == 1
    assert main(["fill", "--config", RECT]) == 1  # wrong experiment for the command


def _trial(tmp_path, name):
    out = tmp_path / name
    code = main(["transport", "--config", RECT, "--seed", "42", "--out", str(out), "--render"])
    return code, out / "rect_transport-seed42"


def test_transport_run_writes_identical_logs(tmp_path):
    code_a, a = _trial(tmp_path, "a")
    code_b, b = _trial(tmp_path, "b")
    assert code_a == code_b == 0
    for name in ("series.csv", "robots.csv", "trial.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    ma, mb = (json.loads((d / "meta.json").read_text()) for d in (a, b))
    assert comparable_metadata(ma) == comparable_metadata(mb)
    log = load_log(a)
    assert log["series_columns"][:3] == ["step", "time_s", "obj_x"]
    assert log["robot_columns"] == ["step", "robot_id", "x", "y", "theta", "state", "role", "led"]
    assert log["meta"]["outcome"] == "Success"
    assert (a / "trial.svg").read_text().lstrip().startswith("<?xml")


def test_goal_missed_exit_2(tmp_path):
    assert main(["transport", "--config", RECT, "--set", "max_steps=20", "--out", str(tmp_path)]) == 2


def test_render_subcommand(tmp_path, capsys):
    main(["fill", "--config", U_FILL, "--set", "max_steps=50", "--out", str(tmp_path)])
    log_dir = tmp_path / "u_fill-seed0"
    assert main(["render", str(log_dir), "--out", str(tmp_path / "x.svg")]) == 0
    assert (tmp_path / "x.svg").stat().st_size > 1000
    assert main(["render", str(tmp_path / "missing")]) == 1


def test_batch_writes_report(tmp_path):
    code = main(["batch", "--config", U_FILL, "--seeds", "1..2", "--set", "max_steps=40", "--out", str(tmp_path)])
    assert code == 2  # nothing fills in 40 ticks
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["seeds"] == [1, 2] and rep["success_rate"] == 0.0


def test_batch_sweep(tmp_path):
    code = main(["batch", "--config", RECT, "--seeds", "0", "--set", "light=[0.1, 0.0]",
                 "--sweep", "robot_count=2,3", "--out", str(tmp_path), "--log"])
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert [p["sweep"]["value"] for p in rep["points"]] == [2, 3]
    assert (tmp_path / "robot_count=2" / "rect_transport-seed0" / "meta.json").exists()


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "sub" / "f.txt"
    atomic_write(target, "hello")
    atomic_write(target, "again")
    assert target.read_text() == "again"
    assert [p.name for p in target.parent.iterdir()] == ["f.txt"]


@pytest.mark.parametrize("bad", ["--jobs=0"])
def test_batch_bad_jobs(bad, tmp_path):
    assert main(["batch", "--config", RECT, "--seeds", "0", bad, "--out", str(tmp_path)]) == 1
