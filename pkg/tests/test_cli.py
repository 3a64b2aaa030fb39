import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from meandim.cli import cli

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

BINARY_COVERING = {
    "name": "binary-covering",
    "kind": "covering-profile",
    "system": {"kind": "full-shift", "alphabet": {"kind": "interval", "levels": 2}, "W": 1},
    "grids": {"epsilons": [0.75, 0.5, 0.25, 0.125], "N": [1, 2]},
    "mode": "exact",
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def write_config(tmp_path):
    def write(data, name="config.json"):
        path = tmp_path / name
        path.write_text(data if isinstance(data, str) else json.dumps(data))
        return str(path)

    return write


def test_version(runner):
    assert runner.invoke(cli, ["version"]).exit_code == 0


def test_schema_is_json(runner):
    result = runner.invoke(cli, ["schema"])
    assert result.exit_code == 0
    assert "experiments" in json.loads(result.stdout)["properties"]


def test_validate(runner, write_config):
    path = write_config({"experiments": [BINARY_COVERING]})
    assert runner.invoke(cli, ["validate", "-c", path]).exit_code == 0


def test_malformed_json_exits_2(runner, write_config):
    path = write_config('{"experiments": [')
    assert runner.invoke(cli, ["validate", "-c", path]).exit_code == 2
    assert runner.invoke(cli, ["run", "-c", path]).exit_code == 2


def test_unknown_kind_exits_2(runner, write_config):
    path = write_config({"experiments": [dict(BINARY_COVERING, kind="entropy")]})
    assert runner.invoke(cli, ["run", "-c", path]).exit_code == 2


def test_missing_config_exits_2(runner, tmp_path):
    assert runner.invoke(cli, ["run", "-c", str(tmp_path / "absent.json")]).exit_code == 2


def test_enumeration_budget_exits_3(runner, write_config, tmp_path):
    big = dict(BINARY_COVERING, system={"kind": "full-shift", "alphabet": {"kind": "interval", "levels": 256},
                                        "W": 3})
    path = write_config({"experiments": [big]})
    result = runner.invoke(cli, ["run", "-c", path, "-o", str(tmp_path / "out")])
    assert result.exit_code == 3
    manifest = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert manifest["exit_code"] == 3


def test_budget_env_override(runner, write_config, tmp_path, monkeypatch):
    monkeypatch.setenv("MEANDIM_BUDGET_POINTS", "4")
    path = write_config({"experiments": [BINARY_COVERING]})
    assert runner.invoke(cli, ["run", "-c", path, "-o", str(tmp_path / "out")]).exit_code == 3


def test_run_writes_results(runner, write_config, tmp_path):
    path = write_config({"experiments": [BINARY_COVERING]})
    out = tmp_path / "out"
    result = runner.invoke(cli, ["covering", "-c", path, "-o", str(out), "-j", "1"])
    assert result.exit_code == 0
    assert {p.name for p in out.iterdir()} == {"results.json", "results.csv", "manifest.json"}
    data = json.loads((out / "results.json").read_text())
    assert data["experiments"][0]["name"] == "binary-covering"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "covering"
    assert manifest["experiments"][0]["passed"]


def test_subcommand_without_matching_kind(runner, write_config, tmp_path):
    path = write_config({"experiments": [BINARY_COVERING]})
    assert runner.invoke(cli, ["tiling", "-c", path, "-o", str(tmp_path / "out")]).exit_code == 2


def test_strict_turns_failed_checks_into_exit_1(runner, write_config, tmp_path):
    path = write_config({"experiments": [dict(BINARY_COVERING, expect={"low": 100.0})]})
    assert runner.invoke(cli, ["run", "-c", path, "-o", str(tmp_path / "a")]).exit_code == 0
    assert runner.invoke(cli, ["run", "-c", path, "-o", str(tmp_path / "b"), "--strict"]).exit_code == 1


def test_results_are_reproducible(runner, write_config, tmp_path):
    path = write_config({"experiments": [BINARY_COVERING]})
    for name in ("a", "b"):
        assert runner.invoke(cli, ["run", "-c", path, "-o", str(tmp_path / name)]).exit_code == 0
    assert (tmp_path / "a" / "results.json").read_text() == (tmp_path / "b" / "results.json").read_text()


def test_suite_needs_a_name(runner):
    assert runner.invoke(cli, ["suite"]).exit_code == 2


def test_unknown_suite_name(runner):
    assert runner.invoke(cli, ["suite", "lorenz"]).exit_code == 2


@pytest.mark.slow
def test_tiling_config(runner, tmp_path):
    result = runner.invoke(cli, ["tiling", "-c", str(CONFIGS / "tiling.json"), "-o", str(tmp_path), "--strict"])
    assert result.exit_code == 0


@pytest.mark.slow
@pytest.mark.parametrize("name", ["hilbert", "harmonic", "geometric", "algebraic-linked"])
def test_example_suites(runner, tmp_path, name):
    result = runner.invoke(cli, ["suite", name, "-o", str(tmp_path)])
    assert result.exit_code == 0
