"""
Tests for the gausstail command line.
"""
import csv
import json
import math

import pytest

from app import exit_code_for, main
from cli.commands import UsageError, level_grid
from core.cli_strings import EXIT_ACCEPTANCE_FAILURE, EXIT_CONFIG_ERROR, EXIT_INPUT_ERROR, EXIT_OK
from simulation.field import DomainSizeError, SimulationError


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    monkeypatch.setenv("GAUSSTAIL_THREADS", "1")


def write_square(path, side):
    corners = [(0, 0), (side, 0), (side, side), (0, side)]
    edges = [{"type": "segment", "from": list(corners[i]), "to": list(corners[(i + 1) % 4])} for i in range(4)]
    path.write_text(json.dumps({"dimension": 2, "components": [{"outer": edges}]}), encoding="utf-8")
    return path


def test_coeffs_json(fixture_path, tmp_path):
    out = tmp_path / "square.json"
    assert main(["coeffs", "--geometry", str(fixture_path("unit_square")), "--out", str(out)]) == EXIT_OK
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["exact"]["sigma2"] == pytest.approx(1.0)
    assert record["exact"]["L1"] == pytest.approx(4.0)
    assert record["exact"]["L0"] == pytest.approx(1.0)
    assert record["manifest"]["command"] == "coeffs"
    assert len(record["manifest"]["input_hash"]) == 64


def test_coeffs_polytope_to_stdout(fixture_path, capsys):
    assert main(["coeffs", "--geometry", str(fixture_path("cube"))]) == EXIT_OK
    record = json.loads(capsys.readouterr().out)
    assert record["exact"]["L1"] == pytest.approx(3.0)
    assert record["exact"]["L3"] == pytest.approx(1.0)


def test_expand_csv_is_deterministic(fixture_path, tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    arguments = ["expand", "--geometry", str(fixture_path("angle")), "--u-min", "1", "--u-max", "4", "--u-step", "0.5"]
    assert main(arguments + ["--out", str(first)]) == EXIT_OK
    assert main(arguments + ["--out", str(second)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    assert b"\r\n" not in first.read_bytes()
    assert (tmp_path / "a.csv.manifest.json").exists()

    rows = list(csv.reader(first.read_text(encoding="utf-8").splitlines()))
    assert rows[0] == ["u", "term_L0", "term_L1", "term_sigma2", "total"]
    assert [float(row[0]) for row in rows[1:]] == [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]
    at_two_and_a_half = rows[4]
    assert float(at_two_and_a_half[-1]) == pytest.approx(0.019771, abs=2e-6)


def test_simulate_writes_estimates(fixture_path, tmp_path):
    out = tmp_path / "point.csv"
    arguments = ["simulate", "--geometry", str(fixture_path("single_point")), "--levels", "1,2",
                 "--replicates", "500", "--grid-h", "0.1", "--seed", "3", "--no-refine", "--out", str(out)]
    assert main(arguments) == EXIT_OK
    rows = list(csv.DictReader(out.read_text(encoding="utf-8").splitlines()))
    assert [float(row["u"]) for row in rows] == [1.0, 2.0]
    assert all(int(row["replicates"]) == 500 for row in rows)
    record = json.loads((tmp_path / "point.record.json").read_text(encoding="utf-8"))
    assert record["manifest"]["seed"] == 3
    assert record["refinement"] == []


def test_simulate_record_never_replaces_the_csv(fixture_path, tmp_path):
    out = tmp_path / "run.json"
    arguments = ["simulate", "--geometry", str(fixture_path("single_point")), "--levels", "2",
                 "--replicates", "200", "--grid-h", "0.1", "--no-refine", "--out", str(out)]
    assert main(arguments) == EXIT_OK
    assert out.read_text(encoding="utf-8").startswith("u,p_hat,")
    record = json.loads((tmp_path / "run.record.json").read_text(encoding="utf-8"))
    assert record["estimates"][0]["replicates"] == 200


def test_simulate_without_out_prints_csv_and_record(fixture_path, capsys):
    arguments = ["simulate", "--geometry", str(fixture_path("single_point")), "--levels", "2",
                 "--replicates", "200", "--grid-h", "0.1", "--no-refine"]
    assert main(arguments) == EXIT_OK
    table, _, record = capsys.readouterr().out.partition("\n{")
    assert table.splitlines()[0].startswith("u,p_hat,")
    assert json.loads("{" + record)["manifest"]["command"] == "simulate"


def test_examples_without_oracle(tmp_path):
    out = tmp_path / "examples.json"
    assert main(["examples", "--oracle-off", "--out", str(out)]) == EXIT_OK
    record = json.loads(out.read_text(encoding="utf-8"))
    assert record["rows"]
    assert all(row["passed"] for row in record["rows"])


@pytest.mark.parametrize("arguments", [
    ["expand", "--geometry", "missing.json", "--u-min", "1", "--u-max", "2", "--u-step", "0.5"],
    ["expand", "--geometry", "{square}", "--u-min", "1", "--u-max", "2", "--u-step", "0"],
    ["simulate", "--geometry", "{square}", "--levels", "two"],
    ["coeffs"],
    ["frobnicate"],
])
def test_input_errors_exit_2(arguments, tmp_path):
    square = write_square(tmp_path / "square.json", 1.0)
    arguments = [a.replace("{square}", str(square)) for a in arguments]
    assert main(arguments) == EXIT_INPUT_ERROR


def test_invalid_geometry_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dimension": 2, "components": [{"outer": []}]}', encoding="utf-8")
    assert main(["coeffs", "--geometry", str(bad)]) == EXIT_INPUT_ERROR


def test_bad_config_exits_3(fixture_path, tmp_path):
    config = tmp_path / "config.json"
    config.write_text('{"simulation": {"waves": 1}}', encoding="utf-8")
    arguments = ["--config", str(config), "coeffs", "--geometry", str(fixture_path("unit_square"))]
    assert main(arguments) == EXIT_CONFIG_ERROR
    config.write_text("{not json", encoding="utf-8")
    assert main(arguments) == EXIT_CONFIG_ERROR


def test_oversized_domain_exits_3(tmp_path):
    square = write_square(tmp_path / "big.json", 3.5)
    arguments = ["simulate", "--geometry", str(square), "--levels", "2", "--replicates", "10", "--no-refine"]
    assert main(arguments) == EXIT_CONFIG_ERROR


def test_exit_code_mapping():
    assert exit_code_for(DomainSizeError("too big")) == EXIT_CONFIG_ERROR
    assert exit_code_for(SimulationError("bad")) == EXIT_INPUT_ERROR
    assert exit_code_for(UsageError("bad")) == EXIT_INPUT_ERROR
    assert exit_code_for(RuntimeError("other")) is None
    assert EXIT_ACCEPTANCE_FAILURE == 4


def test_level_grid():
    assert level_grid(1.0, 2.0, 0.25) == [1.0, 1.25, 1.5, 1.75, 2.0]
    assert level_grid(1.0, 1.0, 0.5) == [1.0]
    assert math.isclose(level_grid(0.1, 0.3, 0.1)[-1], 0.3)
    with pytest.raises(UsageError):
        level_grid(2.0, 1.0, 0.5)
