"""Tests pour la ligne de commande."""

import json

import pytest

from indexlab.cli import build_config, build_parser, main, parse_config_file


def _run_json(capsys, argv):
    assert main(argv) == 0
    return json.loads(capsys.readouterr().out)


def test_bound(capsys):
    document = _run_json(capsys, ["bound", "--g", "1", "--d", "1,1,1"])
    result = document["result"]
    assert result["lower"] == "3"
    assert result["upper"] == "11"
    assert document["provenance"]["config"]["multiplicities"] == [1, 1, 1]
    assert "numpy" in document["provenance"]["versions"]


def test_sandwich(capsys):
    result = _run_json(capsys, ["sandwich", "--g", "0", "--d", "1,1"])["result"]
    assert result["lower"] == {"exact": "1", "float": 1.0}
    assert result["upper"]["exact"] == "3"


def test_one_sided_bound(capsys):
    result = _run_json(capsys, ["bound", "--g", "0", "--d", "3", "--one-sided"])["result"]
    assert result["lower"] == "4/3"
    assert result["lower_ceil"] == 2


def test_enumerate_csv(capsys):
    argv = ["enumerate", "--budget", "3", "--embedded", "--min-ends", "3", "--min-genus", "1"]
    assert main(argv + ["--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("# provenance ")
    assert lines[1] == "genus,ends,multiplicities,sided"
    assert lines[2:] == ['1,3,"1,1,1",two']


def test_forms_from_topology(capsys):
    result = _run_json(capsys, ["forms", "--g", "1", "--d", "1,1,1"])["result"]
    assert result["dimension"] == 12
    assert [n["converges"] for n in result["end_norms"]] == [True, False]


def test_repeated_runs_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["enumerate", "--budget", "2", "--nonflat"]
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_config_file_and_flags(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# bornes\ngenus = 1\nmultiplicities = [1, 1, 1]\n", encoding="utf-8")
    args = build_parser().parse_args(["bound", "--config", str(path), "--g", "2"])
    cfg = build_config(args)
    assert cfg.genus == 2
    assert cfg.multiplicities == [1, 1, 1]


def test_parse_config_file_values(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("budget = 4\nformat = csv\nembedded = true\n", encoding="utf-8")
    assert parse_config_file(path) == {"budget": 4, "format": "csv", "embedded": True}


def test_unknown_config_key_exits_2(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("colour = 3\n", encoding="utf-8")
    assert main(["bound", "--config", str(path), "--d", "1,1"]) == 2


def test_malformed_config_line_exits_2(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("genus 1\n", encoding="utf-8")
    assert main(["bound", "--config", str(path)]) == 2


def test_missing_multiplicities_exits_2():
    assert main(["bound", "--g", "1"]) == 2


def test_surface_parameters_without_surface(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("t = 1.2\n", encoding="utf-8")
    assert main(["bound", "--config", str(path), "--d", "1,1"]) == 2


def test_unknown_surface_exits_2():
    assert main(["surface", "helicoid"]) == 2


def test_surface_catenoid(capsys):
    result = _run_json(capsys, ["surface", "catenoid"])["result"]
    assert result["topology"]["multiplicities"] == [1, 1]
    assert result["jorge_meeks"]["relative_error"] < 1e-2


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("indexlab ")
