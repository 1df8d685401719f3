from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from tropcount.cli import main

INPUTS = Path(__file__).resolve().parent.parent / "inputs"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_degree_hexagon_neighboring(capsys):
    code, out, _ = run(["degree", str(INPUTS / "hexagon_neighboring.json")], capsys)
    data = json.loads(out)
    assert code == 0 and data["degree"] == 2 and len(data["curves"]) == 1


def test_degree_hexagon_dual(capsys):
    code, out, _ = run(["degree", str(INPUTS / "hexagon_dual.json"), "--format", "table"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "2 curves × mult 1; degree 2"


def test_degree_zero(capsys):
    code, out, _ = run(["degree", str(INPUTS / "degree_zero.json")], capsys)
    assert code == 0 and json.loads(out) == {"degree": 0, "curves": [], "lengths": ["2", "3", "5"]}


def test_degree_from_stdin(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO((INPUTS / "hexagon_dual.json").read_text()))
    code, out, _ = run(["degree", "-"], capsys)
    assert code == 0 and json.loads(out)["degree"] == 2


def test_malformed_json_reports_position(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 6,\n "crossratios": [}')
    code, _, err = run(["degree", str(bad)], capsys)
    assert code == 1
    assert "line 2" in err and "column" in err


def test_missing_file(capsys):
    code, _, err = run(["degree", "/nonexistent/file.json"], capsys)
    assert code == 1 and "error" in err


def test_non_generic_lengths(tmp_path, capsys):
    obj = json.loads((INPUTS / "hexagon_neighboring.json").read_text())
    obj["crossratios"][0]["length"] = "2"
    path = tmp_path / "edge.json"
    path.write_text(json.dumps(obj))
    code, _, err = run(["degree", str(path)], capsys)
    assert code == 2 and "general position" in err
    code, out, _ = run(["degree", str(path), "--resample"], capsys)
    assert code == 0 and json.loads(out)["degree"] == 2


def test_triangulation_hexagon(capsys):
    code, out, _ = run(["triangulation", "--n", "6", "--diagonals", "2-4,4-6,2-6", "--interp", "neighboring",
                        "--lengths", "1,1,1", "--format", "table"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "1 curve × mult 2; degree 2; oracle agrees"
    assert out.splitlines()[1] == "d = 1, k = 1: expected 1 curve(s), each of mult 2"


def test_triangulation_octagon(capsys):
    code, out, _ = run(["triangulation", "--n", "8", "--diagonals", "2-8,2-4,4-6,6-8,4-8", "--interp", "dual",
                        "--format", "table"], capsys)
    assert code == 0
    assert out.splitlines()[0].startswith("4 curves × mult 1; degree 4")


@pytest.mark.parametrize("interp", ["dual", "neighboring", "intersecting", "dual,neighboring,intersecting"])
def test_triangulation_fan(interp, capsys):
    code, out, _ = run(["triangulation", "--n", "6", "--diagonals", "1-3,1-4,1-5", "--interp", interp], capsys)
    data = json.loads(out)
    assert code == 0
    assert (len(data["curves"]), data["degree"], data["oracle_agrees"]) == (1, 1, True)


def test_triangulation_errors(capsys):
    code, _, err = run(["triangulation", "--n", "6", "--diagonals", "1-4,2-5,2-4"], capsys)
    assert code == 1 and "cross" in err
    code, _, _ = run(["triangulation", "--n", "6", "--diagonals", "2-4,4-6,2-6", "--interp", "dual,dual"], capsys)
    assert code == 1
    code, _, _ = run(["triangulation", "--n", "8", "--diagonals", "2-8,2-4,4-6,6-8,4-8", "--length", "1"], capsys)
    assert code == 2


@pytest.mark.parametrize("n,top", [(5, 1), (6, 2)])
def test_spectrum_exhaustive(n, top, capsys):
    code, out, _ = run(["spectrum", "--n", str(n), "--mode", "exhaustive", "--verify"], capsys)
    data = json.loads(out)
    assert code == 0 and max(data["degrees"]) == top
    assert all(int(d) == v for d, v in data["verified"].items())


def test_spectrum_refuses_large_exhaustive(capsys):
    code, _, err = run(["spectrum", "--n", "9", "--mode", "exhaustive"], capsys)
    assert code == 1 and "force" in err


def test_spectrum_output_is_independent_of_jobs(capsys):
    _, one, _ = run(["spectrum", "--n", "7", "--budget", "200", "--seed", "3"], capsys)
    _, two, _ = run(["spectrum", "--n", "7", "--budget", "200", "--seed", "3", "--jobs", "2"], capsys)
    assert one == two


def test_verify_small(capsys):
    code, out, _ = run(["verify", "--n-max", "5"], capsys)
    assert code == 0 and "FAIL" not in out
    code, _, _ = run(["verify", "--n-max", "10"], capsys)
    assert code == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tropcount", "degree", str(INPUTS / "hexagon_dual.json"),
                           "--format", "table"], capture_output=True, text=True)
    assert proc.returncode == 0 and "degree 2" in proc.stdout
