import json
import shutil
import subprocess
from importlib import resources

import pytest

from hypersync.cli import main

DATA = resources.files("hypersync") / "data"


def path(name):
    return str(DATA / f"{name}.json")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def report(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json", "-")
    return code, json.loads(out)


def test_coarsest_fig1(capsys):
    code, rep = report(capsys, "coarsest", path("fig1_left"))
    assert code == 0 and rep["status"] == "ok"
    assert rep["result"]["classes"] == [["1", "5", "6"], ["2", "4"], ["3"]]
    assert rep["command"]["name"] == "coarsest" and len(rep["input_sha256"]) == 64


def test_incidence_fig1(capsys):
    code, rep = report(capsys, "incidence", path("fig1_right"))
    assert code == 0
    res = rep["result"]
    assert res["node_order"] == ["1", "2", "3"] and res["edge_order"] == ["e1", "e2", "e3"]
    assert res["W"] == [["1", "0", "0"], ["0", "1", "0"], ["1", "0", "1"]]
    assert res["T"] == [["1", "1", "0"], ["0", "1", "0"], ["0", "1", "0"]]


def test_lattice_text(capsys):
    code, out, _ = run(capsys, "lattice", path("fig1_left"))
    assert code == 0 and out.startswith("3 balanced partitions")


def test_lattice_too_large(capsys, tmp_path):
    doc = {"nodes": 20, "edges": [{"tail": [str(i)], "head": [str(i % 20 + 1)]} for i in range(1, 21)]}
    f = tmp_path / "ring.json"
    f.write_text(json.dumps(doc))
    code, _, err = run(capsys, "lattice", str(f))
    assert code == 2
    assert "cap" in err.lower() or "large" in err.lower()


def test_reports_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["lattice", path("fig1_left"), "--json", str(out)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_check_balanced_exit_codes(capsys):
    code, out, _ = run(capsys, "check-balanced", path("fig9"), "--partition", "1,2|3,4,5,6,7,8,9,10,11,12")
    assert code == 1 and out.startswith("not balanced")
    code, rep = report(capsys, "check-balanced", path("fig1_left"), "--partition", "1,5,6|2,4|3")
    assert code == 0 and rep["result"]["balanced"] is True


def test_missing_partition(capsys):
    code, _, _ = run(capsys, "check-balanced", path("fig1_left"))
    assert code == 2


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate", path("fig1_left"))[0] == 2
    assert run(capsys, "simulate", path("fig1_left"), "--dt", "0")[0] == 2
    assert run(capsys, "info", "/nonexistent/file.json")[0] == 2


def test_invalid_document(capsys, tmp_path):
    f = tmp_path / "bad.json"
    f.write_text('{"nodes": 2,\n "edges": [{"tail": [["1", 0]], "head": ["2"]}]}')
    code, rep = report(capsys, "validate", str(f))
    assert code == 1 and rep["status"] == "invalid" and "line 2" in rep["result"]["error"]
    assert run(capsys, "coarsest", str(f))[0] == 2


def test_validate_ok(capsys):
    assert run(capsys, "validate", path("fig8"))[0] == 0


def test_simulate_csv(capsys, tmp_path):
    out = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "simulate", path("fig1_left"), "--steps", "4", "--csv", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t," + ",".join(f"x_{i}_0" for i in range(6))
    assert len(lines) == 6


def test_invariance_and_restriction(capsys):
    good = "1,5,6|2,4|3"
    assert run(capsys, "invariance", path("fig1_left"), "--partition", good)[0] == 0
    assert run(capsys, "invariance", path("fig1_left"), "--partition", "1,2|3,4,5,6")[0] == 1
    assert run(capsys, "restriction-check", path("fig1_left"), "--partition", good)[0] == 0


def test_quotient(capsys):
    code, rep = report(capsys, "quotient", path("fig1_left"))
    assert code == 0 and rep["result"]["balanced"] is True


def test_replicator_stability(capsys):
    code, out, _ = run(capsys, "replicator-stability", path("replicator_triplet"))
    assert code == 0 and "neutral" in out and "differs" in out
    code, rep = report(capsys, "replicator-stability", path("replicator_kh"))
    assert code == 0 and rep["result"]["verdict"] == "unstable"


def test_replicator_needs_matrices(capsys):
    assert run(capsys, "replicator-stability", path("fig1_left"))[0] == 2


def test_synchrony_of_matrix(capsys):
    code, rep = report(capsys, "synchrony-of-matrix", path("replicator_kh"))
    assert code == 0
    assert [["1", "2", "3"], ["4"]] in rep["result"]["partitions"]


@pytest.mark.skipif(shutil.which("hypersync") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["hypersync", "coarsest", path("fig1_left")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == "coarsest balanced: {1,5,6} | {2,4} | {3}"
