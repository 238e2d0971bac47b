import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from calabi_glue import cli
from calabi_glue.obstruction import constant_curvature, random_einstein, to_mapping


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_indicial_passes_and_reports(capsys):
    code, out, _ = run(["indicial", "--dim", "6", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "PASS" and doc["failing"] == []
    assert doc["command"] == "calabi-glue indicial --dim 6 --format json"


@pytest.mark.parametrize("argv", [
    ["indicial", "--dim", "2"],
    ["indicial", "--dim", "6", "--operator", "P7"],
    ["verify-calabi", "--n", "1"],
    ["glue-sweep", "--t", "1e-4"],
    ["glue-sweep", "--t", "a,b"],
    ["obstruction"],
    ["obstruction", "--builtin", "flat", "--tol-nonsense", "1"],
    ["obstruction", "--builtin", "flat", "--tol-ledger", "x"],
    ["obstruction", "--builtin", "flat", "--tol-ledger"],
    ["no-such-command"],
    [],
])
def test_usage_errors_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert out == ""
    assert err


def test_tolerance_override_turns_failure(capsys):
    code, out, _ = run(["verify-calabi", "--n", "2", "--points", "3", "--tol-ricci-flat", "1e-20"], capsys)
    assert code == 1
    assert "ricci_flat" in out and "FAIL" in out


def test_tolerance_equals_syntax(capsys):
    code, out, _ = run(["obstruction", "--builtin", "flat", "--nodes", "20000", "--format", "json",
                        "--tol-ledger=1e-9"], capsys)
    assert code == 0
    assert json.loads(out)["config"]["tolerances"] == {"ledger": 1e-9}


def test_obstruction_examples(capsys):
    code, out, _ = run(["obstruction", "--builtin", "football", "--n", "3", "--nodes", "20000",
                        "--format", "json"], capsys)
    assert code == 0
    res = json.loads(out)["results"]
    assert res["classification"] == "obstructed" and res["wall_value"] == pytest.approx(96.0)
    code, out, _ = run(["obstruction", "--builtin", "flat", "--nodes", "0", "--format", "json"], capsys)
    assert json.loads(out)["results"]["classification"] == "unobstructed"


def test_data_file_ingestion(tmp_path, capsys):
    good = tmp_path / "cc.json"
    good.write_text(json.dumps(to_mapping(constant_curvature(-1.0, 2))))
    code, out, _ = run(["obstruction", "--data", str(good), "--nodes", "20000", "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out)["config"]["data_sha256"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 2, "lambda": 0.0, "riemann": [[1, 2, 3, 4, 1.0]]}))
    code, _, err = run(["obstruction", "--data", str(bad)], capsys)
    assert code == 2 and "Bianchi" in err
    code, _, err = run(["obstruction", "--data", str(tmp_path / "missing.json")], capsys)
    assert code == 2


def test_glue_sweep_table_and_out(tmp_path, capsys):
    table, report = tmp_path / "t.csv", tmp_path / "r.txt"
    code, out, _ = run(["glue-sweep", "--n", "2", "--table", str(table), "--out", str(report)], capsys)
    assert code == 0
    assert report.read_text() == out
    rows = list(csv.DictReader(table.open()))
    assert len(rows) == 5 and set(rows[0]) == {"t", "rho", "residual", "residual_over_t2rho2"}


def test_flat_sweep_is_marked_degenerate(capsys):
    code, out, _ = run(["glue-sweep", "--builtin", "flat", "--n", "3", "--format", "json"], capsys)
    assert code == 0
    assert "degenerate: flat" in json.loads(out)["notes"]


def test_reports_are_byte_identical_across_processes(tmp_path):
    argv = [sys.executable, "-m", "calabi_glue.cli", "obstruction", "--builtin", "kahler-einstein",
            "--n", "2", "--nodes", "50000", "--seed", "11", "--format", "json"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and a
    assert json.loads(a)["config_digest"]


def test_seed_changes_bruteforce_only(tmp_path, capsys):
    """Random data: U(n)-symmetric models give a constant integrand and no seed dependence."""
    path = tmp_path / "r.json"
    path.write_text(json.dumps(to_mapping(random_einstein(2, np.random.default_rng(4)))))
    outs = []
    for seed in ("1", "2"):
        _, out, _ = run(["obstruction", "--data", str(path), "--nodes", "20000",
                         "--seed", seed, "--format", "json"], capsys)
        outs.append(json.loads(out)["results"])
    assert outs[0]["surface_integral_closed"] == outs[1]["surface_integral_closed"]
    assert outs[0]["surface_integral_bruteforce"] != outs[1]["surface_integral_bruteforce"]
