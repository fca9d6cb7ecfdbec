import json
import subprocess
import sys

import pytest

from dlvsym import catalog, cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_symbolic_row(capsys):
    code, out, _ = run(capsys, "verify", "--table", "2", "--case", "1")
    assert code == 0
    assert "Q1_1" in out and "summary: total=4 passed=4 failed=0" in out


def test_verify_json_is_reproducible(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, _, _ = run(capsys, "verify", "--table", "2", "--case", "9", "--mode", "both",
                         "--seed", "1,2", "--seed", "5", "--json", str(p))
        assert code == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    assert list(doc) == ["command", "config", "records", "summary"]
    assert doc["config"]["seeds"] == [1, 2, 5]
    rec = doc["records"][0]
    assert list(rec) == ["table", "case_id", "variant", "seed", "operator", "kind", "pivot",
                         "verdict", "expected", "witness", "elapsed_ms"]
    assert rec["elapsed_ms"] is None


def test_verify_timing_flag(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(capsys, "verify", "--table", "1", "--case", "1", "--timing", "--json", str(path))
    rec = json.loads(path.read_text())["records"][0]
    assert isinstance(rec["elapsed_ms"], float)


def test_verify_reports_mismatch(monkeypatch, capsys):
    bogus = catalog.CatalogEntry(2, 1, ("lambda1", "lambda2", "lambda3"),
                                 (("a1", "b1", "c1", "d1"), ("a2", "b2", "c2", "d2"),
                                  ("a3", "b3", "c3", "d3")),
                                 (catalog.OperatorSpec("d_t", ("1", "0", "0", "0", "0")),))
    monkeypatch.setattr(catalog, "entries", lambda table=None, case=None: [bogus])
    code, out, _ = run(capsys, "verify")
    assert code == 1
    assert "MISMATCH" in out and "witness" not in out.split("MISMATCH")[0]


@pytest.mark.parametrize("argv", [
    ["verify", "--table", "3"],
    ["verify", "--table", "1", "--case", "9"],
    ["verify", "--mode", "instance", "--seed", "x"],
    ["catalog", "--table", "7"],
    ["reduce", "--grid", "10"],
    ["reduce", "--domain", "0,1,0"],
    ["residual", "--phi1", "growing", "--params", "__missing__.txt"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_degenerate_params_exit_2(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("a1 = 1\n")
    code, _, err = run(capsys, "reduce", "--params", str(p))
    assert code == 2 and "a_1" in err
    p.write_text("gamma = 1\n")
    code, _, err = run(capsys, "reduce", "--params", str(p))
    assert code == 2


def test_detgen_default(capsys):
    code, out, _ = run(capsys, "detgen")
    assert code == 0
    lines = out.splitlines()
    for eq in ("xi0_x = 0", "xi0_u = 0", "eta1_uu = 0", "xi0_t - 2*xi1_x = 0",
               "eta1_xu + 1/2*xi1_t*lambda1 = 0"):
        assert eq in lines


def test_detgen_equal_lambda_comparison(tmp_path, capsys):
    path = tmp_path / "d.json"
    code, out, _ = run(capsys, "detgen", "--equal-lambda", "--pivot", "u", "--compare",
                       "--expect-identical", "--json", str(path))
    assert code == 0
    assert "identical: True" in out
    doc = json.loads(path.read_text())
    assert doc["kind"] == "FirstType(u)" and doc["identical_to_other_kind"] is True


def test_detgen_heat_system_file(tmp_path, capsys):
    path = tmp_path / "heat.txt"
    path.write_text("lambda1 = 1; lambda2 = 1; lambda3 = 1\nC1 = 0\nC2 = 0\nC3 = 0\n")
    code, out, _ = run(capsys, "detgen", str(path))
    assert code == 0 and "xi0_x = 0" in out.splitlines()


def test_reduce_default(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, out, _ = run(capsys, "reduce", "--json", str(path))
    assert code == 0
    assert "symbolic residual zero: True" in out
    doc = json.loads(path.read_text())
    assert doc["ok"] is True and max(doc["numeric_max_residual"]) <= 1e-9
    assert doc["phi1"] == "cosh(x)"
    assert len(doc["reduced"]) == 3


def test_residual_and_perturbation(capsys):
    code, out, _ = run(capsys, "residual", "--grid", "51,51")
    assert code == 0 and out.count("S") == 3
    code, out, _ = run(capsys, "residual", "--perturb")
    assert code == 0
    assert max(float(line.split()[1]) for line in out.splitlines()) > 1e-3


def test_residual_params_file(tmp_path, capsys):
    p = tmp_path / "p.txt"
    p.write_text("lambda1 = 3   # faster diffusion of u\na1 = 1; a2 = 2; a3 = 2\n")
    code, out, _ = run(capsys, "reduce", "--params", str(p), "--phi1", "odd")
    assert code == 0 and "sin(sqrt(2)*x/2)" in out


def test_catalog_listing_and_json(tmp_path, capsys):
    code, out, _ = run(capsys, "catalog", "--table", "2", "--case", "4")
    assert code == 0 and "[table 2 case 4]" in out and "Q4_6" in out
    path = tmp_path / "c.json"
    run(capsys, "catalog", "--json", str(path))
    doc = json.loads(path.read_text())
    assert len(doc["entries"]) == 17
    assert doc["entries"][0]["operators"][0]["label"] == "D"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "dlvsym", "catalog", "--table", "1", "--case", "2"],
                         capture_output=True, text=True, check=True).stdout
    assert "u*d_u" in out
