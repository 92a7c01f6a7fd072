import json
import math

import numpy as np
import pytest

from hillgreen.cli import main


def run(capsys, *args):
    rc = main(list(args))
    out = capsys.readouterr().out
    return rc, out


def test_spectrum_csv(capsys):
    rc, out = run(capsys, "spectrum", "--potential", "ex1", "--bc", "D", "--count", "3")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "bc,k,lambda,multiplicity"
    rows = [ln.split(",") for ln in lines[1:]]
    assert [r[0] for r in rows] == ["D", "D", "D"]
    assert float(rows[0][2]) == pytest.approx(math.pi ** 2, abs=1e-8)
    assert all(r[3] == "1" for r in rows)


def test_spectrum_all_json(capsys):
    rc, out = run(capsys, "spectrum", "--potential", "ex2", "--bc", "all",
                  "--count", "1", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert set(doc["spectra"]) == {"P", "A", "N", "D", "M1", "M2"}
    assert doc["spectra"]["N"][0]["lambda"] == pytest.approx(-0.0508, abs=2e-3)
    assert doc["spectra"]["N"][0]["k"] == 0


def test_spectrum_range_filter(capsys):
    rc, out = run(capsys, "spectrum", "--potential", "ex1", "--bc", "D",
                  "--range", "5", "45", "--count-in-range", "2")
    assert rc == 0
    vals = [float(ln.split(",")[2]) for ln in out.strip().splitlines()[1:]]
    assert all(5.0 <= v <= 45.0 for v in vals)


def test_green_csv_deterministic(capsys):
    rc1, out1 = run(capsys, "green", "--potential", "ex1", "--lambda", "0.5",
                    "--bc", "N", "--n", "4")
    rc2, out2 = run(capsys, "green", "--potential", "ex1", "--lambda", "0.5",
                    "--bc", "N", "--n", "4")
    assert rc1 == rc2 == 0
    assert out1 == out2
    lines = out1.strip().splitlines()
    assert lines[0] == "t,s,G"
    assert len(lines) == 1 + 5 * 5


def test_green_json_fields(capsys):
    rc, out = run(capsys, "green", "--potential", "ex3", "--lambda", "0.2",
                  "--bc", "D", "--n", "6", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["bc"] == "D"
    assert len(doc["grid"]) == 7
    assert len(doc["values"]) == 7
    assert doc["symmetry_error"] < 1e-8
    assert doc["resonance_margin"] > 0


def test_green_resonant_exit_code(capsys):
    rc, out = run(capsys, "green", "--potential", "ex1", "--lambda", "0.0",
                  "--bc", "N")
    assert rc == 3


def test_verify_json(capsys):
    rc, out = run(capsys, "verify", "--potential", "ex1", "--lambda", "0.37",
                  "--n", "40")
    assert rc == 0
    doc = json.loads(out)
    rows = doc["reports"]
    assert len(rows) == 20
    assert all(r["pass"] for r in rows)


def test_verify_selected_csv(capsys):
    rc, out = run(capsys, "verify", "--potential", "ex1", "--lambda", "0.37",
                  "--identity", "SUM", "--identity", "DIF", "--n", "40",
                  "--format", "csv")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0] == "id,n,residual,lhs_scale,pass,skipped,reason"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["SUM", "DIF"]


def test_verify_strict_semantics(capsys):
    # skipped identities at a resonant lambda are not failures even under
    # --strict; an unmeetable tolerance is
    rc_skip, _ = run(capsys, "verify", "--potential", "ex1", "--lambda", "0.0",
                     "--n", "30", "--strict")
    assert rc_skip == 0
    rc_loose, _ = run(capsys, "verify", "--potential", "ex1", "--lambda", "0.37",
                      "--n", "30", "--identity", "SUM",
                      "--identity-tol", "1e-18")
    rc_tight, _ = run(capsys, "verify", "--potential", "ex1", "--lambda", "0.37",
                      "--n", "30", "--identity", "SUM",
                      "--identity-tol", "1e-18", "--strict")
    assert rc_loose == 0
    assert rc_tight == 1


def test_compare_classifications(capsys):
    rc, out = run(capsys, "compare", "--potential", "ex1", "--lambda", "1.0",
                  "--n", "30")
    assert rc == 0
    doc = json.loads(out)
    cls = {bc: e["classification"] for bc, e in doc["classifications"].items()}
    assert cls["N"] == "strictly_positive"
    assert cls["D"] == "nonpositive_with_zeros"
    rels = {e["relation"]: e for e in doc["relations"]}
    assert rels["nd_nonneg"]["pass"] is True


def test_compare_skips_unmet_hypotheses(capsys):
    rc, out = run(capsys, "compare", "--potential", "ex1", "--lambda", "5.0",
                  "--n", "30")
    assert rc == 0
    doc = json.loads(out)
    rels = {e["relation"]: e for e in doc["relations"]}
    assert rels["nd_nonneg"].get("skipped") is True
    assert rels["nd_nonneg"]["pass"] is None


def test_sweep_csv(capsys, tmp_path):
    out_file = tmp_path / "sweep.csv"
    rc, out = run(capsys, "sweep", "--potential", "ex1", "--range", "-1", "4",
                  "--points", "11", "--output", str(out_file))
    assert rc == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "lambda,delta"
    assert len(lines) == 12
    lam0, d0 = (float(x) for x in lines[1].split(","))
    assert lam0 == -1.0
    # discriminant of the doubled zero potential: 2 cos(2 sqrt(lam))
    assert d0 == pytest.approx(2.0 * math.cosh(2.0), abs=1e-5)


def test_examples_single(capsys):
    rc, out = run(capsys, "examples", "--which", "1")
    assert rc == 0
    assert "overall ok" in out
    assert "FAIL" not in out


def test_examples_all_strict(capsys):
    rc, out = run(capsys, "examples", "--all", "--strict")
    assert rc == 0
    assert "FAIL" not in out


def test_examples_json(capsys):
    rc, out = run(capsys, "examples", "--which", "2", "--format", "json")
    assert rc == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    rep = doc["examples"][0]
    assert rep["example"] == 2
    names = [c["name"] for c in rep["checks"]]
    assert "lambda_N" in names


def test_usage_errors(capsys):
    assert main(["spectrum", "--potential", "no_such_file.json"]) == 2
    assert main(["green", "--potential", "ex1", "--lambda", "0.5",
                 "--bc", "Q"]) == 2
    assert main(["nonsense"]) == 2


def test_potential_from_file(capsys, tmp_path):
    desc = {"T": 1.0, "pieces": [{"from": 0.0, "to": 1.0, "kind": "const",
                                  "value": 0.0}]}
    path = tmp_path / "flat.json"
    path.write_text(json.dumps(desc))
    rc, out = run(capsys, "spectrum", "--potential", str(path), "--bc", "D",
                  "--count", "1")
    assert rc == 0
    val = float(out.strip().splitlines()[1].split(",")[2])
    assert val == pytest.approx(math.pi ** 2, abs=1e-8)


def test_restricted_domain(capsys):
    # --T 1 on ex2 keeps only the zero plateau: Dirichlet firsts become pi^2
    rc, out = run(capsys, "spectrum", "--potential", "ex2", "--T", "1",
                  "--bc", "D", "--count", "1")
    assert rc == 0
    val = float(out.strip().splitlines()[1].split(",")[2])
    assert val == pytest.approx(math.pi ** 2, abs=1e-8)
