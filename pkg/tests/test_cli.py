import json

import pytest

from spinlab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_algebra(capsys):
    code, d = run_json(capsys, "algebra", "(0,0,0,0,12+34)")
    assert code == 0
    assert d["schema"] == 1 and d["dim"] == 5 and d["jacobi"] and d["nilpotent_frame"]
    assert d["differentials"][4] == {"e12": 1.0, "e34": 1.0}


def test_algebra_jacobi_failure(capsys):
    code, out, _ = run(capsys, "algebra", "(0,0,12,34)")
    assert code == 1 and "FAILS" in out
    code, _, err = run(capsys, "dirac", "(0,0,12,34)")
    assert code == 2 and "error" in err


def test_algebra_from_file(tmp_path, capsys):
    path = tmp_path / "alg.txt"
    path.write_text("(0,0,0,0,12+34)\n")
    code, d = run_json(capsys, "algebra", str(path))
    assert code == 0 and d["dim"] == 5


def test_missing_file(capsys):
    code, _, err = run(capsys, "algebra", "no_such_file.txt")
    assert code == 2 and "no such file" in err


def test_family_input(capsys):
    code, d = run_json(capsys, "dirac", "--family", "N5,6", "--param", "mu12=1",
                       "--param", "mu34=-1")
    assert code == 0 and d["kernel_dim"] > 0
    code, _, _ = run(capsys, "dirac", "--family", "N5,6", "--param", "mu12=1")
    assert code == 2
    code, _, _ = run(capsys, "dirac", "--family", "N5,6", "--param", "mu12")
    assert code == 2


def test_dirac_expect_kernel(capsys):
    code, d = run_json(capsys, "dirac", "(0,0,0,0,12+34)", "--expect-kernel", "--kernel")
    assert code == 0 and d["kernel_dim"] == 4 and len(d["kernel"]) == 4
    code, _, _ = run(capsys, "dirac", "(0,0,0,0,12+2*34)", "--expect-kernel")
    assert code == 1


def test_dirac_squared(capsys):
    code, d = run_json(capsys, "dirac", "(0,0,0,0,12+2*34)", "--squared")
    assert code == 0 and d["scale"] == "16 D^2"
    # 16 D^2 = mu + v j1 with mu = 5 and |v| = 4 has eigenvalues 1 and 9
    assert d["spectrum"] == pytest.approx([1.0] * 4 + [9.0] * 4)


def test_invariants(capsys):
    code, d = run_json(capsys, "invariants", "(0,0,0,0,12+34)")
    assert code == 0 and d["harmonic"] and d["mu"] == pytest.approx(d["v_norm"])
    code, d = run_json(capsys, "invariants", "(0,0,0,0,12,13)")
    assert code == 0 and d["dim"] == 6
    code, _, _ = run(capsys, "invariants", "(0,0,12)")
    assert code == 2


def test_structure_su2(capsys):
    code, d = run_json(capsys, "structure", "(0,0,0,0,12-34)", "--torsion", "--hypo")
    assert code == 0 and d["hypo"] is True
    assert d["dirac_residual"] <= 1e-12
    assert max(d["compatibility"].values()) <= 1e-10
    assert d["torsion"]["nonzero"] == ["tau2^4"]


def test_structure_not_hypo(capsys):
    code, d = run_json(capsys, "structure", "(0,0,12,13,14+23)", "--vector",
                       "0.6,0.8,0,0,0,0,0,0", "--hypo")
    assert code == 1 and d["hypo"] is False


def test_structure_spinor_errors(capsys):
    alg = "(0,0,0,0,12+2*34)"
    assert run(capsys, "structure", alg)[0] == 2  # empty kernel, no spinor given
    assert run(capsys, "structure", alg, "--vector", "1,1,0,0,0,0,0,0")[0] == 2
    assert run(capsys, "structure", alg, "--vector", "1,0")[0] == 2
    assert run(capsys, "structure", alg, "--spinor", "9")[0] == 2
    assert run(capsys, "structure", alg, "--spinor", "1", "--kernel", "1")[0] == 2
    assert run(capsys, "structure", "(0,0,0,0,0,12)")[0] == 2


def test_structure_su3(capsys):
    code, d = run_json(capsys, "structure", "(0,0,0,0,0,0)", "--su3", "--spinor", "1")
    assert code == 0 and d["structure"] == "su3"
    assert sum(c * c for c in d["omega"].values()) == pytest.approx(3.0)


def test_lift(capsys):
    code, d = run_json(capsys, "lift", "(0,0,0,0,12-34)", "--check-balanced")
    assert code == 0 and d["balanced"] and d["torus"] == 3
    code, d = run_json(capsys, "lift", "(0,0,0,0,12+2*34)", "--check-balanced")
    assert code == 1 and d["spinor"] and not d["balanced"]
    assert run(capsys, "lift", "(0,0,12)")[0] == 2
    assert run(capsys, "lift", "(0,0,0,0,12-34)", "--torus", "2")[0] == 2


def test_scan(capsys):
    code, d = run_json(capsys, "scan", "N5,6", "--range", "mu12=-2:2", "--range", "mu34=-2:2",
                       "--steps", "41")
    assert code == 0 and d["hits"] == 80 and len(d["hit_list"]) == 80
    code, out, _ = run(capsys, "scan", "N5,6", "--range", "mu12=-1:1", "--param", "mu34=0.5",
                       "--steps", "21")
    assert code == 0 and "2 hits" in out


def test_scan_errors(capsys):
    assert run(capsys, "scan", "N9,9", "--range", "a=0:1")[0] == 2
    assert run(capsys, "scan", "N5,6")[0] == 2
    assert run(capsys, "scan", "N5,6", "--range", "mu12=1")[0] == 2
    assert run(capsys, "scan", "N5,6", "--range", "mu12=0:1")[0] == 2  # mu34 unbound
    assert run(capsys, "scan", "N5,6", "--range", "bad=0:1", "--param", "mu34=1")[0] == 2


def test_verify_claim(capsys):
    code, out, _ = run(capsys, "verify-paper", "--claim", "rep/clifford-invariants")
    assert code == 0 and out.startswith("PASS")
    code, d = run_json(capsys, "verify-paper", "--claim", "dim5/v-table/N5,3")
    assert code == 1 and d["claims"][0]["status"] == "fail"
    assert d["elapsed_ms"] is None


def test_verify_unknown_claim(capsys):
    code, _, err = run(capsys, "verify-paper", "--claim", "nope")
    assert code == 2 and "unknown claim" in err


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "algebra")[0] == 2
    assert run(capsys, "--help")[0] == 0
