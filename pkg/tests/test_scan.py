import json
import math

import numpy as np
import pytest
from hypothesis import given

from conftest import seeds
from spinlab import gstruct as gs
from spinlab import scan
from spinlab.algebra import ParameterFamily, family
from spinlab.dirac import harmonic_spinors


def test_grid_axis():
    assert np.allclose(scan.grid_axis(-2, 2, 5), [-2, -1, 0, 1, 2])
    assert scan.grid_axis(0.5, 1.0, 1).tolist() == [0.5]
    with pytest.raises(ValueError):
        scan.grid_axis(0, 1, 0)


def test_parse_range():
    assert scan.parse_range("mu12=-2:2.5") == ("mu12", (-2.0, 2.5))
    for bad in ("mu12", "mu12=1", "mu12=a:b", "=1:2"):
        with pytest.raises(ValueError):
            scan.parse_range(bad)


def test_n56_grid():
    # 41 x 41 grid on [-2, 2]^2: hits are the 40 nonzero values on each of mu12 = +-mu34
    res = scan.scan_grid(family("N5,6"), {"mu12": (-2, 2), "mu34": (-2, 2)}, 41)
    assert res.points == 41 * 41
    assert res.skipped == 2 * 41 - 1
    assert len(res.hits) == 80
    assert res.unconfirmed == 0
    for h in res.hits:
        b = dict(h.binding)
        assert abs(abs(b["mu12"]) - abs(b["mu34"])) <= 1e-12
    assert res.min_singular > 0.05


def test_l3a3_grid():
    res = scan.scan_grid(family("L3+A3"), {"mu12": (-2, 2)}, 401, nonzero_margin=0.1)
    assert not res.hits
    assert res.min_singular > 0.05
    assert res.to_dict()["grid"]["nonzero_margin"] == 0.1


def test_abelian_grid():
    # a zero coefficient gives the abelian algebra, where every point is a hit
    fam = ParameterFamily("A5", "(0,0,0,a*12,0)", (("a", "free"),))
    res = scan.scan_grid(fam, {"a": (0, 0)}, 3)
    assert res.points == 3 and len(res.hits) == 3
    assert all(h.kernel_dim == 8 for h in res.hits)


def test_scan_parameter_errors():
    fam = family("N5,6")
    with pytest.raises(KeyError):
        scan.scan_grid(fam, {"nope": (0, 1)}, 3, fixed={"mu34": 1.0})
    with pytest.raises(ValueError):
        scan.scan_grid(fam, {"mu12": (0, 1)}, 3)


def test_scan_fixed_and_threads():
    fam = family("N5,6")
    a = scan.scan_grid(fam, {"mu12": (-1, 1)}, 21, fixed={"mu34": 0.5}, threads=1)
    b = scan.scan_grid(fam, {"mu12": (-1, 1)}, 21, fixed={"mu34": 0.5}, threads=4)
    assert a.to_dict() == b.to_dict()
    assert [dict(h.binding)["mu12"] for h in a.hits] == pytest.approx([-0.5, 0.5])


@pytest.mark.parametrize("name", list(scan.CONDITIONS))
def test_condition_samplers(name):
    cond = scan.CONDITIONS[name]
    rng = np.random.default_rng(7)
    for _ in range(20):
        b = cond.satisfying(rng)
        assert cond.residual(b) <= 1e-9
        assert harmonic_spinors(cond.fam.instantiate(b), tol=1e-8).kernel_dim > 0
        assert gs.is_harmonic_metric_dim5(cond.fam.instantiate(b), tol=1e-8)
        bad = cond.violating(rng)
        assert cond.residual(bad) >= scan.VIOLATION_MARGIN
        assert harmonic_spinors(cond.fam.instantiate(bad), tol=1e-8).kernel_dim == 0


@pytest.mark.parametrize("name", list(scan.CONDITIONS))
def test_solve_condition(name):
    report = scan.solve_condition(name, seed=1, samples=20)
    assert report.passed


@given(seeds)
def test_l3l3_branches(seed):
    rng = np.random.default_rng(seed)
    b = scan.l3l3_branch1(rng)
    assert harmonic_spinors(family("L3+L3").instantiate(b), tol=1e-8).kernel_dim > 0
    b, sigma = scan.l3l3_branch2(rng)
    assert abs(scan.l3l3_branch2_residual(b, sigma)) <= 1e-9
    assert harmonic_spinors(family("L3+L3").instantiate(b), tol=1e-8).kernel_dim > 0


@pytest.mark.parametrize("name", scan.DIM6_ADMITTING)
def test_dim6_constructions(name):
    rng = np.random.default_rng(3)
    for _ in range(3):
        b = scan._dim6_harmonic(name, rng)
        assert harmonic_spinors(family(name).instantiate(b), tol=1e-8).kernel_dim > 0


@pytest.mark.parametrize("name", [n for n in scan.DIM5_FAMILIES if n != "N5,3"])
def test_v_table_matches_invariants(name):
    fam = family(name)
    rng = np.random.default_rng(11)
    for _ in range(10):
        b = fam.sample(rng, scan.BOUNDS, scan.NONZERO_MARGIN)
        assert np.allclose(scan.v_table(name, b), gs.mu_v(fam.instantiate(b)).v, atol=1e-9)


def test_v_table_n53_corrected():
    fam = family("N5,3")
    rng = np.random.default_rng(11)
    b = fam.sample(rng, scan.BOUNDS, scan.NONZERO_MARGIN)
    assert np.allclose(scan.v_table("N5,3", b, corrected=True),
                       gs.mu_v(fam.instantiate(b)).v, atol=1e-9)


def test_clean_json():
    out = scan.clean_json({"a": np.float64(1 / 3), "b": [np.int64(2), float("nan")],
                           "c": np.bool_(True), "d": -0.0, "e": (1e-20,)})
    assert out == {"a": 0.333333333333, "b": [2, None], "c": True, "d": 0.0, "e": [1e-20]}
    json.dumps(out)


def test_single_claim_determinism():
    a = scan.verify_paper(0, claim="dim5/spectrum-law")
    b = scan.verify_paper(0, claim="dim5/spectrum-law")
    assert len(a.claims) == 1
    assert a.to_json() == b.to_json()
    assert a.elapsed_ms is None
    assert scan.verify_paper(0, claim="dim4/no-harmonic", timing=True).elapsed_ms > 0


def test_unknown_claim():
    with pytest.raises(KeyError):
        scan.verify_paper(0, claim="no/such/claim")
    with pytest.raises(KeyError):
        scan.verify_paper(0, claim="dim4/nothing")


def test_report_structure():
    r = scan.verify_paper(0, claim="rep/clifford-invariants")
    d = r.to_dict()
    assert d["schema"] == scan.SCHEMA and d["seed"] == 0 and d["passed"] is True
    (c,) = d["claims"]
    assert set(c) == {"id", "criterion", "reading", "status", "values", "tol", "note"}
    assert json.loads(r.to_json()) == d
    assert r.criterion_passed(11)
    assert not r.criterion_passed(1)  # no records for criterion 1 in this run


def test_smallest_singular_value():
    alg = family("N5,6").instantiate({"mu12": 1.0, "mu34": 2.0})
    s = scan.smallest_singular_value(alg)
    assert s > 0 and math.isfinite(s)
    assert scan.smallest_singular_value(family("N5,6").instantiate({"mu12": 1.0, "mu34": 1.0})) \
        <= 1e-12


def test_thread_count(monkeypatch):
    monkeypatch.setenv("SPINLAB_THREADS", "2")
    assert scan.thread_count() <= 2
    assert scan.thread_count(1) == 1
