import re

import numpy as np
import pytest
from hypothesis import given

from conftest import seeds
from spinlab.algebra import (Derivation, DerivationError, JacobiError, MetricLieAlgebra, catalog,
                             catalog_dim4, catalog_dim5, catalog_dim6_decomposable,
                             catalog_dim6_nondecomposable, cev_differential, direct_sum_abelian,
                             family, fixed_row, rank1_extension)
from spinlab.forms import Form, basis_tuples, wedge

e = Form.basis


def test_catalog_sizes():
    assert len(catalog_dim4()) == 2
    assert len(catalog_dim5()) == 8
    assert len(catalog_dim6_decomposable()) == 9
    rows = catalog_dim6_nondecomposable()
    assert len(rows) == 24 and len({r.name for r in rows}) == 24


@pytest.mark.parametrize("fam", catalog(), ids=lambda f: f.name)
@given(seed=seeds)
def test_families_satisfy_jacobi(fam, seed):
    b = fam.sample(np.random.default_rng(seed))
    alg = fam.instantiate(b)
    assert max(alg.jacobi_residuals().values(), default=0.0) <= 1e-10
    assert alg.is_nilpotent_frame
    assert all(abs(b[p]) > 0.1 for p in fam.nonzero)


@pytest.mark.parametrize("fam", catalog(), ids=lambda f: f.name)
def test_template_identifiers_declared(fam):
    names = set(re.findall(r"[A-Za-z_][A-Za-z_0-9]*", fam.template)) - {"sqrt"}
    assert names == set(fam.params)


def test_family_examples():
    alg = family("N5,6").instantiate({"mu12": 2.0, "mu34": -1.0})
    assert alg.differentials[4] == 2 * e(5, 1, 2) - e(5, 3, 4)
    assert family("N5,6").nonzero == ("mu12", "mu34")
    alg = family("L4+A1").instantiate({"mu12": 1.0, "lam12": 2.0, "lam13": 3.0, "mu14": 4.0})
    assert alg.differentials[3] == e(5, 1, 2)
    assert alg.differentials[4] == 2 * e(5, 1, 2) + 3 * e(5, 1, 3) + 4 * e(5, 1, 4)
    row = fixed_row("N6,24").instantiate()
    assert row.differentials[4] == e(6, 1, 2)
    assert row.differentials[5] == 2 * e(6, 1, 3) + e(6, 2, 4)


def test_nonzero_parameters_enforced():
    with pytest.raises(ValueError):
        family("N5,6").instantiate({"mu12": 0.0, "mu34": 1.0})
    with pytest.raises(Exception):
        family("N5,6").instantiate({"mu12": 1.0})


def test_nondecomposable_rows_verbatim_and_corrected():
    failing = set()
    for row in catalog_dim6_nondecomposable():
        try:
            row.instantiate()
        except JacobiError:
            failing.add(row.name)
        if row.corrected_template:
            alg = row.instantiate(corrected=True)
            assert alg.is_nilpotent_frame
    assert failing == {"N6,9", "N6,6"}


def test_cev_differential():
    heis = MetricLieAlgebra.from_salamon("(0,0,12)")
    assert cev_differential(heis, e(3, 3)) == e(3, 1, 2)
    n56 = family("N5,6").instantiate({"mu12": 1.0, "mu34": 1.0})
    assert cev_differential(n56, e(5, 1, 2, 5)) == e(5, 1, 2, 3, 4)
    ab = MetricLieAlgebra.abelian(5)
    assert cev_differential(ab, e(5, 1, 2, 5)).is_zero()


@pytest.mark.parametrize("fam", catalog(), ids=lambda f: f.name)
def test_d_squared_vanishes_on_all_degrees(fam):
    alg = fam.instantiate(fam.sample(np.random.default_rng(3)))
    rng = np.random.default_rng(4)
    for k in range(1, alg.dim - 1):
        a = Form.from_vector(alg.dim, k, rng.normal(size=len(basis_tuples(alg.dim, k))))
        assert cev_differential(alg, cev_differential(alg, a)).norm() <= 1e-10


def test_leibniz_rule():
    alg = family("N5,1").instantiate(family("N5,1").sample(np.random.default_rng(1)))
    a, b = e(5, 2) + e(5, 3), e(5, 1, 4)
    lhs = cev_differential(alg, wedge(a, b))
    rhs = wedge(cev_differential(alg, a), b) - wedge(a, cev_differential(alg, b))
    assert lhs.allclose(rhs, 1e-12)


def test_rank1_extension():
    heis = MetricLieAlgebra.from_salamon("(0,0,12)")
    D = Derivation(np.diag([1.0, 1.0, 2.0]))
    D.check(heis)
    ext = rank1_extension(heis, D)
    assert ext.dim == 4
    assert ext.differentials[2] == e(4, 1, 2) + 2 * e(4, 3, 4)
    assert ext.differentials[0] == e(4, 1, 4)
    assert max(ext.jacobi_residuals().values()) <= 1e-12
    assert D.trace == 4.0
    zero = rank1_extension(heis, Derivation(np.zeros((3, 3))))
    assert zero.differentials == direct_sum_abelian(heis, 1).differentials
    with pytest.raises(DerivationError):
        Derivation(np.diag([1.0, 0.0, 0.0])).check(heis)


def test_direct_sum():
    alg = direct_sum_abelian(family("N5,6").instantiate({"mu12": 1.0, "mu34": 1.0}), 3)
    assert alg.dim == 8 and alg.differentials[4] == e(8, 1, 2) + e(8, 3, 4)
    assert all(not f.terms for f in alg.differentials[5:])


def test_n63_constant_is_finite():
    row = fixed_row("N6,3")
    (name, m), = row.bindings
    assert name == "m" and 0 < m < 10
