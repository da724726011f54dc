import numpy as np
import pytest
from hypothesis import assume, given

from conftest import seeds, unit_vectors
from spinlab import gstruct as gs
from spinlab.algebra import (JacobiError, MetricLieAlgebra, catalog_dim5, cev_differential, family,
                             fixed_row)
from spinlab.clifford import quaternionic_ops_dim5, rep_for_dim
from spinlab.dirac import assemble_dirac, assemble_dirac_squared, harmonic_spinors
from spinlab.forms import (Form, DimensionError, clifford_matrix, contract_vector, hodge_star,
                           one_form, sharp, wedge)
from spinlab.parsing import parse_form

e = Form.basis
OPS = quaternionic_ops_dim5()
DIM6_FAMILIES = ("L3+A3", "L3+L3", "L4+A2", "N5,6+A1", "N5,5+A1", "N5,4+A1", "N5,3+A1",
                 "N5,2+A1", "N5,1+A1")


def _random_binding(seed):
    rng = np.random.default_rng(seed)
    fams = catalog_dim5()
    fam = fams[int(rng.integers(len(fams)))]
    eta = rng.normal(size=8)
    return fam.instantiate(fam.sample(rng, (-2.0, 2.0), 0.1)), eta / np.linalg.norm(eta)


# SU(2) structures from spinors

@given(unit_vectors(8))
def test_compatibility(eta):
    s = gs.su2_from_spinor(eta)
    assert max(s.compatibility_residuals().values()) <= 1e-10
    assert abs(np.linalg.norm(s.reeb) - 1) <= 1e-12
    assert np.allclose(s.xi_basis.T @ s.reeb, 0, atol=1e-12)


@given(unit_vectors(8))
def test_spinor_identities(eta):
    s = gs.su2_from_spinor(eta)
    assert max(gs.spinor_identity_residuals(s).values()) <= 1e-10


@given(unit_vectors(8))
def test_xi_star_identity(eta):
    # *(alpha ^ beta ^ omega_k) = -J_k beta and i(R) *(beta ^ omega_k) = J_k beta
    s = gs.su2_from_spinor(eta)
    beta = s.projector @ np.arange(1.0, 6.0)
    for k in range(3):
        g = wedge(one_form(beta), s.omega[k])
        Jb = s.J[k].T @ beta
        assert np.allclose(sharp(hodge_star(wedge(s.alpha, g))), -Jb, atol=1e-10)
        assert np.allclose(sharp(contract_vector(s.reeb, hodge_star(g))), Jb, atol=1e-10)


@pytest.mark.parametrize("k,pattern", [(1, (1, -1, -1)), (2, (-1, 1, -1)), (3, (-1, -1, 1))])
def test_quaternionic_phase(k, pattern, rng):
    eta = rng.normal(size=8)
    eta /= np.linalg.norm(eta)
    s = gs.su2_from_spinor(eta)
    t = gs.su2_from_spinor(OPS[k] @ eta)
    assert (t.alpha - s.alpha).norm() <= 1e-12
    for sign, a, b in zip(pattern, t.omega, s.omega):
        assert (a - sign * b).norm() <= 1e-10


def test_non_unit_spinor():
    with pytest.raises(gs.SpinorError):
        gs.su2_from_spinor(np.ones(8))
    with pytest.raises(DimensionError):
        gs.su2_from_spinor(np.eye(8)[0], rep=rep_for_dim(6))


# covariant derivative and connection components

@given(seeds)
def test_metric_compatibility(seed):
    alg, eta = _random_binding(seed)
    for i in range(5):
        assert abs(gs.covariant_derivative_spinor(alg, None, eta, i) @ eta) <= 1e-12


def test_abelian_connection_vanishes():
    assert not gs.connection_matrices(MetricLieAlgebra.abelian(5)).any()


@given(seeds)
def test_dirac_from_connection(seed):
    alg, eta = _random_binding(seed)
    assert np.allclose(4 * gs.dirac_from_connection(alg, None, eta),
                       assemble_dirac(alg).matrix @ eta, atol=1e-10)


@given(seeds)
def test_dirac_from_components(seed):
    # leading coefficient -4 mu + phi1
    alg, eta = _random_binding(seed)
    s = gs.su2_from_spinor(eta)
    cc = gs.connection_components(alg, None, eta, s)
    assert cc.residual <= 1e-10
    assert np.allclose(gs.dirac_from_components(cc, s), assemble_dirac(alg).matrix @ eta / 4,
                       atol=1e-10)


@given(seeds)
def test_endomorphism_decomposition(seed):
    alg, eta = _random_binding(seed)
    s = gs.su2_from_spinor(eta)
    cc = gs.connection_components(alg, None, eta, s)
    rebuilt = cc.mu_S * s.projector + sum(cc.S_parts) + sum(
        l * J for l, J in zip(cc.lam, s.J)) + cc.S0
    assert np.allclose(rebuilt, cc.S, atol=1e-10)
    for J in s.J:  # the su(2) part commutes with every J_k
        assert np.allclose(cc.S0 @ J, J @ cc.S0, atol=1e-10)


@given(seeds)
def test_torsion_from_components(seed):
    alg, eta = _random_binding(seed)
    s = gs.su2_from_spinor(eta)
    cc = gs.connection_components(alg, None, eta, s)
    direct = gs.su2_torsion(alg, s)
    pred = gs.torsion_from_components(cc, s, tau1_eps="proof")
    assert np.allclose(direct.tau0, pred.tau0, atol=1e-9)
    assert np.allclose(direct.tau0_kl, pred.tau0_kl, atol=1e-9)
    for a, b in zip(direct.tau1 + direct.tau2, pred.tau1 + pred.tau2):
        assert (a - b).norm() <= 1e-9


def test_torsion_sign_option():
    alg, eta = _random_binding(3)
    s = gs.su2_from_spinor(eta)
    cc = gs.connection_components(alg, None, eta, s)
    with pytest.raises(ValueError):
        gs.torsion_from_components(cc, s, tau1_eps="other")


@given(seeds)
def test_torsion_reconstructs_differentials(seed):
    alg, eta = _random_binding(seed)
    s = gs.su2_from_spinor(eta)
    t = gs.su2_torsion(alg, s)
    assert t.residual <= 1e-9


# worked examples

def test_n56_example():
    alg = family("N5,6").instantiate({"mu12": 1.0, "mu34": -1.0})
    eta = np.eye(8)[0]
    assert harmonic_spinors(alg).kernel_dim > 0
    assert np.abs(assemble_dirac(alg).matrix @ eta).max() <= 1e-12
    s = gs.su2_from_spinor(eta)
    assert abs(abs(s.reeb[4]) - 1) <= 1e-12
    assert gs.is_hypo(alg, s)
    da = cev_differential(alg, s.alpha)
    target = parse_form("e12-e34", 5)
    assert min((da - target).norm(), (da + target).norm()) <= 1e-12
    t = gs.su2_torsion(alg, s)
    assert t.nonzero() == ["tau2^4"]


def test_n55_example():
    alg = family("N5,5").instantiate({"mu12": 1.0, "mu13": -1.0})
    base = np.zeros(8)
    base[1] = base[4] = 2 ** -0.5
    eta = OPS.j1 @ base
    assert np.abs(assemble_dirac(alg).matrix @ eta).max() <= 1e-12
    s = gs.su2_from_spinor(eta)
    assert gs.is_hypo(alg, s)
    t = gs.su2_torsion(alg, s)
    assert t.nonzero() == ["tau2^2"]
    assert (t.tau2[1] + parse_form("e25+e34", 5)).norm() <= 1e-10


def test_generic_not_hypo(rng):
    alg = family("N5,4").instantiate({"mu12": 1.0, "mu14": 0.7, "mu23": -1.1, "lam12": 0.4,
                                      "lam13": 0.3})
    eta = rng.normal(size=8)
    assert not gs.is_hypo(alg, gs.su2_from_spinor(eta / np.linalg.norm(eta)))


@given(seeds)
def test_alpha_direction(seed):
    # a harmonic spinor's alpha points along -v / mu
    rng = np.random.default_rng(seed)
    mu12 = rng.uniform(0.2, 2.0) * rng.choice([-1, 1])
    alg = family("N5,6").instantiate({"mu12": mu12, "mu34": mu12 * rng.choice([-1, 1])})
    inv = gs.mu_v(alg)
    k = harmonic_spinors(alg)
    eta = k.kernel_basis @ rng.normal(size=k.kernel_dim)
    s = gs.su2_from_spinor(eta / np.linalg.norm(eta))
    assert np.allclose(inv.v, -inv.mu * s.reeb, atol=1e-9)


# invariants of the squared operator

def test_mu_v_abelian():
    inv = gs.mu_v(MetricLieAlgebra.abelian(5))
    assert inv.mu == 0 and not inv.v.any()
    assert inv.is_harmonic()


@given(seeds)
def test_squared_identity_dim5(seed):
    # 16 D^2 = mu + v j1, with v acting by Clifford multiplication
    alg, _ = _random_binding(seed)
    inv = gs.mu_v(alg)
    V = clifford_matrix(one_form(inv.v), rep_for_dim(5))
    sq = assemble_dirac_squared(alg).matrix
    assert np.allclose(sq, inv.mu * np.eye(8) + V @ OPS.j1, atol=1e-9)


@pytest.mark.parametrize("name,b,expected", [
    ("N5,5", {"mu12": 1.3, "mu13": 1.3}, True),
    ("N5,5", {"mu12": 1.3, "mu13": -1.3}, True),
    ("N5,5", {"mu12": 1.3, "mu13": 0.5}, False),
    ("N5,6", {"mu12": 1.0, "mu34": 1.0}, True),
    ("N5,6", {"mu12": 1.0, "mu34": 2.0}, False),
    ("L3+A2", {"mu12": 1.0}, False),
])
def test_harmonic_metric_dim5(name, b, expected):
    alg = family(name).instantiate(b)
    assert gs.is_harmonic_metric_dim5(alg) == expected
    assert (harmonic_spinors(alg).kernel_dim > 0) == expected


def test_mu_gamma_dimension():
    with pytest.raises(DimensionError):
        gs.mu_gamma(MetricLieAlgebra.abelian(5))
    with pytest.raises(DimensionError):
        gs.mu_v(MetricLieAlgebra.abelian(6))


@pytest.mark.parametrize("name", ["N6,24", "N6,23", "N6,12", "N6,1"])
def test_squared_identity_dim6_rows(name):
    alg = fixed_row(name).instantiate()
    inv = gs.mu_gamma(alg)
    j = rep_for_dim(6).volume
    sq = assemble_dirac_squared(alg).matrix
    assert np.allclose(sq, inv.mu * np.eye(8) + clifford_matrix(inv.gamma, rep_for_dim(6)) @ j,
                       atol=1e-9)


@given(seeds)
def test_squared_identity_dim6(seed):
    rng = np.random.default_rng(seed)
    fams = [family(n) for n in DIM6_FAMILIES]
    fam = fams[int(rng.integers(len(fams)))]
    try:
        alg = fam.instantiate(fam.sample(rng, (-2.0, 2.0), 0.1))
    except JacobiError:
        assume(False)
    inv = gs.mu_gamma(alg)
    j = rep_for_dim(6).volume
    sq = assemble_dirac_squared(alg).matrix
    assert np.allclose(sq, inv.mu * np.eye(8) + clifford_matrix(inv.gamma, rep_for_dim(6)) @ j,
                       atol=1e-9)


# SU(3) structures

@given(unit_vectors(8))
def test_su3(eta):
    s = gs.su3_from_spinor(eta)
    assert wedge(s.omega, s.theta_plus).norm() <= 1e-10
    assert wedge(wedge(s.omega, s.omega), s.omega).norm() > 1
    assert abs(s.theta_plus.norm() ** 2 - 4) <= 1e-10
    assert abs(s.omega.norm() ** 2 - 3) <= 1e-10
