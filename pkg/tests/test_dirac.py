import numpy as np
import pytest
from hypothesis import given

from conftest import seeds
from spinlab import gstruct as gs
from spinlab.algebra import (Derivation, MetricLieAlgebra, catalog, catalog_dim6_nondecomposable,
                             direct_sum_abelian, family, rank1_extension)
from spinlab.clifford import rep_for_dim
from spinlab.dirac import (FrameError, assemble_dirac, assemble_dirac_nilpotent,
                           assemble_dirac_rank1, assemble_dirac_squared, harmonic_spinors, kernel,
                           spectrum, squared_operator_form)
from spinlab.forms import Form, clifford_matrix

e = Form.basis

# kernel dimensions of the non-decomposable rows, computed independently from
# the Levi-Civita spinor connection (sum_i e_i nabla_{e_i}) and frozen
ROW_KERNELS = {
    "N6,24": 2, "N6,23": 6, "N6,22": 2, "N6,21": 2, "N6,20": 4, "N6,18": 2, "N6,17": 0,
    "N6,16": 2, "N6,15": 4, "N6,19": 2, "N6,12": 2, "N6,13": 2, "N6,14": 0, "N6,11": 2,
    "N6,10": 2, "N6,8": 2, "N6,7": 2, "N6,5": 4, "N6,4": 2, "N6,2": 2, "N6,3": 2, "N6,1": 2,
}
CORRECTED_ROW_KERNELS = {"N6,17": 2, "N6,14": 2, "N6,9": 2, "N6,6": 2}


def test_abelian():
    for n in range(1, 9):
        M = assemble_dirac(MetricLieAlgebra.abelian(n))
        assert not M.matrix.any()
        assert kernel(M).kernel_dim == M.N
        assert not assemble_dirac_squared(MetricLieAlgebra.abelian(n)).matrix.any()


def test_l3a1():
    alg = family("L3+A1").instantiate({"mu12": 1.5})
    M = assemble_dirac_nilpotent(alg)
    assert np.allclose(M.matrix, -1.5 * clifford_matrix(e(4, 1, 2, 4), rep_for_dim(4)))
    assert kernel(M).kernel_dim == 0


def test_n56_matrix():
    alg = family("N5,6").instantiate({"mu12": 1.0, "mu34": 1.0})
    expected = -clifford_matrix(e(5, 1, 2, 5) + e(5, 3, 4, 5), rep_for_dim(5))
    assert np.allclose(assemble_dirac_nilpotent(alg).matrix, expected)


def test_heisenberg_padded_is_symmetric():
    alg = direct_sum_abelian(MetricLieAlgebra.from_salamon("(0,0,12)"), 2)
    M = assemble_dirac(alg)
    assert M.matrix.any() and M.is_symmetric


@pytest.mark.parametrize("mu34,dim", [(-1.0, 4), (1.0, 4), (2.0, 0)])
def test_n56_kernels(mu34, dim):
    alg = family("N5,6").instantiate({"mu12": 1.0, "mu34": mu34})
    assert harmonic_spinors(alg).kernel_dim == dim


def test_n56_harmonic_kernel_is_first_four_basis_spinors():
    k = harmonic_spinors(family("N5,6").instantiate({"mu12": 1.0, "mu34": -1.0}))
    P = k.kernel_basis @ k.kernel_basis.T
    assert np.allclose(P, np.diag([1, 1, 1, 1, 0, 0, 0, 0]), atol=1e-12)


def test_l4_square_is_scalar():
    b = {"mu12": 0.7, "mu13": -1.3, "lam12": 0.4}
    sq = assemble_dirac_squared(family("L4").instantiate(b)).matrix
    assert np.allclose(sq, (0.49 + 1.69 + 0.16) * np.eye(8), atol=1e-12)


@pytest.mark.parametrize("fam", catalog(), ids=lambda f: f.name)
@given(seed=seeds)
def test_assembly_paths_agree(fam, seed):
    alg = fam.instantiate(fam.sample(np.random.default_rng(seed)))
    general, nil = assemble_dirac(alg), assemble_dirac_nilpotent(alg)
    assert np.allclose(general.matrix, nil.matrix, atol=1e-12)
    assert nil.is_symmetric
    sq = assemble_dirac_squared(alg)
    assert np.allclose(nil.matrix @ nil.matrix, sq.matrix, atol=1e-10)
    assert np.linalg.eigvalsh(sq.matrix).min() >= -1e-10
    mu, F = squared_operator_form(alg)
    assert np.allclose(mu * np.eye(nil.N) + clifford_matrix(F, rep_for_dim(alg.dim)), sq.matrix,
                       atol=1e-10)


@pytest.mark.parametrize("fam", catalog(), ids=lambda f: f.name)
def test_connection_path_agrees(fam):
    alg = fam.instantiate(fam.sample(np.random.default_rng(11)))
    rep = rep_for_dim(alg.dim)
    M = assemble_dirac(alg).matrix
    for v in np.eye(rep.N):
        assert np.allclose(4 * gs.dirac_from_connection(alg, rep, v), M @ v, atol=1e-12)


@given(seed=seeds)
def test_dim5_spectrum_pairs(seed):
    rng = np.random.default_rng(seed)
    fam = family(("N5,1", "N5,2", "N5,3", "N5,4")[seed % 4])
    w = spectrum(assemble_dirac_nilpotent(fam.instantiate(fam.sample(rng)))).eigenvalues
    assert np.allclose(np.sort(w), np.sort(-w), atol=1e-10)


@given(seed=seeds)
def test_n52_square_eigenvalues(seed):
    fam = family("N5,2")
    b = fam.sample(np.random.default_rng(seed))
    w = np.linalg.eigvalsh(assemble_dirac_squared(fam.instantiate(b)).matrix)
    vals = [(b["mu12"] - s * b["mu14"]) ** 2 + (b["lam12_4"] + s * b["lam13"]) ** 2
            + (b["mu13"] - s * b["lam12_5"]) ** 2 for s in (1, -1)]
    assert np.allclose(np.sort(w), np.sort(vals * 4), atol=1e-10)


def test_rank1_matches_extension():
    rng = np.random.default_rng(5)
    ab = MetricLieAlgebra.abelian(3)
    for _ in range(5):
        A = rng.normal(size=(3, 3))
        D = Derivation(A + A.T)
        direct = assemble_dirac(rank1_extension(ab, D)).matrix
        assert np.allclose(assemble_dirac_rank1(ab, D).matrix, direct, atol=1e-12)
    heis = MetricLieAlgebra.from_salamon("(0,0,12)")
    D = Derivation(np.diag([0.5, -1.0, -0.5]))
    assert np.allclose(assemble_dirac_rank1(heis, D).matrix,
                       assemble_dirac(rank1_extension(heis, D)).matrix, atol=1e-12)
    zero = Derivation(np.zeros((3, 3)))
    assert np.allclose(assemble_dirac_rank1(heis, zero).matrix,
                       assemble_dirac(direct_sum_abelian(heis, 1)).matrix, atol=1e-12)


def test_non_nilpotent_frame_rejected():
    alg = rank1_extension(MetricLieAlgebra.abelian(3), Derivation(np.eye(3)))
    with pytest.raises(FrameError):
        assemble_dirac_nilpotent(alg)
    assert harmonic_spinors(alg).singular


def test_kernel_vectors_verified():
    alg = family("N5,5").instantiate({"mu12": 1.0, "mu13": 1.0})
    M = assemble_dirac_nilpotent(alg)
    k = kernel(M)
    assert k.kernel_dim == 4
    for v in k.kernel_vectors():
        assert np.linalg.norm(M.matrix @ v) <= 1e-9 * np.linalg.norm(M.matrix, 2)
    with pytest.raises(ValueError):
        kernel(M, 0.0)


@pytest.mark.parametrize("row", catalog_dim6_nondecomposable(), ids=lambda r: r.name)
def test_nondecomposable_kernels(row):
    if row.name in ROW_KERNELS:
        assert harmonic_spinors(row.instantiate(), tol=1e-8).kernel_dim == ROW_KERNELS[row.name]
    if row.name in CORRECTED_ROW_KERNELS:
        alg = row.instantiate(corrected=True)
        assert harmonic_spinors(alg, tol=1e-8).kernel_dim == CORRECTED_ROW_KERNELS[row.name]


@pytest.mark.parametrize("lam13,lam14,expected", [(0.0, 0.0, 2), (0.5, 0.0, 0), (0.0, 0.5, 0)])
def test_n617_root_substitution(lam13, lam14, expected):
    # de6 with lam12 = lam23 = lam15 = lam24 = 1; (lam13, lam14) = (0, 0) is a root
    alg = MetricLieAlgebra.from_salamon("(0,0,0,12,13,12+a*13+b*14+15+23+24)",
                                        {"a": lam13, "b": lam14})
    assert harmonic_spinors(alg, tol=1e-8).kernel_dim == expected
