"""Dirac operator on invariant spinors of a metric Lie algebra.

Matrices store 4*D (or 16*D^2) so that entries are polynomial in the
structure constants; kernels are unaffected by the scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import Derivation, MetricLieAlgebra
from .clifford import CliffordRep, rep_for_dim
from .forms import (DimensionError, Form, clifford_matrix, contract, wedge, without_index)

KERNEL_TOL = 1e-9
SYMMETRY_TOL = 1e-10

GENERAL = "general"
NILPOTENT = "nilpotent"
RANK1 = "rank1"
SQUARED = "squared"


class FrameError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DiracMatrix:
    matrix: np.ndarray
    squared: bool = False
    source: str = GENERAL

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def N(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_symmetric(self) -> bool:
        scale = max(1.0, float(np.abs(self.matrix).max(initial=0.0)))
        return bool(np.abs(self.matrix - self.matrix.T).max(initial=0.0) <= SYMMETRY_TOL * scale)

    def __matmul__(self, other):
        return self.matrix @ other


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    kernel_basis: np.ndarray  # columns
    tol: float
    singular: bool = False  # eigenvalues holds singular values

    @property
    def kernel_dim(self) -> int:
        return self.kernel_basis.shape[1]

    @property
    def min_abs(self) -> float:
        return float(np.abs(self.eigenvalues).min()) if self.eigenvalues.size else 0.0

    def kernel_vectors(self):
        return [self.kernel_basis[:, k] for k in range(self.kernel_dim)]


def _check_dims(alg: MetricLieAlgebra, rep: CliffordRep) -> None:
    if alg.dim != rep.n:
        raise DimensionError(f"algebra of dim {alg.dim} with a Cl_{rep.n} representation")


def _rep(alg: MetricLieAlgebra, rep: CliffordRep | None) -> CliffordRep:
    rep = rep or rep_for_dim(alg.dim)
    _check_dims(alg, rep)
    return rep


def dirac_form(alg: MetricLieAlgebra) -> Form:
    """The 3-form part sum e^i ^ de^i; 4D = -(this + the 1-form part)."""
    n = alg.dim
    total = Form.zero(n, 3)
    for i, de in enumerate(alg.differentials, start=1):
        total = total + wedge(Form.basis(n, i), de)
    return total


def dirac_trace_form(alg: MetricLieAlgebra) -> Form:
    """The 1-form part sum i(e_i) de^i (vanishes on unimodular algebras)."""
    n = alg.dim
    total = Form.zero(n, 1)
    for i, de in enumerate(alg.differentials, start=1):
        total = total + contract(i, de)
    return total


def assemble_dirac(alg: MetricLieAlgebra, rep: CliffordRep | None = None) -> DiracMatrix:
    """4D = -sum_i (e^i ^ de^i + i(e_i) de^i) acting by Clifford multiplication."""
    rep = _rep(alg, rep)
    m = -(clifford_matrix(dirac_form(alg), rep) + clifford_matrix(dirac_trace_form(alg), rep))
    return DiracMatrix(m, False, GENERAL)


def assemble_dirac_nilpotent(alg: MetricLieAlgebra, rep: CliffordRep | None = None
                             ) -> DiracMatrix:
    """4D = -sum_i e^i ^ de^i in a nilpotent frame; the result is symmetric."""
    if not alg.is_nilpotent_frame:
        raise FrameError("structure equations are not in a nilpotent frame")
    rep = _rep(alg, rep)
    return DiracMatrix(-clifford_matrix(dirac_form(alg), rep), False, NILPOTENT)


def assemble_dirac_rank1(n_alg: MetricLieAlgebra, D: Derivation,
                         rep: CliffordRep | None = None) -> DiracMatrix:
    """Dirac matrix of the rank-one extension built from the nilpotent part and D.

    4D = -sum_i (e^i ^ d e^i + i(e_i) d e^i + e^0 ^ e^i ^ D(e^i)) - tr(D) e^0,
    with e^0 the last frame index.
    """
    if not n_alg.is_nilpotent_frame:
        raise FrameError("the nilpotent part must be given in a nilpotent frame")
    D.check(n_alg)
    n = n_alg.dim + 1
    rep = rep or rep_for_dim(n)
    if rep.n != n:
        raise DimensionError(f"rank-one extension of dim {n} with a Cl_{rep.n} representation")
    e0 = Form.basis(n, n)
    three = Form.zero(n, 3)
    one = Form.zero(n, 1)
    for i in range(1, n):
        de = Form(n, dict(n_alg.differentials[i - 1].terms), degree=2)
        ei = Form.basis(n, i)
        Dei = Form(n, dict(D.image(i).terms), degree=1)
        three = three + wedge(ei, de) + wedge(wedge(e0, ei), Dei)
        one = one + contract(i, de)
    m = -(clifford_matrix(three, rep) + clifford_matrix(one, rep)) \
        - D.trace * clifford_matrix(e0, rep)
    return DiracMatrix(m, False, RANK1)


def assemble_dirac_squared(alg: MetricLieAlgebra, rep: CliffordRep | None = None
                           ) -> DiracMatrix:
    """16 D^2 = sum_i -(de^i)^2 + sum_{i<j} (e^{ij} de^i de^j - de^j de^i e^{ij})."""
    if not alg.is_nilpotent_frame:
        raise FrameError("structure equations are not in a nilpotent frame")
    rep = _rep(alg, rep)
    n = alg.dim
    acts = [clifford_matrix(de, rep) for de in alg.differentials]
    m = np.zeros((rep.N, rep.N))
    for a in acts:
        m -= a @ a
    for i in range(n):
        for j in range(i + 1, n):
            if not (alg.differentials[i].terms and alg.differentials[j].terms):
                continue
            eij = rep.product((i + 1, j + 1))
            m += eij @ acts[i] @ acts[j] - acts[j] @ acts[i] @ eij
    return DiracMatrix(m, True, SQUARED)


def squared_operator_form(alg: MetricLieAlgebra) -> tuple[float, Form]:
    """(mu, F) with 16 D^2 acting as mu + F, F a 4-form, in a nilpotent frame.

    F = -sum de^i^de^i - 2 sum_{i<j} de^i ^ i(e_i)de^j ^ e^j
        + 2 sum_{k<i<j} i(e_k)de^i ^ i(e_k)(de^j restricted to e_i-perp) ^ e^{ij}.
    """
    if not alg.is_nilpotent_frame:
        raise FrameError("structure equations are not in a nilpotent frame")
    n = alg.dim
    diffs = alg.differentials
    mu = float(sum(de.norm() ** 2 for de in diffs))
    F = Form.zero(n, 4)
    for de in diffs:
        F = F - wedge(de, de)
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            dei, dej = diffs[i - 1], diffs[j - 1]
            if not (dei.terms and dej.terms):
                continue
            F = F - 2.0 * wedge(wedge(dei, contract(i, dej)), Form.basis(n, j))
            perp = without_index(i, dej)
            eij = Form.basis(n, i, j)
            for k in range(1, i):
                F = F + 2.0 * wedge(wedge(contract(k, dei), contract(k, perp)), eij)
    return mu, F


def kernel(M: DiracMatrix | np.ndarray, tol: float = KERNEL_TOL) -> SpectrumReport:
    """Kernel of M: |eigenvalue| (or singular value) <= tol * ||M||_2."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if isinstance(M, DiracMatrix):
        mat, symmetric = M.matrix, M.is_symmetric
    else:
        mat = np.asarray(M, dtype=float)
        symmetric = bool(np.allclose(mat, mat.T, atol=SYMMETRY_TOL))
    if not np.all(np.isfinite(mat)):
        raise np.linalg.LinAlgError("matrix has non-finite entries")
    if symmetric:
        w, v = np.linalg.eigh(0.5 * (mat + mat.T))
        norm = float(np.abs(w).max(initial=0.0))
        mask = np.abs(w) <= tol * norm if norm > 0 else np.ones_like(w, dtype=bool)
        return SpectrumReport(w, v[:, mask], tol, singular=False)
    u, s, vt = np.linalg.svd(mat)
    norm = float(s.max(initial=0.0))
    mask = s <= tol * norm if norm > 0 else np.ones_like(s, dtype=bool)
    return SpectrumReport(np.sort(s), vt[mask].T, tol, singular=True)


def spectrum(M: DiracMatrix, tol: float = KERNEL_TOL) -> SpectrumReport:
    """Sorted eigenvalues with multiplicity for a symmetric Dirac matrix."""
    if not M.is_symmetric:
        raise ValueError("spectrum needs a symmetric matrix; use kernel() for singular values")
    return kernel(M, tol)


def harmonic_spinors(alg: MetricLieAlgebra, rep: CliffordRep | None = None,
                     tol: float = KERNEL_TOL) -> SpectrumReport:
    """Kernel of the Dirac matrix, using the nilpotent assembly when possible."""
    M = assemble_dirac_nilpotent(alg, rep) if alg.is_nilpotent_frame else assemble_dirac(alg, rep)
    return kernel(M, tol)
