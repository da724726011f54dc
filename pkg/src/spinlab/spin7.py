"""Lift to dimension 8 by a flat torus factor and the induced Spin(7) structure.

A spinor eta of an n-dimensional algebra (4 <= n <= 7) is lifted through an
intertwiner T: R^8 -> W+ with T rho_n(e_i) = rho_8(e_i e_{n+1}) T, where W+
is the +1 eigenspace of nu_8.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .algebra import MetricLieAlgebra, cev_differential, direct_sum_abelian
from .clifford import CliffordRep, rep_for_dim
from .forms import DimensionError, Form, basis_tuples, hodge_star, volume, wedge

UNIT_TOL = 1e-10
INTERTWINER_TOL = 1e-10


class LiftError(ValueError):
    pass


def lift_algebra(alg: MetricLieAlgebra, k: int | None = None) -> MetricLieAlgebra:
    """Direct sum with k = 8 - n closed orthonormal coframe elements."""
    n = alg.dim
    if not 4 <= n <= 7:
        raise DimensionError(f"lifts are defined for 4 <= n <= 7, got n={n}")
    k = 8 - n if k is None else k
    if n + k != 8:
        raise DimensionError(f"a torus of dimension {k} does not reach dimension 8")
    return direct_sum_abelian(alg, k)


@lru_cache(maxsize=None)
def intertwiner(n: int) -> np.ndarray:
    """Isometry T: R^8 -> W+ subset R^16 with T rho_n(e_i) = rho_8(e_i e_{n+1}) T."""
    if not 4 <= n <= 7:
        raise DimensionError(f"lifts are defined for 4 <= n <= 7, got n={n}")
    rho_n = rep_for_dim(n)
    rho8 = rep_for_dim(8)
    N, M = rho_n.N, rho8.N
    eye_n, eye_m = np.eye(N), np.eye(M)
    # vec(A T B) = (B^T kron A) vec(T) in column-major order
    blocks = [np.kron(eye_n, eye_m - rho8.volume)]
    for i in range(n):
        A = rho8.generators[i] @ rho8.generators[n]
        blocks.append(np.kron(rho_n.generators[i].T, eye_m) - np.kron(eye_n, A))
    system = np.vstack(blocks)
    _, s, vt = np.linalg.svd(system)
    if s[-1] > INTERTWINER_TOL * s[0]:
        raise LiftError("no intertwiner between rho_n and rho_8 on W+")
    T = vt[-1].reshape((N, M)).T
    gram = T.T @ T
    T = T / np.sqrt(gram[0, 0])
    if np.abs(T.T @ T - eye_n).max() > 1e-9:
        raise LiftError("intertwiner is not an isometry")
    # deterministic sign: first entry of largest magnitude positive
    flat = T.ravel()
    if flat[np.argmax(np.abs(flat))] < 0:
        T = -T
    T.setflags(write=False)
    return T


def intertwiner_residual(n: int) -> float:
    T = intertwiner(n)
    rho_n, rho8 = rep_for_dim(n), rep_for_dim(8)
    res = max(np.abs(T @ g - rho8.generators[i] @ rho8.generators[n] @ T).max()
              for i, g in enumerate(rho_n.generators))
    return float(max(res, np.abs(rho8.volume @ T - T).max()))


def lift_spinor(eta, n: int) -> np.ndarray:
    """Unit spinor of an n-dimensional algebra to a positive unit spinor in dim 8."""
    eta = np.asarray(eta, dtype=float)
    T = intertwiner(n)
    if eta.shape != (T.shape[1],):
        raise LiftError(f"spinor must have length {T.shape[1]}")
    if abs(np.linalg.norm(eta) - 1.0) > UNIT_TOL:
        raise LiftError("spinor is not unit")
    return T @ eta


def spin7_form(eta8, rep8: CliffordRep | None = None) -> Form:
    """Omega(W,X,Y,Z) = 1/2 <(-WXYZ + WZYX) eta, eta> on frame 4-tuples."""
    rep8 = rep8 or rep_for_dim(8)
    eta8 = np.asarray(eta8, dtype=float)
    if eta8.shape != (rep8.N,):
        raise LiftError(f"spinor must have length {rep8.N}")
    if abs(np.linalg.norm(eta8) - 1.0) > UNIT_TOL:
        raise LiftError("spinor is not unit")
    if np.abs(rep8.volume @ eta8 - eta8).max() > 1e-9:
        raise LiftError("spinor is not positive")
    terms = {}
    for i, j, k, l in basis_tuples(8, 4):
        a = rep8.product((i, j, k, l))
        b = rep8.product((i, l, k, j))
        c = 0.5 * float(eta8 @ ((-a + b) @ eta8))
        if abs(c) > 1e-14:
            terms[(i, j, k, l)] = c
    return Form(8, terms, degree=4)


def normalization_residuals(omega: Form) -> dict[str, float]:
    return {
        "self_dual": (hodge_star(omega) - omega).norm(),
        "square": (wedge(omega, omega) - 14.0 * volume(8)).norm(),
        "norm": abs(omega.norm() ** 2 - 14.0),
    }


@dataclass(frozen=True, eq=False)
class Spin7Data:
    omega4: Form
    d_omega: Form
    tau1: Form
    tau3_residual: Form  # *tau3, the part of d Omega orthogonal to Lambda^1 ^ Omega
    tau3: Form
    tol: float

    @property
    def tau1_norm(self) -> float:
        return self.tau1.norm()

    @property
    def balanced(self) -> bool:
        return self.tau1_norm <= self.tol

    @property
    def parallel(self) -> bool:
        return self.d_omega.norm() <= self.tol

    def residuals(self) -> dict[str, float]:
        recon = wedge(self.tau1, self.omega4) + self.tau3_residual - self.d_omega
        return {"reconstruction": recon.norm(),
                "tau3_wedge_omega": wedge(self.tau3, self.omega4).norm(),
                "balanced_cross_check": wedge(hodge_star(self.d_omega), self.omega4).norm()}


def spin7_torsion(alg8: MetricLieAlgebra, omega4: Form, tol: float = 1e-8) -> Spin7Data:
    """d Omega = tau1 ^ Omega + *tau3 by projection onto {theta ^ Omega}."""
    if alg8.dim != 8:
        raise DimensionError("Spin(7) torsion needs an 8-dimensional algebra")
    d_omega = cev_differential(alg8, omega4)
    basis = np.array([wedge(Form.basis(8, i), omega4).to_vector() for i in range(1, 9)]).T
    gram = basis.T @ basis
    if np.linalg.cond(gram) > 1e8:
        raise LiftError("degenerate projection system; Omega is not a Spin(7) form")
    target = d_omega.to_vector() if d_omega.terms else np.zeros(basis.shape[0])
    coeffs = np.linalg.solve(gram, basis.T @ target)
    tau1 = Form.from_vector(8, 1, coeffs)
    rest = Form.from_vector(8, 5, target - basis @ coeffs)
    # ** = (-1)^{k(8-k)} = +1 on 5-forms of a Riemannian 8-manifold
    tau3 = hodge_star(rest)
    return Spin7Data(omega4, d_omega, tau1, rest, tau3, tol)


def lift_structure(alg: MetricLieAlgebra, eta, tol: float = 1e-8) -> Spin7Data:
    """Lift alg and eta to dimension 8 and compute the Spin(7) torsion."""
    alg8 = lift_algebra(alg)
    eta8 = lift_spinor(eta, alg.dim)
    return spin7_torsion(alg8, spin7_form(eta8), tol)
