"""SU(2) and SU(3) structures induced by invariant spinors, with their torsion.

Conventions (dim 5): j1 = rho5(nu5), j2 = rho6(e6), j3 = j1 j2 and
eps = (1, -1, -1).  A unit spinor eta gives

    alpha(X)    = -<X eta, j1 eta>
    omega_k(X,Y) = eps_k <X j_k eta, Y eta>
    J_k(X) eta  = j_k(X eta)     for X in xi = ker alpha.

Endomorphisms of xi are stored as 5x5 matrices vanishing on R = alpha^#.
For an endomorphism S and a 2-form w, i(S)w(X, Y) = w(SX, Y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import MetricLieAlgebra, cev_differential
from .clifford import CliffordRep, QuaternionicOps, complex_structure_dim6, quaternionic_ops_dim5, rep_for_dim
from .dirac import FrameError, squared_operator_form
from .forms import (DimensionError, Form, basis_tuples, clifford_matrix, hodge_star, one_form,
                    sharp, two_form_from_matrix, two_form_matrix, volume, wedge)

EPS = (1.0, -1.0, -1.0)
UNIT_TOL = 1e-10
RESIDUAL_TOL = 1e-9


class SpinorError(ValueError):
    pass


def _unit(eta, N: int) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if eta.shape != (N,):
        raise SpinorError(f"spinor must have length {N}")
    if abs(np.linalg.norm(eta) - 1.0) > UNIT_TOL:
        raise SpinorError(f"spinor is not unit (norm {np.linalg.norm(eta):.6g})")
    return eta


# invariants of the squared Dirac operator

@dataclass(frozen=True, eq=False)
class Dim5Invariants:
    mu: float
    v: np.ndarray  # frame components

    @property
    def v_norm(self) -> float:
        return float(np.linalg.norm(self.v))

    def is_harmonic(self, tol: float = 1e-9) -> bool:
        return abs(self.mu - self.v_norm) <= tol * max(self.mu, 1.0)


@dataclass(frozen=True, eq=False)
class Dim6Invariants:
    mu: float
    gamma: Form


def mu_v(alg: MetricLieAlgebra) -> Dim5Invariants:
    """(mu, v) with 16 D^2 = mu + v j1 on invariant spinors of a 5-dim algebra.

    A 4-form g acts in dimension 5 as -(*g) j1, so v = -*F where F is the
    4-form part of the squared operator.
    """
    if alg.dim != 5:
        raise DimensionError("mu_v needs a 5-dimensional algebra")
    mu, F = squared_operator_form(alg)
    v = sharp(-hodge_star(F, alg.orientation)) if F.terms else np.zeros(5)
    return Dim5Invariants(mu, v)


def is_harmonic_metric_dim5(alg: MetricLieAlgebra, tol: float = 1e-9) -> bool:
    return mu_v(alg).is_harmonic(tol)


def mu_gamma(alg: MetricLieAlgebra) -> Dim6Invariants:
    """(mu, gamma) with 16 D^2 = mu + gamma j on invariant spinors of a 6-dim algebra."""
    if alg.dim != 6:
        raise DimensionError("mu_gamma needs a 6-dimensional algebra")
    mu, F = squared_operator_form(alg)
    gamma = -hodge_star(F, alg.orientation) if F.terms else Form.zero(6, 2)
    return Dim6Invariants(mu, gamma)


# SU(2) structures

@dataclass(frozen=True, eq=False)
class SU2Structure:
    eta: np.ndarray
    alpha: Form
    omega: tuple[Form, Form, Form]
    reeb: np.ndarray
    J: tuple[np.ndarray, np.ndarray, np.ndarray]  # 5x5, zero on the Reeb direction
    xi_basis: np.ndarray  # 5x4 orthonormal columns spanning ker alpha

    @property
    def projector(self) -> np.ndarray:
        return np.eye(5) - np.outer(self.reeb, self.reeb)

    def J_xi(self, k: int) -> np.ndarray:
        """J_k as a 4x4 matrix in the xi_basis."""
        B = self.xi_basis
        return B.T @ self.J[k - 1] @ B

    def compatibility_residuals(self) -> dict[str, float]:
        w = self.omega
        vol = wedge(wedge(self.alpha, w[0]), w[0]) - 2.0 * volume(5)
        return {
            "mixed": max(wedge(w[a], w[b]).norm() for a in range(3) for b in range(a + 1, 3)),
            "squares": max((wedge(w[a], w[a]) - wedge(w[0], w[0])).norm() for a in (1, 2)),
            "volume": vol.norm(),
            "quaternion": float(np.abs(self.J[0] @ self.J[1] - self.J[2]).max()),
            "complex": max(float(np.abs(Jk @ Jk + self.projector).max()) for Jk in self.J),
        }


def su2_from_spinor(eta, rep: CliffordRep | None = None,
                    ops: QuaternionicOps | None = None) -> SU2Structure:
    rep = rep or rep_for_dim(5)
    ops = ops or quaternionic_ops_dim5()
    if rep.n != 5:
        raise DimensionError("SU(2) structures need the 5-dimensional representation")
    eta = _unit(eta, rep.N)
    G = np.array(rep.generators)
    Geta = G @ eta  # row b: G_b eta
    a = -(Geta @ (ops.j1 @ eta))
    a = a / np.linalg.norm(a)
    alpha = one_form(a)
    omegas = []
    for k in range(3):
        jk_eta = ops[k + 1] @ eta
        W = EPS[k] * (G @ jk_eta) @ Geta.T  # W[a, b] = eps <G_a j eta, G_b eta>
        omegas.append(two_form_from_matrix(W))
    P = np.eye(5) - np.outer(a, a)
    Js = []
    for k in range(3):
        # J_k(e_c) = P sum_b <j_k(G_c eta), G_b eta> e_b, then restricted to xi
        Jk = (Geta @ (ops[k + 1] @ Geta.T))  # [b, c]
        Js.append(P @ Jk @ P)
    w_, v_ = np.linalg.eigh(P)
    xi = v_[:, w_ > 0.5]
    return SU2Structure(eta, alpha, tuple(omegas), a, tuple(Js), xi)


def spinor_identity_residuals(s: SU2Structure, rep: CliffordRep | None = None,
                             ops: QuaternionicOps | None = None) -> dict[str, float]:
    """omega_k eta = -2 eps_k j_k eta and alpha eta = -j1 eta."""
    rep = rep or rep_for_dim(5)
    ops = ops or quaternionic_ops_dim5()
    eta = s.eta
    out = {}
    for k in range(3):
        lhs = clifford_matrix(s.omega[k], rep) @ eta
        out[f"omega{k + 1}"] = float(np.abs(lhs + 2 * EPS[k] * (ops[k + 1] @ eta)).max())
    out["alpha"] = float(np.abs(clifford_matrix(s.alpha, rep) @ eta + ops.j1 @ eta).max())
    return out


# spinor covariant derivative

def levi_civita_coefficients(alg: MetricLieAlgebra) -> np.ndarray:
    """Gamma[i, j, k] = g(nabla_{e_i} e_j, e_k) for the orthonormal frame.

    With c[a, b, d] = de^a(e_b, e_d): 2 Gamma_ijk = -c^k_ij + c^i_jk + c^j_ik.
    """
    c = np.array([two_form_matrix(de) for de in alg.differentials])
    return 0.5 * (-np.einsum("kij->ijk", c) + c + np.einsum("jik->ijk", c))


def connection_matrices(alg: MetricLieAlgebra, rep: CliffordRep | None = None) -> np.ndarray:
    """A[i] with nabla_{e_i} phi = A[i] phi for invariant spinors phi.

    nabla_X phi = 1/2 sum_{j<k} g(nabla_X e_j, e_k) e_j e_k phi.
    """
    rep = rep or rep_for_dim(alg.dim)
    if rep.n != alg.dim:
        raise DimensionError("representation and algebra dimensions differ")
    n = alg.dim
    G = levi_civita_coefficients(alg)
    A = np.zeros((n, rep.N, rep.N))
    for i in range(n):
        for j in range(n):
            for k in range(j + 1, n):
                if G[i, j, k] != 0.0:
                    A[i] += 0.5 * G[i, j, k] * rep.product((j + 1, k + 1))
    return A


def covariant_derivative_spinor(alg: MetricLieAlgebra, rep: CliffordRep | None, eta, i: int
                                ) -> np.ndarray:
    """nabla_{e_i} eta for an invariant spinor (1-based frame index)."""
    return connection_matrices(alg, rep)[i - 1] @ np.asarray(eta, dtype=float)


def dirac_from_connection(alg: MetricLieAlgebra, rep: CliffordRep | None, eta) -> np.ndarray:
    """D eta = sum_i e_i nabla_{e_i} eta."""
    rep = rep or rep_for_dim(alg.dim)
    A = connection_matrices(alg, rep)
    eta = np.asarray(eta, dtype=float)
    return sum(rep.generators[i] @ (A[i] @ eta) for i in range(alg.dim))


# connection components

@dataclass(frozen=True, eq=False)
class ConnectionComponents:
    S: np.ndarray  # 5x5 endomorphism of xi
    V_xi: np.ndarray
    Theta: tuple[np.ndarray, np.ndarray, np.ndarray]  # 1-forms on xi as 5-vectors
    phi: tuple[float, float, float]
    mu_S: float
    lam: tuple[float, float, float]
    S_parts: tuple[np.ndarray, np.ndarray, np.ndarray]
    S0: np.ndarray
    residual: float


def _involution(Jl: np.ndarray, T: np.ndarray) -> np.ndarray:
    return -Jl @ T @ Jl


def decompose_endomorphism(S: np.ndarray, s: SU2Structure):
    """Split S in End(xi) into (mu, sigma_k parts, lambda_l, su(2) part)."""
    P = s.projector
    J = s.J
    mu = float(np.trace(S)) / 4.0
    lam = tuple(float(np.sum(S * Jl)) / 4.0 for Jl in J)
    sym0 = 0.5 * (S + S.T) - mu * P
    parts = []
    for k in range(3):
        T = 0.5 * (sym0 + _involution(J[k], sym0))
        for l in range(3):
            if l != k:
                T = 0.5 * (T - _involution(J[l], T))
        parts.append(T)
    S0 = 0.5 * (S - S.T) - sum(l * Jl for l, Jl in zip(lam, J))
    return mu, tuple(parts), lam, S0


def connection_components(alg: MetricLieAlgebra, rep: CliffordRep | None, eta,
                          s: SU2Structure | None = None,
                          ops: QuaternionicOps | None = None) -> ConnectionComponents:
    rep = rep or rep_for_dim(5)
    ops = ops or quaternionic_ops_dim5()
    if alg.dim != 5:
        raise DimensionError("connection components are defined in dimension 5")
    s = s or su2_from_spinor(eta, rep, ops)
    eta = s.eta
    A = connection_matrices(alg, rep)
    nab = np.array([A[i] @ eta for i in range(5)])  # row i: nabla_{e_i} eta
    jeta = np.array([ops[l] @ eta for l in (1, 2, 3)])
    Geta = np.array(rep.generators) @ eta
    c = nab @ jeta.T  # c[i, l]
    P = s.projector
    W = P @ (Geta @ nab.T)  # W[:, i] = xi-component w(e_i)
    recon = c @ jeta + (W.T @ Geta)
    residual = float(np.abs(recon - nab).max())
    if residual > RESIDUAL_TOL * max(1.0, float(np.abs(nab).max())):
        raise SpinorError(f"connection projection residual {residual:.3g}")
    R = s.reeb
    S = W @ P
    V = W @ R
    Theta = tuple(P @ c[:, l] for l in range(3))
    phi = tuple(float(c[:, l] @ R) for l in range(3))
    mu, parts, lam, S0 = decompose_endomorphism(S, s)
    return ConnectionComponents(S, V, Theta, phi, mu, lam, parts, S0, residual)


def dirac_from_components(cc: ConnectionComponents, s: SU2Structure,
                          rep: CliffordRep | None = None,
                          ops: QuaternionicOps | None = None) -> np.ndarray:
    """D eta = (-4 mu + phi1) eta - 4 lam1 j1 eta + (4 lam2 + phi3) j2 eta
    + (4 lam3 - phi2) j3 eta + (J1(V + Theta1#) - J2 Theta2# - J3 Theta3#) eta."""
    rep = rep or rep_for_dim(5)
    ops = ops or quaternionic_ops_dim5()
    eta = s.eta
    mu, (l1, l2, l3), (p1, p2, p3) = cc.mu_S, cc.lam, cc.phi
    J1, J2, J3 = s.J
    T1, T2, T3 = cc.Theta
    X = J1 @ (cc.V_xi + T1) - J2 @ T2 - J3 @ T3
    return ((-4 * mu + p1) * eta - 4 * l1 * (ops.j1 @ eta) + (4 * l2 + p3) * (ops.j2 @ eta)
            + (4 * l3 - p2) * (ops.j3 @ eta) + rep.vector(X) @ eta)


# torsion

@dataclass(frozen=True, eq=False)
class SU2Torsion:
    tau0: tuple[float, float, float]  # tau_0^l from d alpha
    tau0_kl: np.ndarray  # 3x3, from d omega_k
    tau1: tuple[Form, Form, Form, Form]  # tau_1^k, k = 1..4
    tau2: tuple[Form, Form, Form, Form]  # tau_2^k, k = 1..4
    residual: float

    def nonzero(self, tol: float = 1e-9) -> list[str]:
        names = [f"tau0^{l + 1}" for l in range(3) if abs(self.tau0[l]) > tol]
        names += [f"tau0^{k + 1}{l + 1}" for k in range(3) for l in range(3)
                  if abs(self.tau0_kl[k, l]) > tol]
        names += [f"tau1^{k + 1}" for k in range(4) if self.tau1[k].norm() > tol]
        names += [f"tau2^{k + 1}" for k in range(4) if self.tau2[k].norm() > tol]
        return names


def _su2_forms(s: SU2Structure) -> list[Form]:
    """Orthonormal basis of the complement of the omegas in Lambda^2 xi*."""
    B = s.xi_basis
    lam2 = []
    for a in range(4):
        for b in range(a + 1, 4):
            lam2.append(wedge(one_form(B[:, a]), one_form(B[:, b])).to_vector())
    lam2 = np.array(lam2).T  # 10 x 6
    om = np.array([w.to_vector() for w in s.omega]).T
    # remove omega directions, keep an orthonormal basis of the rest
    q, _ = np.linalg.qr(om)
    rest = lam2 - q @ (q.T @ lam2)
    u, sv, _ = np.linalg.svd(rest, full_matrices=False)
    return [Form.from_vector(5, 2, u[:, m]) for m in range(3)]


def su2_torsion(alg: MetricLieAlgebra, s: SU2Structure) -> SU2Torsion:
    """Decompose d alpha and d omega_k along the SU(2)-module splittings."""
    if alg.dim != 5:
        raise DimensionError("SU(2) torsion needs a 5-dimensional algebra")
    alpha, om = s.alpha, s.omega
    B = s.xi_basis
    xi_forms = [one_form(B[:, m]) for m in range(4)]
    su2 = _su2_forms(s)

    # Lambda^2: omega_l, alpha ^ xi*, su(2)
    basis2 = [w.to_vector() for w in om] + [wedge(alpha, b).to_vector() for b in xi_forms] \
        + [f.to_vector() for f in su2]
    M2 = np.array(basis2).T
    da = cev_differential(alg, alpha).to_vector()
    x, *_ = np.linalg.lstsq(M2, da, rcond=None)
    res = float(np.linalg.norm(M2 @ x - da))
    tau0 = tuple(float(t) for t in x[:3])
    tau1_4 = Form.from_vector(5, 1, B @ x[3:7])
    tau2_4 = sum((x[7 + m] * su2[m] for m in range(3)), Form.zero(5, 2))

    tau0_kl = np.zeros((3, 3))
    tau1, tau2 = [], []
    for k in range(3):
        basis3 = [wedge(alpha, w).to_vector() for w in om] \
            + [wedge(b, om[k]).to_vector() for b in xi_forms] \
            + [wedge(alpha, f).to_vector() for f in su2]
        M3 = np.array(basis3).T
        dw = cev_differential(alg, om[k]).to_vector()
        y, *_ = np.linalg.lstsq(M3, dw, rcond=None)
        res = max(res, float(np.linalg.norm(M3 @ y - dw)))
        tau0_kl[k] = y[:3]
        tau1.append(Form.from_vector(5, 1, B @ y[3:7]))
        tau2.append(sum((y[7 + m] * su2[m] for m in range(3)), Form.zero(5, 2)))
    if res > RESIDUAL_TOL * max(1.0, float(np.linalg.norm(da))):
        raise ValueError(f"torsion decomposition residual {res:.3g}")
    tau1.append(tau1_4)
    tau2.append(tau2_4)
    return SU2Torsion(tau0, tau0_kl, tuple(tau1), tuple(tau2), res)


def _i_endo(S: np.ndarray, w: np.ndarray) -> Form:
    """i(S)w as the 2-form (X, Y) -> w(SX, Y), with w a skew matrix."""
    return two_form_from_matrix(S.T @ w)


def _J_on_form(J: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """(J beta)(X) = beta(J X)."""
    return J.T @ beta


def torsion_from_components(cc: ConnectionComponents, s: SU2Structure,
                            tau1_eps: str = "proof") -> SU2Torsion:
    """Torsion predicted from the connection components of the spinor.

    ``tau1_eps`` selects the sign in tau1^k = -2 sum_{l != k} eps J_l Theta_l:
    "proof" uses eps_l (consistent with d omega_k), "statement" uses eps_k.
    """
    if tau1_eps not in ("proof", "statement"):
        raise ValueError("tau1_eps must be 'proof' or 'statement'")
    mu, (l1, l2, l3), (p1, p2, p3) = cc.mu_S, cc.lam, cc.phi
    J = s.J
    g = s.projector
    om = [two_form_matrix(w) for w in s.omega]
    S1, S2, S3 = cc.S_parts
    tau0 = (-4 * mu, 4 * l3, -4 * l2)
    kl = np.array([[4 * l1, 4 * l2 + 2 * p3, 4 * l3 - 2 * p2],
                   [-(4 * l2 + 2 * p3), 4 * l1, 4 * mu - 2 * p1],
                   [-(4 * l3 - 2 * p2), -(4 * mu - 2 * p1), 4 * l1]])
    tau1 = []
    for k in range(3):
        t = sum((EPS[l] if tau1_eps == "proof" else EPS[k]) * _J_on_form(J[l], cc.Theta[l])
                for l in range(3) if l != k)
        tau1.append(one_form(-2 * t))
    tau1.append(one_form(2 * _J_on_form(J[0], cc.V_xi)))
    tau2 = (4 * _i_endo(cc.S0, g), 4 * _i_endo(S3, om[2]), -4 * _i_endo(S2, om[1]),
            -4 * _i_endo(S1, om[0]))
    return SU2Torsion(tau0, kl, tuple(tau1), tau2, 0.0)


def is_hypo(alg: MetricLieAlgebra, s: SU2Structure, tol: float = 1e-10) -> bool:
    forms = (cev_differential(alg, s.omega[0]),
             cev_differential(alg, wedge(s.alpha, s.omega[1])),
             cev_differential(alg, wedge(s.alpha, s.omega[2])))
    return all(f.norm() <= tol for f in forms)


# SU(3) structures

@dataclass(frozen=True, eq=False)
class SU3Structure:
    eta: np.ndarray
    omega: Form
    theta_plus: Form


def su3_from_spinor(eta, rep: CliffordRep | None = None) -> SU3Structure:
    """omega(X, Y) = <j X eta, Y eta> and Theta+(X, Y, Z) = -<X Y Z eta, eta>."""
    rep = rep or rep_for_dim(6)
    if rep.n != 6:
        raise DimensionError("SU(3) structures need the 6-dimensional representation")
    eta = _unit(eta, rep.N)
    j = complex_structure_dim6()
    G = np.array(rep.generators)
    Geta = G @ eta
    W = (Geta @ j.T) @ Geta.T  # W[a, b] = <j G_a eta, G_b eta>
    omega = two_form_from_matrix(W)
    terms = {}
    for idx in basis_tuples(6, 3):
        terms[idx] = -float(eta @ (rep.product(idx) @ eta))
    return SU3Structure(eta, omega, Form(6, terms, degree=3))
