"""Real Clifford representations for n = 1..8.

Conventions: generators satisfy G_i G_j + G_j G_i = -2 delta_ij, and the
base representation of Cl_6 is the explicit 8x8 one built from the skew
endomorphisms E_ij (u_i -> u_j, u_j -> -u_i).  Lower dimensions come from
the restriction v -> v e_n; Cl_8 is built by doubling Cl_6.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

TOL = 1e-12

# (sign, i, j) triples for each generator of the Cl_6 representation
_CL6_TABLE = (
    ((+1, 1, 8), (+1, 2, 7), (-1, 3, 6), (-1, 4, 5)),
    ((-1, 1, 7), (+1, 2, 8), (+1, 3, 5), (-1, 4, 6)),
    ((-1, 1, 6), (+1, 2, 5), (-1, 3, 8), (+1, 4, 7)),
    ((-1, 1, 5), (-1, 2, 6), (-1, 3, 7), (-1, 4, 8)),
    ((-1, 1, 3), (-1, 2, 4), (+1, 5, 7), (+1, 6, 8)),
    ((+1, 1, 4), (-1, 2, 3), (-1, 5, 8), (+1, 6, 7)),
)


def skew_unit(i: int, j: int, size: int = 8) -> np.ndarray:
    """E_ij: maps u_i to u_j and u_j to -u_i (1-based)."""
    m = np.zeros((size, size))
    m[j - 1, i - 1] = 1.0
    m[i - 1, j - 1] = -1.0
    return m


@dataclass(frozen=True, eq=False)
class CliffordRep:
    """Generators G_1..G_n of a real Cl_n representation on R^N."""

    generators: tuple[np.ndarray, ...]
    label: str = ""
    _products: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        gens = tuple(np.array(g, dtype=float) for g in self.generators)
        for g in gens:
            g.setflags(write=False)
        object.__setattr__(self, "generators", gens)

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def N(self) -> int:
        return self.generators[0].shape[0]

    @property
    def volume(self) -> np.ndarray:
        return self.product(tuple(range(1, self.n + 1)))

    def product(self, idx: tuple[int, ...]) -> np.ndarray:
        """Ordered product G_{i1} ... G_{ik} (identity for the empty tuple)."""
        m = self._products.get(idx)
        if m is None:
            m = np.eye(self.N)
            for i in idx:
                m = m @ self.generators[i - 1]
            m.setflags(write=False)
            self._products[idx] = m
        return m

    def vector(self, v) -> np.ndarray:
        """Clifford multiplication by the vector with frame components v."""
        return np.einsum("i,ijk->jk", np.asarray(v, dtype=float), np.array(self.generators))

    def invariant_residuals(self) -> dict[str, float]:
        n, N = self.n, self.N
        eye = np.eye(N)
        anti = max(np.abs(gi @ gj + gj @ gi + 2.0 * (i == j) * eye).max()
                   for i, gi in enumerate(self.generators)
                   for j, gj in enumerate(self.generators))
        skew = max(np.abs(g + g.T).max() for g in self.generators)
        orth = max(np.abs(g.T @ g - eye).max() for g in self.generators)
        vol = self.volume
        sign = 1.0 if n % 2 else -1.0  # commutes (odd n) or anticommutes (even n)
        central = max(np.abs(vol @ g - sign * g @ vol).max() for g in self.generators)
        return {"anticommutation": anti, "skew": skew, "orthogonal": orth, "volume": central}

    def check(self, tol: float = TOL) -> None:
        bad = {k: v for k, v in self.invariant_residuals().items() if v > tol}
        if bad:
            raise ValueError(f"Clifford invariants violated: {bad}")


def rep_cl6() -> CliffordRep:
    gens = []
    for row in _CL6_TABLE:
        g = sum(s * skew_unit(i, j) for s, i, j in row)
        gens.append(g)
    return CliffordRep(tuple(gens), label="rho6")


def restrict(rep: CliffordRep) -> CliffordRep:
    """Cl_{n-1} representation v -> rho_n(v e_n): generators G_i G_n, i < n."""
    if rep.n < 2:
        raise ValueError("cannot restrict a representation of Cl_1")
    last = rep.generators[-1]
    gens = tuple(g @ last for g in rep.generators[:-1])
    return CliffordRep(gens, label=f"rho{rep.n - 1}")


def rep_cl8() -> CliffordRep:
    """16x16 representation of Cl_8 obtained by doubling rho_6.

    G_i = [[0, g_i], [g_i, 0]] for i <= 6, G_7 = [[0, -I], [I, 0]] and
    G_8 = s [[0, nu_6], [nu_6, 0]].  The sign s is fixed so that a unit
    spinor in the +1 eigenspace of nu_8 yields a self-dual Spin(7) form.
    """
    base = rep_cl6()
    z = np.zeros((8, 8))
    eye = np.eye(8)
    nu6 = base.volume
    gens = [np.block([[z, g], [g, z]]) for g in base.generators]
    gens.append(np.block([[z, -eye], [eye, z]]))
    gens.append(_CL8_LAST_SIGN * np.block([[z, nu6], [nu6, z]]))
    return CliffordRep(tuple(gens), label="rho8")


_CL8_LAST_SIGN = 1.0


def rep_cl7_positive() -> CliffordRep:
    """8x8 representation of Cl_7: G_i G_8 restricted to the +1 eigenspace of nu_8."""
    rho8 = rep_cl8()
    basis = eigenbasis(0.5 * (np.eye(16) + rho8.volume))
    last = rho8.generators[-1]
    gens = tuple(basis.T @ g @ last @ basis for g in rho8.generators[:-1])
    return CliffordRep(gens, label="rho7")


@lru_cache(maxsize=None)
def rep_for_dim(n: int) -> CliffordRep:
    """The representation used throughout for dimension n (1..8)."""
    if n == 8:
        return rep_cl8()
    if n == 7:
        return rep_cl7_positive()
    if 1 <= n <= 6:
        rep = rep_cl6()
        while rep.n > n:
            rep = restrict(rep)
        return rep
    raise ValueError(f"no Clifford representation provided for n={n}")


def chirality_split(rep: CliffordRep) -> tuple[np.ndarray, np.ndarray]:
    """Projectors (I + nu)/2 and (I - nu)/2 onto the +-1 eigenspaces of nu."""
    if rep.n % 4 != 0:
        raise ValueError(f"chirality splitting needs n = 0 mod 4, got n={rep.n}")
    vol = rep.volume
    eye = np.eye(rep.N)
    return 0.5 * (eye + vol), 0.5 * (eye - vol)


def eigenbasis(projector: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns) of the range of a symmetric projector."""
    w, v = np.linalg.eigh(0.5 * (projector + projector.T))
    return v[:, w > 0.5]


@dataclass(frozen=True, eq=False)
class QuaternionicOps:
    j1: np.ndarray
    j2: np.ndarray
    j3: np.ndarray

    def __iter__(self):
        return iter((self.j1, self.j2, self.j3))

    def __getitem__(self, k: int) -> np.ndarray:
        """1-based access j_k."""
        return (self.j1, self.j2, self.j3)[k - 1]


def quaternionic_ops_dim5() -> QuaternionicOps:
    """j1 = rho5(nu5), j2 = rho6(e6), j3 = j1 j2."""
    rho6 = rep_cl6()
    rho5 = rep_for_dim(5)
    j1 = rho5.volume.copy()
    j2 = rho6.generators[5].copy()
    return QuaternionicOps(j1, j2, j1 @ j2)


def complex_structure_dim6() -> np.ndarray:
    """j = rho6(nu6), which anticommutes with Clifford multiplication by vectors."""
    return rep_for_dim(6).volume.copy()
