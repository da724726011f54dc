"""Exterior forms over an orthonormal coframe of R^n.

Indices are 1-based and every stored tuple is strictly increasing.  A
``Form`` is homogeneous: all of its terms share one degree.
"""

from __future__ import annotations

import itertools
import math
from types import MappingProxyType
from typing import TYPE_CHECKING, Iterable, Mapping

import numpy as np

if TYPE_CHECKING:
    from .clifford import CliffordRep

MAX_DIM = 16

Index = tuple[int, ...]


class DimensionError(ValueError):
    pass


def check_orientation(sign: int) -> int:
    if sign not in (1, -1):
        raise ValueError(f"orientation must be +1 or -1, got {sign!r}")
    return int(sign)


def _merge_sign(a: Index, b: Index) -> int:
    """Sign of sorting the concatenation a+b, or 0 on a repeated index."""
    inversions = 0
    for i in a:
        for j in b:
            if i == j:
                return 0
            if i > j:
                inversions += 1
    return -1 if inversions & 1 else 1


def permutation_sign(seq: Iterable[int]) -> int:
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class Form:
    """A homogeneous k-form on R^n stored as ``{(i1<...<ik): coefficient}``."""

    __slots__ = ("dim", "degree", "_terms")

    def __init__(self, dim: int, terms: Mapping[Index, float] | None = None,
                 degree: int | None = None):
        if not 1 <= dim <= MAX_DIM:
            raise DimensionError(f"dimension {dim} outside 1..{MAX_DIM}")
        clean: dict[Index, float] = {}
        for idx, c in (terms or {}).items():
            idx = tuple(int(i) for i in idx)
            c = float(c)
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient on e{idx}")
            if any(i < 1 or i > dim for i in idx):
                raise DimensionError(f"index tuple {idx} out of range for dim {dim}")
            if any(idx[k] >= idx[k + 1] for k in range(len(idx) - 1)):
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if degree is None:
                degree = len(idx)
            elif len(idx) != degree:
                raise ValueError("form terms must share one degree")
            if c != 0.0:
                clean[idx] = clean.get(idx, 0.0) + c
        self.dim = dim
        self.degree = 0 if degree is None else degree
        self._terms = clean

    # construction helpers

    @classmethod
    def _raw(cls, dim: int, degree: int, terms: dict[Index, float]) -> "Form":
        f = object.__new__(cls)
        f.dim = dim
        f.degree = degree
        f._terms = {k: v for k, v in terms.items() if v != 0.0}
        return f

    @classmethod
    def zero(cls, dim: int, degree: int = 0) -> "Form":
        return cls._raw(dim, degree, {})

    @classmethod
    def scalar(cls, dim: int, value: float) -> "Form":
        return cls._raw(dim, 0, {(): float(value)})

    @classmethod
    def basis(cls, dim: int, *indices: int) -> "Form":
        """e^{i1...ik} with the sign of sorting the given indices."""
        sign = permutation_sign(indices)
        if any(i < 1 or i > dim for i in indices):
            raise DimensionError(f"indices {indices} out of range for dim {dim}")
        return cls._raw(dim, len(indices), {tuple(sorted(indices)): float(sign)})

    @classmethod
    def from_vector(cls, dim: int, degree: int, vec) -> "Form":
        terms = {idx: float(c) for idx, c in zip(basis_tuples(dim, degree), vec)}
        return cls._raw(dim, degree, terms)

    # accessors

    @property
    def terms(self) -> Mapping[Index, float]:
        return MappingProxyType(self._terms)

    def coeff(self, *indices: int) -> float:
        sign = permutation_sign(indices)
        return sign * self._terms.get(tuple(sorted(indices)), 0.0)

    def to_vector(self) -> np.ndarray:
        return np.array([self._terms.get(idx, 0.0)
                         for idx in basis_tuples(self.dim, self.degree)])

    def norm(self) -> float:
        return math.sqrt(sum(c * c for c in self._terms.values()))

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self._terms.values())

    def allclose(self, other: "Form", tol: float = 1e-12) -> bool:
        _check_dims(self, other)
        return (self - other).norm() <= tol if self.degree == other.degree else (
            self.is_zero(tol) and other.is_zero(tol))

    # linear structure

    def __add__(self, other: "Form") -> "Form":
        _check_dims(self, other)
        if not self._terms:
            return other
        if not other._terms:
            return self
        if self.degree != other.degree:
            raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")
        out = dict(self._terms)
        for k, v in other._terms.items():
            out[k] = out.get(k, 0.0) + v
        return Form._raw(self.dim, self.degree, out)

    def __neg__(self) -> "Form":
        return Form._raw(self.dim, self.degree, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __mul__(self, s: float) -> "Form":
        s = float(s)
        return Form._raw(self.dim, self.degree, {k: s * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Form":
        return self * (1.0 / s)

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (self.dim == other.dim and self._terms == other._terms
                and (self.degree == other.degree or not self._terms))

    def __hash__(self):
        return hash((self.dim, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"Form(dim={self.dim}, {render(self)})"

    def __str__(self) -> str:
        return render(self)


def _check_dims(a: Form, b: Form) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def basis_tuples(dim: int, degree: int) -> list[Index]:
    return list(itertools.combinations(range(1, dim + 1), degree))


def wedge(a: Form, b: Form) -> Form:
    _check_dims(a, b)
    out: dict[Index, float] = {}
    for ia, ca in a._terms.items():
        for ib, cb in b._terms.items():
            sign = _merge_sign(ia, ib)
            if sign:
                key = tuple(sorted(ia + ib))
                out[key] = out.get(key, 0.0) + sign * ca * cb
    return Form._raw(a.dim, a.degree + b.degree, out)


def wedge_all(*forms: Form) -> Form:
    result = forms[0]
    for f in forms[1:]:
        result = wedge(result, f)
    return result


def contract(i: int, a: Form) -> Form:
    """Interior product i(e_i) a with the i-th orthonormal frame vector."""
    if not 1 <= i <= a.dim:
        raise DimensionError(f"frame index {i} out of range for dim {a.dim}")
    if a.degree == 0:
        return Form.zero(a.dim, 0)
    out: dict[Index, float] = {}
    for idx, c in a._terms.items():
        if i in idx:
            pos = idx.index(i)
            key = idx[:pos] + idx[pos + 1:]
            out[key] = out.get(key, 0.0) + (-c if pos & 1 else c)
    return Form._raw(a.dim, a.degree - 1, out)


def contract_vector(v, a: Form) -> Form:
    """Interior product with a vector given by frame components."""
    result = Form.zero(a.dim, max(a.degree - 1, 0))
    for i, vi in enumerate(v, start=1):
        if vi != 0.0:
            result = result + vi * contract(i, a)
    return result


def without_index(i: int, a: Form) -> Form:
    """Part of ``a`` with no e^i factor (a = e^i ^ i(e_i)a + this)."""
    return Form._raw(a.dim, a.degree, {k: v for k, v in a._terms.items() if i not in k})


def volume(dim: int, orientation: int = 1) -> Form:
    return Form._raw(dim, dim, {tuple(range(1, dim + 1)): float(check_orientation(orientation))})


def hodge_star(a: Form, orientation: int = 1) -> Form:
    """Hodge star fixed by b ^ *b = |b|^2 * orientation * e^{1...n}."""
    sign = check_orientation(orientation)
    n = a.dim
    full = set(range(1, n + 1))
    out: dict[Index, float] = {}
    for idx, c in a._terms.items():
        comp = tuple(sorted(full - set(idx)))
        out[comp] = out.get(comp, 0.0) + sign * permutation_sign(idx + comp) * c
    return Form._raw(n, n - a.degree, out)


def one_form(v) -> Form:
    v = list(v)
    return Form._raw(len(v), 1, {(i,): float(c) for i, c in enumerate(v, start=1)})


def sharp(a: Form) -> np.ndarray:
    """Frame components of the vector dual to a 1-form."""
    if a.degree != 1:
        raise ValueError("sharp needs a 1-form")
    return np.array([a._terms.get((i,), 0.0) for i in range(1, a.dim + 1)])


def two_form_matrix(a: Form) -> np.ndarray:
    """Skew matrix A with a = sum_{i<j} A[i-1, j-1] e^{ij}."""
    if a.degree != 2:
        raise ValueError("two_form_matrix needs a 2-form")
    m = np.zeros((a.dim, a.dim))
    for (i, j), c in a._terms.items():
        m[i - 1, j - 1] = c
        m[j - 1, i - 1] = -c
    return m


def two_form_from_matrix(m) -> Form:
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    terms = {(i + 1, j + 1): 0.5 * (m[i, j] - m[j, i])
             for i in range(n) for j in range(i + 1, n)}
    return Form._raw(n, 2, terms)


def clifford_matrix(a: Form, rep: "CliffordRep") -> np.ndarray:
    """Matrix of Clifford multiplication by ``a``.

    A basis form e^{i1...ik} acts as G_{i1} ... G_{ik}; this is the closed
    form of the recursion (X ^ b) phi = X (b phi) + (i(X) b) phi for
    orthonormal, pairwise distinct indices.
    """
    if a.dim != rep.n:
        raise DimensionError(f"form of dim {a.dim} acting through Cl_{rep.n}")
    m = np.zeros((rep.N, rep.N))
    for idx, c in a._terms.items():
        m += c * rep.product(idx)
    return m


def clifford_action(a: Form, rep: "CliffordRep", phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.shape[0] != rep.N:
        raise DimensionError(f"spinor of length {phi.shape[0]} for a rank-{rep.N} rep")
    return clifford_matrix(a, rep) @ phi


def clifford_action_recursive(a: Form, rep: "CliffordRep", phi) -> np.ndarray:
    """Clifford action evaluated through (X ^ b) phi = X (b phi) + (i(X) b) phi.

    Independent of ``clifford_matrix``; used to cross-check it.
    """
    phi = np.asarray(phi, dtype=float)
    if a.degree == 0:
        return a._terms.get((), 0.0) * phi
    out = np.zeros_like(phi)
    for idx, c in a._terms.items():
        head, rest = idx[0], Form._raw(a.dim, a.degree - 1, {idx[1:]: 1.0})
        term = rep.generators[head - 1] @ clifford_action_recursive(rest, rep, phi)
        if rest.degree > 0:
            term = term + clifford_action_recursive(contract(head, rest), rep, phi)
        out += c * term
    return out


def _format_coeff(c: float) -> str:
    c = float(c)
    if c == int(c) and abs(c) < 1e15:
        return str(int(c))
    return f"{c:.12g}"


def chop(f: Form, tol: float = 1e-12) -> Form:
    """Drop round-off coefficients and round the rest to 12 significant digits."""
    scale = max((abs(c) for c in f.terms.values()), default=0.0)
    terms = {idx: float(f"{c:.12g}") for idx, c in f.terms.items() if abs(c) > tol * max(scale, 1.0)}
    return Form(f.dim, terms, degree=f.degree)


def render(a: Form) -> str:
    """Text rendering as ``c*e125`` terms joined by + and -."""
    if not a._terms:
        return "0"
    parts = []
    for idx in sorted(a._terms):
        c = a._terms[idx]
        name = "e" + "".join(str(i) for i in idx) if idx else ""
        mag = abs(c)
        if name:
            body = name if mag == 1.0 else f"{_format_coeff(mag)}*{name}"
        else:
            body = _format_coeff(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)
