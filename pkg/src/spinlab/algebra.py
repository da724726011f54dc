"""Metric Lie algebras given by structure equations over an orthonormal coframe."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .forms import Form, DimensionError, basis_tuples, check_orientation, render, wedge
from .parsing import (ParseError, parse_algebra_file, parse_salamon_differentials)

JACOBI_TOL = 1e-10


class JacobiError(ValueError):
    """d(de^i) != 0 for some i; ``residuals`` maps offending i to the residual norm."""

    def __init__(self, residuals: Mapping[int, float]):
        self.residuals = dict(residuals)
        listing = ", ".join(f"d(de{i}) norm {r:.3g}" for i, r in self.residuals.items())
        super().__init__(f"Jacobi identity fails: {listing}")


class DerivationError(ValueError):
    pass


# Chevalley-Eilenberg differential as a dense matrix on Lambda^k

@lru_cache(maxsize=None)
def _leibniz_table(n: int, k: int):
    """Index table for d on Lambda^k: rows (out, in, source i, pair, sign).

    d(e^I) = sum_s (-1)^s e^{i_1} .. de^{i_s} .. e^{i_k}; de^{i_s} expands
    over pairs (a<b), each contributing one basis (k+1)-form with a sign.
    """
    src = basis_tuples(n, k)
    dst = {t: r for r, t in enumerate(basis_tuples(n, k + 1))}
    pairs = basis_tuples(n, 2)
    rows, cols, gens, prs, signs = [], [], [], [], []
    for c, idx in enumerate(src):
        for s, i in enumerate(idx):
            rest = idx[:s] + idx[s + 1:]
            for p, (a, b) in enumerate(pairs):
                if a in rest or b in rest:
                    continue
                seq = idx[:s] + (a, b) + idx[s + 1:]
                order = sorted(range(k + 1), key=lambda q: seq[q])
                inv = sum(1 for x in range(k + 1) for y in range(x + 1, k + 1)
                          if order[x] > order[y])
                sign = (-1) ** (s + inv)
                rows.append(dst[tuple(sorted(seq))])
                cols.append(c)
                gens.append(i - 1)
                prs.append(p)
                signs.append(sign)
    arr = lambda x: np.array(x, dtype=np.intp)
    return (arr(rows), arr(cols), arr(gens), arr(prs), np.array(signs, dtype=float),
            len(dst), len(src))


@dataclass(frozen=True, eq=False)
class MetricLieAlgebra:
    """Structure equations de^1..de^n over an orthonormal coframe."""

    dim: int
    differentials: tuple[Form, ...]
    orientation: int = 1
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        diffs = tuple(self.differentials)
        if len(diffs) != self.dim:
            raise DimensionError(f"expected {self.dim} differentials, got {len(diffs)}")
        for i, f in enumerate(diffs, start=1):
            if f.dim != self.dim:
                raise DimensionError(f"de{i} lives in dim {f.dim}, algebra has dim {self.dim}")
            if f.terms and f.degree != 2:
                raise ValueError(f"de{i} must be a 2-form")
        diffs = tuple(f if f.terms else Form.zero(self.dim, 2) for f in diffs)
        object.__setattr__(self, "differentials", diffs)
        object.__setattr__(self, "orientation", check_orientation(self.orientation))

    # construction

    @classmethod
    def from_salamon(cls, text: str, params: Mapping[str, float] | None = None,
                     orientation: int = 1, name: str = "", check: bool = True
                     ) -> "MetricLieAlgebra":
        alg = cls(len(diffs := parse_salamon_differentials(text, params)), tuple(diffs),
                  orientation, name)
        if check:
            alg.check_jacobi()
        return alg

    @classmethod
    def from_text(cls, text: str, params: Mapping[str, float] | None = None,
                  name: str = "", check: bool = True) -> "MetricLieAlgebra":
        """Accept either a Salamon string or the line-based file format."""
        if text.lstrip().startswith("("):
            return cls.from_salamon(text, params, name=name, check=check)
        spec = parse_algebra_file(text, params)
        alg = cls(spec.dim, tuple(spec.differentials), spec.orientation, name)
        if check:
            alg.check_jacobi()
        return alg

    @classmethod
    def abelian(cls, dim: int) -> "MetricLieAlgebra":
        return cls(dim, tuple(Form.zero(dim, 2) for _ in range(dim)), name=f"A{dim}")

    # structure constants

    def structure_matrix(self) -> np.ndarray:
        """C[i, p] = coefficient of the p-th basis 2-form in de^{i+1}."""
        m = self._cache.get("C")
        if m is None:
            m = np.array([f.to_vector() for f in self.differentials]).reshape(self.dim, -1)
            m.setflags(write=False)
            self._cache["C"] = m
        return m

    def d_matrix(self, k: int) -> np.ndarray:
        """Matrix of d: Lambda^k -> Lambda^{k+1} in the basis_tuples ordering."""
        key = ("d", k)
        m = self._cache.get(key)
        if m is None:
            n = self.dim
            if k >= n:
                m = np.zeros((0, len(basis_tuples(n, k))))
            else:
                rows, cols, gens, prs, signs, nr, nc = _leibniz_table(n, k)
                m = np.zeros((nr, nc))
                C = self.structure_matrix()
                if C.size:
                    np.add.at(m, (rows, cols), signs * C[gens, prs])
            m.setflags(write=False)
            self._cache[key] = m
        return m

    def d(self, a: Form) -> Form:
        return cev_differential(self, a)

    # checks

    def jacobi_residuals(self) -> dict[int, float]:
        d2 = self.d_matrix(2)
        C = self.structure_matrix()
        return {i + 1: float(np.linalg.norm(d2 @ C[i])) for i in range(self.dim)}

    def check_jacobi(self, tol: float = JACOBI_TOL) -> None:
        bad = {i: r for i, r in self.jacobi_residuals().items() if r > tol}
        if bad:
            raise JacobiError(bad)

    @property
    def is_nilpotent_frame(self) -> bool:
        return all(max(idx) < k for k, f in enumerate(self.differentials, start=1)
                   for idx in f.terms)

    @property
    def is_abelian(self) -> bool:
        return all(not f.terms for f in self.differentials)

    # rendering

    def to_salamon(self) -> str:
        if self.dim > 9:
            raise ValueError("Salamon notation uses single-digit indices (dim <= 9)")
        entries = []
        for f in self.differentials:
            if not f.terms:
                entries.append("0")
                continue
            parts = []
            for (i, j), c in sorted(f.terms.items()):
                pair = f"{i}{j}"
                mag = abs(c)
                body = pair if mag == 1.0 else f"{_coeff_text(mag)}*{pair}"
                sign = "-" if c < 0 else "+"
                parts.append(("-" if c < 0 else "") + body if not parts else sign + body)
            entries.append("".join(parts))
        return "(" + ",".join(entries) + ")"

    def render(self) -> str:
        lines = [f"dim {self.dim}", f"orientation {'+1' if self.orientation > 0 else '-1'}"]
        for i, f in enumerate(self.differentials, start=1):
            if f.terms:
                lines.append(f"d e{i} = {render(f)}")
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        label = f"{self.name} " if self.name else ""
        return f"MetricLieAlgebra({label}{self.to_salamon() if self.dim <= 9 else self.dim})"


def _coeff_text(c: float) -> str:
    return str(int(c)) if c == int(c) and abs(c) < 1e15 else repr(c)


def cev_differential(alg: MetricLieAlgebra, a: Form) -> Form:
    """Chevalley-Eilenberg differential extending de^i by the Leibniz rule."""
    if a.dim != alg.dim:
        raise DimensionError(f"form of dim {a.dim} on an algebra of dim {alg.dim}")
    if a.degree >= alg.dim:
        return Form.zero(alg.dim, a.degree + 1) if a.degree < alg.dim else Form.zero(alg.dim, 0)
    vec = alg.d_matrix(a.degree) @ a.to_vector()
    return Form.from_vector(alg.dim, a.degree + 1, vec)


# derivations and rank-one extensions

@dataclass(frozen=True, eq=False)
class Derivation:
    """D acting on the coframe: D(e^i) = sum_j matrix[i-1, j-1] e^j."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("derivation matrix must be square")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def image(self, i: int) -> Form:
        return Form.from_vector(self.dim, 1, self.matrix[i - 1])

    def apply(self, a: Form) -> Form:
        """Extension of D to forms as a derivation of the wedge product."""
        out = Form.zero(a.dim, a.degree)
        for idx, c in a.terms.items():
            for s, i in enumerate(idx):
                left = Form.basis(a.dim, *idx[:s]) if s else Form.scalar(a.dim, 1.0)
                right = Form.basis(a.dim, *idx[s + 1:]) if s + 1 < len(idx) else Form.scalar(a.dim, 1.0)
                out = out + c * wedge(wedge(left, self.image(i)), right)
        return out

    def residual(self, alg: MetricLieAlgebra) -> float:
        """max_i |d(D e^i) - D(d e^i)|, zero iff D commutes with d on 1-forms."""
        if alg.dim != self.dim:
            raise DimensionError("derivation and algebra dimensions differ")
        worst = 0.0
        for i in range(1, alg.dim + 1):
            diff = cev_differential(alg, self.image(i)) - self.apply(alg.differentials[i - 1])
            worst = max(worst, diff.norm())
        return worst

    def check(self, alg: MetricLieAlgebra, tol: float = JACOBI_TOL) -> None:
        r = self.residual(alg)
        if r > tol:
            raise DerivationError(f"matrix is not a derivation (residual {r:.3g})")


def _embed(a: Form, dim: int) -> Form:
    return Form(dim, dict(a.terms), degree=a.degree)


def rank1_extension(n_alg: MetricLieAlgebra, D: Derivation) -> MetricLieAlgebra:
    """Solvable algebra with e^0 appended as the last coframe element.

    de^0 = 0 and de^i = d_n e^i + D(e^i) ^ e^0.
    """
    if not n_alg.is_nilpotent_frame:
        raise ValueError("rank-one extension needs a nilpotent frame")
    D.check(n_alg)
    n = n_alg.dim + 1
    e0 = Form.basis(n, n)
    diffs = []
    for i in range(1, n):
        diffs.append(_embed(n_alg.differentials[i - 1], n) + wedge(_embed(D.image(i), n), e0))
    diffs.append(Form.zero(n, 2))
    name = f"{n_alg.name}+D" if n_alg.name else ""
    return MetricLieAlgebra(n, tuple(diffs), n_alg.orientation, name)


def direct_sum_abelian(alg: MetricLieAlgebra, k: int) -> MetricLieAlgebra:
    """alg + R^k with k closed coframe elements appended."""
    n = alg.dim + k
    diffs = [_embed(f, n) for f in alg.differentials] + [Form.zero(n, 2)] * k
    name = f"{alg.name}+A{k}" if alg.name else ""
    return MetricLieAlgebra(n, tuple(diffs), alg.orientation, name)


# parameter families

NONZERO = "nonzero"
FREE = "free"


@dataclass(frozen=True)
class ParameterFamily:
    """Structure equations with named coefficients.

    ``template`` is a Salamon string whose coefficients may reference the
    parameters; ``constraints`` marks each parameter nonzero or free.
    """

    name: str
    template: str
    constraints: tuple[tuple[str, str], ...] = ()
    note: str = ""

    @property
    def dim(self) -> int:
        return len(self.template.strip()[1:-1].split(","))

    @property
    def params(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.constraints)

    @property
    def nonzero(self) -> tuple[str, ...]:
        return tuple(p for p, kind in self.constraints if kind == NONZERO)

    def validate(self, bindings: Mapping[str, float]) -> None:
        missing = [p for p in self.params if p not in bindings]
        if missing:
            raise ParseError(f"{self.name}: unbound parameters {missing}")
        zero = [p for p in self.nonzero if bindings[p] == 0.0]
        if zero:
            raise ValueError(f"{self.name}: parameters {zero} must be nonzero")

    def instantiate(self, bindings: Mapping[str, float] | None = None,
                    check: bool = True) -> MetricLieAlgebra:
        bindings = dict(bindings or {})
        self.validate(bindings)
        return MetricLieAlgebra.from_salamon(self.template, bindings, name=self.name,
                                             check=check)

    def sample(self, rng: np.random.Generator, bounds: tuple[float, float] = (-2.0, 2.0),
               nonzero_margin: float = 0.1) -> dict[str, float]:
        """Uniform draw; nonzero parameters are redrawn until |value| > margin."""
        lo, hi = bounds
        out = {}
        for p, kind in self.constraints:
            v = float(rng.uniform(lo, hi))
            while kind == NONZERO and abs(v) <= nonzero_margin:
                v = float(rng.uniform(lo, hi))
            out[p] = v
        return out


def _family(name: str, template: str, nonzero: Sequence[str] = (), free: Sequence[str] = (),
            note: str = "") -> ParameterFamily:
    cons = tuple((p, NONZERO) for p in nonzero) + tuple((p, FREE) for p in free)
    return ParameterFamily(name, template, cons, note)


# Parameter names: mu12 for a nonzero constant, lam12 for a possibly vanishing one,
# lam12_4 for a coefficient carrying an extra label.

_DIM4 = (
    _family("L3+A1", "(0,0,0,mu12*12)", ["mu12"]),
    _family("L4", "(0,0,mu12*12,lam12*12+mu13*13)", ["mu12", "mu13"], ["lam12"]),
)

_DIM5 = (
    _family("L3+A2", "(0,0,0,0,mu12*12)", ["mu12"]),
    _family("L4+A1", "(0,0,0,mu12*12,lam12*12+lam13*13+mu14*14)",
            ["mu12", "mu14"], ["lam12", "lam13"]),
    _family("N5,6", "(0,0,0,0,mu12*12+mu34*34)", ["mu12", "mu34"]),
    _family("N5,5", "(0,0,0,mu12*12,mu13*13)", ["mu12", "mu13"]),
    _family("N5,4", "(0,0,0,mu12*12,lam12*12+lam13*13+mu14*14+mu23*23)",
            ["mu12", "mu14", "mu23"], ["lam12", "lam13"]),
    _family("N5,3", "(0,0,mu12*12,lam12_4*12+mu13*13,lam12_5*12+mu23*23)",
            ["mu12", "mu13", "mu23"], ["lam12_4", "lam12_5"]),
    _family("N5,2", "(0,0,mu12*12,lam12_4*12+mu13*13,lam12_5*12+lam13*13+mu14*14)",
            ["mu12", "mu13", "mu14"], ["lam12_4", "lam12_5", "lam13"]),
    _family("N5,1", "(0,0,mu12*12,lam12_4*12+mu13*13,lam12_5*12+lam13*13+mu14*14+mu23*23)",
            ["mu12", "mu13", "mu14", "mu23"], ["lam12_4", "lam12_5", "lam13"]),
)

_DIM6_DECOMPOSABLE = (
    _family("L3+A3", "(0,0,0,0,0,mu12*12)", ["mu12"]),
    # de6 = e3 ^ (mu34 e4 + lam13_6 e1 + lam23 e2)
    _family("L3+L3", "(0,0,0,0,mu12*12+lam13_5*13,mu34*34-lam13_6*13-lam23*23)",
            ["mu12", "mu34"], ["lam13_5", "lam13_6", "lam23"]),
    _family("L4+A2", "(0,0,0,0,mu12*12,lam12*12+lam13*13+mu15*15)",
            ["mu12", "mu15"], ["lam12", "lam13"]),
    _family("N5,6+A1", "(0,0,0,0,0,mu12*12+mu34*34)", ["mu12", "mu34"]),
    _family("N5,5+A1", "(0,0,0,0,mu12*12,mu13*13)", ["mu12", "mu13"]),
    _family("N5,4+A1", "(0,0,0,0,mu12*12,lam12*12+lam13*13+lam14*14+mu15*15+mu23*23)",
            ["mu12", "mu15", "mu23"], ["lam12", "lam13", "lam14"]),
    _family("N5,3+A1", "(0,0,0,mu12*12,lam12_5*12+lam*23+mu14*14,lam12_6*12+lam*13+mu24*24)",
            ["mu12", "mu14", "mu24"], ["lam12_5", "lam12_6", "lam"]),
    _family("N5,2+A1", "(0,0,0,mu12*12,lam12_5*12+mu14*14+lam13*13,"
            "lam12_6*12+lam13*13+lam14*14+mu15*15)",
            ["mu12", "mu14", "mu15"], ["lam12_5", "lam12_6", "lam13", "lam14"]),
    # de6 term printed as lam14 e^1 ^ e^14 is read as lam14 e^14
    _family("N5,1+A1", "(0,0,0,mu12*12,lam12_5*12+mu14*lam13_4*13+mu14*14,"
            "lam12_6*12+lam13_6*13+lam14*14+mu15*15+mu24*lam13*23+mu24*24)",
            ["mu12", "mu14", "mu15", "mu24"], ["lam12_5", "lam13_4", "lam12_6", "lam13_6",
                                               "lam14", "lam13"]),
)

# closed-form constant used by the N6,3 row
_C = (459 + 12 * np.sqrt(177)) ** (1 / 3)
M_N63 = float(np.sqrt(3) * np.sqrt(_C * (_C ** 2 + 6 * _C + 57)) / (3 * _C))

# rows with fixed coefficients: (name, isomorphism type, metric structure equations)
_DIM6_NONDECOMPOSABLE_ROWS = (
    ("N6,24", "(0,0,0,0,12,13+24)", "(0,0,0,0,12,2*13+24)"),
    ("N6,23", "(0,0,0,0,13-24,14+23)", "(0,0,0,0,13-24,14+23)"),
    ("N6,22", "(0,0,0,0,12,15+34)", "(0,0,0,0,12,14+15+34)"),
    ("N6,21", "(0,0,0,12,13,23)", "(0,0,0,12,13,2*23)"),
    ("N6,20", "(0,0,0,12,13,14)", "(0,0,0,12,sqrt(2)*13,14)"),
    ("N6,18", "(0,0,0,12,13,24)", "(0,0,0,12,13,2*13+sqrt(3)*24+23)"),
    # the printed de6 lists e23 twice; both copies are kept
    ("N6,17", "(0,0,0,12,13,15+24)", "(0,0,0,12,13,12+15+23+24+23)"),
    ("N6,16", "(0,0,0,12,13,24-35)", "(0,0,0,12,13,-2*23+24-35)"),
    ("N6,15", "(0,0,0,12,13,24+35)", "(0,0,0,12,13,24+35)"),
    ("N6,19", "(0,0,0,12,13,14+23)", "(0,0,0,12,13,14+23+sqrt(2*(sqrt(2)-1))*12)"),
    ("N6,12", "(0,0,0,12,14,23+24)", "(0,0,0,12,14,23+24)"),
    ("N6,13", "(0,0,0,12,14,13+24)", "(0,0,0,12,14,13+24)"),
    ("N6,14", "(0,0,0,12,14+23,13-24)", "(0,0,0,1/sqrt(2)*12,sqrt(2)*14+23,13-sqrt(2)*24)"),
    ("N6,11", "(0,0,0,12,14,15+23)", "(0,0,0,12,14,15+sqrt(2)*13+23)"),
    ("N6,10", "(0,0,0,12,14,15+23+24)", "(0,0,0,12,14-7/4*13,15+24-3/4*23+2*12)"),
    ("N6,9", "(0,0,0,12,14+23,15-34)", "(0,0,0,12,14+23,1/4*15+1/4*34)"),
    ("N6,8", "(0,0,12,13,23,14)", "(0,0,12,13,23,14)"),
    ("N6,6", "(0,0,12,13,23,14+25)", "(0,0,12,13,23,14+24+12+sqrt(2)*23)"),
    ("N6,7", "(0,0,12,13,23,14-25)", "(0,0,12,13,23,14-25-12+sqrt(2)*23)"),
    ("N6,5", "(0,0,12,14,13,15)", "(0,0,12,13,1/5*14+1/5*12,1/5*12+1/5*14+sqrt(46)/5*15)"),
    ("N6,4", "(0,0,12,13,14,15+23)", "(0,0,12,13,14,15+23+12)"),
    ("N6,2", "(0,0,12,13,14,15-34)", "(0,0,12,13,14,25-34+sqrt(5)*12)"),
    ("N6,3", "(0,0,12,13,14+23,15+24)", "(0,0,12,13,1/m*14+1/m*23,m*15+24)"),
    ("N6,1", "(0,0,12,13,14+23,15-34)", "(0,0,12,13,14+23,25-34+(1+sqrt(5))*12)"),
)

# Alternative readings of rows whose verbatim coefficients fail the Jacobi
# identity or carry no harmonic spinor.
_DIM6_CORRECTED = {
    "N6,17": "(0,0,0,12,13,12+15+23+24)",
    "N6,14": "(0,0,0,sqrt(2)*12,1/sqrt(2)*14+23,13-1/sqrt(2)*24)",
    "N6,9": "(0,0,0,12,14+23,1/4*15-1/4*34)",
    "N6,6": "(0,0,12,13,23,14+25+12+sqrt(2)*23)",
}


@dataclass(frozen=True)
class FixedAlgebra:
    """A table row with numeric coefficients (no free parameters)."""

    name: str
    isomorphism_type: str
    template: str
    bindings: tuple[tuple[str, float], ...] = ()
    corrected_template: str | None = None

    @property
    def dim(self) -> int:
        return len(self.template.strip()[1:-1].split(","))

    def instantiate(self, check: bool = True, corrected: bool = False) -> MetricLieAlgebra:
        """Verbatim row, or the alternative reading when ``corrected`` and one exists."""
        template = self.corrected_template if corrected and self.corrected_template else self.template
        return MetricLieAlgebra.from_salamon(template, dict(self.bindings),
                                             name=self.name, check=check)


def catalog_dim4() -> tuple[ParameterFamily, ...]:
    return _DIM4


def catalog_dim5() -> tuple[ParameterFamily, ...]:
    return _DIM5


def catalog_dim6_decomposable() -> tuple[ParameterFamily, ...]:
    return _DIM6_DECOMPOSABLE


def catalog_dim6_nondecomposable() -> tuple[FixedAlgebra, ...]:
    return tuple(FixedAlgebra(n, iso, t, (("m", M_N63),) if n == "N6,3" else (),
                              _DIM6_CORRECTED.get(n))
                 for n, iso, t in _DIM6_NONDECOMPOSABLE_ROWS)


def catalog() -> tuple[ParameterFamily, ...]:
    """All parameterized families in dims 4, 5 and 6 (decomposable)."""
    return _DIM4 + _DIM5 + _DIM6_DECOMPOSABLE


def family(name: str) -> ParameterFamily:
    for f in catalog():
        if f.name == name:
            return f
    raise KeyError(f"unknown family {name!r}")


def fixed_row(name: str) -> FixedAlgebra:
    for f in catalog_dim6_nondecomposable():
        if f.name == name:
            return f
    raise KeyError(f"unknown table row {name!r}")


__all__ = [
    "MetricLieAlgebra", "JacobiError", "Derivation", "DerivationError", "ParameterFamily",
    "FixedAlgebra", "cev_differential", "rank1_extension", "direct_sum_abelian", "catalog",
    "catalog_dim4", "catalog_dim5", "catalog_dim6_decomposable", "catalog_dim6_nondecomposable",
    "family", "fixed_row", "M_N63", "NONZERO", "FREE",
]
