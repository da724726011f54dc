"""Recursive-descent parser for structure equations.

Two surfaces share one grammar for coefficients and forms:

* Salamon strings, ``(0,0,12,13)`` or ``(0,0,0,0,mu12*12+mu34*34)``, where
  a bare two-digit integer closing a product is an index pair;
* algebra files with ``dim``, ``orientation``, ``param`` and ``d e<i> =``
  lines, where basis forms are written ``e12``.

Coefficient grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := ['-'|'+'] (number | identifier | 'sqrt(' expr ')' | '(' expr ')')
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

from .forms import Form


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None, line: int | None = None):
        self.position = position
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"col {position}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class UnboundParameterError(ParseError):
    pass


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<basis>e\d+)(?![A-Za-z_0-9])
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/(),=])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    text = text.replace("−", "-")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, params: Mapping[str, float], dim: int | None,
                 salamon: bool):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.params = params
        self.dim = dim
        self.salamon = salamon

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}",
                             self.tok.pos)

    # scalar expressions

    def expr(self) -> float:
        value = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> float:
        value = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            pos = self.tok.pos
            rhs = self.factor()
            if op == "*":
                value *= rhs
            else:
                if rhs == 0.0:
                    raise ParseError("division by zero", pos)
                value /= rhs
        return value

    def factor(self) -> float:
        t = self.tok
        if t.kind == "op" and t.text in "+-":
            self.advance()
            v = self.factor()
            return -v if t.text == "-" else v
        if t.kind == "number":
            self.advance()
            return float(t.text)
        if t.kind == "ident":
            self.advance()
            if t.text == "sqrt":
                self.expect("(")
                pos = self.tok.pos
                v = self.expr()
                self.expect(")")
                if v < 0:
                    raise ParseError("sqrt of a negative number", pos)
                return math.sqrt(v)
            if t.text not in self.params:
                raise UnboundParameterError(f"unbound parameter {t.text!r}", t.pos)
            return float(self.params[t.text])
        if t.kind == "op" and t.text == "(":
            self.advance()
            v = self.expr()
            self.expect(")")
            return v
        raise ParseError(f"unexpected token {t.text or 'end of input'!r}", t.pos)

    # forms

    def _basis_form(self, t: Token) -> Form:
        digits = t.text[1:] if t.kind == "basis" else t.text
        idx = [int(ch) for ch in digits]
        if self.dim is not None and any(i < 1 or i > self.dim for i in idx):
            raise ParseError(f"index {digits} out of range for dim {self.dim}", t.pos)
        if len(set(idx)) != len(idx):
            return Form.zero(self.dim, len(idx))
        return Form.basis(self.dim, *idx)

    def _is_pair(self, t: Token) -> bool:
        return (self.salamon and t.kind == "number" and t.text.isdigit()
                and len(t.text) == 2)

    def form_term(self) -> Form:
        """[coefficient '*'] basis, with an optional leading sign."""
        sign = 1.0
        while self.tok.kind == "op" and self.tok.text in "+-":
            if self.advance().text == "-":
                sign = -sign
        coeff = 1.0
        while True:
            t = self.tok
            if t.kind == "basis" or self._is_pair(t):
                nxt = self.tokens[self.i + 1]
                if not (nxt.kind == "op" and nxt.text in "*/"):
                    self.advance()
                    return sign * coeff * self._basis_form(t)
            coeff *= self.factor_for_form()
            if not self.accept("*"):
                if self.accept("/"):
                    pos = self.tok.pos
                    d = self.factor()
                    if d == 0.0:
                        raise ParseError("division by zero", pos)
                    coeff /= d
                    self.expect("*")
                else:
                    raise ParseError("expected '*' followed by a basis form", self.tok.pos)

    def factor_for_form(self) -> float:
        # a plain number here is a coefficient; two-digit pairs handled by caller
        return self.factor()

    def form_expr(self, degree: int = 2) -> Form:
        t = self.tok
        if t.kind == "number" and t.text == "0":
            nxt = self.tokens[self.i + 1]
            if nxt.kind in ("end",) or (nxt.kind == "op" and nxt.text in ",)"):
                self.advance()
                return Form.zero(self.dim, degree)
        total = self.form_term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            term = self.form_term()
            total = total + term if op == "+" else total - term
        return total


def parse_expr(text: str, params: Mapping[str, float] | None = None) -> float:
    p = _Parser(text, params or {}, None, salamon=False)
    v = p.expr()
    if p.tok.kind != "end":
        raise ParseError(f"trailing input {p.tok.text!r}", p.tok.pos)
    return v


def parse_form(text: str, dim: int, params: Mapping[str, float] | None = None,
               salamon: bool = False) -> Form:
    p = _Parser(text, params or {}, dim, salamon=salamon)
    f = p.form_expr()
    if p.tok.kind != "end":
        raise ParseError(f"trailing input {p.tok.text!r}", p.tok.pos)
    return f


def split_salamon(text: str) -> list[tuple[str, int]]:
    """Top-level comma split of ``(a,b,...)``; returns (entry, offset) pairs."""
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    if not s.startswith("("):
        raise ParseError("Salamon string must start with '('", lead)
    depth = 0
    entries = []
    start = 1
    for k, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                if s[k + 1:].strip():
                    raise ParseError("trailing input after ')'", lead + k + 1)
                entries.append((s[start:k], lead + start))
                return entries
            if depth < 0:
                raise ParseError("unbalanced ')'", lead + k)
        elif ch == "," and depth == 1:
            entries.append((s[start:k], lead + start))
            start = k + 1
    raise ParseError("missing closing ')'", lead + len(s))


def parse_salamon_differentials(text: str, params: Mapping[str, float] | None = None
                                ) -> list[Form]:
    entries = split_salamon(text)
    dim = len(entries)
    if dim > 9:
        raise ParseError("Salamon strings with two-digit index pairs need dim <= 9")
    out = []
    for entry, offset in entries:
        if not entry.strip():
            raise ParseError("empty entry", offset)
        try:
            out.append(parse_form(entry, dim, params, salamon=True))
        except ParseError as exc:
            pos = None if exc.position is None else offset + exc.position
            raise type(exc)(str(exc).rsplit(" (", 1)[0], pos) from None
    return out


_D_LINE = re.compile(r"^d\s*e(\d+)\s*=\s*(.*)$")


@dataclass
class AlgebraSpec:
    dim: int
    orientation: int
    params: dict[str, float]
    differentials: list[Form]


def parse_algebra_file(text: str, params: Mapping[str, float] | None = None) -> AlgebraSpec:
    """Parse the line-based algebra format.

    Extra ``params`` override or supply values not set in the file.
    """
    dim = None
    orientation = 1
    bound: dict[str, float] = {}
    dlines: list[tuple[int, str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("dim"):
                dim = int(line[3:].strip())
            elif line.startswith("orientation"):
                value = line[len("orientation"):].strip()
                if value not in ("+1", "1", "-1"):
                    raise ParseError(f"orientation must be +1 or -1, got {value!r}", None)
                orientation = -1 if value == "-1" else 1
            elif line.startswith("param"):
                name, _, expr = line[len("param"):].partition("=")
                name = name.strip()
                if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name) or not expr.strip():
                    raise ParseError("malformed param line", None)
                bound[name] = parse_expr(expr, {**bound, **(params or {})})
            else:
                m = _D_LINE.match(line)
                if m is None:
                    raise ParseError(f"unrecognised line {line!r}", None)
                dlines.append((int(m.group(1)), m.group(2), lineno))
        except ParseError as exc:
            raise type(exc)(str(exc).rsplit(" (", 1)[0], exc.position, lineno) from None
        except ValueError as exc:
            raise ParseError(str(exc), None, lineno) from None
    if dim is None:
        raise ParseError("missing 'dim' line")
    bound.update(params or {})
    diffs = [Form.zero(dim, 2) for _ in range(dim)]
    for i, body, lineno in dlines:
        if not 1 <= i <= dim:
            raise ParseError(f"d e{i} out of range for dim {dim}", None, lineno)
        try:
            f = parse_form(body, dim, bound)
        except ParseError as exc:
            raise type(exc)(str(exc).rsplit(" (", 1)[0], exc.position, lineno) from None
        if f.degree != 2 and f.terms:
            raise ParseError(f"d e{i} must be a 2-form", None, lineno)
        diffs[i - 1] = diffs[i - 1] + f
    return AlgebraSpec(dim, orientation, bound, diffs)
