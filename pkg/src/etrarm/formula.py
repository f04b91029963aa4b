"""Quantifier-free ETR formulas: AST, text grammar, evaluation, negation pushing.

Grammar (whitespace-insensitive)::

    formula := disj
    disj    := conj ("\\/" conj)*
    conj    := unit ("/\\" unit)*
    unit    := "!" unit | "(" formula ")" | atom
    atom    := poly rel "0"          rel := "=" | "!=" | ">=" | ">"
    poly    := ["+"|"-"] term (("+"|"-") term)*
    term    := (coeff | power) ("*" power)*
    power   := ident ("^" natural)?
    coeff   := integer ("/" positive-integer)?

The right-hand side of an atom must be the literal ``0``; ``p rel q`` is rejected.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .poly import Poly, format_poly

RELATIONS = ("=", "!=", ">=", ">")


@dataclass(frozen=True)
class Atom:
    poly: Poly
    rel: str

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]


@dataclass(frozen=True)
class Not:
    child: "Formula"


Formula = Union[Atom, And, Or, Not]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<or>\\/)
  | (?P<and>/\\)
  | (?P<rel>!=|>=|>|=)
  | (?P<op>[!()+\-*^/])
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "ws":
            chunk = m.group()
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = pos + chunk.rfind("\n") + 1
        else:
            tok_kind = kind if kind in ("or", "and", "rel", "int", "ident") else m.group()
            tokens.append(_Token(tok_kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.toks[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        raise FormulaSyntaxError(f"{message} (found {found!r})", tok.line, tok.col)

    def take(self, kind: str) -> _Token:
        if self.tok.kind != kind:
            self.error(f"expected {kind!r}")
        tok = self.tok
        self.i += 1
        return tok

    def formula(self) -> Formula:
        parts = [self.conj()]
        while self.tok.kind == "or":
            self.i += 1
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unit()]
        while self.tok.kind == "and":
            self.i += 1
            parts.append(self.unit())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unit(self) -> Formula:
        if self.tok.kind == "!":
            self.i += 1
            return Not(self.unit())
        if self.tok.kind == "(":
            self.i += 1
            inner = self.formula()
            self.take(")")
            return inner
        return self.atom()

    def atom(self) -> Atom:
        poly = self.poly()
        if self.tok.kind != "rel":
            self.error("expected relation")
        rel = self.take("rel").text
        rhs = self.tok
        if rhs.kind != "int" or int(rhs.text) != 0:
            self.error("right-hand side of an atom must be 0")
        self.i += 1
        return Atom(poly, rel)

    def poly(self) -> Poly:
        sign = 1
        if self.tok.kind in ("+", "-"):
            sign = -1 if self.tok.kind == "-" else 1
            self.i += 1
        total = self.term().scale(sign)
        while self.tok.kind in ("+", "-"):
            sign = -1 if self.tok.kind == "-" else 1
            self.i += 1
            total = total + self.term().scale(sign)
        return total

    def term(self) -> Poly:
        if self.tok.kind == "int":
            num = int(self.take("int").text)
            coeff = Fraction(num)
            if self.tok.kind == "/":
                self.i += 1
                den_tok = self.tok
                den = int(self.take("int").text)
                if den == 0:
                    self.error("zero denominator", den_tok)
                coeff = Fraction(num, den)
            result = Poly.const(coeff)
            if self.tok.kind != "*":
                return result
            self.i += 1
        elif self.tok.kind == "ident":
            result = Poly.const(1)
        else:
            self.error("expected a term")
        result = result * self.power()
        while self.tok.kind == "*":
            self.i += 1
            result = result * self.power()
        return result

    def power(self) -> Poly:
        name = self.take("ident").text
        exp = 1
        if self.tok.kind == "^":
            self.i += 1
            exp = int(self.take("int").text)
        return Poly({((name, exp),): 1}) if exp else Poly.const(1)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.tok.kind != "eof":
        p.error("trailing input")
    return f


def format_formula(f: Formula) -> str:
    """Inverse of :func:`parse_formula` on parser output."""
    if isinstance(f, Atom):
        return f"{format_poly(f.poly)} {f.rel} 0"
    if isinstance(f, Not):
        inner = format_formula(f.child)
        return f"!({inner})" if isinstance(f.child, (And, Or)) else f"!{inner}"
    if isinstance(f, And):
        return " /\\ ".join(
            f"({format_formula(c)})" if isinstance(c, (And, Or)) else format_formula(c)
            for c in f.children
        )
    if isinstance(f, Or):
        return " \\/ ".join(
            f"({format_formula(c)})" if isinstance(c, Or) else format_formula(c)
            for c in f.children
        )
    raise TypeError(f"not a formula node: {f!r}")


def _holds(value: Fraction, rel: str) -> bool:
    if rel == "=":
        return value == 0
    if rel == "!=":
        return value != 0
    if rel == ">=":
        return value >= 0
    return value > 0


def evaluate_formula(f: Formula, assignment: Mapping[str, object]) -> bool:
    if isinstance(f, Atom):
        return _holds(f.poly.evaluate(assignment), f.rel)
    if isinstance(f, Not):
        return not evaluate_formula(f.child, assignment)
    if isinstance(f, And):
        return all(evaluate_formula(c, assignment) for c in f.children)
    if isinstance(f, Or):
        return any(evaluate_formula(c, assignment) for c in f.children)
    raise TypeError(f"not a formula node: {f!r}")


def negate_atom(a: Atom) -> Atom:
    if a.rel == "=":
        return Atom(a.poly, "!=")
    if a.rel == "!=":
        return Atom(a.poly, "=")
    if a.rel == ">=":
        return Atom(-a.poly, ">")
    return Atom(-a.poly, ">=")


def push_negations(f: Formula, negate: bool = False) -> Formula:
    """Equivalent formula without ``Not`` nodes."""
    if isinstance(f, Atom):
        return negate_atom(f) if negate else f
    if isinstance(f, Not):
        return push_negations(f.child, not negate)
    children = tuple(push_negations(c, negate) for c in f.children)
    if isinstance(f, And):
        return Or(children) if negate else And(children)
    return And(children) if negate else Or(children)


def iter_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atom):
        yield f
    elif isinstance(f, Not):
        yield from iter_atoms(f.child)
    else:
        for c in f.children:
            yield from iter_atoms(c)


def formula_variables(f: Formula) -> list[str]:
    seen: dict[str, None] = {}
    for a in iter_atoms(f):
        for v in a.poly.variables():
            seen.setdefault(v)
    return list(seen)


def count_nots(f: Formula) -> int:
    if isinstance(f, Atom):
        return 0
    if isinstance(f, Not):
        return 1 + count_nots(f.child)
    return sum(count_nots(c) for c in f.children)
