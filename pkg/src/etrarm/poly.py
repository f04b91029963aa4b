"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .exactq import as_rat

# A monomial is a sorted tuple of (variable, exponent) pairs with exponent >= 1.
Monomial = tuple[tuple[str, int], ...]

ONE: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for v, e in b:
        powers[v] = powers.get(v, 0) + e
    return tuple(sorted(powers.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def term_order_key(m: Monomial):
    """Graded order: higher total degree first, then lexicographic; constant last."""
    return (-mono_degree(m), m)


class Poly:
    """Immutable polynomial ``{monomial: coefficient}`` with no zero terms."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            mono = tuple(sorted((v, e) for v, e in mono if e))
            c = as_rat(c)
            if c:
                clean[mono] = clean.get(mono, Fraction(0)) + c
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean
        self._hash = None

    @classmethod
    def const(cls, c) -> "Poly":
        return cls({ONE: c})

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls({((name, 1),): 1})

    def is_zero(self) -> bool:
        return not self.terms

    def variables(self) -> list[str]:
        """Variables in order of first appearance under the term order."""
        seen: dict[str, None] = {}
        for mono in self.monomials():
            for v, _ in mono:
                seen.setdefault(v)
        return list(seen)

    def monomials(self) -> list[Monomial]:
        return sorted(self.terms, key=term_order_key)

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def __add__(self, other) -> "Poly":
        other = _lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "Poly":
        return _lift(other) - self

    def __mul__(self, other) -> "Poly":
        other = _lift(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        result = Poly.const(1)
        for _ in range(k):
            result = result * self
        return result

    def scale(self, c) -> "Poly":
        c = as_rat(c)
        return Poly({m: c * v for m, v in self.terms.items()})

    def evaluate(self, assignment: Mapping[str, object]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms.items():
            val = c
            for v, e in mono:
                try:
                    x = assignment[v]
                except KeyError:
                    raise KeyError(f"no value for variable {v!r}") from None
                val *= as_rat(x) ** e
            total += val
        return total

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


def _lift(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(x)


def poly_sum(items: Iterable[Poly]) -> Poly:
    out: dict[Monomial, Fraction] = {}
    for p in items:
        for m, c in p.terms.items():
            out[m] = out.get(m, 0) + c
    return Poly(out)


def _format_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def format_poly(p: Poly) -> str:
    """Render in the formula grammar, e.g. ``x*y - 6`` or ``1/2*x^2 + 3``."""
    if p.is_zero():
        return "0"
    parts = []
    for i, mono in enumerate(p.monomials()):
        c = p.terms[mono]
        mag = abs(c)
        body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
        if not body:
            text = _format_coeff(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{_format_coeff(mag)}*{body}"
        if i == 0:
            parts.append(f"-{text}" if c < 0 else text)
        else:
            parts.append(f"- {text}" if c < 0 else f"+ {text}")
    return " ".join(parts)
