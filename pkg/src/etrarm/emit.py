"""Encode an ARM(k) instance back into an equality-only ETR sentence.

Two formulations:

* factored: variables ``U_i_t``, ``V_t_j``; each constraint becomes
  ``sum_ij A_ij * sum_t U_i_t * V_t_j - b = 0``;
* minors: variables ``X_i_j``; the affine constraints plus one Leibniz
  expansion per ``(k+1) x (k+1)`` minor.

Denominators are cleared by the lcm of each equality's denominators.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import comb, lcm

from .arm import AffineConstraint, ArmInstance
from .exactq import signed_permutations
from .poly import Poly

DEFAULT_MINOR_CAP = 10**6


class TooLarge(ValueError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"too-large: {count} minor equalities exceed the cap of {cap}")
        self.count = count
        self.cap = cap


def u_var(i: int, t: int) -> str:
    return f"U_{i}_{t}"


def v_var(t: int, j: int) -> str:
    return f"V_{t}_{j}"


def x_var(i: int, j: int) -> str:
    return f"X_{i}_{j}"


def clear_denominators(p: Poly) -> Poly:
    d = lcm(*(c.denominator for c in p.terms.values())) if p.terms else 1
    return p.scale(d)


def _affine_poly(con: AffineConstraint, entry) -> Poly:
    terms: dict = {}
    for i, j, c in con.terms:
        for mono, coeff in entry(i, j).terms.items():
            terms[mono] = terms.get(mono, Fraction(0)) + c * coeff
    if con.rhs:
        terms[()] = terms.get((), Fraction(0)) - con.rhs
    return clear_denominators(Poly(terms))


def factored_equalities(inst: ArmInstance) -> list[Poly]:
    k = inst.k

    def entry(i, j):
        return Poly({((u_var(i, t), 1), (v_var(t, j), 1)): 1 for t in range(k)})

    return [_affine_poly(con, entry) for con in inst.constraints]


def factored_variables(inst: ArmInstance) -> list[str]:
    return ([u_var(i, t) for i in range(inst.m) for t in range(inst.k)]
            + [v_var(t, j) for t in range(inst.k) for j in range(inst.n)])


def minor_count(inst: ArmInstance) -> int:
    return comb(inst.m, inst.k + 1) * comb(inst.n, inst.k + 1)


def minor_poly(rows, cols) -> Poly:
    """Leibniz expansion of det(X[rows, cols]) in the ``X_i_j`` variables."""
    terms = {}
    for sign, perm in signed_permutations(len(rows)):
        mono = tuple(sorted((x_var(rows[t], cols[p]), 1) for t, p in enumerate(perm)))
        terms[mono] = sign
    return Poly(terms)


def minor_equalities(inst: ArmInstance, cap: int = DEFAULT_MINOR_CAP) -> list[Poly]:
    count = minor_count(inst)
    if count > cap:
        raise TooLarge(count, cap)

    def entry(i, j):
        return Poly.var(x_var(i, j))

    out = [_affine_poly(con, entry) for con in inst.constraints]
    size = inst.k + 1
    for rows in combinations(range(inst.m), size):
        for cols in combinations(range(inst.n), size):
            out.append(minor_poly(rows, cols))
    return out


def _render(polys: list[Poly]) -> str:
    if not polys:
        return "0 = 0\n"
    return " /\\\n".join(f"{p} = 0" for p in polys) + "\n"


def emit_factored(inst: ArmInstance) -> str:
    return _render(factored_equalities(inst))


def emit_minors(inst: ArmInstance, cap: int = DEFAULT_MINOR_CAP) -> str:
    return _render(minor_equalities(inst, cap))


def factor_assignment(U, V) -> dict[str, Fraction]:
    """Values of ``U_i_t`` and ``V_t_j`` for substituting a witness."""
    out = {}
    for i in range(U.rows):
        for t in range(U.cols):
            out[u_var(i, t)] = U[i, t]
    for t in range(V.rows):
        for j in range(V.cols):
            out[v_var(t, j)] = V[t, j]
    return out


def matrix_assignment(X) -> dict[str, Fraction]:
    return {x_var(i, j): X[i, j] for i in range(X.rows) for j in range(X.cols)}
