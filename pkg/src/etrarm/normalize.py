"""Equality normal form: slack, inverse and selector encodings.

``p >= 0``  becomes  ``p - u^2 = 0``
``p > 0``   becomes  ``p - u^2 = 0`` and ``u*v - 1 = 0``
``p != 0``  becomes  ``p*v - 1 = 0``
A disjunction gets Boolean selectors ``s_j`` with ``sum s_j - 1 = 0`` and
``s_j*(1 - s_j) = 0``; every equality produced inside disjunct ``j`` is
multiplied by ``s_j`` and by the selectors of all enclosing disjuncts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

from .exactq import as_rat, rational_sqrt
from .formula import And, Atom, Formula, Not, Or, evaluate_formula, formula_variables
from .poly import Poly, poly_sum


class WitnessError(Exception):
    """Base class for failures to extend a source assignment."""

    code = "witness-error"


class IrrationalWitness(WitnessError):
    code = "irrational-witness"


class UnsatisfiedAssignment(WitnessError):
    code = "unsatisfied"


class DivisionByZeroWitness(UnsatisfiedAssignment):
    code = "division-by-zero"


@dataclass(frozen=True)
class AtomPlan:
    atom: Atom
    slack: str | None = None
    inverse: str | None = None


@dataclass(frozen=True)
class AndPlan:
    children: tuple


@dataclass(frozen=True)
class OrPlan:
    selectors: tuple[str, ...]
    children: tuple
    disjuncts: tuple[Formula, ...]


Plan = Union[AtomPlan, AndPlan, OrPlan]


@dataclass
class EqualitySystem:
    variables: list[str]
    equalities: list[Poly]
    provenance: list[str]
    source_variables: list[str] = field(default_factory=list)
    plan: Plan | None = None

    def auxiliaries(self) -> list[str]:
        src = set(self.source_variables)
        return [v for v in self.variables if v not in src]

    def is_satisfied_by(self, assignment: Mapping[str, object]) -> bool:
        return all(p.evaluate(assignment) == 0 for p in self.equalities)


class _Builder:
    def __init__(self):
        self.counters = {"slack": 0, "inv": 0, "sel": 0}
        self.aux: list[str] = []
        self.equalities: list[Poly] = []
        self.provenance: list[str] = []
        self.atom_index = 0

    def fresh(self, kind: str) -> str:
        name = f"${kind}_{self.counters[kind]}"
        self.counters[kind] += 1
        self.aux.append(name)
        return name

    def emit(self, poly: Poly, tag: str, guards: tuple[str, ...]):
        for s in reversed(guards):
            poly = Poly.var(s) * poly
        if guards:
            tag = f"guard[{'*'.join(guards)}]:{tag}"
        self.equalities.append(poly)
        self.provenance.append(tag)

    def convert(self, f: Formula, guards: tuple[str, ...]) -> Plan:
        if isinstance(f, Atom):
            idx = self.atom_index
            self.atom_index += 1
            p = f.poly
            if f.rel == "=":
                self.emit(p, f"atom:{idx}", guards)
                return AtomPlan(f)
            if f.rel == ">=":
                u = self.fresh("slack")
                self.emit(p - Poly.var(u) ** 2, f"slack:{idx}", guards)
                return AtomPlan(f, slack=u)
            if f.rel == ">":
                u = self.fresh("slack")
                v = self.fresh("inv")
                self.emit(p - Poly.var(u) ** 2, f"slack:{idx}", guards)
                self.emit(Poly.var(u) * Poly.var(v) - 1, f"strict-inverse:{idx}", guards)
                return AtomPlan(f, slack=u, inverse=v)
            v = self.fresh("inv")
            self.emit(p * Poly.var(v) - 1, f"nonzero-inverse:{idx}", guards)
            return AtomPlan(f, inverse=v)
        if isinstance(f, And):
            return AndPlan(tuple(self.convert(c, guards) for c in f.children))
        if isinstance(f, Or):
            sels = tuple(self.fresh("sel") for _ in f.children)
            self.emit(poly_sum(Poly.var(s) for s in sels) - 1, f"selector-sum:{sels[0]}", guards)
            for s in sels:
                sv = Poly.var(s)
                self.emit(sv * (1 - sv), f"selector-bool:{s}", guards)
            children = tuple(self.convert(c, guards + (s,)) for s, c in zip(sels, f.children))
            return OrPlan(sels, children, f.children)
        if isinstance(f, Not):
            raise ValueError("to_equality_form needs a negation-free formula; run push_negations first")
        raise TypeError(f"not a formula node: {f!r}")


def to_equality_form(f: Formula) -> EqualitySystem:
    b = _Builder()
    plan = b.convert(f, ())
    source = formula_variables(f)
    return EqualitySystem(
        variables=source + b.aux,
        equalities=b.equalities,
        provenance=b.provenance,
        source_variables=source,
        plan=plan,
    )


def _zero_aux(plan: Plan, out: dict[str, Fraction]):
    if isinstance(plan, AtomPlan):
        for name in (plan.slack, plan.inverse):
            if name is not None:
                out[name] = Fraction(0)
    elif isinstance(plan, AndPlan):
        for c in plan.children:
            _zero_aux(c, out)
    else:
        for s in plan.selectors:
            out[s] = Fraction(0)
        for c in plan.children:
            _zero_aux(c, out)


def _extend_active(plan: Plan, env: Mapping[str, Fraction], out: dict[str, Fraction]):
    if isinstance(plan, AtomPlan):
        atom = plan.atom
        if atom.rel == "=":
            # equalities are checked downstream as gate/output violations
            return
        value = atom.poly.evaluate(env)
        if atom.rel == "!=":
            if value == 0:
                raise DivisionByZeroWitness(f"inverse of zero required by '{atom.poly} != 0'")
            out[plan.inverse] = 1 / value
            return
        if value < 0 or (atom.rel == ">" and value == 0):
            raise UnsatisfiedAssignment(f"atom '{atom.poly} {atom.rel} 0' is false (value {value})")
        root = rational_sqrt(value)
        if root is None:
            raise IrrationalWitness(f"slack for '{atom.poly} {atom.rel} 0' needs sqrt({value}), which is irrational")
        out[plan.slack] = root
        if atom.rel == ">":
            out[plan.inverse] = 1 / root
        return
    if isinstance(plan, AndPlan):
        for c in plan.children:
            _extend_active(c, env, out)
        return
    irrational = None
    for j, (child, disjunct) in enumerate(zip(plan.children, plan.disjuncts)):
        if not evaluate_formula(disjunct, env):
            continue
        trial: dict[str, Fraction] = {}
        try:
            _extend_active(child, env, trial)
        except IrrationalWitness as exc:
            irrational = irrational or exc
            continue
        for k, (s, other) in enumerate(zip(plan.selectors, plan.children)):
            out[s] = Fraction(1 if k == j else 0)
            if k != j:
                _zero_aux(other, out)
        out.update(trial)
        return
    if irrational is not None:
        raise irrational
    raise UnsatisfiedAssignment(f"no disjunct satisfied among {len(plan.children)}")


def extend_assignment(system: EqualitySystem, assignment: Mapping[str, object]) -> dict[str, Fraction]:
    """Extend a rational assignment of the source variables to every auxiliary.

    Slacks take rational square roots, inverses take reciprocals, selectors
    pick the first satisfied disjunct that admits a rational extension.
    Auxiliaries of inactive disjuncts are set to 0.
    """
    missing = [v for v in system.source_variables if v not in assignment]
    if missing:
        raise KeyError(f"assignment is missing source variable(s): {', '.join(missing)}")
    env = {v: as_rat(assignment[v]) for v in system.source_variables}
    out: dict[str, Fraction] = dict(env)
    _extend_active(system.plan, env, out)
    return {v: out[v] for v in system.variables}
