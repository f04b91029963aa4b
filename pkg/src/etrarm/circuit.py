"""Arithmetic circuits in gate-equality normal form."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exactq import as_rat
from .normalize import EqualitySystem
from .poly import Monomial, Poly

GATE_KINDS = ("input", "const", "add", "mul", "neg")
_ARITY = {"add": 2, "mul": 2, "neg": 1}


@dataclass(frozen=True)
class Gate:
    id: int
    kind: str
    args: tuple = ()
    name: str | None = None
    value: Fraction | None = None

    def __str__(self):
        if self.kind == "input":
            body = self.name
        elif self.kind == "const":
            v = self.value
            body = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        else:
            body = ", ".join(f"g{a}" for a in self.args)
        return f"g{self.id} = {self.kind}({body})"


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    input_vars: tuple[str, ...]

    def __post_init__(self):
        inputs = []
        for pos, g in enumerate(self.gates):
            if g.id != pos:
                raise CircuitError(f"gate at position {pos} has id {g.id}")
            if g.kind not in GATE_KINDS:
                raise CircuitError(f"g{g.id}: unknown kind {g.kind!r}")
            if g.kind in _ARITY:
                if len(g.args) != _ARITY[g.kind]:
                    raise CircuitError(f"g{g.id}: {g.kind} takes {_ARITY[g.kind]} operands")
                if any(not (0 <= a < g.id) for a in g.args):
                    raise CircuitError(f"g{g.id}: operands must precede the gate")
            if g.kind == "input":
                inputs.append(g.name)
        if sorted(inputs) != sorted(self.input_vars) or len(set(inputs)) != len(inputs):
            raise CircuitError("input_vars must match the input gates one-to-one")
        for o in self.outputs:
            if not 0 <= o < len(self.gates):
                raise CircuitError(f"output g{o} is not a gate")

    def __len__(self):
        return len(self.gates)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)


class CircuitBuilder:
    def __init__(self):
        self.gates: list[Gate] = []
        self.inputs: dict[str, int] = {}

    def _add(self, kind, args=(), name=None, value=None) -> int:
        gid = len(self.gates)
        self.gates.append(Gate(gid, kind, tuple(args), name, value))
        return gid

    def input(self, name: str) -> int:
        if name not in self.inputs:
            self.inputs[name] = self._add("input", name=name)
        return self.inputs[name]

    def const(self, c) -> int:
        return self._add("const", value=as_rat(c))

    def add(self, a: int, b: int) -> int:
        return self._add("add", (a, b))

    def mul(self, a: int, b: int) -> int:
        return self._add("mul", (a, b))

    def neg(self, a: int) -> int:
        return self._add("neg", (a,))

    def build(self, outputs) -> Circuit:
        return Circuit(tuple(self.gates), tuple(outputs), tuple(self.inputs))


def _power(b: CircuitBuilder, var: str, exp: int, cache: dict[tuple[str, int], int]) -> int:
    """Square-and-multiply, sharing powers already built for this equality."""
    key = (var, exp)
    if key in cache:
        return cache[key]
    if exp == 1:
        gid = b.input(var)
    elif exp % 2 == 0:
        half = _power(b, var, exp // 2, cache)
        gid = b.mul(half, half)
    else:
        rest = _power(b, var, exp - 1, cache)
        gid = b.mul(rest, b.input(var))
    cache[key] = gid
    return gid


def _monomial(b: CircuitBuilder, mono: Monomial, cache) -> int:
    acc = None
    for var, exp in mono:
        g = _power(b, var, exp, cache)
        acc = g if acc is None else b.mul(acc, g)
    return acc


def lower_poly(b: CircuitBuilder, p: Poly) -> int:
    """Emit gates computing ``p``; returns the gate holding its value."""
    if p.is_zero():
        return b.const(0)
    cache: dict[tuple[str, int], int] = {}
    acc = None
    for mono in p.monomials():
        c = p.terms[mono]
        if not mono:
            g = b.const(c)
        else:
            body = _monomial(b, mono, cache)
            if c == 1:
                g = body
            elif c == -1:
                g = b.neg(body)
            else:
                g = b.mul(b.const(c), body)
        acc = g if acc is None else b.add(acc, g)
    return acc


def lower_system(system: EqualitySystem) -> Circuit:
    b = CircuitBuilder()
    for v in system.variables:
        b.input(v)
    outputs = [lower_poly(b, p) for p in system.equalities]
    return b.build(outputs)


def lower_polys(polys, variables=()) -> Circuit:
    b = CircuitBuilder()
    for v in variables:
        b.input(v)
    outputs = [lower_poly(b, p) for p in polys]
    return b.build(outputs)


class MissingVariable(KeyError):
    pass


@dataclass(frozen=True)
class Evaluation:
    gates: tuple[Fraction, ...]
    outputs: tuple[Fraction, ...]


def evaluate_circuit(c: Circuit, assignment: Mapping[str, object]) -> Evaluation:
    vals: list[Fraction] = []
    for g in c.gates:
        if g.kind == "input":
            if g.name not in assignment:
                raise MissingVariable(f"no value for input variable {g.name!r}")
            v = as_rat(assignment[g.name])
        elif g.kind == "const":
            v = g.value
        elif g.kind == "add":
            v = vals[g.args[0]] + vals[g.args[1]]
        elif g.kind == "mul":
            v = vals[g.args[0]] * vals[g.args[1]]
        else:
            v = -vals[g.args[0]]
        vals.append(v)
    return Evaluation(tuple(vals), tuple(vals[o] for o in c.outputs))


def gate_var(gid: int) -> str:
    # brackets keep gate variables disjoint from source identifiers
    return f"z[{gid}]"


def gate_equations(c: Circuit) -> list[tuple[str, Poly]]:
    """``GateEq`` plus one ``z_out = 0`` per output, each as ``(label, poly)``."""
    out = []
    for g in c.gates:
        z = Poly.var(gate_var(g.id))
        if g.kind == "input":
            eq = z - Poly.var(g.name)
        elif g.kind == "const":
            eq = z - g.value
        elif g.kind == "add":
            eq = z - Poly.var(gate_var(g.args[0])) - Poly.var(gate_var(g.args[1]))
        elif g.kind == "mul":
            eq = z - Poly.var(gate_var(g.args[0])) * Poly.var(gate_var(g.args[1]))
        else:
            eq = z + Poly.var(gate_var(g.args[0]))
        out.append((f"g{g.id}", eq))
    for o in c.outputs:
        out.append((f"out:g{o}", Poly.var(gate_var(o))))
    return out


def dump_circuit(c: Circuit) -> str:
    lines = [str(g) for g in c.gates]
    lines.append("outputs = [" + ", ".join(f"g{o}" for o in c.outputs) + "]")
    return "\n".join(lines) + "\n"


def circuit_hash(c: Circuit) -> str:
    return hashlib.sha256(dump_circuit(c).encode("utf-8")).hexdigest()
