"""Canonical-gauge rank-3 witnesses for compiled instances.

Gauge rows of ``U`` are ``I3`` and gauge columns of ``V`` are the gauge block.
A carrier holding ``t`` gets ``U[r] = (0, 0, t)`` and ``V[:, c] = (0, 0, 1)``.
A multiplication gadget with operands ``a, b`` gets ``U[r1] = (0, 0, 1)``,
``U[r2] = (0, 0, b)``, ``V[:, c1] = (0, 0, 1)`` and ``V[:, c2] = (0, 0, a)``.
Untouched rows and columns stay zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .arm import WITNESS_FORMAT, ArmInstance, SchemaError, format_rat, parse_rat
from .circuit import Circuit, circuit_hash, evaluate_circuit
from .exactq import RatMatrix, as_rat, mat_mul
from .gadgets import mul_gadgets
from .normalize import EqualitySystem, WitnessError, extend_assignment


class GateViolation(WitnessError):
    code = "gate-violation"


class CompilerBug(AssertionError):
    """A witness built from a valid assignment failed an instance constraint."""


class PairingError(ValueError):
    pass


@dataclass(frozen=True)
class FullAssignment:
    values: dict[str, Fraction]
    gates: tuple[Fraction, ...]


@dataclass(frozen=True)
class Witness:
    U: RatMatrix
    V: RatMatrix
    X: RatMatrix


def full_assignment(system: EqualitySystem, circuit: Circuit, assignment: Mapping[str, object]) -> FullAssignment:
    """Extend source values to all auxiliaries, then evaluate every gate."""
    values = extend_assignment(system, assignment)
    return FullAssignment(values, evaluate_circuit(circuit, values).gates)


def check_gates(circuit: Circuit, full: FullAssignment) -> None:
    z = full.gates
    if len(z) != len(circuit.gates):
        raise GateViolation(f"expected {len(circuit.gates)} gate values, got {len(z)}")
    for g in circuit.gates:
        v = z[g.id]
        if g.kind == "input":
            ok = g.name in full.values and v == full.values[g.name]
            expect = f"{g.name}"
        elif g.kind == "const":
            ok = v == g.value
            expect = f"{g.value}"
        elif g.kind == "add":
            ok = v == z[g.args[0]] + z[g.args[1]]
            expect = f"g{g.args[0]} + g{g.args[1]}"
        elif g.kind == "mul":
            ok = v == z[g.args[0]] * z[g.args[1]]
            expect = f"g{g.args[0]} * g{g.args[1]}"
        else:
            ok = v == -z[g.args[0]]
            expect = f"-g{g.args[0]}"
        if not ok:
            raise GateViolation(f"gate equation g{g.id} = {expect} violated (g{g.id} = {v})")
    for o in circuit.outputs:
        if z[o] != 0:
            raise GateViolation(f"output g{o} must be 0, evaluates to {z[o]}")


def _occurrence_gate(occ: str) -> int | None:
    # "g12" or a fan-out copy "g12.u1"
    if not occ.startswith("g"):
        return None
    head = occ[1:].split(".", 1)[0]
    return int(head) if head.isdigit() else None


def build_witness(inst: ArmInstance, circuit: Circuit, full: FullAssignment) -> Witness:
    if inst.meta.get("circuit_hash") not in (None, circuit_hash(circuit)):
        raise PairingError("instance/circuit pairing error: circuit hash mismatch")
    check_gates(circuit, full)
    z = full.gates
    u: dict[tuple[int, int], Fraction] = {}
    v: dict[tuple[int, int], Fraction] = {}
    for a, r in enumerate(inst.gauge_rows):
        u[(r, a)] = Fraction(1)
    for b, c in enumerate(inst.gauge_cols):
        for t in range(3):
            v[(t, c)] = inst.gauge_block[t, b]
    for occ, car in inst.carriers.items():
        gid = _occurrence_gate(occ)
        if gid is None:
            continue
        u[(car.row, 2)] = z[gid]
        v[(2, car.col)] = Fraction(1)
    for g in mul_gadgets(inst):
        gid = _occurrence_gate(g.gate.split(":", 1)[1])
        x_id, y_id = circuit.gates[gid].args
        a, b = z[x_id], z[y_id]
        u[(g.r1, 2)] = Fraction(1)
        u[(g.r2, 2)] = b
        v[(2, g.c1)] = Fraction(1)
        v[(2, g.c2)] = a
    U = RatMatrix(inst.m, 3, u)
    V = RatMatrix(3, inst.n, v)
    X = mat_mul(U, V)
    for con in inst.constraints:
        if not con.holds(X):
            raise CompilerBug(f"constructed witness violates constraint {con.tag!r}")
    return Witness(U, V, X)


def witness_for_gadget_values(inst: ArmInstance, carrier_values: Mapping[str, object],
                              mul_values: Mapping[str, tuple[object, object]]) -> Witness:
    """Canonical witness from raw carrier values and per-gadget ``(a, b)`` pairs.

    For hand-built instances that were not compiled from a circuit.
    """
    u: dict[tuple[int, int], Fraction] = {}
    v: dict[tuple[int, int], Fraction] = {}
    for a, r in enumerate(inst.gauge_rows):
        u[(r, a)] = Fraction(1)
    for b, c in enumerate(inst.gauge_cols):
        for t in range(3):
            v[(t, c)] = inst.gauge_block[t, b]
    for occ, val in carrier_values.items():
        car = inst.carriers[occ]
        u[(car.row, 2)] = as_rat(val)
        v[(2, car.col)] = Fraction(1)
    for g in mul_gadgets(inst):
        a, b = (as_rat(x) for x in mul_values[g.gate])
        u[(g.r1, 2)] = Fraction(1)
        u[(g.r2, 2)] = b
        v[(2, g.c1)] = Fraction(1)
        v[(2, g.c2)] = a
    U = RatMatrix(inst.m, 3, u)
    V = RatMatrix(3, inst.n, v)
    return Witness(U, V, mat_mul(U, V))


def witness_to_json(w: Witness, include_x: bool = False) -> dict:
    doc = {
        "format": WITNESS_FORMAT,
        "U": [[format_rat(x) for x in row] for row in w.U.to_dense()],
        "V": [[format_rat(x) for x in row] for row in w.V.to_dense()],
    }
    if include_x:
        doc["X"] = [[format_rat(x) for x in row] for row in w.X.to_dense()]
    return doc


def serialize_witness(w: Witness, include_x: bool = False) -> bytes:
    return (json.dumps(witness_to_json(w, include_x), sort_keys=True) + "\n").encode("utf-8")


def _matrix(doc, key: str) -> RatMatrix:
    rows = doc.get(key)
    if not isinstance(rows, list) or not rows or any(not isinstance(r, list) for r in rows):
        raise SchemaError(f"$.{key}", "expected a non-empty array of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaError(f"$.{key}", "ragged rows")
    return RatMatrix.from_rows([[parse_rat(x, f"$.{key}[{i}][{j}]") for j, x in enumerate(r)]
                                for i, r in enumerate(rows)])


def deserialize_witness(data: bytes | str) -> Witness:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != WITNESS_FORMAT:
        raise SchemaError("$.format", f"expected {WITNESS_FORMAT!r}")
    U = _matrix(doc, "U")
    V = _matrix(doc, "V")
    if U.cols != V.rows:
        raise SchemaError("$", f"U is {U.rows}x{U.cols} but V is {V.rows}x{V.cols}")
    X = mat_mul(U, V)
    if "X" in doc and _matrix(doc, "X") != X:
        raise SchemaError("$.X", "X does not equal U*V")
    return Witness(U, V, X)

