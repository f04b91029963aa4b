"""Exact feasibility checks and carrier decoding."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .arm import ArmInstance, format_rat
from .circuit import Circuit, circuit_hash
from .exactq import DimensionError, RatMatrix, exact_rank
from .gadgets import gate_occ
from .witness import PairingError


class Decoded(NamedTuple):
    value: Fraction
    role: str


@dataclass(frozen=True)
class RankReport:
    rank: int
    ok: bool


@dataclass
class Verdict:
    accept: bool
    violations: list[str] = field(default_factory=list)
    rank: int = 0
    decoded: dict[str, Decoded] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "accept": self.accept,
            "violations": list(self.violations),
            "rank": self.rank,
            "decoded": {occ: {"value": format_rat(d.value), "role": d.role} for occ, d in sorted(self.decoded.items())},
        }


def _check_shape(inst: ArmInstance, x: RatMatrix):
    if x.shape != (inst.m, inst.n):
        raise DimensionError(f"matrix is {x.rows}x{x.cols}, instance expects {inst.m}x{inst.n}")


def check_affine(inst: ArmInstance, x: RatMatrix) -> list[str]:
    """Tags of violated constraints, in constraint order."""
    _check_shape(inst, x)
    return [con.tag for con in inst.constraints if not con.holds(x)]


def check_rank(inst: ArmInstance, x: RatMatrix) -> RankReport:
    _check_shape(inst, x)
    r = exact_rank(x)
    return RankReport(r, r <= inst.k)


def decode(inst: ArmInstance, x: RatMatrix) -> dict[str, Decoded]:
    _check_shape(inst, x)
    return {occ: Decoded(x[car.row, car.col], car.role) for occ, car in inst.carriers.items()}


def decode_sources(inst: ArmInstance, x: RatMatrix) -> dict[str, Fraction]:
    """Values of the source variables, read from their input carriers."""
    out = {}
    for occ, car in inst.carriers.items():
        if car.role.startswith("input:"):
            out[car.role[len("input:"):]] = x[car.row, car.col]
    return out


def gate_violations(circuit: Circuit, decoded: dict[str, Decoded]) -> list[str]:
    """Re-check every gate equation on the decoded gate carriers."""
    z = [decoded[gate_occ(g.id)].value for g in circuit.gates]
    bad = []
    for g in circuit.gates:
        if g.kind == "input":
            continue
        if g.kind == "const":
            ok = z[g.id] == g.value
        elif g.kind == "add":
            ok = z[g.id] == z[g.args[0]] + z[g.args[1]]
        elif g.kind == "mul":
            ok = z[g.id] == z[g.args[0]] * z[g.args[1]]
        else:
            ok = z[g.id] == -z[g.args[0]]
        if not ok:
            bad.append(f"gate:g{g.id}:{g.kind}")
    for o in circuit.outputs:
        if z[o] != 0:
            bad.append(f"output:g{o}")
    return bad


def verify(inst: ArmInstance, x: RatMatrix, circuit: Circuit | None = None) -> Verdict:
    """Accept iff constraints hold, rank <= k and (given a circuit) decoded gates are consistent."""
    if circuit is not None and inst.meta.get("circuit_hash") != circuit_hash(circuit):
        raise PairingError("instance/circuit pairing error: circuit hash mismatch")
    violations = [f"affine:{tag}" for tag in check_affine(inst, x)]
    rank = check_rank(inst, x)
    if not rank.ok:
        violations.append(f"rank:{rank.rank}>{inst.k}")
    decoded = decode(inst, x)
    if circuit is not None:
        violations.extend(gate_violations(circuit, decoded))
    else:
        violations.extend(f"output:{o}" for o in inst.outputs if decoded[o].value != 0)
    return Verdict(not violations, violations, rank.rank, decoded)
