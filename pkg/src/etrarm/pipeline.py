"""End-to-end helpers: formula text -> instance -> witness -> verdict."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .arm import ArmInstance
from .circuit import Circuit, lower_system
from .formula import Formula, parse_formula, push_negations
from .gadgets import Allocator, compile_circuit
from .normalize import EqualitySystem, to_equality_form
from .verifier import Verdict, verify
from .witness import Witness, build_witness, full_assignment


@dataclass
class Compiled:
    source: str
    formula: Formula
    system: EqualitySystem
    circuit: Circuit
    instance: ArmInstance


def compile_formula(text: str, alloc: Allocator | None = None) -> Compiled:
    formula = parse_formula(text)
    system = to_equality_form(push_negations(formula))
    circuit = lower_system(system)
    instance = compile_circuit(circuit, source=text, alloc=alloc)
    return Compiled(text, formula, system, circuit, instance)


def witness_for(compiled: Compiled, assignment: Mapping[str, object]) -> Witness:
    full = full_assignment(compiled.system, compiled.circuit, assignment)
    return build_witness(compiled.instance, compiled.circuit, full)


def round_trip(text: str, assignment: Mapping[str, object]) -> tuple[Compiled, Witness, Verdict]:
    compiled = compile_formula(text)
    w = witness_for(compiled, assignment)
    return compiled, w, verify(compiled.instance, w.X, compiled.circuit)
