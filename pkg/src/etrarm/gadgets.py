"""Compile arithmetic circuits into ARM(3) instances.

Layout: rows/cols 0..2 hold the gauge block ``I3``.  Every scalar occurrence
gets a carrier on a fresh row and a fresh column.  A multiplication ``z = x*y``
allocates two more rows ``r1, r2`` and columns ``c1, c2`` with::

    X[r1,c1] = 1          X[r1,c2] = x      X[r2,c1] = y      X[r2,c2] = z
    X[{r1,r2}, J0[:2]] = 0                  X[I0[:2], {c1,c2}] = 0

so the submatrix on rows ``I0[:2] + [r1, r2]`` and columns ``J0[:2] + [c1, c2]``
is ``diag(I2, [[1, x], [y, z]])`` whose determinant is ``z - x*y``.  The third
gauge row and column are deliberately left unpinned against the gadget; pinning
them too would force the gadget block to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .arm import ArmInstance, Carrier, InstanceError
from .circuit import Circuit, circuit_hash

MUL_ROLES = ("one", "a", "b", "c")


@dataclass
class Allocator:
    next_row: int = 3
    next_col: int = 3
    ledger: dict[str, tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=dict)

    def take(self, owner: str, nrows: int, ncols: int, inst: ArmInstance):
        if owner in self.ledger:
            raise InstanceError(f"duplicate allocation for {owner!r}")
        rows = tuple(range(self.next_row, self.next_row + nrows))
        cols = tuple(range(self.next_col, self.next_col + ncols))
        self.next_row += nrows
        self.next_col += ncols
        inst.m = max(inst.m, self.next_row)
        inst.n = max(inst.n, self.next_col)
        self.ledger[owner] = (rows, cols)
        return rows, cols


@dataclass(frozen=True)
class MulGadget:
    gate: str
    r1: int
    r2: int
    c1: int
    c2: int

    @property
    def a(self):
        return (self.r1, self.c2)

    @property
    def b(self):
        return (self.r2, self.c1)

    @property
    def c(self):
        return (self.r2, self.c2)

    def minor_indices(self, inst: ArmInstance) -> tuple[list[int], list[int]]:
        """Rows and columns of the 4x4 submatrix whose determinant is c - ab."""
        return ([inst.gauge_rows[0], inst.gauge_rows[1], self.r1, self.r2],
                [inst.gauge_cols[0], inst.gauge_cols[1], self.c1, self.c2])


def emit_gauge(inst: ArmInstance) -> ArmInstance:
    for a, r in enumerate(inst.gauge_rows):
        for b, c in enumerate(inst.gauge_cols):
            inst.pin((r, c), inst.gauge_block[a, b], "gauge")
    return inst


def emit_carrier(alloc: Allocator, inst: ArmInstance, occ: str, role: str = "") -> tuple[int, int]:
    if occ in inst.carriers:
        raise InstanceError(f"duplicate occurrence id {occ!r}")
    (r,), (c,) = alloc.take(occ, 1, 1, inst)
    inst.carriers[occ] = Carrier(r, c, role or occ)
    return r, c


def emit_linear(inst: ArmInstance, kind: str, *occs: str, value=None, tag: str | None = None):
    """One affine constraint for a const/copy/add/neg relation between carriers."""
    pos = [inst.carrier_position(o) for o in occs]
    if kind == "const":
        (z,) = pos
        return inst.pin(z, value, tag or f"const:{occs[0]}")
    if kind == "copy":
        u, v = pos
        return inst.equate(u, v, tag or f"copy:{occs[0]}:{occs[1]}")
    if kind == "add":
        z, x, y = pos
        return inst.add_constraint([(*z, 1), (*x, -1), (*y, -1)], 0, tag or f"add:{occs[0]}")
    if kind == "neg":
        z, x = pos
        return inst.add_constraint([(*z, 1), (*x, 1)], 0, tag or f"neg:{occs[0]}")
    raise ValueError(f"unknown linear relation {kind!r}")


def emit_mul_block(alloc: Allocator, inst: ArmInstance, name: str) -> MulGadget:
    """Fresh 2x2 gadget block: pin (r1,c1) to 1 and the eight cross entries to 0."""
    (r1, r2), (c1, c2) = alloc.take(name, 2, 2, inst)
    g = MulGadget(name, r1, r2, c1, c2)
    for role, pos in zip(MUL_ROLES, ((r1, c1), g.a, g.b, g.c)):
        inst.carriers[f"{name}.{role}"] = Carrier(pos[0], pos[1], f"gadget:{name}:{role}")
    inst.pin((r1, c1), 1, f"{name}:pin11")
    i0, i1 = inst.gauge_rows[:2]
    j0, j1 = inst.gauge_cols[:2]
    for r in (r1, r2):
        for j in (j0, j1):
            inst.pin((r, j), 0, f"{name}:cross:{r},{j}")
    for c in (c1, c2):
        for i in (i0, i1):
            inst.pin((i, c), 0, f"{name}:cross:{i},{c}")
    return g


def emit_mul(alloc: Allocator, inst: ArmInstance, x: str, y: str, z: str, name: str | None = None) -> MulGadget:
    """Gadget block plus copies tying its a, b, c entries to the x, y, z carriers (12 constraints)."""
    name = name or f"mul:{z}"
    xs, ys, zs = (inst.carrier_position(o) for o in (x, y, z))
    g = emit_mul_block(alloc, inst, name)
    inst.equate(g.a, xs, f"{name}:a")
    inst.equate(g.b, ys, f"{name}:b")
    inst.equate(g.c, zs, f"{name}:c")
    return g


def mul_gadgets(inst: ArmInstance) -> list[MulGadget]:
    """Recover the multiplication gadgets from carrier roles."""
    found: dict[str, dict[str, tuple[int, int]]] = {}
    for car in inst.carriers.values():
        if car.role.startswith("gadget:"):
            _, rest = car.role.split(":", 1)
            name, role = rest.rsplit(":", 1)
            found.setdefault(name, {})[role] = (car.row, car.col)
    out = []
    for name, parts in found.items():
        (r1, c1), (r2, c2) = parts["one"], parts["c"]
        out.append(MulGadget(name, r1, r2, c1, c2))
    return out


def gate_occ(gid: int) -> str:
    return f"g{gid}"


def _role(gate) -> str:
    if gate.kind != "input":
        return f"gate:{gate.kind}"
    name = gate.name
    for prefix, role in (("$slack", "slack"), ("$inv", "inverse"), ("$sel", "selector")):
        if name.startswith(prefix):
            return f"{role}:{name}"
    return f"input:{name}"


def compile_circuit(c: Circuit, source: str | None = None, alloc: Allocator | None = None) -> ArmInstance:
    """Gauge, one carrier per gate and per extra fan-out use, gadgets, output pins."""
    inst = ArmInstance.empty(k=3)
    emit_gauge(inst)
    alloc = alloc if alloc is not None else Allocator()
    uses: dict[int, int] = {}

    def use(gid: int) -> str:
        # the first use reads the gate's own carrier; each further use gets a copy
        n = uses.get(gid, 0)
        uses[gid] = n + 1
        if n == 0:
            return gate_occ(gid)
        occ = f"{gate_occ(gid)}.u{n}"
        emit_carrier(alloc, inst, occ, f"use:{gate_occ(gid)}")
        emit_linear(inst, "copy", occ, gate_occ(gid))
        return occ

    for g in c.gates:
        z = gate_occ(g.id)
        emit_carrier(alloc, inst, z, _role(g))
        if g.kind == "const":
            emit_linear(inst, "const", z, value=g.value)
        elif g.kind == "add":
            emit_linear(inst, "add", z, use(g.args[0]), use(g.args[1]))
        elif g.kind == "neg":
            emit_linear(inst, "neg", z, use(g.args[0]))
        elif g.kind == "mul":
            emit_mul(alloc, inst, use(g.args[0]), use(g.args[1]), z)
    for o in c.outputs:
        occ = gate_occ(o)
        inst.pin(inst.carrier_position(occ), 0, f"output:{occ}")
        inst.outputs.append(occ)
    inst.meta = {"circuit_hash": circuit_hash(c)}
    if source is not None:
        inst.meta["source"] = source
    return inst.validate()
