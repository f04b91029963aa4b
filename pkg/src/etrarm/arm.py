"""ARM(k) instances: affine constraints on one matrix plus a rank bound.

Instance file format ``arm-instance/1`` (JSON, canonical key order)::

    {"format": "arm-instance/1", "m": int, "n": int, "k": int,
     "gauge": {"rows": [3 ints], "cols": [3 ints], "block": [["p/q"]*3]*3},
     "constraints": [{"terms": [[row, col, "p/q"], ...], "rhs": "p/q", "tag": str}, ...],
     "carriers": {occ: {"row": int, "col": int, "role": str}, ...},
     "outputs": [occ, ...],
     "meta": {...}}

``meta`` is optional and carries the circuit hash and source formula of
compiled instances.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .exactq import RatMatrix, as_rat, det

FORMAT = "arm-instance/1"
WITNESS_FORMAT = "arm-witness/1"


class InstanceError(ValueError):
    pass


class SchemaError(InstanceError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(frozen=True)
class AffineConstraint:
    terms: tuple[tuple[int, int, Fraction], ...]
    rhs: Fraction
    tag: str

    def evaluate(self, x: RatMatrix) -> Fraction:
        return sum((c * x[i, j] for i, j, c in self.terms), Fraction(0))

    def holds(self, x: RatMatrix) -> bool:
        return self.evaluate(x) == self.rhs


def normalize_terms(terms: Iterable[tuple[int, int, object]]) -> tuple[tuple[int, int, Fraction], ...]:
    """Merge duplicate positions by summation and drop zero coefficients."""
    acc: dict[tuple[int, int], Fraction] = {}
    for i, j, c in terms:
        acc[(i, j)] = acc.get((i, j), Fraction(0)) + as_rat(c)
    return tuple((i, j, c) for (i, j), c in acc.items() if c)


@dataclass(frozen=True)
class Carrier:
    row: int
    col: int
    role: str


class CarrierMap(dict):
    """occurrence id -> :class:`Carrier`, injective on positions."""

    def __init__(self, *args, **kwargs):
        super().__init__()
        self._positions: dict[tuple[int, int], str] = {}
        for occ, car in dict(*args, **kwargs).items():
            self[occ] = car

    def __setitem__(self, occ: str, car: Carrier):
        if occ in self:
            raise InstanceError(f"duplicate occurrence id {occ!r}")
        pos = (car.row, car.col)
        if pos in self._positions:
            raise InstanceError(f"carriers {self._positions[pos]!r} and {occ!r} share position {pos}")
        self._positions[pos] = occ
        super().__setitem__(occ, car)

    def position(self, occ: str) -> tuple[int, int]:
        try:
            car = self[occ]
        except KeyError:
            raise InstanceError(f"unknown carrier {occ!r}") from None
        return car.row, car.col


@dataclass
class ArmInstance:
    m: int
    n: int
    k: int
    constraints: list[AffineConstraint] = field(default_factory=list)
    gauge_rows: tuple[int, int, int] = (0, 1, 2)
    gauge_cols: tuple[int, int, int] = (0, 1, 2)
    gauge_block: RatMatrix = field(default_factory=lambda: RatMatrix.identity(3))
    carriers: CarrierMap = field(default_factory=CarrierMap)
    outputs: list[str] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @classmethod
    def empty(cls, k: int = 3) -> "ArmInstance":
        """A 3x3 instance with the default gauge metadata and no constraints."""
        return cls(m=3, n=3, k=k)

    def add_constraint(self, terms, rhs, tag: str) -> AffineConstraint:
        terms = normalize_terms(terms)
        for i, j, _ in terms:
            if not (0 <= i < self.m and 0 <= j < self.n):
                raise InstanceError(f"constraint {tag!r}: index ({i},{j}) outside {self.m}x{self.n}")
        con = AffineConstraint(terms, as_rat(rhs), tag)
        self.constraints.append(con)
        return con

    def pin(self, pos: tuple[int, int], value, tag: str) -> AffineConstraint:
        return self.add_constraint([(pos[0], pos[1], 1)], value, tag)

    def equate(self, pos: tuple[int, int], other: tuple[int, int], tag: str) -> AffineConstraint:
        return self.add_constraint([(pos[0], pos[1], 1), (other[0], other[1], -1)], 0, tag)

    def carrier_position(self, occ: str) -> tuple[int, int]:
        return self.carriers.position(occ)

    def validate(self) -> "ArmInstance":
        if self.k < 1:
            raise InstanceError(f"rank bound must be positive, got {self.k}")
        for name, idx, bound in (("rows", self.gauge_rows, self.m), ("cols", self.gauge_cols, self.n)):
            if len(idx) != 3 or len(set(idx)) != 3:
                raise InstanceError(f"gauge {name} must be 3 distinct indices, got {list(idx)}")
            if any(not 0 <= i < bound for i in idx):
                raise InstanceError(f"gauge {name} {list(idx)} out of range")
        if self.gauge_block.shape != (3, 3):
            raise InstanceError("gauge block must be 3x3")
        if det(self.gauge_block) == 0:
            raise InstanceError("gauge block is singular")
        for con in self.constraints:
            seen = set()
            for i, j, c in con.terms:
                if not (0 <= i < self.m and 0 <= j < self.n):
                    raise InstanceError(f"constraint {con.tag!r}: index ({i},{j}) outside {self.m}x{self.n}")
                if (i, j) in seen:
                    raise InstanceError(f"constraint {con.tag!r}: duplicate position ({i},{j})")
                if c == 0:
                    raise InstanceError(f"constraint {con.tag!r}: zero coefficient stored")
                seen.add((i, j))
        pinned = {
            (con.terms[0][0], con.terms[0][1]): con.rhs
            for con in self.constraints
            if len(con.terms) == 1 and con.terms[0][2] == 1
        }
        for a, r in enumerate(self.gauge_rows):
            for b, c in enumerate(self.gauge_cols):
                if pinned.get((r, c)) != self.gauge_block[a, b]:
                    raise InstanceError(f"gauge entry ({r},{c}) is not pinned to the gauge block")
        for occ, car in self.carriers.items():
            if not (0 <= car.row < self.m and 0 <= car.col < self.n):
                raise InstanceError(f"carrier {occ!r} outside the matrix")
        for occ in self.outputs:
            if occ not in self.carriers:
                raise InstanceError(f"output {occ!r} is not a carrier")
        return self


def stats(inst: ArmInstance) -> dict:
    """Dimensions, constraint count and total bit-length of all rationals."""

    def bits(x: Fraction) -> int:
        return abs(x.numerator).bit_length() + x.denominator.bit_length()

    total = 0
    for con in inst.constraints:
        total += bits(con.rhs) + sum(bits(c) for _, _, c in con.terms)
    return {"m": inst.m, "n": inst.n, "q": len(inst.constraints), "total_bits": total}


def format_rat(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s, path: str) -> Fraction:
    if not isinstance(s, str):
        raise SchemaError(path, f"expected a rational string, got {type(s).__name__}")
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise SchemaError(path, f"malformed rational {s!r}") from None
    if q <= 0:
        raise SchemaError(path, f"denominator must be positive in {s!r}")
    x = Fraction(p, q)
    if x.numerator != p or x.denominator != q:
        raise SchemaError(path, f"rational {s!r} is not in reduced form")
    return x


def to_json(inst: ArmInstance) -> dict:
    doc = {
        "format": FORMAT,
        "m": inst.m,
        "n": inst.n,
        "k": inst.k,
        "gauge": {
            "rows": list(inst.gauge_rows),
            "cols": list(inst.gauge_cols),
            "block": [[format_rat(inst.gauge_block[a, b]) for b in range(3)] for a in range(3)],
        },
        "constraints": [
            {"terms": [[i, j, format_rat(c)] for i, j, c in con.terms], "rhs": format_rat(con.rhs), "tag": con.tag}
            for con in inst.constraints
        ],
        "carriers": {occ: {"row": c.row, "col": c.col, "role": c.role} for occ, c in inst.carriers.items()},
        "outputs": list(inst.outputs),
    }
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def serialize(inst: ArmInstance) -> bytes:
    return (json.dumps(to_json(inst), sort_keys=True, indent=1, ensure_ascii=False) + "\n").encode("utf-8")


def _expect(doc, key, typ, path):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(path, f"missing field {key!r}")
    val = doc[key]
    if typ is int and isinstance(val, bool) or not isinstance(val, typ):
        raise SchemaError(f"{path}.{key}", f"expected {typ.__name__}")
    return val


def _index_list(val, path) -> tuple[int, ...]:
    if not isinstance(val, list) or len(val) != 3 or not all(isinstance(i, int) and not isinstance(i, bool) for i in val):
        raise SchemaError(path, "expected a list of 3 integers")
    return tuple(val)


def from_json(doc: dict) -> ArmInstance:
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected an object")
    if doc.get("format") != FORMAT:
        raise SchemaError("$.format", f"expected {FORMAT!r}, got {doc.get('format')!r}")
    m = _expect(doc, "m", int, "$")
    n = _expect(doc, "n", int, "$")
    k = _expect(doc, "k", int, "$")
    gauge = _expect(doc, "gauge", dict, "$")
    rows = _index_list(gauge.get("rows"), "$.gauge.rows")
    cols = _index_list(gauge.get("cols"), "$.gauge.cols")
    block = gauge.get("block")
    if not isinstance(block, list) or len(block) != 3 or any(not isinstance(r, list) or len(r) != 3 for r in block):
        raise SchemaError("$.gauge.block", "expected a 3x3 array")
    bmat = RatMatrix.from_rows(
        [[parse_rat(v, f"$.gauge.block[{a}][{b}]") for b, v in enumerate(r)] for a, r in enumerate(block)]
    )
    inst = ArmInstance(m=m, n=n, k=k, gauge_rows=rows, gauge_cols=cols, gauge_block=bmat)
    for ci, con in enumerate(_expect(doc, "constraints", list, "$")):
        path = f"$.constraints[{ci}]"
        terms = []
        for ti, t in enumerate(_expect(con, "terms", list, path)):
            tpath = f"{path}.terms[{ti}]"
            if not isinstance(t, list) or len(t) != 3 or not all(isinstance(x, int) and not isinstance(x, bool) for x in t[:2]):
                raise SchemaError(tpath, "expected [row, col, \"p/q\"]")
            terms.append((t[0], t[1], parse_rat(t[2], f"{tpath}[2]")))
        rhs = parse_rat(_expect(con, "rhs", str, path), f"{path}.rhs")
        tag = _expect(con, "tag", str, path)
        if len({(i, j) for i, j, _ in terms}) != len(terms):
            raise SchemaError(f"{path}.terms", "duplicate position")
        if any(c == 0 for _, _, c in terms):
            raise SchemaError(f"{path}.terms", "zero coefficient")
        inst.constraints.append(AffineConstraint(tuple(terms), rhs, tag))
    for occ, car in _expect(doc, "carriers", dict, "$").items():
        path = f"$.carriers[{occ!r}]"
        try:
            inst.carriers[occ] = Carrier(_expect(car, "row", int, path), _expect(car, "col", int, path),
                                         _expect(car, "role", str, path))
        except InstanceError as exc:
            if isinstance(exc, SchemaError):
                raise
            raise SchemaError(path, str(exc)) from None
    outputs = _expect(doc, "outputs", list, "$")
    if not all(isinstance(o, str) for o in outputs):
        raise SchemaError("$.outputs", "expected a list of occurrence ids")
    inst.outputs = list(outputs)
    if "meta" in doc:
        inst.meta = _expect(doc, "meta", dict, "$")
    try:
        return inst.validate()
    except SchemaError:
        raise
    except InstanceError as exc:
        raise SchemaError("$", str(exc)) from None


def deserialize(data: bytes | str) -> ArmInstance:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return from_json(doc)
