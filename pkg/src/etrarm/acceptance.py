"""Desk-scale acceptance suite, shared by ``etrarm selftest`` and pytest.

Each check returns ``(ok, detail)``.  Everything is exact; no tolerances.
"""

from __future__ import annotations

import random
import time
from fractions import Fraction
from math import comb

from .arm import ArmInstance, serialize
from .corpus import CORPUS
from .emit import emit_factored, factor_assignment, matrix_assignment, minor_equalities
from .exactq import RatMatrix, bareiss, det4_leibniz, exact_rank, mat_mul, minors, rank_by_minors
from .formula import Atom, And, evaluate_formula, parse_formula
from .gadgets import Allocator, emit_carrier, emit_gauge, emit_linear, emit_mul, emit_mul_block, mul_gadgets
from .pipeline import compile_formula, round_trip
from .verifier import decode_sources, verify
from .witness import witness_for_gadget_values


def random_rat(rng: random.Random, span: int = 9, den: int = 5) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_matrix(rng: random.Random, rows: int, cols: int, **kw) -> RatMatrix:
    return RatMatrix.from_rows([[random_rat(rng, **kw) for _ in range(cols)] for _ in range(rows)])


def single_mul_instance() -> ArmInstance:
    """Gauge plus one bare multiplication gadget on carriers x, y, z (m = n = 8)."""
    inst = ArmInstance.empty()
    emit_gauge(inst)
    alloc = Allocator()
    for occ in ("x", "y", "z"):
        emit_carrier(alloc, inst, occ)
    emit_mul(alloc, inst, "x", "y", "z", name="mul:z")
    return inst.validate()


def tiny_instances() -> list[tuple[str, ArmInstance, dict, dict]]:
    """Hand-built instances with m, n <= 6 and the data for a canonical witness.

    Gadget entries are pinned directly, so the gadget carriers themselves play
    the role of designated entries.
    """
    out = []

    inst = ArmInstance.empty()
    emit_gauge(inst)
    out.append(("gauge-only", inst.validate(), {}, {}))

    inst = ArmInstance.empty()
    emit_gauge(inst)
    alloc = Allocator()
    emit_carrier(alloc, inst, "t")
    emit_linear(inst, "const", "t", value=5)
    out.append(("one-carrier", inst.validate(), {"t": 5}, {}))

    for name, extra in (("one-gadget", False), ("gadget-and-carrier", True)):
        inst = ArmInstance.empty()
        emit_gauge(inst)
        alloc = Allocator()
        g = emit_mul_block(alloc, inst, "mul:m")
        inst.pin(g.a, 2, "mul:m:a")
        inst.pin(g.b, 3, "mul:m:b")
        inst.pin(g.c, 6, "mul:m:c")
        values = {}
        if extra:
            emit_carrier(alloc, inst, "t")
            emit_linear(inst, "const", "t", value=Fraction(-3, 7))
            values["t"] = Fraction(-3, 7)
        out.append((name, inst.validate(), values, {"mul:m": (2, 3)}))
    return out


def _pinned_positions(inst: ArmInstance) -> set[tuple[int, int]]:
    return {(i, j) for con in inst.constraints for i, j, _ in con.terms}


def rank4_tamper(inst: ArmInstance, x: RatMatrix) -> RatMatrix | None:
    """Bump one unconstrained entry so that the rank reaches 4, if possible."""
    pinned = _pinned_positions(inst)
    for i in range(inst.m):
        for j in range(inst.n):
            if (i, j) in pinned:
                continue
            y = x.with_entries({(i, j): x[i, j] + 1})
            if exact_rank(y) >= 4:
                return y
    return None


def check_gadget_determinant(seed: int = 1, trials: int = 500):
    rng = random.Random(seed)
    inst = single_mul_instance()
    (g,) = mul_gadgets(inst)
    rows, cols = g.minor_indices(inst)
    pins = {}
    for con in inst.constraints:
        if len(con.terms) == 1:
            i, j, c = con.terms[0]
            pins[(i, j)] = con.rhs / c
    start = time.perf_counter()
    for _ in range(trials):
        a, b, c = (random_rat(rng, span=50, den=20) for _ in range(3))
        x = random_matrix(rng, inst.m, inst.n).with_entries({**pins, g.a: a, g.b: b, g.c: c})
        if det4_leibniz(x.submatrix(rows, cols)) != c - a * b:
            return False, f"det != c - ab at a={a}, b={b}, c={c}"
    elapsed = time.perf_counter() - start
    return elapsed < 1.0, f"{trials} triples exact, {elapsed:.3f}s (limit 1s)"


def check_soundness_round_trip():
    start = time.perf_counter()
    bad = []
    for name, text, assignment in CORPUS:
        _, _, verdict = round_trip(text, assignment)
        if not verdict.accept or verdict.rank > 3:
            bad.append(f"{name}: {verdict.violations}")
    elapsed = time.perf_counter() - start
    ok = not bad and len(CORPUS) >= 25 and elapsed < 10.0
    return ok, f"{len(CORPUS) - len(bad)}/{len(CORPUS)} accepted, {elapsed:.2f}s (limit 10s)" + (
        f"; failures: {bad}" if bad else "")


def check_tamper_detection():
    total = detected = 0
    for name, text, assignment in CORPUS:
        compiled, w, _ = round_trip(text, assignment)
        for g in mul_gadgets(compiled.instance):
            total += 1
            x = w.X.with_entries({g.c: w.X[g.c] + 1})
            if exact_rank(x) >= 4 and not verify(compiled.instance, x, compiled.circuit).accept:
                detected += 1
    return total > 0 and detected == total, f"{detected}/{total} gadget tampers detected"


def check_decode_fidelity():
    bad = []
    for name, text, assignment in CORPUS:
        compiled, w, verdict = round_trip(text, assignment)
        decoded = decode_sources(compiled.instance, w.X)
        expected = {k: Fraction(v) for k, v in assignment.items()}
        if not verdict.accept or decoded != expected or not evaluate_formula(compiled.formula, decoded):
            bad.append(name)
    return not bad, f"{len(CORPUS) - len(bad)}/{len(CORPUS)} decode exactly and satisfy the source" + (
        f"; failures: {bad}" if bad else "")


def check_size_linearity():
    bad = []
    for name, text, _ in CORPUS:
        compiled = compile_formula(text)
        inst = compiled.instance
        s = len(compiled.circuit)
        carriers = sum(1 for c in inst.carriers.values() if not c.role.startswith("gadget:"))
        if len(inst.constraints) > 13 * s + 9:
            bad.append(f"{name}: q={len(inst.constraints)} > 13*{s}+9")
        if max(inst.m, inst.n) > 3 + 4 * s + carriers:
            bad.append(f"{name}: m,n={inst.m},{inst.n} too large")
        if any(abs(c) != 1 for con in inst.constraints for _, _, c in con.terms):
            bad.append(f"{name}: coefficient outside {{0, +-1}}")
    return not bad, "q <= 13s+9, m,n <= 3+4s+carriers, coefficients in {0,+-1} on all corpus instances" + (
        f"; failures: {bad}" if bad else "")


def _equalities_of(text: str):
    f = parse_formula(text)
    atoms = f.children if isinstance(f, And) else (f,)
    assert all(isinstance(a, Atom) and a.rel == "=" for a in atoms)
    return [a.poly for a in atoms]


def check_membership_encodings():
    notes = []
    ok = True
    for name, inst, values, muls in tiny_instances():
        w = witness_for_gadget_values(inst, values, muls)
        if not verify(inst, w.X).accept:
            return False, f"{name}: canonical witness rejected"
        eqs = minor_equalities(inst)
        expected = len(inst.constraints) + comb(inst.m, 4) * comb(inst.n, 4)
        ok &= len(eqs) == expected
        env = matrix_assignment(w.X)
        ok &= all(p.evaluate(env) == 0 for p in eqs)
        if inst.m >= 4 and inst.n >= 4:
            y = rank4_tamper(inst, w.X)
            ok &= y is not None and any(p.evaluate(matrix_assignment(y)) != 0 for p in eqs)
        polys = _equalities_of(emit_factored(inst))
        fenv = factor_assignment(w.U, w.V)
        ok &= len(polys) == len(inst.constraints) and all(p.evaluate(fenv) == 0 for p in polys)
        notes.append(f"{name}:{inst.m}x{inst.n}:{len(eqs) - len(inst.constraints)} minors")
    # full loop ARM -> ETR -> ARM on a compiled instance
    compiled, w, _ = round_trip("x*y - 6 = 0 /\\ x + y - 5 = 0", {"x": 2, "y": 3})
    text = emit_factored(compiled.instance)
    polys = _equalities_of(text)
    ok &= all(p.evaluate(factor_assignment(w.U, w.V)) == 0 for p in polys)
    compile_formula(text)
    return bool(ok), "; ".join(notes) + "; factored re-parse/re-compile ok"


def check_oracle_agreement(seed: int = 7):
    rng = random.Random(seed)
    for _ in range(200):
        m = random_matrix(rng, 4, 4)
        _, d = bareiss(m)
        if det4_leibniz(m) != d:
            return False, "det4_leibniz disagrees with Bareiss"
    ranks = []
    for _ in range(50):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        inner = rng.randint(0, min(rows, cols))
        m = mat_mul(random_matrix(rng, rows, inner), random_matrix(rng, inner, cols)) if inner else RatMatrix(rows, cols)
        r = exact_rank(m)
        if r != rank_by_minors(m):
            return False, f"exact_rank disagrees with minors on a {rows}x{cols} matrix"
        ranks.append(r)
    return True, f"200 determinants and 50 ranks agree (ranks seen: {sorted(set(ranks))})"


def check_rank3_minimality(seed: int = 11):
    rng = random.Random(seed)
    for _ in range(50):
        rows, cols = rng.randint(3, 6), rng.randint(3, 6)
        m = mat_mul(random_matrix(rng, rows, 2), random_matrix(rng, 2, cols))
        if any(v for _, _, v in minors(m, 3)):
            return False, "a rank-2 product has a nonzero 3x3 minor"
    # the pinned gauge block alone already has rank 3, so no completion reaches rank 2
    inst = single_mul_instance()
    w = witness_for_gadget_values(inst, {"x": 2, "y": 3, "z": 6}, {"mul:z": (2, 3)})
    gauge = w.X.submatrix(inst.gauge_rows, inst.gauge_cols)
    return exact_rank(gauge) == 3, "50 rank-2 products: all 3x3 minors vanish; gauge block forces rank >= 3"


def check_determinism():
    for name, text, _ in CORPUS:
        if serialize(compile_formula(text).instance) != serialize(compile_formula(text).instance):
            return False, f"{name}: compilation not byte-deterministic"
    return True, f"{len(CORPUS)} formulas compile byte-identically twice"


CRITERIA = [
    (1, "gadget determinant identity", check_gadget_determinant),
    (2, "soundness round-trip", check_soundness_round_trip),
    (3, "tamper completeness", check_tamper_detection),
    (4, "decode fidelity", check_decode_fidelity),
    (5, "size linearity", check_size_linearity),
    (6, "membership encodings", check_membership_encodings),
    (7, "oracle agreement", check_oracle_agreement),
    (8, "rank-3 minimality", check_rank3_minimality),
    (9, "determinism", check_determinism),
]


def run_all(echo=print) -> bool:
    start = time.perf_counter()
    all_ok = True
    for num, title, fn in CRITERIA:
        ok, detail = fn()
        all_ok &= ok
        echo(f"[{'PASS' if ok else 'FAIL'}] {num}. {title}: {detail}")
    elapsed = time.perf_counter() - start
    within = elapsed < 60.0
    echo(f"[{'PASS' if within else 'FAIL'}] selftest runtime: {elapsed:.2f}s (limit 60s)")
    return all_ok and within
