from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import rand_matrix, rat_matrices
from etrarm.acceptance import rank4_tamper, tiny_instances
from etrarm.arm import ArmInstance
from etrarm.corpus import CORPUS
from etrarm.emit import (TooLarge, clear_denominators, emit_factored, emit_minors, factor_assignment,
                         factored_equalities, factored_variables, minor_count, minor_equalities, minor_poly,
                         matrix_assignment)
from etrarm.exactq import det
from etrarm.formula import And, Atom, parse_formula
from etrarm.gadgets import Allocator, emit_carrier, emit_gauge
from etrarm.pipeline import compile_formula, witness_for
from etrarm.poly import Poly
from etrarm.witness import witness_for_gadget_values

TINY = {name: (inst, vals, muls) for name, inst, vals, muls in tiny_instances()}


def parsed_equalities(text):
    f = parse_formula(text)
    atoms = f.children if isinstance(f, And) else (f,)
    assert all(isinstance(a, Atom) and a.rel == "=" for a in atoms)
    return [a.poly for a in atoms]


def test_gauge_only_factored_encoding():
    inst, _, _ = TINY["gauge-only"]
    polys = parsed_equalities(emit_factored(inst))
    assert len(polys) == 9
    assert len(factored_variables(inst)) == 18
    assert polys[0] == parsed_equalities("U_0_0*V_0_0 + U_0_1*V_1_0 + U_0_2*V_2_0 - 1 = 0")[0]
    assert {v for p in polys for v in p.variables()} == set(factored_variables(inst))


@pytest.mark.parametrize("name", sorted(TINY))
def test_factored_equalities_vanish_on_canonical_factors(name):
    inst, vals, muls = TINY[name]
    w = witness_for_gadget_values(inst, vals, muls)
    env = factor_assignment(w.U, w.V)
    polys = factored_equalities(inst)
    assert len(polys) == len(inst.constraints)
    assert all(p.evaluate(env) == 0 for p in polys)


@pytest.mark.parametrize("name, text, assignment", CORPUS[::6])
def test_factored_encoding_of_compiled_instances(name, text, assignment):
    c = compile_formula(text)
    w = witness_for(c, assignment)
    polys = parsed_equalities(emit_factored(c.instance))
    assert len(polys) == len(c.instance.constraints)
    assert all(p.evaluate(factor_assignment(w.U, w.V)) == 0 for p in polys)


def test_minor_counts():
    assert minor_count(TINY["gauge-only"][0]) == 0
    assert minor_count(TINY["one-carrier"][0]) == 1
    assert minor_count(TINY["one-gadget"][0]) == 25
    assert minor_count(TINY["gadget-and-carrier"][0]) == 225


@pytest.mark.parametrize("name", sorted(TINY))
def test_minor_encoding_vanishes_on_witness_and_detects_rank_four(name):
    inst, vals, muls = TINY[name]
    w = witness_for_gadget_values(inst, vals, muls)
    eqs = minor_equalities(inst)
    assert len(eqs) == len(inst.constraints) + minor_count(inst)
    assert all(p.evaluate(matrix_assignment(w.X)) == 0 for p in eqs)
    if minor_count(inst):
        y = rank4_tamper(inst, w.X)
        assert y is not None
        assert any(p.evaluate(matrix_assignment(y)) != 0 for p in eqs[len(inst.constraints):])
        assert all(p.evaluate(matrix_assignment(y)) == 0 for p in eqs[:len(inst.constraints)])


@settings(max_examples=60, deadline=None)
@given(rat_matrices(4, 4))
def test_minor_poly_is_the_determinant(m):
    p = minor_poly([0, 1, 2, 3], [0, 1, 2, 3])
    assert len(p.terms) == 24
    assert p.evaluate(matrix_assignment(m)) == det(m)


def test_minor_poly_on_scattered_indices(rng):
    m = rand_matrix(rng, 6, 7)
    rows, cols = [0, 2, 3, 5], [1, 4, 5, 6]
    assert minor_poly(rows, cols).evaluate(matrix_assignment(m)) == det(m.submatrix(rows, cols))


def test_too_large_reports_count():
    inst = emit_gauge(ArmInstance.empty())
    alloc = Allocator()
    for i in range(12):
        emit_carrier(alloc, inst, f"t{i}")
    with pytest.raises(TooLarge) as err:
        emit_minors(inst, cap=1000)
    assert err.value.count == 1365 ** 2
    assert str(1365 ** 2) in str(err.value)


def test_denominators_cleared():
    p = Poly({(("x", 1),): Fraction(1, 2), (): Fraction(-3, 4)})
    assert clear_denominators(p) == Poly({(("x", 1),): 2, (): -3})
    inst = ArmInstance(m=4, n=4, k=3)
    emit_gauge(inst)
    inst.pin((3, 3), Fraction(5, 6), "t")
    assert all(c.denominator == 1 for p in factored_equalities(inst) for c in p.terms.values())


def test_empty_instance_renders_trivial_sentence():
    assert emit_factored(ArmInstance(m=3, n=3, k=3)) == "0 = 0\n"


def test_emitted_sentence_recompiles():
    c = compile_formula("x*y - 6 = 0 /\\ x + y - 5 = 0")
    text = emit_factored(c.instance)
    again = compile_formula(text)
    assert again.instance.validate() is again.instance
    assert len(again.system.equalities) == len(c.instance.constraints)
    # deterministic output
    assert emit_factored(compile_formula(c.source).instance) == text
