from fractions import Fraction
from itertools import product

import pytest

from etrarm.formula import And, Atom, Or, evaluate_formula, parse_formula, push_negations
from etrarm.normalize import (DivisionByZeroWitness, IrrationalWitness, UnsatisfiedAssignment, extend_assignment,
                              to_equality_form)
from etrarm.poly import Poly

x = Poly.var("x")


def normal(text):
    return to_equality_form(push_negations(parse_formula(text)))


def test_nonneg_slack():
    sys = to_equality_form(Atom(x, ">="))
    u = Poly.var("$slack_0")
    assert sys.equalities == [x - u * u]
    assert sys.variables == ["x", "$slack_0"]
    assert sys.provenance == ["slack:0"]


def test_disjunction_selectors():
    sys = to_equality_form(Or((Atom(x - 1, "="), Atom(x - 2, "="))))
    s1, s2 = Poly.var("$sel_0"), Poly.var("$sel_1")
    assert sys.equalities == [s1 + s2 - 1, s1 * (1 - s1), s2 * (1 - s2), s1 * (x - 1), s2 * (x - 2)]
    assert sys.auxiliaries() == ["$sel_0", "$sel_1"]


def test_plain_conjunction_needs_no_auxiliaries():
    p = x * x - 3
    sys = to_equality_form(And((Atom(p, "="),)))
    assert sys.equalities == [p]
    assert sys.auxiliaries() == []


def test_strict_and_nonzero_encodings():
    u, v = Poly.var("$slack_0"), Poly.var("$inv_0")
    assert to_equality_form(Atom(x, ">")).equalities == [x - u * u, u * v - 1]
    assert to_equality_form(Atom(x - 2, "!=")).equalities == [(x - 2) * v - 1]


def test_unguarded_additions_have_degree_at_most_two_in_new_variables():
    sys = normal("x*y*z - 1 >= 0 /\\ x > 0 /\\ y != 0")
    aux = set(sys.auxiliaries())
    for p in sys.equalities:
        for mono in p.terms:
            assert sum(e for v, e in mono if v in aux) <= 2


def test_nested_disjunction_guards_multiply_enclosing_selectors():
    sys = normal("x = 0 \\/ (x - 1 = 0 \\/ x - 2 > 0)")
    inner = [t for t in sys.provenance if t.startswith("guard[$sel_1*")]
    assert inner, sys.provenance
    idx = sys.provenance.index("guard[$sel_1*$sel_3]:slack:2")
    p = sys.equalities[idx]
    assert p == Poly.var("$sel_1") * Poly.var("$sel_3") * (x - 2 - Poly.var("$slack_0") ** 2)


def test_requires_negation_free_input():
    with pytest.raises(ValueError):
        to_equality_form(parse_formula("!(x = 0)"))


def test_auxiliary_names_are_fresh():
    sys = normal("x >= 0 /\\ (x > 0 \\/ x != 0)")
    assert len(set(sys.variables)) == len(sys.variables)
    assert all(v.startswith("$") for v in sys.auxiliaries())


# --- extension of assignments

def test_extend_nonneg():
    assert extend_assignment(normal("x >= 0"), {"x": Fraction(9, 4)})["$slack_0"] == Fraction(3, 2)


def test_extend_strict():
    ext = extend_assignment(normal("x > 0"), {"x": 4})
    assert (ext["$slack_0"], ext["$inv_0"]) == (2, Fraction(1, 2))


def test_extend_irrational():
    with pytest.raises(IrrationalWitness):
        extend_assignment(normal("x >= 0"), {"x": 2})


def test_extend_unsatisfied_and_division_by_zero():
    with pytest.raises(UnsatisfiedAssignment):
        extend_assignment(normal("x - 1 = 0 \\/ x - 2 = 0"), {"x": 5})
    with pytest.raises(UnsatisfiedAssignment):
        extend_assignment(normal("x > 0"), {"x": 0})
    with pytest.raises(DivisionByZeroWitness):
        extend_assignment(normal("x != 0"), {"x": 0})


def test_extend_picks_first_satisfied_disjunct_and_zeroes_the_rest():
    ext = extend_assignment(normal("x - 1 >= 0 \\/ x - 2 = 0 \\/ x > 0"), {"x": 2})
    # x - 1 = 1 is a perfect square, so the first disjunct wins
    assert [ext[s] for s in ("$sel_0", "$sel_1", "$sel_2")] == [1, 0, 0]
    assert ext["$slack_0"] == 1
    assert ext["$slack_1"] == 0 and ext["$inv_0"] == 0


def test_extend_skips_disjunct_without_rational_extension():
    ext = extend_assignment(normal("x - 1 >= 0 \\/ x - 3 = 0"), {"x": 3})
    assert ext["$sel_0"] == 0 and ext["$sel_1"] == 1


def test_extend_requires_source_values():
    with pytest.raises(KeyError, match="y"):
        extend_assignment(normal("x + y = 0"), {"x": 1})


SUITE = [
    ("x >= 0", {"x": Fraction(9, 4)}),
    ("x > 0 /\\ x - 4 = 0", {"x": 4}),
    ("x != 0 /\\ x*y - 1 = 0", {"x": 2, "y": Fraction(1, 2)}),
    ("x - 1 = 0 \\/ x - 2 = 0", {"x": 1}),
    ("(x = 0 \\/ y = 0) /\\ x + y - 1 = 0", {"x": 0, "y": 1}),
    ("!(x = 0 /\\ y = 0)", {"x": 0, "y": 3}),
    ("x - y > 0", {"x": 1, "y": 0}),
]


@pytest.mark.parametrize("text, assignment", SUITE)
def test_extension_satisfies_every_equality(text, assignment):
    sys = normal(text)
    ext = extend_assignment(sys, assignment)
    assert sys.is_satisfied_by(ext)


GRID = [Fraction(v) for v in (-2, -1, 0, 1, 2, 3)] + [Fraction(1, 2), Fraction(-1, 2)]


@pytest.mark.parametrize("text", [
    "x >= 0",
    "x - 1 > 0",
    "x != 0",
    "x - 1 = 0 \\/ x - 2 = 0",
    "(x = 0 \\/ y = 0) /\\ x + y - 1 = 0",
    "!(x = 0 /\\ y = 0)",
    "x - y > 0",
])
def test_zeros_of_the_system_project_to_models(text):
    """Brute force every grid point; each zero of the system must satisfy the formula."""
    formula = parse_formula(text)
    sys = normal(text)
    assert len(sys.variables) <= 6
    zeros = 0
    for values in product(GRID, repeat=len(sys.variables)):
        env = dict(zip(sys.variables, values))
        if sys.is_satisfied_by(env):
            zeros += 1
            assert evaluate_formula(formula, {v: env[v] for v in sys.source_variables})
    assert zeros > 0
