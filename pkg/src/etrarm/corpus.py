"""Desk-scale formulas that have rational witnesses, with one witness each."""

from fractions import Fraction as F

# (name, formula text, satisfying rational assignment of the source variables)
CORPUS = [
    ("pin", "x - 1 = 0", {"x": 1}),
    ("negated-linear", "-x - 7 = 0", {"x": -7}),
    ("rational-coeffs", "1/2*x - 3/4 = 0", {"x": F(3, 2)}),
    ("linear-system", "x + y - 3 = 0 /\\ x - y - 1 = 0", {"x": 2, "y": 1}),
    ("product-sum", "x*y - 6 = 0 /\\ x + y - 5 = 0", {"x": 2, "y": 3}),
    ("square", "x^2 - 4 = 0", {"x": -2}),
    ("cube", "x^3 - 8 = 0", {"x": 2}),
    ("double-root", "x^2 - 2*x + 1 = 0", {"x": 1}),
    ("reciprocal", "x*y - 1 = 0", {"x": 2, "y": F(1, 2)}),
    ("triple-product", "x*y*z - 24 = 0 /\\ x + y + z - 9 = 0 /\\ x - 2 = 0", {"x": 2, "y": 3, "z": 4}),
    ("chain", "a*b - c = 0 /\\ c - 12 = 0 /\\ a - 3 = 0", {"a": 3, "b": 4, "c": 12}),
    ("rational-square", "x*x - y = 0 /\\ y - 9/4 = 0", {"x": F(3, 2), "y": F(9, 4)}),
    ("nonneg", "x >= 0", {"x": F(9, 4)}),
    ("nonneg-shifted", "x - 1 >= 0 /\\ x - 5 = 0", {"x": 5}),
    ("nonneg-boundary", "x^2 + y^2 - 25 = 0 /\\ x - 3 >= 0", {"x": 3, "y": 4}),
    ("positive", "x > 0", {"x": 4}),
    ("positive-diff", "x - y > 0 /\\ x*y - 2 = 0", {"x": 2, "y": 1}),
    ("quartic-positive", "x^4 - 16 = 0 /\\ x + 2 > 0", {"x": 2}),
    ("mixed-ineq", "x >= 0 /\\ y > 0 /\\ x + y - 5/4 >= 0", {"x": F(1, 4), "y": 1}),
    ("nonzero", "x != 0", {"x": 3}),
    ("nonzero-pair", "x != 0 /\\ y != 0 /\\ x*y - 4 = 0", {"x": 1, "y": 4}),
    ("negated-eq", "!(x = 0) /\\ x^2 - 9 = 0", {"x": -3}),
    ("negated-strict", "!(x > 0) /\\ x + 4 = 0", {"x": -4}),
    ("disjunction", "x - 1 = 0 \\/ x - 2 = 0", {"x": 2}),
    ("disjunction-irrational-branch", "x^2 - 2 = 0 \\/ x - 3 = 0", {"x": 3}),
    ("guarded-slack", "(x >= 0 \\/ y >= 0) /\\ x + y = 0", {"x": -1, "y": 1}),
    ("nested-disjunction", "(x - 1 = 0 \\/ (x - 2 = 0 \\/ x - 3 = 0)) /\\ x - 3 = 0", {"x": 3}),
    ("de-morgan", "!(x - 1 = 0 /\\ y - 1 = 0) /\\ x + y - 2 = 0", {"x": 0, "y": 2}),
    ("dnf", "(x - 1 = 0 /\\ y - 2 = 0) \\/ (x - 2 = 0 /\\ y - 1 = 0)", {"x": 2, "y": 1}),
    ("strict-in-disjunct", "x + 1 > 0 \\/ x - 5 = 0", {"x": 3}),
]
