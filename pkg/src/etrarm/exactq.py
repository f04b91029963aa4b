"""Exact rational scalars and sparse rational matrices.

``Rat`` is :class:`fractions.Fraction`, which always stores a reduced
numerator over a positive denominator.  Matrices are sparse coordinate maps.
Nothing in here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations
from math import isqrt, lcm
from typing import Iterable, Iterator, Mapping

Rat = Fraction


class DimensionError(ValueError):
    pass


class NegativeSqrt(ValueError):
    """Square root requested of a negative rational."""


def as_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals")
    return Fraction(value)


class RatMatrix:
    """Immutable sparse matrix of rationals; absent entries are zero."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError(f"negative shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        store: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise DimensionError(f"index ({i},{j}) outside {rows}x{cols}")
            v = as_rat(v)
            if v:
                store[(i, j)] = v
        self._entries = store

    @classmethod
    def from_rows(cls, data: Iterable[Iterable[object]]) -> "RatMatrix":
        data = [list(r) for r in data]
        rows = len(data)
        cols = len(data[0]) if rows else 0
        if any(len(r) != cols for r in data):
            raise DimensionError("ragged rows")
        return cls(rows, cols, {(i, j): v for i, r in enumerate(data) for j, v in enumerate(r)})

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, key: tuple[int, int]) -> Fraction:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i},{j}) outside {self.rows}x{self.cols}")
        return self._entries.get((i, j), Fraction(0))

    def items(self) -> Iterator[tuple[tuple[int, int], Fraction]]:
        """Nonzero entries in row-major order."""
        for key in sorted(self._entries):
            yield key, self._entries[key]

    def nnz(self) -> int:
        return len(self._entries)

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "RatMatrix":
        rows, cols = list(rows), list(cols)
        return RatMatrix(len(rows), len(cols),
                         {(a, b): self[i, j] for a, i in enumerate(rows) for b, j in enumerate(cols)})

    def with_entries(self, updates: Mapping[tuple[int, int], object]) -> "RatMatrix":
        merged: dict[tuple[int, int], object] = dict(self._entries)
        merged.update(updates)
        return RatMatrix(self.rows, self.cols, merged)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self._entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._entries.items())))

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols}, nnz={len(self._entries)})"


def mat_mul(a: RatMatrix, b: RatMatrix) -> RatMatrix:
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.rows}x{a.cols} by {b.rows}x{b.cols}")
    b_rows: dict[int, list[tuple[int, Fraction]]] = {}
    for (k, j), v in b._entries.items():
        b_rows.setdefault(k, []).append((j, v))
    acc: dict[tuple[int, int], Fraction] = {}
    for (i, k), av in a._entries.items():
        for j, bv in b_rows.get(k, ()):
            acc[(i, j)] = acc.get((i, j), 0) + av * bv
    return RatMatrix(a.rows, b.cols, acc)


def _integer_rows(m: RatMatrix) -> tuple[list[list[int]], Fraction]:
    """Scale each row by the lcm of its denominators.

    Returns the integer rows and the product of the scale factors.
    """
    dense = m.to_dense()
    scale = Fraction(1)
    out = []
    for row in dense:
        d = lcm(*(v.denominator for v in row)) if row else 1
        out.append([int(v * d) for v in row])
        scale *= d
    return out, scale


def bareiss(m: RatMatrix) -> tuple[int, Fraction | None]:
    """Fraction-free elimination.

    Returns ``(rank, det)`` where ``det`` is the determinant recovered from
    the final pivot for square input and ``None`` otherwise.
    """
    a, scale = _integer_rows(m)
    nrows, ncols = m.rows, m.cols
    sign = 1
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        p = a[r][c]
        prow = a[r]
        for i in range(r + 1, nrows):
            row = a[i]
            f = row[c]
            # exact division: every updated entry is a minor of the input
            if f:
                for j in range(c + 1, ncols):
                    row[j] = (p * row[j] - f * prow[j]) // prev
            elif p != prev:
                for j in range(c + 1, ncols):
                    if row[j]:
                        row[j] = (p * row[j]) // prev
            row[c] = 0
        prev = p
        r += 1
    if nrows != ncols:
        return r, None
    if r < nrows:
        return r, Fraction(0)
    return r, Fraction(sign * prev) / scale


def exact_rank(m: RatMatrix) -> int:
    if m.nnz() == 0:
        return 0
    # drop all-zero rows and columns before the dense elimination
    rows = sorted({i for i, _ in m._entries})
    cols = sorted({j for _, j in m._entries})
    return bareiss(m.submatrix(rows, cols))[0]


def det(m: RatMatrix) -> Fraction:
    if m.rows != m.cols:
        raise DimensionError(f"determinant of non-square {m.rows}x{m.cols}")
    if m.rows == 0:
        return Fraction(1)
    return bareiss(m)[1]


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def signed_permutations(n: int) -> list[tuple[int, tuple[int, ...]]]:
    """All ``(sign, perm)`` pairs of S_n in lexicographic order."""
    return [(_perm_sign(p), p) for p in permutations(range(n))]


def det_leibniz(m: RatMatrix) -> Fraction:
    if m.rows != m.cols:
        raise DimensionError(f"determinant of non-square {m.rows}x{m.cols}")
    total = Fraction(0)
    for sign, perm in signed_permutations(m.rows):
        prod = Fraction(sign)
        for t, pt in enumerate(perm):
            prod *= m[t, pt]
            if not prod:
                break
        total += prod
    return total


def det4_leibniz(m: RatMatrix) -> Fraction:
    if m.shape != (4, 4):
        raise DimensionError(f"det4_leibniz needs a 4x4 matrix, got {m.rows}x{m.cols}")
    return det_leibniz(m)


def minors(m: RatMatrix, size: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...], Fraction]]:
    """Every ``size``x``size`` minor by Leibniz expansion."""
    for rows in combinations(range(m.rows), size):
        for cols in combinations(range(m.cols), size):
            yield rows, cols, det_leibniz(m.submatrix(rows, cols))


def rank_by_minors(m: RatMatrix) -> int:
    """Largest k with a nonzero k x k minor.  Exponential; test oracle only."""
    best = 0
    for size in range(1, min(m.rows, m.cols) + 1):
        if any(v for _, _, v in minors(m, size)):
            best = size
        else:
            break
    return best


def rational_sqrt(x) -> Fraction | None:
    """Nonnegative rational square root, or ``None`` when it is irrational.

    Raises :class:`NegativeSqrt` for negative input.
    """
    x = as_rat(x)
    if x < 0:
        raise NegativeSqrt(f"square root of negative rational {x}")
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp != p or rq * rq != q:
        return None
    return Fraction(rp, rq)
