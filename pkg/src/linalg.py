"""Exact linear algebra kernels: determinants and sparse row echelon forms over the rationals."""
from __future__ import annotations

import logging
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import sympy

from src.algebra import is_zero
from src.errors import DomainError

logger = logging.getLogger(__name__)

SparseVector = Dict[int, Fraction]


def bareiss_det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Fraction-free determinant of a rational matrix."""
    size = len(rows)
    if size == 0:
        return Fraction(1)
    matrix = sympy.Matrix(
        size, size, lambda i, j: sympy.Rational(Fraction(rows[i][j]).numerator, Fraction(rows[i][j]).denominator)
    )
    value = sympy.Rational(matrix.det(method="bareiss"))
    return Fraction(int(value.p), int(value.q))


def berkowitz_det(rows: Sequence[Sequence[object]], one):
    """
    Division-free determinant over any commutative ring (used for truncated
    time polynomials, where Gaussian pivots need not be units).
    """
    size = len(rows)
    if size == 0:
        return one
    zero = one - one
    vect = [one]
    for r in range(size):
        a = rows[r][r]
        row_part = [rows[r][k] for k in range(r)]
        v = [rows[i][r] for i in range(r)]
        col = [one, -a]
        for _ in range(r):
            acc = zero
            for x, y in zip(row_part, v):
                acc = acc + x * y
            col.append(-acc)
            v = [sum((rows[i][k] * v[k] for k in range(r)), zero) for i in range(r)]
        vect = [
            sum((col[i - k] * vect[k] for k in range(min(i, r) + 1) if i - k < len(col)), zero)
            for i in range(r + 2)
        ]
    det = vect[size]
    return det if size % 2 == 0 else -det


class Echelon:
    """
    Fully reduced row echelon form of sparse rational vectors. The pivot of a
    row is its minimal position; pivot entries are 1 and every other row
    vanishes at each pivot. Each row remembers its combination of the inputs.
    """

    def __init__(self):
        self.rows: Dict[int, SparseVector] = {}
        self.combos: Dict[int, SparseVector] = {}
        self._count = 0

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self.rows)

    def reduce(self, vec: SparseVector, combo: Optional[SparseVector] = None):
        vec = {p: c for p, c in vec.items() if c}
        combo = dict(combo or {})
        for p, row in self.rows.items():
            c = vec.get(p)
            if not c:
                continue
            for q, x in row.items():
                vec[q] = vec.get(q, 0) - c * x
                if not vec[q]:
                    del vec[q]
            for q, x in self.combos[p].items():
                combo[q] = combo.get(q, 0) - c * x
        return vec, {q: x for q, x in combo.items() if x}

    def contains(self, vec: SparseVector) -> bool:
        return not self.reduce(vec)[0]

    def add(self, vec: SparseVector, strict: bool = True) -> bool:
        """Insert a vector; dependent input raises DomainError when `strict`, else returns False."""
        index = self._count
        self._count += 1
        rem, combo = self.reduce(vec, {index: Fraction(1)})
        if not rem:
            if strict:
                raise DomainError(f"dependent generators: combination {sorted(combo.items())} vanishes")
            return False
        pivot = min(rem)
        scale = 1 / rem[pivot]
        rem = {q: x * scale for q, x in rem.items()}
        combo = {q: x * scale for q, x in combo.items()}
        for p in list(self.rows):
            c = self.rows[p].get(pivot)
            if not c:
                continue
            row = dict(self.rows[p])
            for q, x in rem.items():
                row[q] = row.get(q, 0) - c * x
            self.rows[p] = {q: x for q, x in row.items() if x}
            mix = dict(self.combos[p])
            for q, x in combo.items():
                mix[q] = mix.get(q, 0) - c * x
            self.combos[p] = {q: x for q, x in mix.items() if x}
        self.rows[pivot] = rem
        self.combos[pivot] = combo
        return True


def solve_unitriangular(columns: Dict[int, Dict[int, object]], target: Dict[int, object], zero):
    """
    Eliminate `target` against columns keyed by their top position (entry 1 there,
    other entries strictly below). Sweeps positions from the top down and returns
    the residual restricted to positions without a column.
    """
    vec = dict(target)
    for p in sorted(columns, reverse=True):
        c = vec.get(p)
        if c is None or is_zero(c):
            continue
        for q, x in columns[p].items():
            vec[q] = vec.get(q, zero) - c * x
    return {q: x for q, x in vec.items() if q not in columns}


def _constant_part(x) -> Fraction:
    return x.constant_term if hasattr(x, "constant_term") else Fraction(x)


def solve_unit_pivots(rows: Sequence[Sequence[object]], rhs: Sequence[Sequence[object]]):
    """
    Solve A X = B over truncated time polynomials, where A(0) is invertible.
    Pivots are chosen with non-zero constant term, so each one is a unit of
    the truncated ring. Returns the columns of X.
    """
    size = len(rows)
    work = [list(rows[r]) + list(rhs[r]) for r in range(size)]
    width = len(work[0]) if work else 0
    for c in range(size):
        pivot = next((r for r in range(c, size) if _constant_part(work[r][c])), None)
        if pivot is None:
            raise DomainError("projection onto V+ is singular at s = 0 (point outside the big cell)")
        work[c], work[pivot] = work[pivot], work[c]
        inv = work[c][c].inverse()
        work[c] = [x * inv for x in work[c]]
        for r in range(size):
            if r == c or is_zero(work[r][c]):
                continue
            factor = work[r][c]
            work[r] = [x - factor * y for x, y in zip(work[r], work[c])]
    return [[work[r][k] for r in range(size)] for k in range(size, width)]
