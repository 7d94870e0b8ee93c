from fractions import Fraction

import pytest

from src.algebra import TimePoly
from src.errors import DomainError
from src.linalg import Echelon, bareiss_det, berkowitz_det, solve_unit_pivots
from tests.helpers import s


def test_determinants_agree_on_rationals(rng):
    for size in range(1, 5):
        rows = [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(size)] for _ in range(size)]
        assert berkowitz_det(rows, Fraction(1)) == bareiss_det(rows)


def test_empty_determinant_is_one():
    assert bareiss_det([]) == 1
    assert berkowitz_det([], TimePoly.const(1)) == TimePoly.const(1)


def test_berkowitz_over_time_polynomials():
    D = 3
    rows = [[s(1, D=D), TimePoly.const(1, D)], [TimePoly.const(2, D), s(2, D=D)]]
    assert berkowitz_det(rows, TimePoly.const(1, D)) == s(1) * s(2) - 2


def test_echelon_is_fully_reduced():
    ech = Echelon()
    ech.add({0: Fraction(2), 1: Fraction(2)})
    ech.add({1: Fraction(1), 2: Fraction(1)})
    assert ech.pivots == [0, 1]
    assert ech.rows[0] == {0: Fraction(1), 2: Fraction(-1)}
    assert ech.contains({0: Fraction(1), 1: Fraction(2), 2: Fraction(1)})
    assert not ech.contains({2: Fraction(1)})


def test_dependent_input():
    ech = Echelon()
    ech.add({0: Fraction(1)})
    with pytest.raises(DomainError):
        ech.add({0: Fraction(3)})
    assert ech.add({0: Fraction(3)}, strict=False) is False


def test_solve_unit_pivots():
    D = 2
    one = TimePoly.const(1, D)
    rows = [[one + s(1, D=D), TimePoly.zero(D)], [TimePoly.zero(D), one]]
    rhs = [[one], [s(1, D=D)]]
    (x,) = solve_unit_pivots(rows, rhs)
    assert x[0] * (one + s(1, D=D)) == one
    assert x[1] == s(1)


def test_singular_projection_is_outside_the_big_cell():
    with pytest.raises(DomainError):
        solve_unit_pivots([[s(1, D=2)]], [[TimePoly.const(1, 2)]])
