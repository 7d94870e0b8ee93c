import random
from fractions import Fraction

import pytest

from src.algebra import TimeIndex, TimePoly
from src.corpus import random_corpus, random_miwa, random_plus_point, rank_one, shifted_vacuum, two_component
from src.errors import DomainError, SchemaError
from src.grassmannian import GrassPoint
from src.tau import (
    MiwaPoint,
    miwa_map,
    omega_plus,
    tau_addition_formula,
    tau_at_miwa,
    tau_degree_bound,
    tau_exact,
    tau_series,
)
from tests.helpers import s


@pytest.mark.parametrize("n", [1, 2, 3])
def test_vacuum_tau_is_one(n):
    tau = tau_series(GrassPoint.vacuum(n), 4)
    assert tau.value == TimePoly.const(1)
    assert tau.normalization == 1
    assert tau.certificate["exact"]


def test_rank_one_tau():
    U = rank_one(2)
    assert tau_exact(U) == TimePoly.const(2) - s(1)
    assert tau_degree_bound(U) == 1
    assert omega_plus(U) == 2
    tau = tau_series(U, 3)
    assert tau.certificate["stable"] and tau.certificate["exact"]
    assert tau.to_json()["text"] == "2 + -1*s11"


def test_tau_needs_index_zero():
    with pytest.raises(DomainError):
        tau_series(shifted_vacuum(1, 1), 2)


def test_group_law_on_times():
    D = 3
    times = {TimeIndex(i, 1): s(i, D=D) + s(i, D=D, ns="s'") for i in range(1, D + 1)}
    value = tau_series(rank_one(2), D, times).value
    assert value == TimePoly.const(2) - s(1) - s(1, ns="s'")


def test_miwa_map():
    t = MiwaPoint(((Fraction(1), Fraction(2)), (Fraction(3), Fraction(-1))))
    s_values = miwa_map(t, 2)
    assert s_values[TimeIndex(1, 1)] == 4
    assert s_values[TimeIndex(2, 2)] == Fraction(5, 2)


def test_tau_at_miwa_and_addition_formula_agree_up_to_a_constant():
    U = rank_one(2)
    t1 = MiwaPoint(((Fraction(3),), (Fraction(5),)))
    t2 = MiwaPoint(((Fraction(1, 2),), (Fraction(7),)))
    assert tau_at_miwa(U, t1) == -6
    ratios = {tau_addition_formula(U, t) / tau_at_miwa(U, t) for t in (t1, t2)}
    assert len(ratios) == 1 and 0 not in ratios


def test_two_component_addition_formula_ratio():
    U = two_component()
    points = [
        MiwaPoint(((Fraction(2), Fraction(3)), (Fraction(5), Fraction(7)))),
        MiwaPoint(((Fraction(11), Fraction(13)), (Fraction(17), Fraction(19)))),
    ]
    ratios = set()
    for t in points:
        lhs, rhs = tau_at_miwa(U, t), tau_addition_formula(U, t)
        assert (lhs == 0) == (rhs == 0)
        if lhs:
            ratios.add(rhs / lhs)
    assert len(ratios) == 1 and 0 not in ratios
    assert omega_plus(U) == -2


def test_repeated_miwa_values():
    with pytest.raises(DomainError):
        tau_addition_formula(rank_one(2), MiwaPoint(((Fraction(3),), (Fraction(3),))))


def test_miwa_point_must_be_rectangular():
    with pytest.raises(SchemaError):
        MiwaPoint(((1, 2), (3,)))


def test_random_points_are_in_the_big_cell():
    for U in random_corpus(7, count=6):
        assert omega_plus(U) != 0
        assert tau_exact(U).constant_term == omega_plus(U)


def test_addition_formula_outside_the_big_cell():
    U = rank_one(0)
    assert omega_plus(U) == 0
    t1 = MiwaPoint(((Fraction(3),), (Fraction(5),)))
    t2 = MiwaPoint(((Fraction(1, 2),), (Fraction(7),)))
    assert tau_at_miwa(U, t1) == -8
    ratios = {tau_addition_formula(U, t) / tau_at_miwa(U, t) for t in (t1, t2)}
    assert len(ratios) == 1 and 0 not in ratios


@pytest.mark.parametrize("singular", [False, True])
def test_random_points_have_one_nonzero_ratio(singular):
    rng = random.Random(11)
    for _ in range(3):
        U = random_plus_point(rng, 2, 2, singular=singular)
        assert (omega_plus(U) == 0) is singular
        ratios = set()
        for _ in range(4):
            t = random_miwa(rng, max(2, U.tail_order, -min(U.lowest_exponent(), 0)), 2)
            lhs, rhs = tau_at_miwa(U, t), tau_addition_formula(U, t)
            assert (lhs == 0) == (rhs == 0)
            if lhs:
                ratios.add(rhs / lhs)
        assert len(ratios) == 1 and 0 not in ratios
