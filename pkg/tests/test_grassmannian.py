import random
from fractions import Fraction

import pytest
import sympy

from src.algebra import VectorLaurent
from src.corpus import random_corpus, rank_one, shifted_vacuum, two_component
from src.errors import CertificationError, DomainError, SchemaError
from src.grassmannian import (
    GrassPoint,
    contains,
    flag_generator,
    includes,
    index,
    normalize_index,
    perp,
    scale,
)


def test_canonical_form_shrinks_the_tail():
    gens = [VectorLaurent(1, {(-1, 1): Fraction(1), (0, 1): Fraction(1)}), VectorLaurent.monomial(1, -1, 1)]
    U = GrassPoint.plus(1, gens, 1)
    assert U.gens == ()
    assert U.tail_order == -1
    assert index(U) == 1


def test_dependent_generators_are_rejected():
    g = VectorLaurent.monomial(1, -1, 1)
    with pytest.raises(DomainError):
        GrassPoint.plus(1, [g, g.scale(Fraction(2))], 1)


def test_declared_index_must_match():
    data = {"n": 1, "kind": "plus", "generators": [], "tail_order": 0, "index": 1}
    with pytest.raises(SchemaError):
        GrassPoint.from_json(data)


def test_json_roundtrip_of_two_component_point():
    U = two_component()
    assert GrassPoint.from_json(U.to_json()).to_json() == U.to_json()
    assert index(U) == 0


def test_membership_and_inclusion():
    U = rank_one(2)
    assert contains(U, VectorLaurent(1, {(-1, 1): Fraction(3), (0, 1): Fraction(6), (4, 1): Fraction(1)}))
    assert not contains(U, VectorLaurent.monomial(1, 0, 1))
    assert includes(U, shifted_vacuum(1, 1))
    assert includes(U, U)
    assert not includes(U, rank_one(3))
    assert not includes(GrassPoint.vacuum(1), U)


def test_membership_needs_a_certified_vector():
    with pytest.raises(CertificationError):
        contains(rank_one(2), VectorLaurent(1, {(0, 1): Fraction(1)}, lo=-3))


def test_perp_of_rank_one():
    assert perp(rank_one(2)).to_json() == rank_one(-2).to_json()
    assert perp(perp(two_component())).to_json() == two_component().to_json()
    assert perp(GrassPoint.vacuum(2)).to_json() == GrassPoint.vacuum(2).to_json()


def test_perp_negates_the_index():
    W = shifted_vacuum(2, 1)
    assert index(W) == 2
    assert index(perp(W)) == -2


def test_flag_generator_orders():
    flag = flag_generator(5, 2)
    assert flag.zeta.coeffs == {(3, 1): Fraction(1), (2, 2): Fraction(1)}
    assert flag.zeta.total_order() == 5


def test_normalize_index_lands_on_the_vacuum():
    V, flag = normalize_index(shifted_vacuum(1, 2))
    assert flag.m == 2
    assert V.to_json() == GrassPoint.vacuum(1).to_json()


def test_scale_by_unit_series_keeps_index_shift():
    U = rank_one(2)
    w = VectorLaurent(1, {(1, 1): Fraction(1), (2, 1): Fraction(1)})
    assert index(scale(U, w)) == index(U) - 1
    with pytest.raises(DomainError):
        scale(U, VectorLaurent(1, {}))


def test_discrete_index_needs_a_window_around_zero():
    g = VectorLaurent.monomial(1, 0, 1)
    with pytest.raises(CertificationError):
        GrassPoint.discrete(1, [g], (0, 3), 1)
    P = GrassPoint.discrete(1, [g], (-2, 3))
    assert index(P) == 1 - 2


RANDOM_POINTS = random_corpus(17)


def combine(rng, vectors, n):
    coeffs = {}
    for v in vectors:
        c = Fraction(rng.randint(-3, 3))
        for key, x in v.coeffs.items():
            coeffs[key] = coeffs.get(key, Fraction(0)) + c * x
    return VectorLaurent(n, coeffs)


def spanned_by_brute_force(U, v) -> bool:
    """Rank test on the window [lowest exponent, tail order) with sympy."""
    lo = min(U.lowest_exponent(), min((a for a, _ in v.coeffs), default=0))
    keys = [(a, b) for a in range(lo, U.tail_order) for b in range(1, U.n + 1)]
    G = sympy.Matrix([[g.coeffs.get(k, 0) for g in U.gens] for k in keys]) if U.gens else sympy.zeros(len(keys), 0)
    column = sympy.Matrix([v.coeffs.get(k, 0) for k in keys])
    return G.rank() == G.row_join(column).rank()


@pytest.mark.parametrize("k", range(len(RANDOM_POINTS)))
def test_perp_is_an_involution_that_negates_the_index(k):
    U = RANDOM_POINTS[k]
    assert perp(perp(U)).to_json() == U.to_json()
    assert index(perp(U)) == -index(U)
    shift = VectorLaurent(U.n, {(-1, b): Fraction(1) for b in range(1, U.n + 1)})
    V = scale(U, shift)
    assert index(V) == U.n
    assert index(perp(V)) == -U.n
    assert perp(perp(V)).to_json() == V.to_json()


@pytest.mark.parametrize("k", range(8))
def test_contains_agrees_with_a_rank_test(k):
    U = RANDOM_POINTS[k]
    rng = random.Random(k)
    high = [VectorLaurent.monomial(U.n, U.tail_order + a, b) for a in range(2) for b in range(1, U.n + 1)]
    for _ in range(6):
        member = combine(rng, list(U.gens) + high, U.n)
        assert contains(U, member)
        assert spanned_by_brute_force(U, member)
        noise = VectorLaurent.monomial(U.n, rng.randint(U.lowest_exponent() - 1, U.tail_order - 1), rng.randint(1, U.n))
        other = combine(rng, [member, noise], U.n)
        assert contains(U, other) == spanned_by_brute_force(U, other)


@pytest.mark.parametrize("k", range(6))
def test_canonical_form_keeps_the_span(k):
    U = RANDOM_POINTS[k]
    rng = random.Random(100 + k)
    gens = list(U.gens)
    tails = [VectorLaurent.monomial(U.n, U.tail_order, b) for b in range(1, U.n + 1)]
    window = [(a, b) for a in range(U.lowest_exponent(), U.tail_order) for b in range(1, U.n + 1)]
    while True:
        mixed = [combine(rng, gens + tails, U.n) for _ in gens]
        if sympy.Matrix([[g.coeffs.get(key, 0) for key in window] for g in mixed]).rank() == len(gens):
            break
    W = GrassPoint.plus(U.n, mixed, U.tail_order)
    assert includes(U, W) and includes(W, U)
    assert W.to_json() == U.to_json()
    assert index(W) == index(U)
