import random
from fractions import Fraction

import pytest

from src.algebra import TimeIndex, TimePoly
from src.corpus import random_operator
from src.errors import CertificationError, DomainError, SchemaError
from src.psido import (
    PsiDO,
    binomial,
    commutator,
    constant_matrix,
    pdo_adjoint,
    pdo_compose,
    pdo_conjugate,
    pdo_diff,
    pdo_invert,
    pdo_split,
)
from tests.helpers import s

D = 3


def one() -> TimePoly:
    return TimePoly.const(1, D)


def scalar_op(terms) -> PsiDO:
    return PsiDO(1, {order: [[c]] for order, c in terms.items()})


def test_generalized_binomial():
    assert binomial(-1, 3) == -1
    assert binomial(-2, 2) == 3
    assert binomial(3, 4) == 0


def test_leibniz_rule():
    x = s(1, D=D)
    assert pdo_compose(PsiDO.d(1, D), scalar_op({0: x})) == scalar_op({1: x, 0: one()})
    inverse_side = pdo_compose(PsiDO.d(1, D, power=-1), scalar_op({0: x}), floor=-3)
    assert inverse_side == scalar_op({-1: x, -2: -one()})
    assert inverse_side.floor == -3


def test_d_acts_on_every_first_time():
    x = s(1, 1, D) + s(1, 2, D)
    P = pdo_compose(PsiDO.d(2, D), PsiDO(2, {0: [[x, TimePoly.zero(D)], [TimePoly.zero(D), x]]}))
    assert P.coefficient(0)[0][0] == TimePoly.const(2)


def test_inverse_is_two_sided():
    P = scalar_op({0: one(), -1: s(1, D=D), -2: one() * 3})
    Q = pdo_invert(P, -4)
    assert Q.floor == -4
    assert (pdo_compose(P, Q, -4) - PsiDO.identity(1, D)).is_zero()
    assert (pdo_compose(Q, P, -4) - PsiDO.identity(1, D)).is_zero()


def test_matrix_inverse():
    P = PsiDO(2, {0: constant_matrix([[1, 2], [0, 1]], D), -1: [[s(1, D=D), one()], [one(), s(1, 2, D)]]})
    Q = pdo_invert(P, -3)
    assert (pdo_compose(P, Q, -3) - PsiDO.identity(2, D)).is_zero()


def test_inverse_needs_a_floor():
    with pytest.raises(DomainError):
        pdo_invert(scalar_op({0: one(), -1: s(1, D=D)}))
    exact = pdo_invert(PsiDO(2, {0: constant_matrix([[2, 0], [0, 4]], D)}))
    assert exact.floor is None
    assert exact.coefficient(0)[1][1] == TimePoly.const(Fraction(1, 4))


def test_singular_leading_term():
    with pytest.raises(DomainError):
        pdo_invert(PsiDO(2, {0: constant_matrix([[1, 0], [0, 0]], D)}), -2)


def test_adjoint():
    assert pdo_adjoint(PsiDO.d(1, D)) == PsiDO.d(1, D).scale(-1)
    P = PsiDO(2, {1: [[s(1, D=D), one()], [TimePoly.zero(D), one()]], 0: constant_matrix([[0, 1], [2, 0]], D)})
    assert pdo_adjoint(pdo_adjoint(P)) == P
    Q = PsiDO(2, {0: [[one(), s(1, 2, D)], [s(2, D=D), one()]]})
    left = pdo_adjoint(pdo_compose(P, Q))
    right = pdo_compose(pdo_adjoint(Q), pdo_adjoint(P))
    assert left == right


def test_split_and_commutator():
    P = scalar_op({1: one(), 0: s(1, D=D), -1: one()})
    plus, minus = pdo_split(P)
    assert sorted(plus.terms) == [0, 1]
    assert sorted(minus.terms) == [-1]
    assert commutator(PsiDO.d(1, D), PsiDO.d(1, D)).is_zero()


def test_floor_bounds_the_coefficients():
    P = pdo_invert(scalar_op({0: one(), -1: s(1, D=D)}), -2)
    with pytest.raises(CertificationError):
        P.coefficient(-3)


def test_operator_json():
    P = PsiDO(1, {0: [[one()]], -1: [[s(1, D=D)]]}, -2)
    assert PsiDO.from_json(P.to_json(), D) == P
    with pytest.raises(SchemaError):
        PsiDO.from_json({"n": 2, "terms": [[0, [["1"]]]]})
    with pytest.raises(SchemaError):
        PsiDO.from_json([1, 2])


def test_truncated_derivatives_cap_the_floor():
    x = s(1, D=1)
    P = pdo_compose(PsiDO.d(1, 1, power=-1), scalar_op({0: x}))
    assert P.floor == -2
    assert P == scalar_op({-1: x, -2: -TimePoly.const(1, 1)})
    assert pdo_adjoint(scalar_op({-1: x})).floor == -2
    assert pdo_invert(scalar_op({0: TimePoly.const(1, 1), -1: x}), -5).floor == -2


def test_exact_coefficients_stay_exact():
    P = pdo_compose(PsiDO.d(1, power=-1), scalar_op({0: s(1)}))
    assert P.floor is None
    assert P == scalar_op({-1: s(1), -2: -TimePoly.const(1)})


def test_truncated_leading_coefficient_is_refused():
    with pytest.raises(CertificationError):
        pdo_diff(scalar_op({0: TimePoly.const(1, 0)}), TimeIndex(1, 1))


def test_time_derivative_caps_the_floor():
    P = PsiDO(1, {0: [[one()]], -1: [[s(1, D=D)]], -2: [[TimePoly.const(2, 0)]]})
    dP = pdo_diff(P, TimeIndex(1, 1))
    assert dP.floor == -1
    assert dP.coefficient(-1)[0][0] == TimePoly.const(1)
    assert pdo_diff(PsiDO.d(2, D), TimeIndex(2, 1)).is_zero()


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_time_derivative_product_rule(seed):
    rng = random.Random(seed)
    n = rng.choice([1, 2])
    P = random_operator(rng, n, D)
    Q = random_operator(rng, n, D) + PsiDO.d(n, D)
    for x in (TimeIndex(1, 1), TimeIndex(1, n)):
        left = pdo_diff(pdo_compose(P, Q, -4), x)
        right = pdo_compose(pdo_diff(P, x), Q, -4) + pdo_compose(P, pdo_diff(Q, x), -4)
        assert left == right


@pytest.mark.parametrize("rows", [[[0, 0], [0, 0]], [[1, 2], [0, 3]], [[-1, 0], [5, 2]]])
def test_constant_coefficient_units_fix_d(rows):
    identity = constant_matrix([[1, 0], [0, 1]])
    P = PsiDO(2, {0: identity, -1: constant_matrix(rows)})
    assert pdo_conjugate(P, PsiDO.d(2), -5) == PsiDO.d(2)


def test_conjugation_by_a_varying_unit_deforms_d():
    P = scalar_op({0: TimePoly.const(1), -1: s(1)})
    conj = pdo_conjugate(P, PsiDO.d(1), -3)
    assert conj.coefficient(1)[0][0] == TimePoly.const(1)
    assert conj.coefficient(0)[0][0].is_zero()
    assert conj.coefficient(-1)[0][0] == TimePoly.const(-1)
    assert conj.floor == -2
