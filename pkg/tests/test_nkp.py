import pytest

from src.baker_akhiezer import ba_function
from src.corpus import djkm_witness, rank_one, shifted_vacuum, two_component
from src.errors import DomainError
from src.grassmannian import GrassPoint, index
from src.nkp import (
    algebra_relations,
    b_op,
    check_lax,
    check_linear_system,
    derivative_point,
    djkm_check,
    dual_wave_operator,
    gauge_check,
    lax_system,
    sato_point_from_wave,
    wave_from_point,
    wave_operator,
    wronskian_ba_check,
    wronskian_determinant,
    wronskian_embed,
)
from src.psido import PsiDO, constant_matrix, pdo_adjoint, pdo_compose, pdo_split
from tests.helpers import s

D = 4
FLOOR = -3

POINTS = {
    "rank_one": lambda: rank_one(2),
    "two_component": two_component,
    "vacuum": lambda: GrassPoint.vacuum(2),
}


@pytest.fixture(params=sorted(POINTS))
def wave(request):
    return wave_from_point(POINTS[request.param](), D)


def test_wave_operator_is_monic(wave):
    P = wave_operator(wave)
    assert P.order == 0
    assert P.is_monic()


def test_lax_algebra_and_equations(wave):
    system = lax_system(wave_operator(wave), FLOOR)
    assert algebra_relations(system).holds
    report = check_lax(system, 2, D)
    assert report.holds, report.first_nonzero
    assert report.checked > 0


def test_linear_system(wave):
    system = lax_system(wave_operator(wave), FLOOR)
    report = check_linear_system(wave, system, D)
    assert report.holds, report.first_nonzero


def test_first_flow_is_d_times_projector(wave):
    system = lax_system(wave_operator(wave), FLOOR)
    B = b_op(system, 1, 1)
    assert B.order == 1
    with pytest.raises(DomainError):
        b_op(system, 0, 1)


@pytest.mark.parametrize("i", [1, 2])
def test_flow_generator_bracketings_agree(wave, i):
    system = lax_system(wave_operator(wave), FLOOR)
    for j in range(1, system.n + 1):
        B = b_op(system, i, j)
        LC = pdo_compose(system.L, system.C[j - 1])
        power = LC
        for _ in range(i - 1):
            power = pdo_compose(power, LC)
        assert pdo_split(power)[0] == B
        assert B.order == i


@pytest.mark.parametrize("name", ["rank_one", "two_component"])
def test_sato_roundtrip(name):
    U = POINTS[name]()
    back = sato_point_from_wave(wave_from_point(U, D), D)
    assert back.to_json() == U.to_json()


def test_wave_needs_index_zero():
    with pytest.raises(DomainError):
        wave_from_point(shifted_vacuum(1, 1), 2)


def test_lax_system_needs_monic_operator():
    with pytest.raises(DomainError):
        lax_system(PsiDO.d(1, D), FLOOR)


def test_dual_wave_operator_satisfies_the_bilinear_lemma():
    degree = 3
    P = wave_operator(wave_from_point(two_component(), degree))
    report = djkm_check(P, dual_wave_operator(P, -1 - degree), degree)
    assert report.details["hypothesis"]
    assert report.details["conclusion"]
    assert report.holds


def test_bilinear_lemma_contrapositive():
    degree = 3
    P, Q = djkm_witness(2, degree)
    report = djkm_check(P, Q, degree)
    assert not report.details["hypothesis"]
    assert not report.details["conclusion"]
    assert report.details["conclusion_witness"]["order"] == -1
    assert report.holds


@pytest.mark.parametrize("degree", [3, 5, 8])
def test_wave_operator_times_its_adjoint_has_no_minus_part(degree):
    P = wave_operator(wave_from_point(rank_one(2), degree))
    product = pdo_compose(P, pdo_adjoint(P))
    assert product.floor is not None
    assert pdo_split(product)[1].is_zero()
    report = djkm_check(P, P, degree)
    assert report.details["conclusion"]


def test_gauge_invariance():
    P = wave_operator(wave_from_point(two_component(), D))
    G = PsiDO(2, {0: constant_matrix([[1, 0], [0, 1]], D), -1: constant_matrix([[2, 0], [0, -1]], D)})
    assert gauge_check(P, G, FLOOR).holds
    mixing = PsiDO(2, {0: constant_matrix([[1, 1], [0, 1]], D)})
    with pytest.raises(DomainError):
        gauge_check(P, mixing, FLOOR)


def test_derivative_point():
    assert index(derivative_point(rank_one(2))) == 1
    assert derivative_point(GrassPoint.vacuum(1)).to_json() == GrassPoint.vacuum(1).to_json()


def test_wronskian_embedding_of_the_vacuum():
    point, blocks = wronskian_embed(GrassPoint.vacuum(2))
    assert blocks == [0, 0]
    assert point.n == 4
    assert point.to_json() == GrassPoint.vacuum(4).to_json()


def test_vacuum_wronskian_determinant():
    det = wronskian_determinant(ba_function(GrassPoint.vacuum(2), 3), 3)
    assert det[0] == s(1, 2) - s(1, 1)
    assert det[1] == (s(2, 2) - s(2, 1)) * 2
    assert det[2] == (s(3, 2) - s(3, 1)) * 3


def test_wronskian_ba_check():
    report = wronskian_ba_check(two_component(), 3)
    assert report.holds, report.details.get("failures")
    assert report.details["embedded_index"] == sum(report.details["block_indices"])
