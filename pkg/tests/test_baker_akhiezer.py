from fractions import Fraction

import pytest

from src.algebra import TimePoly, VectorLaurent
from src.baker_akhiezer import (
    adjoint_ba,
    ba_function,
    bilinear_residue,
    membership_check,
    tau_ratio_mismatches,
    res_pair,
    wave_matrix,
)
from src.corpus import random_corpus, rank_one, shifted_vacuum, two_component
from src.errors import CertificationError, DomainError
from src.grassmannian import GrassPoint
from tests.helpers import s


def test_vacuum_wave_is_the_exponential():
    w = ba_function(GrassPoint.vacuum(2), 3)
    assert set(w.coeffs) == {(0, 1), (0, 2)}
    assert all(c == TimePoly.const(1) for c in w.coeffs.values())


def test_rank_one_wave():
    D = 3
    w = ba_function(rank_one(2), D)
    assert w.coefficient(0, 1) == TimePoly.const(1)
    assert w.coefficient(-1, 1) * (TimePoly.const(2, D) - s(1, D=D)) == TimePoly.const(1)
    assert w.to_json()["exp_sign"] == 1


def test_adjoint_wave_uses_the_annihilator():
    D = 3
    w = adjoint_ba(rank_one(2), D)
    assert w.exp_sign == -1
    assert w.coefficient(-1, 1) * (s(1, D=D) - 2) == TimePoly.const(1)


def test_spectral_window_cuts_low_powers():
    w = ba_function(rank_one(2), 3, K=0)
    assert w.coefficient(0, 1) == TimePoly.const(1)
    with pytest.raises(CertificationError):
        w.coefficient(-1, 1)


def test_nonzero_index_goes_through_the_flag_generator():
    w = ba_function(shifted_vacuum(1, 1), 2)
    assert w.coeffs == {(-1, 1): TimePoly.const(1)}


def test_ba_function_rejects_matrix_points():
    with pytest.raises(DomainError):
        ba_function(GrassPoint.vacuum(4, shape=(2, 2)), 2)


def test_matrix_wave_is_monic():
    w = wave_matrix(two_component(), 2)
    assert w.shape == (2, 2)
    lead = w.matrix(0)
    for r in range(2):
        for c in range(2):
            assert lead[r][c] == TimePoly.const(1 if r == c else 0)


def test_residue_pairing():
    f = VectorLaurent.monomial(1, -1, 1)
    g = VectorLaurent(1, {(0, 1): Fraction(5), (3, 1): Fraction(1)})
    assert res_pair(f, g) == 5
    with pytest.raises(CertificationError):
        res_pair(f, VectorLaurent(1, {}, None, -3))


def test_bilinear_residue_detects_inclusion():
    U = rank_one(2)
    assert bilinear_residue(U, U, 3).vanishes
    assert bilinear_residue(U, shifted_vacuum(1, 1), 3).vanishes
    res = bilinear_residue(U, rank_one(3), 3)
    assert not res.vanishes
    assert res.witness() is not None
    assert res.to_json()["vanishes"] is False


def test_bilinear_residue_two_components():
    U = two_component()
    assert bilinear_residue(U, U, 2).vanishes
    assert not bilinear_residue(U, GrassPoint.vacuum(2), 2).vanishes


@pytest.mark.parametrize("make", [lambda: rank_one(2), two_component, lambda: shifted_vacuum(2, 1)])
def test_tau_psi_lies_in_the_point(make):
    outcome = membership_check(make(), 3)
    assert outcome["holds"], outcome["failures"][:1]
    assert outcome["checked"] > 0
    assert outcome["tau_ratio_mismatches"] == []


@pytest.mark.parametrize("k", range(4))
def test_tau_ratio_matches_the_wave_diagonal(k):
    U = random_corpus(5, count=4)[k]
    checked, mismatches = tau_ratio_mismatches(U, 3)
    assert checked >= U.n
    assert mismatches == []
    assert membership_check(U, 3)["holds"]
