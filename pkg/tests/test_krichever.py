from fractions import Fraction

import pytest
import sympy

from src.corpus import KRICHEVER_WINDOW, perturbed_ring
from src.errors import CertificationError, DomainError, SchemaError
from src.grassmannian import index, scale
from src.krichever import (
    X,
    RationalCurveData,
    build_A,
    build_B,
    check_module_closure,
    check_ring_closure,
    expand_at,
    find_zeta,
    function_basis,
    moduli_equations_ba,
    plus_approximation,
    residue_check,
    residue_sum,
)
from src.tau import omega_plus


def test_curve_validation():
    with pytest.raises(DomainError):
        RationalCurveData((Fraction(0), Fraction(0)))
    with pytest.raises(DomainError):
        RationalCurveData((Fraction(1),), ((Fraction(1), Fraction(2)),))
    with pytest.raises(DomainError):
        RationalCurveData((None,), rank=0)


def test_curve_json():
    data = RationalCurveData.from_json({"points": ["0", "inf"], "bundle": {"r": 2, "d": 1, "twist_at": "1"}})
    assert data.points == (Fraction(0), None)
    assert (data.rank, data.degree, data.twist_at) == (2, 1, Fraction(1))
    assert RationalCurveData.from_json(data.to_json()) == data
    with pytest.raises(SchemaError):
        RationalCurveData.from_json({"points": ["inf"], "nodes": [["inf", "1"]]})
    with pytest.raises(SchemaError):
        RationalCurveData.from_json({"points": ["0", "inf"], "bundle": {"d": 1}})
    with pytest.raises(SchemaError):
        RationalCurveData.from_json({"nodes": []})


def test_invariants(curves):
    cubic = curves["nodal_cubic"]
    assert cubic.genus == 1
    assert cubic.a_index == 0
    assert RationalCurveData((None,), ((Fraction(1), Fraction(-1)),), rank=2, degree=3, twist_at=Fraction(0)).b_index == 3


def test_local_expansions():
    assert expand_at(1 / (1 - X), Fraction(0), 0, 4) == {0: 1, 1: 1, 2: 1, 3: 1}
    assert expand_at(X**2 + X, None, -3, 2) == {-2: 1, -1: 1}
    assert expand_at(1 / X, Fraction(0), -1, 2) == {-1: 1}
    with pytest.raises(CertificationError):
        expand_at(X**2, None, -1, 2)


def test_function_basis_respects_nodes(curves):
    basis = function_basis(curves["nodal_cubic"], 3)
    assert len(basis) == 3
    for f in basis:
        assert sympy.simplify(f.subs(X, 1) - f.subs(X, -1)) == 0


def test_ring_of_the_two_point_curve(curves):
    A = build_A(curves["zero_infinity"], KRICHEVER_WINDOW)
    assert A.declared_index == 1
    assert index(A) == 1
    report = check_ring_closure(A)
    assert report.holds
    assert report.details["unit"]
    assert report.certificates["certified_below"] > 0


def test_ring_of_the_nodal_cubic(curves):
    A = build_A(curves["nodal_cubic"], KRICHEVER_WINDOW)
    assert A.declared_index == 0
    assert check_ring_closure(A).holds


def test_twisted_module():
    data = RationalCurveData((Fraction(0), None), rank=2, degree=1, twist_at=Fraction(1))
    A, B = build_A(data, KRICHEVER_WINDOW), build_B(data, KRICHEVER_WINDOW)
    assert B.n == 4
    assert B.declared_index == data.b_index == 3
    assert check_module_closure(A, B).holds


def test_window_must_straddle_zero(curves):
    with pytest.raises(CertificationError):
        build_A(curves["zero_infinity"], (0, 5))
    with pytest.raises(CertificationError):
        build_A(curves["zero_infinity"], (-3, 2))


def test_perturbed_ring_is_not_closed():
    report = check_ring_closure(perturbed_ring())
    assert report.details["unit"]
    assert not report.holds
    assert report.first_nonzero is not None


def test_residue_sums(curves):
    data = curves["zero_infinity"]
    assert residue_sum(1 / X, sympy.Integer(1), data) == 0
    assert residue_sum(X**2, 1 / X**3, data) == 0
    with pytest.raises(DomainError):
        residue_sum(1 / X, sympy.Integer(1), RationalCurveData((Fraction(0),)))
    with pytest.raises(DomainError):
        residue_sum(1 / (X - 5), sympy.Integer(1), data)
    assert residue_check(data).holds
    assert residue_check(curves["nodal_cubic"]).holds


def test_plus_approximation_index(curves):
    for name, data in curves.items():
        A_plus = plus_approximation(build_A(data, KRICHEVER_WINDOW))
        assert index(A_plus) == 1 - data.genus - data.n, name
        zeta = find_zeta(A_plus)
        assert zeta.total_order() == index(A_plus)
        assert omega_plus(scale(A_plus, zeta)) != 0


def test_ba_form_of_the_closure_equations(curves):
    A = build_A(curves["zero_infinity"], KRICHEVER_WINDOW)
    report = moduli_equations_ba(A, A, 2)
    assert report.holds, report.first_nonzero
    assert report.details["agree"]
    assert report.details["ba"] == {"unit": True, "ring": True, "module": True}


def test_ba_form_detects_the_perturbed_ring():
    bad = perturbed_ring()
    report = moduli_equations_ba(bad, bad, 2)
    assert not report.details["ba"]["ring"]
    assert not report.details["closure"]["ring"]
