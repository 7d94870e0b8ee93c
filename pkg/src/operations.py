"""Payload builders shared by the CLI and the HTTP routers: JSON in, (payload, verdict) out."""
from __future__ import annotations

from typing import Any, Dict, List, Optional, Tuple

from src.baker_akhiezer import adjoint_ba, ba_function, bilinear_residue, wave_matrix
from src.corpus import run_corpus
from src.errors import SchemaError
from src.grassmannian import GrassPoint
from src.krichever import (
    RationalCurveData,
    build_A,
    build_B,
    check_module_closure,
    check_ring_closure,
    moduli_equations_ba,
    residue_check,
)
from src.nkp import (
    check_lax,
    check_linear_system,
    djkm_check,
    dual_wave_operator,
    lax_system,
    sato_point_from_wave,
    wave_from_point,
    wave_operator,
    wronskian_ba_check,
)
from src.psido import PsiDO, pdo_adjoint, pdo_compose, pdo_invert
from src.tau import MiwaPoint, tau_addition_formula, tau_at_miwa, tau_series

Outcome = Tuple[Dict[str, Any], bool]


def tau(point, degree: int, miwa=None, where: str = "point") -> Outcome:
    U = GrassPoint.from_json(point, where)
    if miwa is not None:
        t = MiwaPoint(miwa)
        return {"tau": str(tau_at_miwa(U, t)), "addition_formula": str(tau_addition_formula(U, t))}, True
    return {"tau": tau_series(U, degree).to_json()}, True


def ba(point, degree: int, window: Optional[int] = None, adjoint: bool = False, matrix: bool = False, where: str = "point") -> Outcome:
    U = GrassPoint.from_json(point, where)
    if matrix:
        w = wave_matrix(U, degree, window)
    elif adjoint:
        w = adjoint_ba(U, degree, window)
    else:
        w = ba_function(U, degree, window)
    return {"wave": w.to_json()}, True


def bilinear(u, uprime, degree: int, where: Tuple[str, str] = ("u", "uprime")) -> Outcome:
    res = bilinear_residue(GrassPoint.from_json(u, where[0]), GrassPoint.from_json(uprime, where[1]), degree)
    return {"bilinear": res.to_json()}, res.vanishes


def pdo(action: str, op, degree: int, floor: int, other=None, where: Tuple[str, str] = ("op", "other")) -> Outcome:
    P = PsiDO.from_json(op, degree, where[0])
    if action == "compose":
        if other is None:
            raise SchemaError("compose needs a second operator", where[1])
        result = pdo_compose(P, PsiDO.from_json(other, degree, where[1]), floor)
    elif action == "adjoint":
        result = pdo_adjoint(P, floor)
    elif action == "invert":
        result = pdo_invert(P, floor)
    else:
        raise SchemaError(f"unknown action {action!r}", "action")
    return {"operator": result.to_json()}, True


def nkp(action: str, point, degree: int, floor: int, imax: int = 2, where: str = "point") -> Outcome:
    U = GrassPoint.from_json(point, where)
    w = wave_from_point(U, degree)
    P = wave_operator(w)
    if action == "check":
        system = lax_system(P, floor)
        lax, linear = check_lax(system, imax, degree), check_linear_system(w, system, degree, imax)
        return {"lax": lax.model_dump(), "linear_system": linear.model_dump()}, lax.holds and linear.holds
    if action == "sato":
        back = sato_point_from_wave(w, degree)
        same = back.to_json() == U.to_json()
        return {"point": back.to_json(), "roundtrip": same}, same
    if action == "djkm":
        report = djkm_check(P, dual_wave_operator(P, -1 - degree), degree)
        return {"djkm": report.model_dump()}, report.holds
    raise SchemaError(f"unknown action {action!r}", "action")


def wronskian(point, degree: int, where: str = "point") -> Outcome:
    report = wronskian_ba_check(GrassPoint.from_json(point, where), degree)
    return {"wronskian": report.model_dump()}, report.holds


def krichever(curve, window: Tuple[int, int], degree: Optional[int] = None, where: str = "curve") -> Outcome:
    data = RationalCurveData.from_json(curve, where)
    A, B = build_A(data, window), build_B(data, window)
    ring, module, residues = check_ring_closure(A), check_module_closure(A, B), residue_check(data)
    payload = {
        "curve": data.to_json(),
        "A": A.to_json(),
        "B": B.to_json(),
        "index": {"A": A.declared_index, "B": B.declared_index, "expected_B": data.b_index},
        "ring_closure": ring.model_dump(),
        "module_closure": module.model_dump(),
        "residue_sum": residues.model_dump(),
    }
    ok = ring.holds and module.holds and residues.holds
    if degree is not None:
        moduli = moduli_equations_ba(A, B, degree)
        payload["moduli_equations"] = moduli.model_dump()
        ok = ok and moduli.holds
    return payload, ok


def corpus(only: Optional[List[str]], seed: int, workers: int) -> Outcome:
    report = run_corpus(only, seed, workers)
    return {"corpus": report.model_dump()}, report.holds
