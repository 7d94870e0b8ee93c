"""
Example catalog and the end-to-end verification run over it.

Named points are fixed; random plus-type points come from a seeded generator so
every run sees the same corpus.
"""
from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from src.algebra import TimePoly, VectorLaurent
from src.baker_akhiezer import ba_function, bilinear_residue, membership_check
from src.config import CORPUS_SEED, KP_WORKERS
from src.errors import KPError, SchemaError
from src.grassmannian import GrassPoint, includes
from src.krichever import (
    RationalCurveData,
    build_A,
    build_B,
    check_module_closure,
    check_ring_closure,
    moduli_equations_ba,
)
from src.nkp import (
    algebra_relations,
    check_lax,
    check_linear_system,
    djkm_check,
    dual_wave_operator,
    gauge_check,
    lax_system,
    record_operator,
    sato_point_from_wave,
    wave_from_point,
    wave_operator,
    wronskian_ba_check,
)
from src.psido import PsiDO, constant_matrix, pdo_adjoint, pdo_compose, pdo_invert
from src.report import Report
from src.tau import MiwaPoint, omega_plus, tau_addition_formula, tau_at_miwa, tau_series

logger = logging.getLogger(__name__)

KRICHEVER_WINDOW = (-6, 7)


# --- named points ---

def rank_one(c) -> GrassPoint:
    """span{u^-1 + c} + u E[[u]]; tau = c - s_11."""
    return GrassPoint.plus(1, [VectorLaurent(1, {(-1, 1): Fraction(1), (0, 1): Fraction(c)})], 1)


def two_component() -> GrassPoint:
    g1 = VectorLaurent(2, {(-1, 1): Fraction(1), (0, 2): Fraction(1)})
    g2 = VectorLaurent(2, {(-1, 2): Fraction(1), (0, 1): Fraction(2), (0, 2): Fraction(1)})
    return GrassPoint.plus(2, [g1, g2], 1)


def shifted_vacuum(n: int, L: int) -> GrassPoint:
    """u^-L E[[u]], which contains every point whose generators start at u^-L or later."""
    return GrassPoint.plus(n, [VectorLaurent.monomial(n, a, b) for a in range(-L, 0) for b in range(1, n + 1)], 0)


def named_points() -> Dict[str, GrassPoint]:
    return {
        "vacuum1": GrassPoint.vacuum(1),
        "vacuum2": GrassPoint.vacuum(2),
        "rank_one": rank_one(2),
        "rank_one_clash": rank_one(3),
        "p2": two_component(),
    }


def named_curves() -> Dict[str, RationalCurveData]:
    return {
        "zero_infinity": RationalCurveData((Fraction(0), None)),
        "nodal_cubic": RationalCurveData((None,), ((Fraction(1), Fraction(-1)),)),
    }


def perturbed_ring(window: Tuple[int, int] = KRICHEVER_WINDOW) -> GrassPoint:
    """The {0, inf} ring with (z, z^-1) replaced by (z + z^2, z^-1): index 1, not closed."""
    lo, hi = window
    gens = []
    for k in range(lo, -lo + 1):
        coeffs = {(k, 1): Fraction(1), (-k, 2): Fraction(1)}
        if k == 1:
            coeffs[(2, 1)] = Fraction(1)
        gens.append(VectorLaurent(2, coeffs, None, hi))
    return GrassPoint.discrete(2, gens, window, 1)


# --- random points ---

def random_plus_point(
    rng: random.Random, n: int, M: int, depth: int = 2, density: float = 0.5, singular: bool = False
) -> GrassPoint:
    """
    Index-0 plus-type point. Generator k leads with c_k u^a e_b (0 <= a < M), picks up
    random later plus-part monomials and a random tail of exponents in [-depth, 0).
    The plus block of these generators is triangular with diagonal c_k, so the point is
    in the big cell. With `singular` the first generator is a pure tail vector and the
    plus block loses rank: Omega_+ = 0 in every basis.
    """
    slots = [(a, b) for a in range(M) for b in range(1, n + 1)]
    gens = []
    for k, (a, b) in enumerate(slots):
        coeffs = {}
        for a2 in range(-depth, 0):
            for b2 in range(1, n + 1):
                if rng.random() < density:
                    coeffs[(a2, b2)] = Fraction(rng.randint(-3, 3))
        if singular and k == 0:
            coeffs[(-1, b)] = Fraction(1)
        else:
            coeffs[(a, b)] = Fraction(rng.choice([-2, -1, 1, 2, 3]))
            for later in slots[k + 1:]:
                if rng.random() < density:
                    coeffs[later] = Fraction(rng.choice([-2, -1, 1, 2]))
        gens.append(VectorLaurent(n, coeffs))
    return GrassPoint.plus(n, gens, M)


def random_corpus(seed: int = CORPUS_SEED, count: int = 20) -> List[GrassPoint]:
    rng = random.Random(seed)
    return [random_plus_point(rng, rng.choice([1, 2]), rng.choice([1, 2])) for _ in range(count)]


def singular_corpus(seed: int = CORPUS_SEED, count: int = 4) -> List[GrassPoint]:
    """Index-0 points outside the big cell: tau(0) = 0."""
    rng = random.Random(seed + 1)
    return [random_plus_point(rng, rng.choice([1, 2]), rng.choice([1, 2]), singular=True) for _ in range(count)]


def random_miwa(rng: random.Random, N: int, n: int) -> MiwaPoint:
    values = rng.sample(range(1, 40), N * n)
    return MiwaPoint(tuple(tuple(Fraction(values[l * n + j]) for j in range(n)) for l in range(N)))


def random_operator(rng: random.Random, n: int, D: int, orders=(-1, -2)) -> PsiDO:
    """1 + sum a_l d^l with a_l random linear forms in s_11, s_1n and a constant."""
    terms = {0: constant_matrix([[1 if r == c else 0 for c in range(n)] for r in range(n)], D)}
    for order in orders:
        mat = []
        for _ in range(n):
            row = []
            for _ in range(n):
                x = TimePoly.const(rng.randint(-2, 2), D)
                x = x + TimePoly.var("s", 1, 1, D) * rng.randint(-2, 2) + TimePoly.var("s", 1, n, D) * rng.randint(-1, 1)
                row.append(x)
            mat.append(row)
        terms[order] = mat
    return PsiDO(n, terms)


# --- acceptance criteria ---

def vacuum_normalization(D: int = 4) -> Report:
    report = Report(check="vacuum_normalization", holds=True)
    for n in (1, 2):
        V = GrassPoint.vacuum(n)
        report.record("tau - 1", tau_series(V, D).value - TimePoly.const(1, D), D, [n])
        w = ba_function(V, D)
        report.checked += 1
        if set(w.coeffs) != {(0, j) for j in range(1, n + 1)} or any(not (c - 1).is_zero() for c in w.coeffs.values()):
            report.flag("psi - e^xi", [n])
        sys = lax_system(PsiDO.identity(n, D), -3)
        report.merge(check_lax(sys, 2, D))
    return report


def tau_cross_path(points: List[GrassPoint], seed: int, per_point: int = 5) -> Report:
    """
    tau at Miwa points equals the addition formula up to one non-zero scalar per point,
    inside and outside the big cell.
    """
    rng = random.Random(seed)
    report = Report(check="tau_cross_path", holds=True)
    omegas = []
    for k, U in enumerate(points):
        omegas.append(omega_plus(U))
        N = max(2, U.tail_order, -min(U.lowest_exponent(), 0))
        ratio: Optional[Fraction] = None
        for _ in range(per_point):
            t = random_miwa(rng, N, U.n)
            lhs, rhs = tau_at_miwa(U, t), tau_addition_formula(U, t)
            report.checked += 1
            if not lhs or not rhs:
                if lhs or rhs:
                    report.flag("tau vs addition formula", [k], f"{lhs} vs {rhs}")
                continue
            if ratio is None:
                ratio = lhs / rhs
            elif lhs / rhs != ratio:
                report.flag("tau vs addition formula", [k], f"ratio {lhs / rhs} != {ratio}")
        if ratio is None:
            report.flag("tau vanished at every Miwa point", [k])
    report.details = {
        "points": len(points),
        "outside_big_cell": sum(1 for w in omegas if w == 0),
        "non_unit_omega": sum(1 for w in omegas if w not in (0, 1)),
    }
    return report


def ba_membership(points: List[GrassPoint], D: int = 3) -> Report:
    report = Report(check="ba_membership", holds=True)
    for k, U in enumerate(points):
        outcome = membership_check(U, D)
        report.checked += outcome["checked"]
        if outcome["failures"]:
            report.flag("tau psi in U", [k], str(outcome["failures"][0]))
        if outcome["tau_ratio_mismatches"]:
            report.flag("tau ratio vs wave diagonal", [k], str(outcome["tau_ratio_mismatches"][0]))
    return report


def inclusion_pairs(points: List[GrassPoint]) -> Tuple[List[Tuple[GrassPoint, GrassPoint]], List[Tuple[GrassPoint, GrassPoint]]]:
    """Ten pairs with U inside U' and ten without."""
    included, excluded = [], []
    for U in points[:5]:
        included.append((U, U))
        included.append((U, shifted_vacuum(U.n, -min(U.lowest_exponent(), 0))))
    named = named_points()
    excluded.append((named["rank_one"], named["rank_one_clash"]))
    excluded.append((named["rank_one"], named["vacuum1"]))
    excluded.append((named["p2"], named["vacuum2"]))
    for U, W in zip(points, points[1:]):
        if len(excluded) >= 10:
            break
        if U.n == W.n and U.to_json() != W.to_json() and not includes(U, W):
            excluded.append((U, W))
    c = 4
    while len(excluded) < 10:
        # distinct index-0 points never contain one another
        excluded.append((rank_one(c), rank_one(-c)))
        c += 1
    return included, excluded


def bilinear_iff(points: List[GrassPoint], D: int = 3) -> Report:
    report = Report(check="bilinear_iff", holds=True)
    included, excluded = inclusion_pairs(points)
    for k, (U, W) in enumerate(included):
        res = bilinear_residue(U, W, D)
        report.checked += 1
        if not res.vanishes:
            report.flag("residue for U in U'", [k], str(res.witness()))
    for k, (U, W) in enumerate(excluded):
        res = bilinear_residue(U, W, D)
        report.checked += 1
        if res.vanishes:
            report.flag("residue for U not in U'", [k])
    report.details = {"included": len(included), "excluded": len(excluded)}
    return report


def pdo_algebra(seed: int, trials: int = 4, floor: int = -4, D: int = 3) -> Report:
    rng = random.Random(seed)
    report = Report(check="pdo_algebra", holds=True)
    for k in range(trials):
        n = rng.choice([1, 2])
        P, Q, R = (random_operator(rng, n, D) for _ in range(3))
        Q = Q + PsiDO.d(n, D)
        left = pdo_compose(pdo_compose(P, Q, floor), R, floor)
        right = pdo_compose(P, pdo_compose(Q, R, floor), floor)
        record_operator(report, f"associativity #{k}", left - right)
        star = pdo_adjoint(pdo_compose(P, Q), floor)
        swapped = pdo_compose(pdo_adjoint(Q), pdo_adjoint(P), floor)
        record_operator(report, f"(PQ)* - Q*P* #{k}", star - swapped)
        record_operator(report, f"P P^-1 - 1 #{k}", pdo_compose(P, pdo_invert(P, floor), floor) - PsiDO.identity(n, D))
        report.checked += 1
        if pdo_compose(P, Q, floor).order != P.order + Q.order:
            report.flag("order additivity", [k])
    report.certificates = {"floor": floor, "degree": D}
    return report


def hierarchy(points: List[GrassPoint], seed: int, D: int = 4, floor: int = -3) -> Report:
    rng = random.Random(seed)
    report = Report(check="hierarchy", holds=True)
    for U in points:
        P = wave_operator(wave_from_point(U, D))
        sys = lax_system(P, floor)
        report.merge(algebra_relations(sys))
        report.merge(check_lax(sys, 2, D))
        report.merge(check_linear_system(wave_from_point(U, D), sys, D))
        diag = [[rng.randint(-2, 2) if r == c else 0 for c in range(U.n)] for r in range(U.n)]
        G = PsiDO(U.n, {0: constant_matrix([[1 if r == c else 0 for c in range(U.n)] for r in range(U.n)], D), -1: constant_matrix(diag, D)})
        report.merge(gauge_check(P, G, floor))
    report.certificates = {"floor": floor, "degree": D}
    return report


def sato_roundtrip(points: List[GrassPoint], D: int = 4) -> Report:
    report = Report(check="sato_roundtrip", holds=True)
    for k, U in enumerate(points):
        report.checked += 1
        back = sato_point_from_wave(wave_from_point(U, D), D)
        if back.to_json() != U.to_json():
            report.flag("sato point", [k], str(back.to_json()))
    return report


def djkm_witness(n: int, D: int) -> Tuple[PsiDO, PsiDO]:
    """P = 1 and Q = 1 + A d^-1 with A constant: the residue is -A^T and (P Q*)_- = -A^T d^-1."""
    A = [[r + c + 1 for c in range(n)] for r in range(n)]
    Q = PsiDO(n, {0: constant_matrix([[1 if r == c else 0 for c in range(n)] for r in range(n)], D), -1: constant_matrix(A, D)})
    return PsiDO.identity(n, D), Q


def djkm_lemma(points: List[GrassPoint], D: int = 3) -> Report:
    report = Report(check="djkm_lemma", holds=True)
    floor = -1 - D
    for k, U in enumerate(points):
        P = wave_operator(wave_from_point(U, D))
        outcome = djkm_check(P, dual_wave_operator(P, floor), D)
        report.checked += outcome.checked
        if not (outcome.details["hypothesis"] and outcome.details["conclusion"]):
            report.flag("dual wave operator", [k])
    P, Q = djkm_witness(2, D)
    outcome = djkm_check(P, Q, D)
    report.checked += 1
    if outcome.details["conclusion"] or outcome.details["hypothesis"] or not outcome.holds:
        report.flag("contrapositive witness", term=str(outcome.details))
    report.details = {"witness": outcome.details}
    return report


def krichever_examples(D: int = 2) -> Report:
    report = Report(check="krichever", holds=True)
    curves = named_curves()
    for name, data in curves.items():
        A = build_A(data, KRICHEVER_WINDOW)
        report.checked += 1
        if A.declared_index != data.a_index:
            report.flag("index", term=name)
        report.merge(check_ring_closure(A))
        report.merge(check_module_closure(A, build_B(data, KRICHEVER_WINDOW)))
    A = build_A(curves["zero_infinity"], KRICHEVER_WINDOW)
    report.merge(moduli_equations_ba(A, A, D))
    bad = perturbed_ring()
    closure, ba = check_ring_closure(bad), moduli_equations_ba(bad, bad, D)
    report.checked += 1
    if closure.holds or ba.details["ba"]["ring"]:
        report.flag("perturbed ring", term=str(ba.details))
    report.details = {"perturbed": ba.details}
    return report


def wronskian_example(D: int = 3) -> Report:
    return wronskian_ba_check(two_component(), D)


# --- runner ---

def criteria(seed: int = CORPUS_SEED) -> Dict[str, Callable[[], Report]]:
    points = random_corpus(seed)
    small = [p for p in points if p.n <= 2][:6]
    hierarchy_points = [named_points()["rank_one"], two_component()] + small[:2]
    return {
        "vacuum": vacuum_normalization,
        "tau_cross_path": lambda: tau_cross_path(points + singular_corpus(seed), seed),
        "ba_membership": lambda: ba_membership(points[:10]),
        "bilinear_iff": lambda: bilinear_iff(points),
        "pdo_algebra": lambda: pdo_algebra(seed),
        "hierarchy": lambda: hierarchy(hierarchy_points, seed),
        "sato_roundtrip": lambda: sato_roundtrip(hierarchy_points),
        "djkm": lambda: djkm_lemma(hierarchy_points),
        "krichever": krichever_examples,
        "wronskian": wronskian_example,
    }


def _run_one(name: str, job: Callable[[], Report]) -> Report:
    logger.info(f"corpus: running {name}")
    started = time.perf_counter()
    try:
        report = job()
    except KPError as e:
        logger.error(f"corpus: {name} failed: {e}", exc_info=True)
        report = Report(check=name, holds=False)
        report.flag(type(e).__name__, term=str(e))
    report.timing = round(time.perf_counter() - started, 6)
    return report


def run_corpus(only: Optional[List[str]] = None, seed: int = CORPUS_SEED, workers: int = KP_WORKERS) -> Report:
    """Run the selected acceptance checks (all by default); items may run concurrently."""
    jobs = criteria(seed)
    unknown = sorted(set(only or ()) - set(jobs))
    if unknown:
        raise SchemaError(f"unknown criteria {unknown}; choose from {sorted(jobs)}", "only")
    names = [name for name in jobs if not only or name in only]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(lambda name: _run_one(name, jobs[name]), names))
    summary = Report(check="corpus", holds=True)
    for name, result in zip(names, results):
        summary.merge(result)
        summary.details[name] = result.model_dump()
    summary.certificates = {"seed": seed, "workers": workers}
    logger.info(f"corpus: {sum(r.holds for r in results)}/{len(results)} checks hold")
    return summary
