"""
Baker-Akhiezer functions of plus-type points.

A wave function is stored without its exponential factor: psi = e^{+-xi(s,u)} w
with w = sum_l w_l(s) u^l, l <= 0. The rows of the matrix wave are the elements
of exp(-xi) U congruent to e_k modulo negative powers of u, so every row of
e^{xi} w lies in U for all times.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from src.algebra import TimePoly, VectorLaurent, exp_series_coefficients, group_element, product_window
from src.errors import CertificationError, DomainError
from src.grassmannian import (
    GrassPoint,
    contains,
    flow_component,
    index,
    monomial_at,
    normalize_index,
    perp,
    position,
)
from src.linalg import solve_unit_pivots
from src.tau import flowed_generators, tau_exact

logger = logging.getLogger(__name__)

Element = Dict[Tuple[int, int], TimePoly]


@dataclass
class WaveFunction:
    n: int
    coeffs: Dict[Tuple[int, int], TimePoly] = field(default_factory=dict)
    exp_sign: int = 1
    floor: Optional[int] = None
    degree: int = 0
    shape: Optional[Tuple[int, int]] = None

    def flow_of(self, component: int) -> int:
        return flow_component(component, self.shape)

    def coefficient(self, ell: int, component: int) -> TimePoly:
        if self.floor is not None and ell < self.floor:
            raise CertificationError(f"u^{ell} is below the certified floor {self.floor}", "window")
        return self.coeffs.get((ell, component), TimePoly.zero(self.degree))

    def spectral_range(self) -> Tuple[int, int]:
        exps = [ell for ell, _ in self.coeffs] or [0]
        return min(exps), max(exps)

    def matrix(self, ell: int) -> List[List[TimePoly]]:
        rows, cols = self.shape
        return [[self.coefficient(ell, (k - 1) * cols + j) for j in range(1, cols + 1)] for k in range(1, rows + 1)]

    def map_coeffs(self, fn) -> "WaveFunction":
        coeffs = {key: fn(c) for key, c in self.coeffs.items()}
        return WaveFunction(self.n, {k: c for k, c in coeffs.items() if not c.is_zero()}, self.exp_sign, self.floor, self.degree, self.shape)

    def to_json(self):
        return {
            "shape": list(self.shape) if self.shape else [self.n],
            "exp_sign": self.exp_sign,
            "coeffs": [[ell, comp, c.to_json()] for (ell, comp), c in sorted(self.coeffs.items())],
            "window": [self.floor, 1],
            "degree": self.degree,
        }


def res_pair(f: VectorLaurent, g: VectorLaurent):
    """sum_a <f_a, g_{-a-1}> with the dot product on components (trace form for matrices)."""
    if f.n != g.n:
        raise DomainError(f"component mismatch {f.n} vs {g.n}")
    lo, hi = product_window(f, g)
    if (lo is not None and lo > -1) or (hi is not None and hi <= -1):
        raise CertificationError(f"residue not certified by the windows [{f.lo}, {f.hi}) and [{g.lo}, {g.hi})", "window")
    total = Fraction(0)
    for (a, b), c in f.coeffs.items():
        d = g.coeffs.get((-a - 1, b))
        if d is not None:
            total = c * d + total
    return total


# --- normalized elements of exp(-xi) U ---

def _targets(U: GrassPoint) -> List[Dict[int, Fraction]]:
    if U.shape:
        rows, cols = U.shape
        return [{position(0, (k - 1) * cols + k, U.n): Fraction(1) for k in range(1, min(rows, cols) + 1)}]
    return [{k - 1: Fraction(1)} for k in range(1, U.n + 1)]


def _normalized_elements(U: GrassPoint, targets, D: int) -> List[Element]:
    n, M = U.n, U.tail_order
    base = [{monomial_at(p, n): TimePoly.const(c, D) for p, c in t.items()} for t in targets]
    if M == 0:
        return base
    cols = flowed_generators(U, D)
    size = n * M
    zero = TimePoly.zero(D)
    matrix = [[col.get(p, zero) for col in cols] for p in range(size)]
    rhs = [[TimePoly.const(t.get(p, 0), D) for t in targets] for p in range(size)]
    solutions = solve_unit_pivots(matrix, rhs)
    out = []
    for elem, alpha in zip(base, solutions):
        for a_f, col in zip(alpha, cols):
            if a_f.is_zero():
                continue
            for p, c in col.items():
                if p >= 0:
                    continue
                key = monomial_at(p, n)
                term = a_f * c
                elem[key] = elem[key] + term if key in elem else term
        out.append({k: v for k, v in elem.items() if not v.is_zero()})
    return out


def _flag_shifts(U: GrassPoint):
    """Index-0 point and per-component exponent shifts undoing the flag generator."""
    if U.kind != "plus":
        raise DomainError("wave functions are defined for plus-type points")
    if index(U) == 0:
        return U, {}
    V, flag = normalize_index(U)
    return V, {b: min(flag.zeta.component(b)) for b in range(1, U.n + 1)}


def _unshift(elem: Element, shifts) -> Element:
    if not shifts:
        return elem
    return {(a - shifts[b], b): c for (a, b), c in elem.items()}


def wave_elements(U: GrassPoint, D: int, unit_rows: bool = False) -> List[Element]:
    """
    Elements w of exp(-xi(s)) U, one per row of the wave, with w = target + O(u^-1).
    Points of non-zero index go through the flag generator first. `unit_rows` asks
    for one row per component even when the point carries a shape.
    """
    V, shifts = _flag_shifts(U)
    logger.debug(f"wave_elements: n={U.n} index={index(U)} D={D}")
    targets = [{k - 1: Fraction(1)} for k in range(1, U.n + 1)] if unit_rows else _targets(V)
    return [_unshift(e, shifts) for e in _normalized_elements(V, targets, D)]


def wave_matrix(U: GrassPoint, D: int, K: Optional[int] = None) -> WaveFunction:
    """
    Matrix-valued wave W with psi = W e^{xi}; W_kj is component j of row k
    (vector points) or the matrix element itself (matrix points).
    """
    elements = wave_elements(U, D)
    if U.shape:
        coeffs = dict(elements[0])
        size, shape = U.n, U.shape
    else:
        n = U.n
        coeffs = {(a, (k - 1) * n + b): c for k, e in enumerate(elements, start=1) for (a, b), c in e.items()}
        size, shape = n * n, (n, n)
    return _window(WaveFunction(size, coeffs, 1, None, D, shape), K)


def _window(w: WaveFunction, K: Optional[int]) -> WaveFunction:
    if K is None:
        return w
    lowest = w.spectral_range()[0]
    if lowest >= -K:
        return w
    kept = {key: c for key, c in w.coeffs.items() if key[0] >= -K}
    return WaveFunction(w.n, kept, w.exp_sign, -K, w.degree, w.shape)


def _tau_ratio(V: GrassPoint, D: int) -> Dict[Tuple[int, int], TimePoly]:
    tau = tau_exact(V)
    if not tau.constant_term:
        raise DomainError("tau vanishes at s = 0: point outside the big cell, translate it by the time flow first")
    inv = tau.truncate(D).inverse()
    coeffs = {}
    for j in range(1, V.time_components + 1):
        v = TimePoly.var("v", 1, j)
        mapping = {}
        for (ns, i, jj) in tau.variables():
            if ns == "s" and jj == j:
                mapping[(ns, i, jj)] = TimePoly.var("s", i, jj) - v ** i * Fraction(1, i)
        shifted = tau.subs(mapping) if mapping else tau
        by_power: Dict[int, Dict] = {}
        for mono, c in shifted.terms.items():
            e = dict(mono).pop(("v", 1, j), 0)
            rest = tuple((var, k) for var, k in mono if var != ("v", 1, j))
            by_power.setdefault(e, {})[rest] = c
        for e, terms in by_power.items():
            value = TimePoly(terms, D) * inv
            if not value.is_zero():
                coeffs[(-e, j)] = value
    return coeffs


def ba_function(U: GrassPoint, D: int, K: Optional[int] = None) -> WaveFunction:
    """
    Vector BA function: component j is e^{xi_j} tau(s - [u^-1]_j) / tau(s), where the
    shift sends s_ij to s_ij - u^{-i}/i in component j only.
    """
    if U.shape:
        raise DomainError("ba_function takes vector points; use wave_matrix for matrix points")
    V, shifts = _flag_shifts(U)
    logger.info(f"ba_function: n={U.n} index={index(U)} D={D} K={K}")
    coeffs = _unshift(_tau_ratio(V, D), shifts)
    return _window(WaveFunction(U.n, coeffs, 1, None, D), K)


def adjoint_ba(U: GrassPoint, D: int, K: Optional[int] = None) -> WaveFunction:
    """psi*_U(s) = psi_{U^perp}(-s); the exponential factor becomes e^{-xi}."""
    w = ba_function(perp(U), D, K).map_coeffs(lambda c: c.negate_times("s"))
    w.exp_sign = -1
    return w


def adjoint_elements(U: GrassPoint, D: int, ns: str = "s", unit_rows: bool = False) -> List[Element]:
    """Rows of the adjoint wave, in time namespace `ns`."""
    out = []
    for e in wave_elements(perp(U), D, unit_rows=unit_rows):
        out.append({k: c.negate_times("s").rename("s", ns) for k, c in e.items()})
    return out


# --- bilinear identity ---

@dataclass
class BilinearResidue:
    entries: Dict[Tuple[int, int], TimePoly]
    degree: int

    @property
    def vanishes(self) -> bool:
        return all(c.is_zero() for c in self.entries.values())

    def witness(self):
        """First non-vanishing entry and its lowest term, or None."""
        for key in sorted(self.entries):
            c = self.entries[key]
            if not c.is_zero():
                mono, coeff = c.lowest_term()
                return {"entry": list(key), "monomial": [[v[0], v[1], v[2], e] for v, e in mono], "coefficient": str(coeff)}
        return None

    def to_json(self):
        return {
            "vanishes": self.vanishes,
            "degree": self.degree,
            "witness": self.witness(),
            "entries": [[k, l, c.to_json()] for (k, l), c in sorted(self.entries.items())],
        }


def relative_exponential(U: GrassPoint, D: int) -> Dict[int, List[TimePoly]]:
    """Coefficients of exp(xi(s, u) - xi(s', u)) per time component, to joint degree D."""
    series = {}
    for j in range(1, U.time_components + 1):
        x = {i: TimePoly.var("s", i, j, D) - TimePoly.var("s'", i, j, D) for i in range(1, D + 1)}
        series[j] = exp_series_coefficients(x, D, D)
    return series


def bilinear_residue(U: GrassPoint, U2: GrassPoint, D: int) -> BilinearResidue:
    """
    res_u sum_b psi_U(s)_kb psi*_U2(s')_lb for every pair of rows (k, l). Vanishes
    identically iff U is contained in U2.
    """
    if U.n != U2.n or U.shape != U2.shape:
        raise DomainError("bilinear residue needs points in the same ambient space")
    logger.info(f"bilinear_residue: n={U.n} D={D}")
    rows = wave_elements(U, D)
    dual_rows = adjoint_elements(U2, D, ns="s'")
    series = relative_exponential(U, D)
    entries = {}
    for k, left in enumerate(rows, start=1):
        for l, right in enumerate(dual_rows, start=1):
            total = TimePoly.zero(D)
            for (a1, b), c1 in left.items():
                h = series[U.flow_of(b)]
                for (a2, b2), c2 in right.items():
                    if b2 != b:
                        continue
                    w = -1 - a1 - a2
                    if 0 <= w < len(h):
                        total = total + c1 * c2 * h[w]
            entries[(k, l)] = total
    return BilinearResidue(entries, D)


# --- membership ---

def expanded_elements(U: GrassPoint, D: int) -> List[Element]:
    """tau * e^{xi} w for every row w of the wave, expanded to time degree D."""
    V, _ = _flag_shifts(U)
    tau = tau_exact(V).truncate(D)
    flow = group_element(U.time_components, D)
    out = []
    for elem in wave_elements(U, D):
        full: Element = {}
        for (a, b), c in elem.items():
            jflow = U.flow_of(b)
            tc = tau * c
            for (w, j), h in flow.coeffs.items():
                if j != jflow:
                    continue
                key = (a + w, b)
                term = tc * h
                full[key] = full[key] + term if key in full else term
        out.append({k: v for k, v in full.items() if not v.is_zero()})
    return out


def by_monomial(elem: Element) -> Dict[tuple, Dict[Tuple[int, int], Fraction]]:
    """Split a time-dependent element into its rational coefficient vectors, one per time monomial."""
    out: Dict[tuple, Dict[Tuple[int, int], Fraction]] = {}
    for key, c in elem.items():
        for mono, x in c.terms.items():
            out.setdefault(mono, {})[key] = x
    return out


def tau_ratio_mismatches(U: GrassPoint, D: int) -> Tuple[int, List[Dict[str, object]]]:
    """
    Component j of ba_function (the tau ratio) against entry (j, j) of the wave rows
    from the linear solve; the two constructions share nothing past the flag shift.
    """
    psi = ba_function(U, D)
    zero = TimePoly.zero(D)
    checked, mismatches = 0, []
    for j, row in enumerate(wave_elements(U, D), start=1):
        exponents = {a for (a, b) in row if b == j} | {a for (a, b) in psi.coeffs if b == j}
        for a in sorted(exponents):
            checked += 1
            if not (row.get((a, j), zero) - psi.coeffs.get((a, j), zero)).is_zero():
                mismatches.append({"component": j, "exponent": a})
    return checked, mismatches


def membership_check(U: GrassPoint, D: int) -> Dict[str, object]:
    """
    Every time-monomial coefficient of tau * e^{xi} w, for each row w of the wave
    (index 0 after the flag generator), must be an element of U; on vector points
    the tau-ratio BA function must also reproduce the diagonal of those rows.
    """
    checked, failures = 0, []
    for k, elem in enumerate(expanded_elements(U, D), start=1):
        for mono, coeffs in sorted(by_monomial(elem).items()):
            checked += 1
            if not contains(U, VectorLaurent(U.n, coeffs)):
                failures.append({"row": k, "monomial": [[v[0], v[1], v[2], e] for v, e in mono]})
    mismatches: List[Dict[str, object]] = []
    if not U.shape:
        compared, mismatches = tau_ratio_mismatches(U, D)
        checked += compared
    return {"checked": checked, "failures": failures, "tau_ratio_mismatches": mismatches, "holds": not failures and not mismatches}
