"""
The n-component KP hierarchy built from Grassmannian points.

psi = W(s, u) e^{xi(s, u)} with e^{xi} diagonal on the right; the wave operator
P = sum_l W_l d^l satisfies psi = P e^{xi} because d e^{xi} = u e^{xi}.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import permutations
from typing import Dict, List, Optional, Tuple

from src.algebra import TimeIndex, TimePoly, VectorLaurent, exp_series_coefficients
from src.baker_akhiezer import (
    WaveFunction,
    ba_function,
    by_monomial,
    expanded_elements,
    wave_matrix,
)
from src.errors import CertificationError, DomainError
from src.grassmannian import GrassPoint, contains, flow_component, index, to_sparse
from src.linalg import Echelon
from src.psido import (
    PsiDO,
    commutator,
    elementary,
    pdo_adjoint,
    pdo_compose,
    pdo_diff,
    pdo_invert,
    pdo_split,
)
from src.report import Report

logger = logging.getLogger(__name__)


@dataclass
class LaxSystem:
    L: PsiDO
    C: List[PsiDO]
    P: PsiDO
    floor: int

    @property
    def n(self) -> int:
        return self.L.n


def wave_from_point(U: GrassPoint, D: int, K: Optional[int] = None) -> WaveFunction:
    """Matrix wave of an index-0 point; vector points enter through their rows."""
    if U.kind != "plus":
        raise DomainError("wave functions are defined for plus-type points")
    m = index(U)
    if m != 0:
        raise DomainError(f"point has index {m}; the hierarchy is built from index-0 points")
    if U.shape and U.shape[0] != U.shape[1]:
        raise DomainError(f"matrix point must be square, got shape {U.shape}")
    return wave_matrix(U, D, K)


def wave_operator(w: WaveFunction) -> PsiDO:
    if not w.shape or w.shape[0] != w.shape[1]:
        raise DomainError("wave operator needs a square matrix wave")
    orders = sorted({ell for ell, _ in w.coeffs} | {0})
    return PsiDO(w.shape[0], {ell: w.matrix(ell) for ell in orders}, w.floor)


def apply_to_exponential(P: PsiDO, degree: int) -> WaveFunction:
    """Coefficients of P e^{xi} = sum_l P_l u^l e^{xi}."""
    n = P.n
    coeffs = {(ell, r * n + c + 1): x for ell, m in P.terms.items() for r, row in enumerate(m) for c, x in enumerate(row)}
    return WaveFunction(n * n, {k: v for k, v in coeffs.items() if not v.is_zero()}, 1, P.floor, degree, (n, n))


def lax_system(P: PsiDO, floor: int) -> LaxSystem:
    """L = P d P^-1 and C^(j) = P E_j P^-1, certified down to `floor`."""
    if P.order != 0 or not P.is_monic():
        raise DomainError("lax_system needs P = 1 + lower order terms")
    n, D = P.n, P.degree
    inv = pdo_invert(P, floor - 1)
    L = pdo_compose(pdo_compose(P, PsiDO.d(n, D)), inv, floor).truncate(floor)
    C = [
        pdo_compose(pdo_compose(P, PsiDO.monomial(elementary(n, j, D), 0)), inv, floor).truncate(floor)
        for j in range(1, n + 1)
    ]
    logger.info(f"lax_system: n={n} floor={floor} L floor={L.floor}")
    return LaxSystem(L, C, P, floor)


def _power(A: PsiDO, i: int) -> PsiDO:
    out = A
    for _ in range(i - 1):
        out = pdo_compose(out, A)
    return out


def b_op(sys: LaxSystem, i: int, j: int) -> PsiDO:
    """B_i^(j) = (L^i C^(j))_+."""
    if i < 1:
        raise DomainError("flow depth i must be at least 1")
    M = pdo_compose(_power(sys.L, i), sys.C[j - 1])
    if M.floor is not None and M.floor > 0:
        raise CertificationError(f"L^{i} C^({j}) is only certified from order {M.floor}; lower the floor", "floor")
    return pdo_split(M)[0]


def record_operator(report: Report, name: str, R: PsiDO):
    if not R.terms:
        report.checked += 1
    for order in sorted(R.terms, reverse=True):
        for r, row in enumerate(R.terms[order]):
            for c, x in enumerate(row):
                report.record(name, x, order, [r + 1, c + 1])


def algebra_relations(sys: LaxSystem) -> Report:
    """[L, C^(j)] = 0, C^(j) C^(k) = delta_jk C^(j) and sum_j C^(j) = 1."""
    report = Report(check="lax_algebra", holds=True)
    n = sys.n
    total = PsiDO(n, {}, sys.floor)
    for j, Cj in enumerate(sys.C, start=1):
        record_operator(report, f"[L, C{j}]", commutator(sys.L, Cj).truncate(sys.floor))
        total = total + Cj
        for k, Ck in enumerate(sys.C, start=1):
            prod = pdo_compose(Cj, Ck).truncate(sys.floor)
            expected = Cj if j == k else PsiDO(n, {}, sys.floor)
            record_operator(report, f"C{j} C{k}", prod - expected)
    record_operator(report, "sum C", total - PsiDO.identity(n, sys.P.degree))
    report.certificates = {"floor": sys.floor, "degree": sys.P.degree}
    return report


def check_lax(sys: LaxSystem, i_max: int, D: int) -> Report:
    """Residuals d_ij L - [B_i^(j), L] and d_ij C^(k) - [B_i^(j), C^(k)]."""
    report = Report(check="lax_equations", holds=True)
    floors, degrees = {}, []
    for i in range(1, i_max + 1):
        for j in range(1, sys.n + 1):
            B = b_op(sys, i, j)
            x = TimeIndex(i, j)
            R = pdo_diff(sys.L, x) - commutator(B, sys.L)
            floors[f"{i},{j}"] = R.floor
            degrees.append(R.degree)
            record_operator(report, f"d{i}{j} L", R)
            for k, Ck in enumerate(sys.C, start=1):
                record_operator(report, f"d{i}{j} C{k}", pdo_diff(Ck, x) - commutator(B, Ck))
    report.certificates = {
        "floors": floors,
        "degree": D,
        "effective_degree": min([d for d in degrees if d is not None], default=D),
    }
    return report


def check_linear_system(w: WaveFunction, sys: LaxSystem, D: int, i_max: int = 2) -> Report:
    """L psi = u psi, C^(j) psi = psi E_j and d_ij psi = B_i^(j) psi, on psi = P e^{xi}."""
    report = Report(check="linear_system", holds=True)
    n = sys.n
    P = wave_operator(w)
    d = PsiDO.d(n, D)
    record_operator(report, "L psi - u psi", pdo_compose(sys.L, P) - pdo_compose(P, d))
    for j, Cj in enumerate(sys.C, start=1):
        Ej = PsiDO.monomial(elementary(n, j, D), 0)
        record_operator(report, f"C{j} psi - psi E{j}", pdo_compose(Cj, P) - pdo_compose(P, Ej))
    for i in range(1, i_max + 1):
        for j in range(1, n + 1):
            flow = PsiDO.monomial(elementary(n, j, D), i)
            lhs = pdo_diff(P, TimeIndex(i, j)) + pdo_compose(P, flow)
            record_operator(report, f"d{i}{j} psi - B psi", lhs - pdo_compose(b_op(sys, i, j), P))
    report.certificates = {"floor": sys.floor, "degree": D}
    return report


# --- Sato roundtrip ---

def _flow_derivative(F: Dict, x: TimeIndex, shape) -> Dict:
    """d_ij (F e^{xi}) = (d_ij F + F u^i E_j) e^{xi}."""
    out = {}
    var = x.var("s")
    for (ell, comp), c in F.items():
        dc = c.diff(var)
        if not dc.is_zero():
            out[(ell, comp)] = out[(ell, comp)] + dc if (ell, comp) in out else dc
        if flow_component(comp, shape) == x.j:
            key = (ell + x.i, comp)
            out[key] = out[key] + c if key in out else c
    return out


def _derivative_span(w: WaveFunction, weight: int) -> List[Dict]:
    """d^alpha psi at s = 0 for all multi-indices of weighted degree <= weight."""
    indices = [TimeIndex(i, j) for i in range(1, weight + 1) for j in range(1, w.shape[1] + 1)]
    found = []

    def walk(F, start, remaining):
        found.append({k: c.constant_term for k, c in F.items() if c.constant_term})
        for pos in range(start, len(indices)):
            x = indices[pos]
            if x.i <= remaining:
                walk(_flow_derivative(F, x, w.shape), pos, remaining - x.i)

    walk(dict(w.coeffs), 0, weight)
    return found


def _point_from_vectors(vectors: List[VectorLaurent], n: int, max_tail: int, shape=None) -> Optional[GrassPoint]:
    for M in range(0, max_tail + 1):
        ech = Echelon()
        for v in vectors:
            vec = to_sparse(v, n, hi=M)
            if vec:
                ech.add(vec, strict=False)
        if len(ech) == n * M:
            gens = [VectorLaurent(n, {(p // n, p % n + 1): c for p, c in row.items()}) for row in ech.rows.values()]
            return GrassPoint.plus(n, gens, M, shape=shape)
    return None


def _sato_vectors(w: WaveFunction, weight: int, as_matrix: bool) -> Tuple[List[VectorLaurent], int]:
    rows, cols = w.shape
    vectors = []
    for F in _derivative_span(w, weight):
        if as_matrix:
            vectors.append(VectorLaurent(w.n, F, shape=w.shape))
            continue
        for k in range(1, rows + 1):
            vectors.append(VectorLaurent(cols, {(ell, (c - 1) % cols + 1): x for (ell, c), x in F.items() if (c - 1) // cols + 1 == k}))
    return vectors, (w.n if as_matrix else cols)


def sato_point_from_wave(w: WaveFunction, D: int, as_matrix: bool = False) -> GrassPoint:
    """
    Span of the time derivatives of psi at s = 0, as a plus-type point. The rows of
    psi span a vector point; with `as_matrix` the whole matrix is one element.
    The span at weight D must agree with the span at weight D - 1.
    """
    if D < 1:
        raise DomainError("sato_point_from_wave needs D >= 1")
    points = []
    for weight in (D - 1, D):
        vectors, n = _sato_vectors(w, weight, as_matrix)
        points.append(_point_from_vectors(vectors, n, weight + 1, w.shape if as_matrix else None))
    lower, upper = points
    if upper is None or lower is None or lower.to_json() != upper.to_json():
        raise CertificationError(f"span of derivatives does not stabilize at degree {D}; raise D", "degree")
    return upper


# --- the bilinear lemma for wave operators ---

def _oscillating_residue(P: PsiDO, Q: PsiDO, D: int) -> Dict[Tuple[int, int], TimePoly]:
    """res_u (P e^{xi(s)}) (Q(s') e^{-xi(s')})^T, with d' e^{-xi(s')} = -u e^{-xi(s')}."""
    n = P.n
    h = {}
    for j in range(1, n + 1):
        x = {i: TimePoly.var("s", i, j, D) - TimePoly.var("s'", i, j, D) for i in range(1, D + 1)}
        h[j] = exp_series_coefficients(x, D, D)
    Qs = {m: [[c.rename("s", "s'") * (-1) ** (m % 2) for c in row] for row in mat] for m, mat in Q.terms.items()}
    entries = {}
    for a in range(n):
        for c in range(n):
            total = TimePoly.zero(D)
            for ell, pm in P.terms.items():
                for m, qm in Qs.items():
                    w = -1 - ell - m
                    if not 0 <= w <= D:
                        continue
                    for b in range(n):
                        total = total + pm[a][b] * qm[c][b] * h[b + 1][w]
            entries[(a + 1, c + 1)] = total
    return entries


def djkm_check(Pop: PsiDO, Qop: PsiDO, D: int) -> Report:
    """
    Evaluates the residue hypothesis and the conclusion (P Q*)_- = 0 separately;
    the implication holds unless the first vanishes and the second does not.
    """
    for name, op in (("P", Pop), ("Q", Qop)):
        if op.order != 0 or not op.is_monic():
            raise DomainError(f"{name} must be 1 + lower order terms")
        if op.floor is not None and op.floor > -1 - D:
            raise CertificationError(f"{name} is certified only from order {op.floor}; need {-1 - D}", "floor")
    residue = Report(check="djkm_residue", holds=True)
    for key, value in sorted(_oscillating_residue(Pop, Qop, D).items()):
        residue.record("residue", value, entry=list(key))
    minus = pdo_split(pdo_compose(Pop, pdo_adjoint(Qop)))[1]
    conclusion = Report(check="djkm_conclusion", holds=True)
    record_operator(conclusion, "(P Q*)_-", minus)
    report = Report(check="djkm", holds=(not residue.holds) or conclusion.holds)
    report.details = {
        "hypothesis": residue.holds,
        "conclusion": conclusion.holds,
        "residue_witness": residue.first_nonzero.model_dump() if residue.first_nonzero else None,
        "conclusion_witness": conclusion.first_nonzero.model_dump() if conclusion.first_nonzero else None,
    }
    report.checked = residue.checked + conclusion.checked
    report.certificates = {"degree": D, "conclusion_floor": minus.floor}
    return report


def dual_wave_operator(P: PsiDO, floor: int) -> PsiDO:
    """(P^-1)*, the operator of the adjoint wave psi* = (P*)^-1 e^{-xi}."""
    return pdo_adjoint(pdo_invert(P, floor))


def gauge_check(P: PsiDO, G: PsiDO, floor: int) -> Report:
    """Right multiplication by a constant-coefficient unit leaves L and every C^(j) unchanged."""
    if any(not x.is_constant() for m in G.terms.values() for row in m for x in row):
        raise DomainError("gauge operator must have constant coefficients")
    if any(not m[r][c].is_zero() for m in G.terms.values() for r in range(G.n) for c in range(G.n) if r != c):
        raise DomainError("gauge operator must commute with every E_j (diagonal coefficients)")
    base = lax_system(P, floor)
    moved = lax_system(pdo_compose(P, G, floor - 1), floor)
    report = Report(check="gauge", holds=True)
    record_operator(report, "L", (moved.L - base.L).truncate(floor))
    for j, (a, b) in enumerate(zip(moved.C, base.C), start=1):
        record_operator(report, f"C{j}", (a - b).truncate(floor))
    report.certificates = {"floor": floor}
    return report


# --- Wronskian embedding ---

def derivative_point(U: GrassPoint) -> GrassPoint:
    """{f' : f in U} for the derivative in the spectral variable; u^{-1} is never hit."""
    n, M = U.n, U.tail_order
    if M >= 1:
        tail, extra = M - 1, []
    else:
        tail = 0
        extra = [VectorLaurent.monomial(n, a, b) for a in range(M - 1, 0) if a != -1 for b in range(1, n + 1)]
    ech = Echelon()
    for v in [g.derivative() for g in U.gens] + extra:
        vec = to_sparse(v, n, hi=tail)
        if vec:
            ech.add(vec, strict=False)
    gens = [VectorLaurent(n, {(p // n, p % n + 1): c for p, c in row.items()}) for row in ech.rows.values()]
    return GrassPoint.plus(n, gens, tail)


def wronskian_embed(U: GrassPoint) -> Tuple[GrassPoint, List[int]]:
    """U + U' + ... + U^(n-1) in n*n components; block i holds the i-th derivative."""
    if U.kind != "plus" or U.shape:
        raise DomainError("wronskian_embed takes plus-type vector points")
    n = U.n
    blocks = [U]
    for _ in range(1, n):
        blocks.append(derivative_point(blocks[-1]))
    if n == 1:
        return U, [index(U)]
    tail = max(B.tail_order for B in blocks)
    gens = []
    for i, B in enumerate(blocks):
        for g in B.gens:
            gens.append(VectorLaurent(n * n, {(a, i * n + b): c for (a, b), c in g.coeffs.items()}))
        gens.extend(VectorLaurent.monomial(n * n, a, i * n + b) for a in range(B.tail_order, tail) for b in range(1, n + 1))
    point = GrassPoint.plus(n * n, gens, tail)
    logger.info(f"wronskian_embed: block indices {[index(B) for B in blocks]}, total {index(point)}")
    return point, [index(B) for B in blocks]


def _series_mul(f: Dict[int, TimePoly], g: Dict[int, TimePoly]) -> Dict[int, TimePoly]:
    out: Dict[int, TimePoly] = {}
    for a, x in f.items():
        for b, y in g.items():
            out[a + b] = out[a + b] + x * y if a + b in out else x * y
    return {k: v for k, v in out.items() if not v.is_zero()}


def _series_add(f, g, sign=1):
    out = dict(f)
    for k, v in g.items():
        out[k] = out[k] + v * sign if k in out else v * sign
    return {k: v for k, v in out.items() if not v.is_zero()}


def _u_derivative(f: Dict) -> Dict:
    """d/du on the exponent, for keys that are exponents or (exponent, component) pairs."""
    out = {}
    for key, c in f.items():
        a = key[0] if isinstance(key, tuple) else key
        if a:
            new = (a - 1,) + key[1:] if isinstance(key, tuple) else a - 1
            out[new] = c * a
    return out


def _permutation_sign(perm) -> int:
    sign = 1
    for i in range(len(perm)):
        for k in range(i + 1, len(perm)):
            if perm[i] > perm[k]:
                sign = -sign
    return sign


def wronskian_determinant(w: WaveFunction, D: int) -> Dict[int, TimePoly]:
    """
    det[(d/du)^r psi_j] with the factor e^{xi_1 + ... + xi_n} stripped: entry (r, j)
    is (d/du + xi_j')^r w_j where xi_j' = sum_i i s_ij u^(i-1).
    """
    n = w.n
    columns = []
    for j in range(1, n + 1):
        wj = {ell: c for (ell, b), c in w.coeffs.items() if b == j}
        xi_prime = {i - 1: TimePoly.var("s", i, j, D) * i for i in range(1, D + 1)}
        entries = [wj]
        for _ in range(1, n):
            prev = entries[-1]
            entries.append(_series_add(_u_derivative(prev), _series_mul(xi_prime, prev)))
        columns.append(entries)
    det: Dict[int, TimePoly] = {}
    for perm in permutations(range(n)):
        term = {0: TimePoly.const(_permutation_sign(perm), D)}
        for r, j in enumerate(perm):
            term = _series_mul(term, columns[j][r])
        det = _series_add(det, term)
    return det


def wronskian_ba_check(U: GrassPoint, D: int, K: Optional[int] = None) -> Report:
    """
    Interpretation: for every row psi_k of the wave, the tuple
    (psi_k, psi_k', ..., psi_k^(n-1)) lies in the Wronskian embedding, checked
    coefficient by coefficient on tau * psi_k; the stripped Wronskian determinant
    of the BA components is reported alongside.
    """
    report = Report(check="wronskian", holds=True)
    n = U.n
    embedded, block_indices = wronskian_embed(U)
    for k, elem in enumerate(expanded_elements(U, D), start=1):
        derivs = [elem]
        for _ in range(1, n):
            derivs.append(_u_derivative(derivs[-1]))
        stacked = {(a, i * n + b): c for i, F in enumerate(derivs) for (a, b), c in F.items()}
        for mono, coeffs in sorted(by_monomial(stacked).items()):
            report.checked += 1
            if not contains(embedded, VectorLaurent(n * n, coeffs)):
                report.holds = False
                report.residual = "first_nonzero_term"
                report.details.setdefault("failures", []).append({"row": k, "monomial": [[v[0], v[1], v[2], e] for v, e in mono]})
    det = wronskian_determinant(ba_function(U, D, K), D)
    report.details.update(
        {
            "interpretation": "derivative tuples of wave rows lie in the embedded point; determinant stripped of e^{sum xi}",
            "block_indices": block_indices,
            "embedded_index": index(embedded),
            "determinant": [[ell, c.to_json()] for ell, c in sorted(det.items())],
        }
    )
    report.certificates = {"degree": D}
    return report
