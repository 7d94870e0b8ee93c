"""
Krichever data on rational curves with nodes.

The curve is P^1 with marked points p_1..p_n (a rational or infinity) and
nodes glueing pairs of unmarked rational points, so the arithmetic genus is
the number of nodes. Local coordinates are z = x - p, or z = 1/x at infinity;
here exponents are powers of z, the opposite of the plus-type convention.
A is the ring of functions regular away from the marked points; B is the
module of sections of O(d q) + O^(r-1), laid out point-major: component
(i - 1) r + c is copy c at point i.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import sympy

from src.algebra import TimePoly, VectorLaurent, exp_series_coefficients, laurent_mul, scalar_to_str, to_scalar
from src.baker_akhiezer import Element, adjoint_elements, wave_elements
from src.config import ZETA_SEARCH_BUDGET
from src.errors import CertificationError, DomainError, SchemaError
from src.grassmannian import GrassPoint, flag_generator, flow_component, index, scale, to_sparse
from src.linalg import Echelon
from src.report import Report
from src.tau import omega_plus

logger = logging.getLogger(__name__)

X = sympy.Symbol("x")
Z = sympy.Symbol("z")

Point = Optional[Fraction]  # None is the point at infinity


def _point_from_json(value, location: str) -> Point:
    if value in ("inf", "infinity", None):
        return None
    try:
        return to_scalar(value)
    except (TypeError, ValueError, DomainError) as e:
        raise SchemaError(f"bad point {value!r}", location) from e


def _point_to_json(p: Point):
    return "inf" if p is None else scalar_to_str(p)


def _rational(value) -> Fraction:
    value = sympy.nsimplify(value)
    if not value.is_Rational:
        raise DomainError(f"{value} is not rational")
    return Fraction(int(value.p), int(value.q))


@dataclass(frozen=True)
class RationalCurveData:
    points: Tuple[Point, ...]
    nodes: Tuple[Tuple[Fraction, Fraction], ...] = ()
    rank: int = 1
    degree: int = 0
    twist_at: Point = None

    def __post_init__(self):
        if not self.points:
            raise DomainError("at least one marked point is needed")
        if len(set(self.points)) != len(self.points):
            raise DomainError("marked points must be distinct")
        glued = [p for pair in self.nodes for p in pair]
        if len(set(glued)) != len(glued) or any(a == b for a, b in self.nodes):
            raise DomainError("node preimages must be distinct")
        if any(p in self.points for p in glued):
            raise DomainError("a node cannot sit at a marked point")
        if self.rank < 1:
            raise DomainError("bundle rank must be at least 1")
        if self.degree and (self.twist_at in self.points or self.twist_at in glued):
            raise DomainError("the twisting point must be smooth and unmarked")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def genus(self) -> int:
        return len(self.nodes)

    @property
    def a_index(self) -> int:
        return 1 - self.genus

    @property
    def b_index(self) -> int:
        return self.degree + self.rank * (1 - self.genus)

    def to_json(self):
        return {
            "points": [_point_to_json(p) for p in self.points],
            "nodes": [[scalar_to_str(a), scalar_to_str(b)] for a, b in self.nodes],
            "bundle": {"r": self.rank, "d": self.degree, "twist_at": _point_to_json(self.twist_at)},
        }

    @classmethod
    def from_json(cls, data, location: str = "curve") -> "RationalCurveData":
        if not isinstance(data, dict) or "points" not in data:
            raise SchemaError("curve must be an object with 'points'", location)
        points = tuple(_point_from_json(p, f"{location}.points[{k}]") for k, p in enumerate(data["points"]))
        nodes = []
        for k, pair in enumerate(data.get("nodes", [])):
            a, b = (_point_from_json(p, f"{location}.nodes[{k}]") for p in pair)
            if a is None or b is None:
                raise SchemaError("nodes must glue finite points", f"{location}.nodes[{k}]")
            nodes.append((a, b))
        bundle = data.get("bundle", {})
        try:
            return cls(
                points,
                tuple(nodes),
                int(bundle.get("r", bundle.get("rank", 1))),
                int(bundle.get("d", bundle.get("degree", 0))),
                _point_from_json(bundle.get("twist_at", "inf"), f"{location}.bundle.twist_at"),
            )
        except DomainError as e:
            raise SchemaError(str(e), location) from e


# --- local expansions ---

def _check_poles(f, data: RationalCurveData, allowed: Sequence[Point] = ()):
    """Raise DomainError when f has a pole away from the marked points and `allowed`."""
    poles = set(data.points) | set(allowed)
    num, den = sympy.fraction(sympy.cancel(sympy.together(sympy.sympify(f))))
    rest = sympy.Poly(den, X, domain="QQ")
    for p in poles:
        if p is None:
            continue
        factor = sympy.Poly(X - sympy.Rational(p.numerator, p.denominator), X, domain="QQ")
        while rest.degree() > 0 and rest.rem(factor).is_zero:
            rest = rest.quo(factor)
    if rest.degree() > 0:
        raise DomainError(f"{f} has a pole away from the marked points")
    if None not in poles and sympy.Poly(num, X, domain="QQ").degree() > sympy.Poly(den, X, domain="QQ").degree():
        raise DomainError(f"{f} has a pole at infinity, which is not marked")


def expand_at(f, point: Point, lo: int, hi: int) -> Dict[int, Fraction]:
    """
    Laurent coefficients of the rational function f in the local coordinate at
    `point`, for exponents in [lo, hi). A pole deeper than z^lo raises
    CertificationError.
    """
    f = sympy.sympify(f)
    if point is None:
        g = f.subs(X, 1 / Z)
    else:
        g = f.subs(X, sympy.Rational(point.numerator, point.denominator) + Z)
    num, den = sympy.fraction(sympy.cancel(sympy.together(g)))
    nums = [_rational(c) for c in reversed(sympy.Poly(num, Z, domain="QQ").all_coeffs())]
    dens = [_rational(c) for c in reversed(sympy.Poly(den, Z, domain="QQ").all_coeffs())]
    v = next(k for k, c in enumerate(dens) if c)
    dens = dens[v:]
    # num / dens = sum q_k z^k; f = z^-v sum q_k z^k
    q: List[Fraction] = []
    out: Dict[int, Fraction] = {}
    for k in range(hi + v):
        acc = nums[k] if k < len(nums) else Fraction(0)
        for i in range(1, min(k, len(dens) - 1) + 1):
            acc -= dens[i] * q[k - i]
        q.append(acc / dens[0])
        e = k - v
        if q[k] and e < lo:
            raise CertificationError(f"pole of order {-e} at {_point_to_json(point)} exceeds the window [{lo}, {hi})", "window")
        if q[k] and e >= lo:
            out[e] = q[k]
    return out


def _pole(point: Point, k: int):
    if point is None:
        return X**k
    return (X - sympy.Rational(point.numerator, point.denominator)) ** (-k)


def _evaluate(f, p: Fraction) -> sympy.Rational:
    return sympy.cancel(sympy.sympify(f)).subs(X, sympy.Rational(p.numerator, p.denominator))


def function_basis(data: RationalCurveData, K: int, twist: int = 0) -> List[sympy.Expr]:
    """
    Basis of the functions with poles of order <= K at the marked points that take
    equal values on each node, twisted by O(twist * q) at the twisting point.
    """
    funcs = [sympy.Integer(1)]
    funcs += [_pole(p, k) for p in data.points for k in range(1, K + 1)]
    if twist > 0:
        funcs += [_pole(data.twist_at, k) for k in range(1, twist + 1)]
    conditions = []
    for a, b in data.nodes:
        conditions.append([_evaluate(f, a) - _evaluate(f, b) for f in funcs])
    if twist < 0:
        expansions = [expand_at(f, data.twist_at, 0, -twist) for f in funcs]
        for e in range(-twist):
            conditions.append([sympy.Rational(c.get(e, 0).numerator, c.get(e, 0).denominator) for c in expansions])
    if not conditions:
        return funcs
    basis = []
    for vec in sympy.Matrix(conditions).nullspace():
        basis.append(sympy.cancel(sum(c * f for c, f in zip(vec, funcs))))
    logger.debug(f"function_basis: {len(funcs)} candidates, {len(basis)} after {len(conditions)} conditions")
    return basis


def expansion_vector(f, data: RationalCurveData, window: Tuple[int, int], copies: int = 1, copy: int = 1) -> VectorLaurent:
    """Expansions of f at every marked point, in copy `copy` of a point-major layout."""
    lo, hi = window
    coeffs = {}
    for i, p in enumerate(data.points, start=1):
        for e, c in expand_at(f, p, lo, hi).items():
            coeffs[(e, (i - 1) * copies + copy)] = c
    return VectorLaurent(data.n * copies, coeffs, None, hi)


# --- Krichever points ---

def _independent(vectors: List[VectorLaurent], n: int, window: Tuple[int, int]) -> List[VectorLaurent]:
    ech = Echelon()
    lo, hi = window
    return [v for v in vectors if ech.add(to_sparse(v, n, lo, hi), strict=False)]


def _discrete_point(vectors: List[VectorLaurent], n: int, window: Tuple[int, int], expected: int, name: str) -> GrassPoint:
    vectors = _independent(vectors, n, window)
    point = GrassPoint.discrete(n, vectors, window)
    computed = index(point)
    if computed != expected:
        raise CertificationError(
            f"window {list(window)} too small: {name} has window index {computed}, expected {expected}", "window"
        )
    return GrassPoint(point.n, point.gens, None, point.window, expected, point.shape)


def _check_window(window: Tuple[int, int]):
    lo, hi = window
    if lo >= 0 or hi <= -lo:
        raise CertificationError(f"window [{lo}, {hi}) must satisfy lo < 0 < -lo < hi", "window")


def build_A(data: RationalCurveData, window: Tuple[int, int]) -> GrassPoint:
    """The ring A as a discrete point of index 1 - g, known on the z-exponent window."""
    _check_window(window)
    K = -window[0]
    funcs = function_basis(data, K)
    vectors = [expansion_vector(f, data, window) for f in funcs]
    logger.info(f"build_A: n={data.n} genus={data.genus} window={list(window)} functions={len(funcs)}")
    return _discrete_point(vectors, data.n, window, data.a_index, "A")


def build_B(data: RationalCurveData, window: Tuple[int, int]) -> GrassPoint:
    """
    Sections of O(d q) + O^(r-1): copy 1 carries the twisted functions, the other
    copies the functions of A. Index d + r(1 - g).
    """
    _check_window(window)
    K, r = -window[0], data.rank
    vectors = []
    for copy in range(1, r + 1):
        twist = data.degree if copy == 1 else 0
        for f in function_basis(data, K, twist):
            if twist > 0:
                _check_poles(f, data, (data.twist_at,))
            vectors.append(expansion_vector(f, data, window, r, copy))
    logger.info(f"build_B: rank={r} degree={data.degree} window={list(window)} sections={len(vectors)}")
    return _discrete_point(vectors, data.n * r, window, data.b_index, "B")


# --- algebraic closure ---

def _truncated_membership(P: GrassPoint, v: VectorLaurent, hi: int) -> bool:
    """Membership modulo z^hi: a failure is certified, a success holds below z^hi."""
    lo = P.window[0]
    ech = Echelon()
    for g in P.gens:
        ech.add(to_sparse(g, P.n, lo, hi), strict=False)
    return ech.contains(to_sparse(v, P.n, lo, hi))


def _closure(report: Report, P: GrassPoint, pairs: Iterator[Tuple[str, VectorLaurent]], law: str):
    lo, hi = P.window
    skipped, certified = 0, hi
    for label, vec in pairs:
        if vec.support_range()[0] < lo:
            skipped += 1
            continue
        top = min(hi, vec.hi) if vec.hi is not None else hi
        if top <= 0:
            skipped += 1
            continue
        certified = min(certified, top)
        report.checked += 1
        if not _truncated_membership(P, vec, top):
            report.flag(f"{law} closure", term=label)
    report.certificates.update({"window": [lo, hi], "certified_below": certified, "skipped": skipped})


def check_ring_closure(A: GrassPoint) -> Report:
    """1 is in A and products of generators stay in A, on the certified window."""
    report = Report(check="ring_closure", holds=True)
    one = VectorLaurent.ones(A.n).restrict(None, A.window[1])
    report.checked += 1
    if not _truncated_membership(A, one, A.window[1]):
        report.flag("unit", term="1")
    report.details["unit"] = report.holds

    def products():
        for i, f in enumerate(A.gens):
            for j in range(i, len(A.gens)):
                yield f"g{i}*g{j}", laurent_mul(f, A.gens[j])

    _closure(report, A, products(), "ring")
    logger.info(f"check_ring_closure: holds={report.holds} checked={report.checked}")
    return report


def check_module_closure(A: GrassPoint, B: GrassPoint) -> Report:
    """A acts diagonally on the r copies of B; generator products must stay in B."""
    if B.n % A.n:
        raise DomainError(f"B has {B.n} components, not a multiple of {A.n}")
    report = Report(check="module_closure", holds=True)

    def products():
        for i, f in enumerate(A.gens):
            for j, g in enumerate(B.gens):
                yield f"a{i}*b{j}", laurent_mul(f, g, "diagonal")

    _closure(report, B, products(), "module")
    logger.info(f"check_module_closure: holds={report.holds} checked={report.checked}")
    return report


def _pole_floor(f) -> int:
    """A lower bound for the order of f at any point, infinity included."""
    num, den = sympy.fraction(sympy.cancel(f))
    return -(sympy.degree(num, X) + sympy.degree(den, X) + 1)


def residue_sum(f, g, data: RationalCurveData) -> Fraction:
    """
    Sum over the marked points of the residues of f g dx. For f g dx regular away
    from the marked points this is zero by the residue theorem.
    """
    omega = sympy.cancel(sympy.sympify(f) * sympy.sympify(g))
    if omega == 0:
        return Fraction(0)
    _check_poles(omega, data)
    num, den = sympy.fraction(omega)
    if None not in data.points and sympy.degree(den, X) < sympy.degree(num, X) + 2:
        raise DomainError("f g dx has a pole at infinity, which is not marked")
    floor = _pole_floor(omega)
    total = Fraction(0)
    for p in data.points:
        if p is None:
            # dx = -z^-2 dz
            total -= expand_at(omega, None, floor, 2).get(1, Fraction(0))
        else:
            total += expand_at(omega, p, floor, 0).get(-1, Fraction(0))
    return total


def residue_check(data: RationalCurveData, K: int = 2) -> Report:
    """residue_sum over pairs of functions of A with poles of order <= K."""
    report = Report(check="residue_sum", holds=True)
    funcs = function_basis(data, K)
    skipped = 0
    for i, f in enumerate(funcs):
        for j in range(i, len(funcs)):
            try:
                total = residue_sum(f, funcs[j], data)
            except DomainError:
                # f g dx has a pole at an unmarked infinity
                skipped += 1
                continue
            report.checked += 1
            if total:
                report.flag("sum of residues", [i, j], str(total))
    report.certificates = {"pole_order": K, "skipped": skipped}
    return report


# --- bridge to plus-type points and the BA form of the closure equations ---

def plus_approximation(P: GrassPoint, copies: int = 1) -> GrassPoint:
    """
    Reflect z-exponents to u = 1/z and complete by the tail u^(1 - lo) E[[u]].
    With `copies` > 1 components are reordered copy-major and the point gets
    shape (copies, points), so time component i flows every copy at point i.
    Exact when the generators are Laurent polynomials inside the window.
    """
    if P.kind != "discrete":
        raise DomainError("plus_approximation takes a discrete point")
    lo, hi = P.window
    n = P.n
    if n % copies:
        raise DomainError(f"{n} components do not split into {copies} copies")
    points = n // copies

    def reorder(b: int) -> int:
        i, c = divmod(b - 1, copies)
        return c * points + i + 1

    gens = [VectorLaurent(n, {(-a, reorder(b)): c for (a, b), c in g.coeffs.items() if lo <= a < hi}) for g in P.gens]
    shape = (copies, points) if copies > 1 else None
    return GrassPoint.plus(n, gens, 1 - lo, shape=shape)


def _signed_vectors(n: int, norm: int) -> Iterator[Tuple[int, ...]]:
    if n == 1:
        yield from ((norm,), (-norm,)) if norm else ((0,),)
        return
    for first in range(-norm, norm + 1):
        for rest in _signed_vectors(n - 1, norm - abs(first)):
            yield (first,) + rest


def _zeta_candidates(exps: List[int], budget: int) -> Iterator[VectorLaurent]:
    """u^(e_b + d_b) with zero-sum offsets d, then the same times (1 + u^k)."""
    n = len(exps)
    for norm in range(0, budget + 1):
        for delta in _signed_vectors(n, norm):
            if sum(delta):
                continue
            orders = [e + d for e, d in zip(exps, delta)]
            yield VectorLaurent(n, {(a, b): Fraction(1) for b, a in enumerate(orders, start=1)})
            for k in range(1, budget - norm + 1):
                coeffs = {(a, b): Fraction(1) for b, a in enumerate(orders, start=1)}
                coeffs.update({(a + k, b): Fraction(1) for b, a in enumerate(orders, start=1)})
                yield VectorLaurent(n, coeffs)


def find_zeta(U: GrassPoint, budget: int = ZETA_SEARCH_BUDGET) -> VectorLaurent:
    """
    Componentwise unit zeta of total order index(U) with zeta U in the big cell.
    Candidates start from the flag generator, moved by zero-sum offsets of
    increasing L1 norm; each monomial is followed by its (1 + u^k) multiples.
    """
    m = index(U)
    base = flag_generator(m, U.n).zeta
    exps = [min(base.component(b)) for b in range(1, U.n + 1)]
    for tried, zeta in enumerate(_zeta_candidates(exps, budget), start=1):
        if omega_plus(scale(U, zeta)):
            logger.debug(f"find_zeta: index {m}, zeta {zeta.to_json()} after {tried} candidates")
            return zeta
    raise DomainError(f"no componentwise unit of order {m} within search budget {budget} reaches the big cell")


def _component_inverse(series: Dict[int, Fraction], upto: int) -> Dict[int, Fraction]:
    """1/f for a Laurent polynomial f, exponents < upto."""
    e = min(series)
    lead = series[e]
    out: Dict[int, Fraction] = {}
    for t in range(0, max(0, upto + e)):
        acc = Fraction(1) if t == 0 else Fraction(0)
        for i in range(1, t + 1):
            acc -= series.get(e + i, 0) * out.get(-e + t - i, 0)
        out[-e + t] = acc / lead
    return {a: c for a, c in out.items() if c}


def _times(elem: Element, factor: Dict[int, Dict[int, Fraction]], upto: Optional[int] = None) -> Element:
    """Multiply each component b by the series factor[b], dropping exponents >= upto."""
    out: Element = {}
    for (a, b), c in elem.items():
        for e, x in factor[b].items():
            key = (a + e, b)
            if upto is not None and key[0] >= upto:
                continue
            term = c * x
            out[key] = out[key] + term if key in out else term
    return {k: c for k, c in out.items() if not c.is_zero()}


def _lowest(rows: List[Element]) -> int:
    return min((a for e in rows for (a, _) in e), default=0)


def _rename(elements: List[Element], ns: str) -> List[Element]:
    return [{k: c.rename("s", ns) for k, c in e.items()} for e in elements]


class _Waves:
    """
    Rows spanning a point and its annihilator: psi = zeta^-1 psi_{zeta U} and
    psi* = zeta psi*_{zeta U}. zeta^-1 is a series, cut once the residue can no
    longer see it.
    """

    def __init__(self, U: GrassPoint, D: int, budget: int):
        self.zeta = find_zeta(U, budget)
        V = scale(U, self.zeta)
        unit_rows = U.shape is not None
        self.shape = U.shape
        self.raw = wave_elements(V, D, unit_rows)
        ahead = {b: self.zeta.component(b) for b in range(1, U.n + 1)}
        self.dual = [_times(e, ahead) for e in adjoint_elements(V, D, "s''", unit_rows)]
        self.dual_s = [_times(e, ahead) for e in adjoint_elements(V, D, "s", unit_rows)]

    def rows(self, upto: int, ns: str = "s") -> List[Element]:
        reach = upto - _lowest(self.raw)
        factor = {b: _component_inverse(self.zeta.component(b), reach) for b in range(1, self.zeta.n + 1)}
        rows = [_times(e, factor, upto) for e in self.raw]
        return _rename(rows, ns) if ns != "s" else rows

    def raw_lowest(self) -> int:
        return _lowest(self.raw) - max(min(self.zeta.component(b)) for b in range(1, self.zeta.n + 1))


def _exp_factor(j: int, signs: Dict[str, int], D: int) -> List[TimePoly]:
    x = {}
    for i in range(1, D + 1):
        acc = TimePoly.zero(D)
        for ns, sign in signs.items():
            acc = acc + TimePoly.var(ns, i, j, D) * sign
        x[i] = acc
    return exp_series_coefficients(x, D, D)


def _component_series(elem: Element, b: int) -> Dict[int, TimePoly]:
    return {a: c for (a, bb), c in elem.items() if bb == b}


def _series_mul(f: Dict[int, TimePoly], g: Dict[int, TimePoly]) -> Dict[int, TimePoly]:
    out: Dict[int, TimePoly] = {}
    for a, x in f.items():
        for b, y in g.items():
            term = x * y
            if not term.is_zero():
                out[a + b] = out[a + b] + term if a + b in out else term
    return out


def _residue(factors: Sequence[Element], layout: Sequence[Tuple[int, Tuple[int, ...]]], signs: Dict[str, int], D: int) -> TimePoly:
    """
    Coefficient of u^-1 in the sum over the layout of the product of the factors'
    components times exp(sum_ns sign * xi(ns)) of the flowing time component.
    """
    total = TimePoly.zero(D)
    cache: Dict[int, List[TimePoly]] = {}
    for j, comps in layout:
        if j not in cache:
            cache[j] = _exp_factor(j, signs, D)
        series = {w: h for w, h in enumerate(cache[j]) if not h.is_zero()}
        for elem, b in zip(factors, comps):
            series = _series_mul(series, _component_series(elem, b))
            if not series:
                break
        total = total + series.get(-1, TimePoly.zero(D))
    return total


def moduli_equations_ba(A: GrassPoint, B: GrassPoint, D: int, budget: int = ZETA_SEARCH_BUDGET) -> Report:
    """
    Closure of A and B in terms of BA functions, to joint degree D in s, s', s'':
    res(1 psi*_A(s)) = 0, res(psi_A(s) psi_A(s') psi*_A(s'')) = 0 and
    res(psi_A(s) psi_B(s') psi*_B(s'')) = 0, with psi_A = zeta_A^-1 psi_{zeta_A A}.
    The residues are compared with the algebraic closure verdicts.
    """
    if B.n % A.n:
        raise DomainError(f"B has {B.n} components, not a multiple of {A.n}")
    r, n = B.n // A.n, A.n
    A_plus, B_plus = plus_approximation(A), plus_approximation(B, r)
    logger.info(f"moduli_equations_ba: n={n} r={r} D={D} index A={index(A_plus)} B={index(B_plus)}")
    wa, wb = _Waves(A_plus, D, budget), _Waves(B_plus, D, budget)

    # a factor term at exponent e reaches u^-1 only if e <= -1 - (lowest of the others)
    low_a, low_b = wa.raw_lowest(), wb.raw_lowest()
    low_da, low_db = _lowest(wa.dual), _lowest(wb.dual)
    psi_A = wa.rows(-low_a - low_da)
    psi_A2 = wa.rows(-low_a - low_da, "s'")
    psi_A3 = wa.rows(-low_b - low_db)
    psi_B = wb.rows(-low_a - low_db, "s'")

    unit = Report(check="unit", holds=True)
    for m, row in enumerate(wa.dual_s):
        unit.record("res(1 psi*_A)", _residue([row], [(b, (b,)) for b in range(1, n + 1)], {"s": -1}, D), D, [m])

    signs = {"s": 1, "s'": 1, "s''": -1}
    ring = Report(check="ring", holds=True)
    layout = [(b, (b, b, b)) for b in range(1, n + 1)]
    for k, l, m in product(range(len(psi_A)), range(len(psi_A2)), range(len(wa.dual))):
        value = _residue([psi_A[k], psi_A2[l], wa.dual[m]], layout, signs, D)
        ring.record("res(psi_A psi_A psi*_A)", value, D, [k, l, m])

    module = Report(check="module", holds=True)
    layout = []
    for c in range(1, B.n + 1):
        i = flow_component(c, B_plus.shape)
        layout.append((i, (i, c, c)))
    for k, l, m in product(range(len(psi_A3)), range(len(psi_B)), range(len(wb.dual))):
        value = _residue([psi_A3[k], psi_B[l], wb.dual[m]], layout, signs, D)
        module.record("res(psi_A psi_B psi*_B)", value, D, [k, l, m])

    ring_alg, module_alg = check_ring_closure(A), check_module_closure(A, B)
    report = Report(check="moduli_equations_ba", holds=True)
    for part in (unit, ring, module):
        report.merge(part)
    ba = {"unit": unit.holds, "ring": ring.holds, "module": module.holds}
    algebraic = {"unit": ring_alg.details["unit"], "ring": ring_alg.holds, "module": module_alg.holds}
    report.details.update({"ba": ba, "closure": algebraic, "agree": ba == algebraic})
    report.certificates.update(
        {
            "degree": D,
            "zeta_A": wa.zeta.to_json(),
            "zeta_B": wb.zeta.to_json(),
            "tail_order": {"A": A_plus.tail_order, "B": B_plus.tail_order},
            "closure_certified_below": {
                "A": ring_alg.certificates.get("certified_below"),
                "B": module_alg.certificates.get("certified_below"),
            },
        }
    )
    return report
