"""
Pseudodifferential operators sum_{i <= d} a_i d^i with n x n matrix coefficients
over truncated time polynomials. d acts on coefficients as the sum of the
first-time derivatives d/ds_1j. Orders below `floor` are unknown; floor=None
marks an exact (finite) operator.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import sympy

from src.algebra import TimeIndex, TimePoly, to_scalar
from src.errors import CertificationError, DomainError, SchemaError

logger = logging.getLogger(__name__)

Matrix = List[List[TimePoly]]


# --- matrix helpers ---

def mat_zero(n: int, D: Optional[int] = None) -> Matrix:
    return [[TimePoly.zero(D) for _ in range(n)] for _ in range(n)]


def mat_identity(n: int, D: Optional[int] = None) -> Matrix:
    return [[TimePoly.const(1 if r == c else 0, D) for c in range(n)] for r in range(n)]


def elementary(n: int, j: int, D: Optional[int] = None) -> Matrix:
    """E_j: the only non-zero entry is 1 at (j, j)."""
    return [[TimePoly.const(1 if r == c == j - 1 else 0, D) for c in range(n)] for r in range(n)]


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a: Matrix, c) -> Matrix:
    return [[x * c for x in row] for row in a]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    out = []
    for r in range(n):
        row = []
        for c in range(len(b[0])):
            acc = a[r][0] * b[0][c]
            for k in range(1, len(b)):
                acc = acc + a[r][k] * b[k][c]
            row.append(acc)
        out.append(row)
    return out


def mat_transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_is_zero(a: Matrix) -> bool:
    return all(x.is_zero() for row in a for x in row)


def mat_map(a: Matrix, fn) -> Matrix:
    return [[fn(x) for x in row] for row in a]


def mat_constant_inverse(a: Matrix) -> Matrix:
    """Inverse of a matrix with constant rational entries."""
    if not all(x.is_constant() for row in a for x in row):
        raise DomainError("leading coefficient is not constant")
    m = sympy.Matrix([[sympy.Rational(x.constant_term.numerator, x.constant_term.denominator) for x in row] for row in a])
    if m.det() == 0:
        raise DomainError("leading coefficient is not invertible")
    inv = m.inv()
    bound = a[0][0].bound
    return [[TimePoly.const(Fraction(int(inv[r, c].p), int(inv[r, c].q)), bound) for c in range(m.cols)] for r in range(m.rows)]


def d_coefficient(x: TimePoly, components: int) -> TimePoly:
    """d = sum_j d/ds_1j applied to a coefficient."""
    out = x.diff(("s", 1, 1))
    for j in range(2, components + 1):
        out = out + x.diff(("s", 1, j))
    return out


def binomial(i: int, k: int) -> Fraction:
    """Generalized binomial coefficient, valid for negative i."""
    out = Fraction(1)
    for r in range(k):
        out = out * (i - r) / (r + 1)
    return out


def _max_floor(*floors: Optional[float]) -> Optional[int]:
    known = [f for f in floors if f is not None]
    return int(max(known)) if known else None


def _unknown(mat: Matrix) -> bool:
    """Truncation has left nothing of some entry: its bound fell below weight 0."""
    return any(x.bound is not None and x.bound < 0 for row in mat for x in row)


def _cap_floor(floor: Optional[int], lost: Optional[int], ceiling: int, what: str) -> Optional[int]:
    """Raise `floor` above the highest order whose coefficient was lost to truncation."""
    if lost is None:
        return floor
    if lost >= ceiling:
        raise CertificationError(f"{what}: the leading coefficient is lost to truncation; raise the degree", "degree")
    logger.debug(f"{what}: order {lost} lost to truncation, floor raised to {lost + 1}")
    return _max_floor(floor, lost + 1)


@dataclass
class PsiDO:
    n: int
    terms: Dict[int, Matrix] = field(default_factory=dict)
    floor: Optional[int] = None

    def __post_init__(self):
        clean = {}
        for order, mat in self.terms.items():
            if self.floor is not None and order < self.floor:
                continue
            if not mat_is_zero(mat):
                clean[order] = mat
        self.terms = clean

    # --- constructors ---
    @classmethod
    def identity(cls, n: int, D: Optional[int] = None, floor: Optional[int] = None) -> "PsiDO":
        return cls(n, {0: mat_identity(n, D)}, floor)

    @classmethod
    def d(cls, n: int, D: Optional[int] = None, power: int = 1) -> "PsiDO":
        return cls(n, {power: mat_identity(n, D)})

    @classmethod
    def monomial(cls, mat: Matrix, order: int, floor: Optional[int] = None) -> "PsiDO":
        return cls(len(mat), {order: mat}, floor)

    # --- inspection ---
    @property
    def order(self) -> int:
        """Highest stored order (the ceiling); -infinity is reported as floor - 1."""
        if not self.terms:
            return (self.floor - 1) if self.floor is not None else 0
        return max(self.terms)

    @property
    def degree(self) -> Optional[int]:
        bounds = [x.bound for mat in self.terms.values() for row in mat for x in row if x.bound is not None]
        return min(bounds) if bounds else None

    def coefficient(self, order: int) -> Matrix:
        if self.floor is not None and order < self.floor:
            raise CertificationError(f"order {order} is below the certified floor {self.floor}", "floor")
        return self.terms.get(order) or mat_zero(self.n, self.degree)

    def is_monic(self) -> bool:
        lead = self.terms.get(self.order)
        return lead is not None and lead == mat_identity(self.n)

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, floor: Optional[int]) -> "PsiDO":
        return PsiDO(self.n, dict(self.terms), _max_floor(self.floor, floor))

    # --- linear structure ---
    def __add__(self, other: "PsiDO") -> "PsiDO":
        out = dict(self.terms)
        for order, mat in other.terms.items():
            out[order] = mat_add(out[order], mat) if order in out else mat
        return PsiDO(self.n, out, _max_floor(self.floor, other.floor))

    def __neg__(self) -> "PsiDO":
        return PsiDO(self.n, {o: mat_scale(m, -1) for o, m in self.terms.items()}, self.floor)

    def __sub__(self, other: "PsiDO") -> "PsiDO":
        return self + (-other)

    def scale(self, c) -> "PsiDO":
        return PsiDO(self.n, {o: mat_scale(m, c) for o, m in self.terms.items()}, self.floor)

    def __matmul__(self, other: "PsiDO") -> "PsiDO":
        return pdo_compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, PsiDO):
            return NotImplemented
        return (self - other).is_zero()

    # --- serialization ---
    def to_json(self):
        return {
            "n": self.n,
            "floor": self.floor,
            "terms": [[o, [[x.to_json() for x in row] for row in m]] for o, m in sorted(self.terms.items(), reverse=True)],
        }

    @classmethod
    def from_json(cls, data, D: Optional[int] = None, location: str = "operator") -> "PsiDO":
        if not isinstance(data, dict) or "n" not in data:
            raise SchemaError("operator must be an object with 'n' and 'terms'", location)
        n = int(data["n"])
        terms = {}
        for k, entry in enumerate(data.get("terms", [])):
            try:
                order, mat = entry
                rows = [[TimePoly.from_json(x, D) for x in row] for row in mat]
            except (TypeError, ValueError) as e:
                raise SchemaError("term must be [order, matrix]", f"{location}.terms[{k}]") from e
            if len(rows) != n or any(len(r) != n for r in rows):
                raise SchemaError(f"coefficient is not {n} x {n}", f"{location}.terms[{k}]")
            terms[int(order)] = rows
        floor = data.get("floor")
        return cls(n, terms, None if floor is None else int(floor))


# --- composition ---

def _derivatives(mat: Matrix, k: int, n: int, cache: Dict) -> Matrix:
    key = (id(mat), k)
    if key not in cache:
        if k == 0:
            cache[key] = mat
        else:
            cache[key] = mat_map(_derivatives(mat, k - 1, n, cache), lambda x: d_coefficient(x, n))
    return cache[key]


def _compose_floor(P: PsiDO, Q: PsiDO, floor: Optional[int]) -> int:
    certified = _max_floor(
        None if P.floor is None else P.floor + Q.order,
        None if Q.floor is None else Q.floor + P.order,
    )
    # exact operators compose exactly: d^k of a polynomial coefficient vanishes for large k
    return _max_floor(certified, floor)


def pdo_compose(P: PsiDO, Q: PsiDO, floor: Optional[int] = None) -> PsiDO:
    """Leibniz rule: a d^i o b d^j = sum_k binom(i, k) a (d^k b) d^{i+j-k}."""
    if P.n != Q.n:
        raise DomainError(f"operator sizes differ: {P.n} vs {Q.n}")
    out_floor = _compose_floor(P, Q, floor)
    if out_floor is not None and out_floor > P.order + Q.order:
        raise CertificationError(f"empty certified range: floor {out_floor} above order {P.order + Q.order}", "floor")
    cache: Dict = {}
    out: Dict[int, Matrix] = {}
    lost: Optional[int] = None
    for i, a in P.terms.items():
        for j, b in Q.terms.items():
            k = 0
            while True:
                order = i + j - k
                if out_floor is not None and order < out_floor:
                    break
                if i >= 0 and k > i:
                    break
                db = _derivatives(b, k, P.n, cache)
                term = mat_scale(mat_mul(a, db), binomial(i, k))
                if _unknown(term):
                    lost = order if lost is None else max(lost, order)
                    break
                if k and mat_is_zero(db):
                    break
                out[order] = mat_add(out[order], term) if order in out else term
                k += 1
    out_floor = _cap_floor(out_floor, lost, P.order + Q.order, "pdo_compose")
    return PsiDO(P.n, out, out_floor)


def pdo_adjoint(P: PsiDO, floor: Optional[int] = None) -> PsiDO:
    """P* = sum (-d)^i o a_i^T."""
    out_floor = _max_floor(P.floor, floor)
    cache: Dict = {}
    out: Dict[int, Matrix] = {}
    lost: Optional[int] = None
    for i, a in P.terms.items():
        at = mat_transpose(a)
        sign = -1 if i % 2 else 1
        k = 0
        while True:
            order = i - k
            if out_floor is not None and order < out_floor:
                break
            if i >= 0 and k > i:
                break
            da = _derivatives(at, k, P.n, cache)
            if _unknown(da):
                lost = order if lost is None else max(lost, order)
                break
            if k and mat_is_zero(da):
                break
            term = mat_scale(da, binomial(i, k) * sign)
            out[order] = mat_add(out[order], term) if order in out else term
            k += 1
    out_floor = _cap_floor(out_floor, lost, P.order, "pdo_adjoint")
    return PsiDO(P.n, out, out_floor)


def pdo_split(P: PsiDO) -> Tuple[PsiDO, PsiDO]:
    plus = PsiDO(P.n, {o: m for o, m in P.terms.items() if o >= 0})
    minus = PsiDO(P.n, {o: m for o, m in P.terms.items() if o < 0}, P.floor)
    return plus, minus


def _order_coefficient(P: PsiDO, Q: PsiDO, t: int, cache: Dict) -> Tuple[Optional[Matrix], bool]:
    """Coefficient of d^t in P o Q, and whether truncation left it known."""
    acc = None
    for i, a in P.terms.items():
        for j, b in Q.terms.items():
            k = i + j - t
            if k < 0 or (i >= 0 and k > i):
                continue
            db = _derivatives(b, k, P.n, cache)
            term = mat_scale(mat_mul(a, db), binomial(i, k))
            if _unknown(term):
                return None, False
            if mat_is_zero(db):
                continue
            acc = term if acc is None else mat_add(acc, term)
    return acc, True


def pdo_invert(P: PsiDO, floor: Optional[int] = None) -> PsiDO:
    """Order-by-order right inverse Q with P o Q = 1; it is also a left inverse."""
    if P.is_zero():
        raise DomainError("zero operator is not invertible")
    d = P.order
    lead_inv = mat_constant_inverse(P.terms[d])
    certified = None if P.floor is None else P.floor - 2 * d
    out_floor = _max_floor(certified, floor)
    if out_floor is None:
        if len(P.terms) == 1 and all(x.is_constant() for row in P.terms[d] for x in row):
            return PsiDO(P.n, {-d: lead_inv})
        raise DomainError("inverse has infinitely many terms; give a floor")
    Q = PsiDO(P.n, {-d: lead_inv})
    cache: Dict = {}
    for r in range(-d - 1, out_floor - 1, -1):
        t = r + d
        residual, known = _order_coefficient(P, Q, t, cache)
        if not known:
            logger.debug(f"pdo_invert: order {r} lost to truncation, floor raised to {r + 1}")
            out_floor = r + 1
            break
        if residual is None:
            continue
        Q.terms[r] = mat_scale(mat_mul(lead_inv, residual), -1)
        Q = PsiDO(P.n, Q.terms)
        cache = {}
    logger.debug(f"pdo_invert: order {d} floor {out_floor}")
    return PsiDO(P.n, Q.terms, out_floor)


def pdo_conjugate(P: PsiDO, X: PsiDO, floor: Optional[int] = None) -> PsiDO:
    """P o X o P^-1."""
    inv = pdo_invert(P, floor)
    return pdo_compose(pdo_compose(P, X, floor), inv, floor)


def pdo_diff(P: PsiDO, x: TimeIndex) -> PsiDO:
    var = x.var("s")
    terms = {o: mat_map(m, lambda c: c.diff(var)) for o, m in P.terms.items()}
    lost = max((o for o, m in terms.items() if _unknown(m)), default=None)
    return PsiDO(P.n, terms, _cap_floor(P.floor, lost, P.order, "pdo_diff"))


def commutator(A: PsiDO, B: PsiDO, floor: Optional[int] = None) -> PsiDO:
    return pdo_compose(A, B, floor) - pdo_compose(B, A, floor)


def constant_matrix(rows, D: Optional[int] = None) -> Matrix:
    return [[TimePoly.const(to_scalar(x), D) for x in row] for row in rows]
