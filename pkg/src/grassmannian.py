"""
Finitely presented rational points of the Sato Grassmannian of E((u)).

Exponents are powers of the spectral parameter u = 1/z. Plus-type points are
span(gens) + u^M E[[u]]; discrete-type points (rings of
functions on a curve) carry no tail and are only known on an exponent window.
The monomial u^a e_b sits at position a*n + (b - 1); pivots are minimal positions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

import sympy

from src.algebra import TimePoly, VectorLaurent, laurent_mul, scalar_to_str, to_scalar
from src.errors import CertificationError, DomainError, SchemaError
from src.linalg import Echelon, SparseVector

logger = logging.getLogger(__name__)


def position(a: int, b: int, n: int) -> int:
    return a * n + (b - 1)


def monomial_at(p: int, n: int) -> Tuple[int, int]:
    return p // n, p % n + 1


def flow_component(component: int, shape: Optional[Tuple[int, int]] = None) -> int:
    # matrix entries (k, j) are stored row-major; E_j multiplies from the right
    return (component - 1) % shape[1] + 1 if shape else component


def _scalar(c) -> Fraction:
    if isinstance(c, TimePoly):
        if not c.is_constant():
            raise DomainError("generator coefficients must be rational, not time dependent")
        return c.constant_term
    return Fraction(c)


def to_sparse(v: VectorLaurent, n: int, lo: Optional[int] = None, hi: Optional[int] = None) -> SparseVector:
    """Sparse position vector of v, keeping exponents in [lo, hi)."""
    out = {}
    for (a, b), c in v.coeffs.items():
        if (lo is not None and a < lo) or (hi is not None and a >= hi):
            continue
        c = _scalar(c)
        if c:
            out[position(a, b, n)] = c
    return out


def from_sparse(vec: SparseVector, n: int) -> VectorLaurent:
    return VectorLaurent(n, {monomial_at(p, n): c for p, c in vec.items()})


@dataclass(frozen=True)
class GrassPoint:
    n: int
    gens: Tuple[VectorLaurent, ...] = ()
    tail_order: Optional[int] = None
    window: Optional[Tuple[int, int]] = None
    declared_index: Optional[int] = None
    shape: Optional[Tuple[int, int]] = None

    @property
    def kind(self) -> str:
        return "plus" if self.tail_order is not None else "discrete"

    @property
    def time_components(self) -> int:
        return self.shape[1] if self.shape else self.n

    def flow_of(self, component: int) -> int:
        """Time component acting on a vector component (columns of a matrix point)."""
        return flow_component(component, self.shape)

    # --- constructors ---
    @classmethod
    def plus(cls, n: int, gens: Iterable[VectorLaurent], tail_order: int, declared_index: Optional[int] = None, shape=None):
        point = canonicalize(cls(n, tuple(gens), tail_order, shape=shape))
        computed = index(point)
        if declared_index is not None and declared_index != computed:
            raise DomainError(f"declared index {declared_index} differs from computed index {computed}")
        return cls(n, point.gens, point.tail_order, None, computed, shape)

    @classmethod
    def discrete(cls, n: int, gens: Iterable[VectorLaurent], window: Tuple[int, int], declared_index=None):
        point = canonicalize(cls(n, tuple(gens), None, tuple(window), declared_index))
        if declared_index is not None:
            computed = index(point)
            if computed != declared_index:
                raise DomainError(f"declared index {declared_index} differs from window index {computed}")
        return point

    @classmethod
    def vacuum(cls, n: int, shape=None) -> "GrassPoint":
        return cls(n, (), 0, None, 0, shape)

    # --- helpers ---
    def sparse_gens(self) -> List[SparseVector]:
        if self.kind == "plus":
            return [to_sparse(g, self.n, hi=self.tail_order) for g in self.gens]
        lo, hi = self.window
        return [to_sparse(g, self.n, lo, hi) for g in self.gens]

    def echelon(self) -> Echelon:
        ech = Echelon()
        for vec in self.sparse_gens():
            ech.add(vec)
        return ech

    def pivots(self) -> List[int]:
        return self.echelon().pivots

    def lowest_exponent(self) -> int:
        """Smallest exponent occurring in a generator (tail order when there are none)."""
        exps = [a for g in self.gens for (a, _) in g.coeffs]
        if self.kind == "plus":
            return min(exps + [self.tail_order])
        return min(exps + [self.window[0]])

    # --- serialization ---
    def to_json(self):
        data = {
            "n": self.n,
            "kind": self.kind,
            "generators": [[[a, b, scalar_to_str(_scalar(c))] for (a, b), c in sorted(g.coeffs.items())] for g in self.gens],
            "index": self.declared_index,
        }
        if self.kind == "plus":
            data["tail_order"] = self.tail_order
        else:
            data["window"] = list(self.window)
        if self.shape:
            data["shape"] = list(self.shape)
        return data

    @classmethod
    def from_json(cls, data, location: str = "point") -> "GrassPoint":
        if not isinstance(data, dict) or "n" not in data:
            raise SchemaError("point must be an object with 'n' and 'generators'", location)
        n = int(data["n"])
        gens = []
        for k, terms in enumerate(data.get("generators", [])):
            try:
                coeffs = {(int(a), int(b)): to_scalar(c) for a, b, c in terms}
                gens.append(VectorLaurent(n, coeffs))
            except (TypeError, ValueError, DomainError) as e:
                raise SchemaError(f"bad generator: {e}", f"{location}.generators[{k}]") from e
        kind = data.get("kind", "plus" if "tail_order" in data else "discrete")
        shape = tuple(data["shape"]) if data.get("shape") else None
        try:
            if kind == "plus":
                return cls.plus(n, gens, int(data.get("tail_order", 0)), data.get("index"), shape)
            if "window" not in data:
                raise SchemaError("discrete point needs a window", location)
            return cls.discrete(n, gens, tuple(data["window"]), data.get("index"))
        except DomainError as e:
            raise SchemaError(str(e), location) from e


def canonicalize(U: GrassPoint) -> GrassPoint:
    """
    Fully reduced echelon form of the generators; dependent generators are
    rejected. Plus-type points also get the smallest tail order.
    """
    ech = U.echelon()
    tail = U.tail_order
    if U.kind == "plus":
        while ech.rows and all(
            ech.contains({position(tail - 1, b, U.n): Fraction(1)}) for b in range(1, U.n + 1)
        ):
            tail -= 1
            cut = tail * U.n
            rows = [{p: c for p, c in row.items() if p < cut} for pivot, row in ech.rows.items() if pivot < cut]
            ech = Echelon()
            for row in rows:
                ech.add(row)
    gens = tuple(from_sparse(ech.rows[p], U.n) for p in ech.pivots)
    if U.kind == "discrete":
        gens = tuple(g.restrict(None, U.window[1]) for g in gens)
    return GrassPoint(U.n, gens, tail, U.window, U.declared_index, U.shape)


def index(U: GrassPoint) -> int:
    if U.kind == "plus":
        return len(U.gens) - U.n * U.tail_order
    lo, hi = U.window
    if lo >= 0 or hi <= 0:
        raise CertificationError(f"window [{lo}, {hi}) must straddle 0 to certify the index", "window")
    pivots = set(U.pivots())
    inside = sum(1 for p in pivots if p >= 0)
    gaps = sum(1 for p in range(U.n * lo, 0) if p not in pivots)
    return inside - gaps


def contains(U: GrassPoint, v: VectorLaurent) -> bool:
    if v.n != U.n:
        raise DomainError(f"vector has {v.n} components, point has {U.n}")
    if U.kind == "plus":
        if v.lo is not None or (v.hi is not None and v.hi < U.tail_order):
            raise CertificationError(
                f"vector window [{v.lo}, {v.hi}) does not certify membership below u^{U.tail_order}", "window"
            )
        vec = to_sparse(v, U.n, hi=U.tail_order)
    else:
        lo, hi = U.window
        if (v.lo is not None and v.lo > lo) or (v.hi is not None and v.hi < hi):
            raise CertificationError(f"vector window [{v.lo}, {v.hi}) does not cover [{lo}, {hi})", "window")
        vec = to_sparse(v, U.n, lo, hi)
    return U.echelon().contains(vec)


def includes(U: GrassPoint, W: GrassPoint) -> bool:
    """Whether U is a subspace of W (plus-type)."""
    if U.tail_order < W.tail_order:
        return False
    extra = [VectorLaurent.monomial(U.n, a, b) for a in range(U.tail_order, W.tail_order) for b in range(1, U.n + 1)]
    return all(contains(W, g) for g in list(U.gens) + extra)


def perp(U: GrassPoint) -> GrassPoint:
    """Annihilator under res(f g) = sum_i <f_i, g_{-i-1}>."""
    if U.kind != "plus":
        raise DomainError("perp is only available for plus-type points")
    n, M = U.n, U.tail_order
    lo = min(U.lowest_exponent(), M)
    # unknown coefficients of g at exponents [-M, -lo)
    cells = [(a, b) for a in range(-M, -lo) for b in range(1, n + 1)]
    if not cells:
        return GrassPoint(n, (), -lo, None, -index(U), U.shape)
    column = {cell: k for k, cell in enumerate(cells)}
    rows = []
    for g in U.gens:
        row = [0] * len(cells)
        for (a, b), c in g.coeffs.items():
            k = column.get((-a - 1, b))
            if k is not None:
                row[k] = sympy.Rational(c.numerator, c.denominator)
        rows.append(row)
    if rows:
        basis = sympy.Matrix(rows).nullspace()
    else:
        basis = [sympy.Matrix([1 if k == i else 0 for k in range(len(cells))]) for i in range(len(cells))]
    gens = []
    for vec in basis:
        coeffs = {cells[k]: Fraction(int(x.p), int(x.q)) for k, x in enumerate(vec) if x != 0}
        gens.append(VectorLaurent(n, coeffs))
    return GrassPoint.plus(n, gens, -lo, shape=U.shape)


@dataclass(frozen=True)
class FlagGenerator:
    m: int
    zeta: VectorLaurent


def flag_generator(m: int, n: int) -> FlagGenerator:
    """Componentwise monomial of total order m: u^{q+1} in the first r slots, u^q after, m = qn + r."""
    q, r = divmod(m, n)
    zeta = VectorLaurent(n, {((q + 1) if b <= r else q, b): Fraction(1) for b in range(1, n + 1)})
    return FlagGenerator(m, zeta)


def scale(U: GrassPoint, w: VectorLaurent) -> GrassPoint:
    """
    The point w*U for w a componentwise unit (monomial times unit series).
    The index drops by the total u-order of w.
    """
    if w.n != U.n:
        raise DomainError(f"scaling vector has {w.n} components, point has {U.n}")
    orders = []
    for b in range(1, U.n + 1):
        comp = w.component(b)
        if not comp or (w.lo is not None and w.lo >= min(comp)):
            raise DomainError(f"component {b} of the scaling vector is not invertible")
        orders.append(min(comp))
    if U.kind == "plus":
        M = U.tail_order
        new_tail = M + max(orders)
        gens = []
        for g in U.gens:
            prod = laurent_mul(g, w)
            if prod.hi is not None and prod.hi < new_tail:
                raise CertificationError(f"scaling vector known only below u^{prod.hi}", "window")
            gens.append(prod.drop_from(new_tail))
        for b, c in enumerate(orders, start=1):
            for a in range(M + c, new_tail):
                gens.append(VectorLaurent.monomial(U.n, a, b))
        return GrassPoint.plus(U.n, gens, new_tail, shape=U.shape)
    lo, hi = U.window
    gens = [laurent_mul(g.restrict(lo, hi), w) for g in U.gens]
    new_lo = max([g.lo for g in gens if g.lo is not None] + [lo + min(orders)])
    new_hi = min([g.hi for g in gens if g.hi is not None] + [hi + max(orders)])
    if new_lo >= new_hi:
        raise CertificationError("scaled window is empty", "window")
    return GrassPoint.discrete(U.n, [g.restrict(new_lo, new_hi) for g in gens], (new_lo, new_hi))


def normalize_index(U: GrassPoint) -> Tuple[GrassPoint, FlagGenerator]:
    """Move a plus-type point of index m to index 0 by the flag generator of order m."""
    flag = flag_generator(index(U), U.n)
    return scale(U, flag.zeta), flag
