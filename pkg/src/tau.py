"""
Tau functions of plus-type points.

Laurent data is written in the spectral parameter u (the inverse of the
usual coordinate z), so the universal time element exp(sum s_ij z^-i)
raises u-exponents. The tau function is tau_U(s) = Omega_+(exp(-xi(s)) U),
the orientation under which the wave function of the vacuum is exp(xi).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple

from src.algebra import TimeIndex, TimePoly, exp_series_coefficients, monomial_weight, to_scalar
from src.errors import CertificationError, DomainError, SchemaError
from src.grassmannian import GrassPoint, index, perp, position
from src.linalg import bareiss_det, berkowitz_det

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MiwaPoint:
    """Rational Miwa values t[l][j] for 1 <= l <= N and 1 <= j <= n."""

    t: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(to_scalar(x) for x in row) for row in self.t)
        if not rows or len({len(r) for r in rows}) != 1:
            raise SchemaError("Miwa point must be a non-empty rectangular array")
        object.__setattr__(self, "t", rows)

    @property
    def N(self) -> int:
        return len(self.t)

    @property
    def n(self) -> int:
        return len(self.t[0])

    def column(self, j: int) -> List[Fraction]:
        return [row[j - 1] for row in self.t]


@dataclass
class TauPolynomial:
    value: TimePoly
    normalization: Fraction
    certificate: Dict[str, object] = field(default_factory=dict)

    def to_json(self):
        return {
            "value": self.value.to_json(),
            "text": self.value.to_str(),
            "normalization": str(self.normalization),
            "certificate": self.certificate,
        }


def _require_index_zero(U: GrassPoint):
    if U.kind != "plus":
        raise DomainError("tau functions are defined for plus-type points")
    m = index(U)
    if m != 0:
        raise DomainError(f"point has index {m}; tau needs index 0 (scale by the flag generator first)")


def inverse_flow_series(U: GrassPoint, D: int, times: Optional[Mapping[TimeIndex, TimePoly]] = None):
    """Coefficients h_w(-s), w <= D, of exp(-xi) for every time component."""
    series = {}
    for j in range(1, U.time_components + 1):
        x = {}
        for i in range(1, D + 1):
            xi = times.get(TimeIndex(i, j), 0) if times is not None else TimePoly.var("s", i, j, D)
            if not isinstance(xi, TimePoly):
                xi = TimePoly.const(to_scalar(xi), D)
            x[i] = -xi
        series[j] = exp_series_coefficients(x, D, D)
    return series


def flowed_generators(U: GrassPoint, D: int, times=None) -> List[Dict[int, TimePoly]]:
    """exp(-xi) * f for every generator f, as position vectors below the tail."""
    series = inverse_flow_series(U, D, times)
    out = []
    for f in U.gens:
        vec: Dict[int, TimePoly] = {}
        for (a, b), c in f.coeffs.items():
            h = series[U.flow_of(b)]
            for w, hw in enumerate(h):
                e = a + w
                if e >= U.tail_order:
                    break
                p = position(e, b, U.n)
                term = hw * c
                vec[p] = vec[p] + term if p in vec else term
        out.append(vec)
    return out


def projection_matrix(U: GrassPoint, D: int, times=None) -> List[List[TimePoly]]:
    """
    Rows: positions [0, nM); columns: flowed generators. The tail columns of the
    full projection are unitriangular and contribute a factor 1.
    """
    cols = flowed_generators(U, D, times)
    size = U.n * U.tail_order
    zero = TimePoly.zero(D)
    return [[col.get(p, zero) for col in cols] for p in range(size)]


def omega_plus(U: GrassPoint) -> Fraction:
    _require_index_zero(U)
    size = U.n * U.tail_order
    rows = [[Fraction(g.coeffs.get((p // U.n, p % U.n + 1), 0)) for g in U.gens] for p in range(size)]
    return bareiss_det(rows)


def tau_degree_bound(U: GrassPoint) -> int:
    """Largest weight in tau_U: slot exponents minus pivot exponents."""
    pivots = U.pivots()
    slots = range(U.n * U.tail_order)
    return sum(p // U.n for p in slots) - sum(p // U.n for p in pivots)


def _tau_det(U: GrassPoint, D: int, times=None) -> TimePoly:
    matrix = projection_matrix(U, D, times)
    return berkowitz_det(matrix, TimePoly.const(1, D))


def tau_series(U: GrassPoint, D: int, times: Optional[Mapping[TimeIndex, TimePoly]] = None) -> TauPolynomial:
    """
    tau_U truncated at weighted degree D. `times` replaces the generators
    s_ij of the flow (e.g. s + s' for the group law).
    """
    _require_index_zero(U)
    if D < 0:
        raise DomainError("degree must be non-negative")
    logger.info(f"tau_series: n={U.n} M={U.tail_order} gens={len(U.gens)} D={D}")
    value = _tau_det(U, D, times)
    wider = _tau_det(U, D + 1, times)
    stable = wider.truncate(D) == value
    if not stable:
        raise CertificationError(f"tau did not stabilize at degree {D}", "degree")
    exact = not any(monomial_weight(m) == D + 1 for m in wider.terms)
    bound = tau_degree_bound(U)
    certificate = {
        "window": U.n * (U.tail_order + D),
        "rows_used": U.n * U.tail_order,
        "degree": D,
        "stable": stable,
        "exact": exact and D >= bound,
        "degree_bound": bound,
    }
    normalization = value.constant_term
    return TauPolynomial(value, normalization, certificate)


def tau_exact(U: GrassPoint) -> TimePoly:
    """The exact tau polynomial (no truncation)."""
    _require_index_zero(U)
    bound = tau_degree_bound(U)
    value = _tau_det(U, bound)
    return value.with_bound(None)


def miwa_map(t: MiwaPoint, D: int) -> Dict[TimeIndex, Fraction]:
    """s_ij = (1/i) sum_l t_lj^i for i <= D."""
    return {
        TimeIndex(i, j): Fraction(1, i) * sum((x ** i for x in t.column(j)), Fraction(0))
        for i in range(1, D + 1)
        for j in range(1, t.n + 1)
    }


def tau_at_miwa(U: GrassPoint, t: MiwaPoint) -> Fraction:
    tau = tau_exact(U)
    s = miwa_map(t, max(tau_degree_bound(U), 1))
    return tau.evaluate({k.var(): v for k, v in s.items()})


def _vandermonde(values: List[Fraction]) -> Fraction:
    out = Fraction(1)
    for i in range(len(values)):
        for k in range(i + 1, len(values)):
            out *= values[i] - values[k]
    return out


def addition_basis(U: GrassPoint, N: int) -> List[Dict[Tuple[int, int], Fraction]]:
    """
    Basis of u^{-(N-1)} U^perp intersected with the polynomials in z = 1/u:
    shifted generators of U^perp plus the shifted tail monomials of exponent <= 0.
    """
    W = perp(U)
    if N < W.tail_order:
        raise DomainError(f"N = {N} is below the required {W.tail_order}")
    shift = -(N - 1)
    basis = [{(a + shift, b): c for (a, b), c in g.coeffs.items()} for g in W.gens]
    for a in range(W.tail_order + shift, 1):
        for b in range(1, U.n + 1):
            basis.append({(a, b): Fraction(1)})
    return basis


def _evaluation_det(basis, t: MiwaPoint, n: int) -> Fraction:
    rows = []
    for j in range(1, n + 1):
        for x in t.column(j):
            row = []
            for f in basis:
                # u^a evaluated at z = x is x^(-a)
                row.append(sum((c * x ** (-a) for (a, b), c in f.items() if b == j), Fraction(0)))
            rows.append(row)
    return bareiss_det(rows)


def tau_addition_formula(U: GrassPoint, t: MiwaPoint) -> Fraction:
    """
    Determinant of basis functions evaluated at the Miwa points over the
    product of Vandermonde factors; normalized so that the vacuum gives 1.
    Equal to tau_U at miwa_map(t) up to a non-zero constant.
    """
    _require_index_zero(U)
    if t.n != U.n:
        raise DomainError(f"Miwa point has {t.n} components, point has {U.n}")
    deltas = Fraction(1)
    for j in range(1, U.n + 1):
        col = t.column(j)
        if len(set(col)) != len(col):
            raise DomainError(f"repeated Miwa values in component {j}")
        deltas *= _vandermonde(col)
    vacuum = GrassPoint.vacuum(U.n, U.shape)
    det = _evaluation_det(addition_basis(U, t.N), t, U.n)
    det_vacuum = _evaluation_det(addition_basis(vacuum, t.N), t, U.n)
    sign = det_vacuum / deltas
    return det / deltas / sign
