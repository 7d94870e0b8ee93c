"""
Exact coefficient rings: rationals, truncated polynomials in the KP times and
windowed Laurent series with vector or matrix coefficients.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Optional, Tuple

from src.errors import CertificationError, DomainError, SchemaError

logger = logging.getLogger(__name__)

Scalar = Fraction

# A variable is (namespace, i, j); "s", "s'", "s''" are copies of the KP times, "t" holds Miwa points.
Var = Tuple[str, int, int]
Monomial = Tuple[Tuple[Var, int], ...]

ONE_MONOMIAL: Monomial = ()


def to_scalar(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError as e:
            raise SchemaError(f"not a rational number: {value!r}") from e
    raise SchemaError(f"not a rational number: {value!r}")


def scalar_to_str(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def _family(ns: str) -> str:
    return "t" if ns.startswith("t") else "s"


@dataclass(frozen=True, order=True)
class TimeIndex:
    """Index (i, j) of the time s_ij: flow depth i >= 1, component j >= 1."""

    i: int
    j: int

    def __post_init__(self):
        if self.i < 1 or self.j < 1:
            raise DomainError(f"invalid time index ({self.i}, {self.j})")

    def var(self, ns: str = "s") -> Var:
        return (ns, self.i, self.j)


@lru_cache(maxsize=None)
def monomial_weight(mono: Monomial) -> int:
    return sum(v[1] * e for v, e in mono)


@lru_cache(maxsize=65536)
def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for v, e in b:
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items()))


def _min_bound(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class TimePoly:
    """
    Polynomial with rational coefficients in the time variables, truncated at
    weighted degree `bound` (weight of s_ij is i). `bound=None` means exact.
    """

    __slots__ = ("terms", "bound", "_family")

    def __init__(self, terms: Optional[Mapping[Monomial, Fraction]] = None, bound: Optional[int] = None):
        self.bound = bound
        clean: Dict[Monomial, Fraction] = {}
        families = set()
        for mono, c in (terms or {}).items():
            if not c:
                continue
            if bound is not None and monomial_weight(mono) > bound:
                continue
            clean[mono] = Fraction(c)
            families.update(_family(v[0]) for v, _ in mono)
        if len(families) > 1:
            raise DomainError("time polynomial mixes s-variables and t-variables")
        self.terms = clean
        self._family = families.pop() if families else None

    # --- constructors ---
    @classmethod
    def const(cls, c, bound: Optional[int] = None) -> "TimePoly":
        return cls({ONE_MONOMIAL: to_scalar(c)}, bound)

    @classmethod
    def var(cls, ns: str, i: int, j: int, bound: Optional[int] = None) -> "TimePoly":
        return cls({(((ns, i, j), 1),): Fraction(1)}, bound)

    @classmethod
    def zero(cls, bound: Optional[int] = None) -> "TimePoly":
        return cls({}, bound)

    # --- inspection ---
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get(ONE_MONOMIAL, Fraction(0))

    def is_constant(self) -> bool:
        return all(not mono for mono in self.terms)

    def degree(self) -> int:
        return max((monomial_weight(m) for m in self.terms), default=-1)

    def variables(self):
        return sorted({v for mono in self.terms for v, _ in mono})

    def lowest_term(self):
        """The nonzero term of least weight (ties broken by monomial order), or None."""
        if not self.terms:
            return None
        mono = min(self.terms, key=lambda m: (monomial_weight(m), m))
        return mono, self.terms[mono]

    # --- arithmetic ---
    @staticmethod
    def _coerce(other, bound=None) -> "TimePoly":
        if isinstance(other, TimePoly):
            return other
        if isinstance(other, (int, Fraction)):
            return TimePoly.const(other, bound)
        return NotImplemented

    def _check_family(self, other: "TimePoly"):
        if self._family and other._family and self._family != other._family:
            raise DomainError("namespace clash: s-variables and t-variables need miwa_map as adapter")

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        self._check_family(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return TimePoly(out, _min_bound(self.bound, other.bound))

    __radd__ = __add__

    def __neg__(self):
        return TimePoly({m: -c for m, c in self.terms.items()}, self.bound)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TimePoly({m: c * other for m, c in self.terms.items()}, self.bound)
        if not isinstance(other, TimePoly):
            return NotImplemented
        self._check_family(other)
        bound = _min_bound(self.bound, other.bound)
        out: Dict[Monomial, Fraction] = {}
        other_items = [(mb, cb, monomial_weight(mb)) for mb, cb in other.terms.items()]
        for ma, ca in self.terms.items():
            wa = monomial_weight(ma)
            for mb, cb, wb in other_items:
                if bound is not None and wa + wb > bound:
                    continue
                m = _mono_mul(ma, mb)
                out[m] = out.get(m, 0) + ca * cb
        return TimePoly(out, bound)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, TimePoly):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = TimePoly.const(1, self.bound)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TimePoly.const(other)
        if not isinstance(other, TimePoly):
            return NotImplemented
        bound = _min_bound(self.bound, other.bound)
        return self.truncate(bound).terms == other.truncate(bound).terms

    def __repr__(self):
        return f"TimePoly({self.to_str()}, bound={self.bound})"

    # --- ring operations ---
    def truncate(self, bound: Optional[int]) -> "TimePoly":
        if bound is None or (self.bound is not None and self.bound <= bound):
            return self
        return TimePoly(self.terms, bound)

    def with_bound(self, bound: Optional[int]) -> "TimePoly":
        """Re-label the truncation bound; only lowers the bound or certifies an exact polynomial."""
        if bound is not None and self.bound is not None and bound > self.bound:
            raise CertificationError(f"cannot raise truncation bound {self.bound} to {bound}", "degree")
        return TimePoly(self.terms, bound)

    def inverse(self) -> "TimePoly":
        """Inverse of a unit (nonzero constant term) in the truncated ring."""
        c0 = self.constant_term
        if not c0:
            raise DomainError("time polynomial with zero constant term is not invertible")
        if self.is_constant():
            return TimePoly.const(1 / c0, self.bound)
        if self.bound is None:
            raise DomainError("non-constant exact polynomial has no polynomial inverse")
        # 1/(c0(1+x)) = (1/c0) * sum (-x)^k, x nilpotent of weight >= 1
        x = self * (1 / c0) - 1
        term = TimePoly.const(1, self.bound)
        total = TimePoly.const(1, self.bound)
        for _ in range(self.bound):
            term = term * (-x)
            if term.is_zero():
                break
            total = total + term
        return total * (1 / c0)

    def diff(self, var: Var) -> "TimePoly":
        out: Dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            exps = dict(mono)
            e = exps.get(var, 0)
            if not e:
                continue
            if e == 1:
                del exps[var]
            else:
                exps[var] = e - 1
            m = tuple(sorted(exps.items()))
            out[m] = out.get(m, 0) + c * e
        # a derivative of weight i is only known up to degree bound - i
        bound = None if self.bound is None else self.bound - var[1]
        return TimePoly(out, bound)

    def subs(self, mapping: Mapping[Var, "TimePoly"], bound: Optional[int] = None) -> "TimePoly":
        """Substitute variables by time polynomials (or rationals); unmapped variables stay."""
        bound = _min_bound(self.bound, bound) if bound is not None else self.bound
        powers: Dict[Tuple[Var, int], TimePoly] = {}

        def power(v, e):
            key = (v, e)
            if key not in powers:
                base = mapping[v]
                if not isinstance(base, TimePoly):
                    base = TimePoly.const(base)
                powers[key] = base.truncate(bound) ** e if e > 1 else base.truncate(bound)
            return powers[key]

        total = TimePoly.zero(bound)
        for mono, c in self.terms.items():
            term = TimePoly.const(c, bound)
            kept = []
            for v, e in mono:
                if v in mapping:
                    term = term * power(v, e)
                else:
                    kept.append((v, e))
            if kept:
                term = term * TimePoly({tuple(kept): Fraction(1)}, bound)
            total = total + term
        return total.truncate(bound)

    def evaluate(self, values: Mapping[Var, Fraction]) -> Fraction:
        """Exact value at a rational point; every variable must be assigned."""
        total = Fraction(0)
        for mono, c in self.terms.items():
            term = c
            for v, e in mono:
                if v not in values:
                    raise DomainError(f"variable {v} has no value")
                term *= Fraction(values[v]) ** e
            total += term
        return total

    def rename(self, src: str, dst: str) -> "TimePoly":
        """Move every variable of namespace `src` to namespace `dst`."""
        out = {}
        for mono, c in self.terms.items():
            m = tuple(sorted((((dst, v[1], v[2]) if v[0] == src else v), e) for v, e in mono))
            out[m] = c
        return TimePoly(out, self.bound)

    def negate_times(self, ns: str = "s") -> "TimePoly":
        """p(s) -> p(-s) for the variables of namespace `ns`."""
        out = {}
        for mono, c in self.terms.items():
            sign = 1
            for v, e in mono:
                if v[0] == ns and e % 2:
                    sign = -sign
            out[mono] = c * sign
        return TimePoly(out, self.bound)

    # --- serialization ---
    def to_json(self):
        items = sorted(self.terms.items(), key=lambda kv: (monomial_weight(kv[0]), kv[0]))
        return [[[[v[0], v[1], v[2], e] for v, e in mono], scalar_to_str(c)] for mono, c in items]

    @classmethod
    def from_json(cls, data, bound: Optional[int] = None) -> "TimePoly":
        if isinstance(data, (int, str)):
            return cls.const(to_scalar(data), bound)
        if not isinstance(data, list):
            raise SchemaError("time polynomial must be a list of [monomial, coefficient]")
        terms: Dict[Monomial, Fraction] = {}
        for k, entry in enumerate(data):
            try:
                mono_data, coeff = entry
                mono = tuple(sorted(((str(ns), int(i), int(j)), int(e)) for ns, i, j, e in mono_data))
            except (TypeError, ValueError) as e:
                raise SchemaError(f"bad monomial entry {entry!r}", f"[{k}]") from e
            terms[mono] = terms.get(mono, 0) + to_scalar(coeff)
        return cls(terms, bound)

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: (monomial_weight(kv[0]), kv[0])):
            name = "*".join(
                f"{v[0]}{v[1]}{v[2]}" + (f"^{e}" if e > 1 else "") for v, e in mono
            )
            if not name:
                parts.append(str(c))
            elif c == 1:
                parts.append(name)
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts)


def tpoly_mul(a: TimePoly, b: TimePoly) -> TimePoly:
    return a * b


def tpoly_diff(a: TimePoly, x: TimeIndex, ns: str = "s") -> TimePoly:
    return a.diff(x.var(ns))


def is_zero(c) -> bool:
    if isinstance(c, TimePoly):
        return c.is_zero()
    return not c


# --- Windowed Laurent series ---

Key = Tuple[int, int]  # (exponent, component), component is 1-based

INF = float("inf")


@dataclass(frozen=True)
class VectorLaurent:
    """
    E-valued Laurent series. Coefficients are known exactly on the window
    [lo, hi); a side set to None carries no truncation (zero beyond support).
    With `shape=(rows, cols)` the n = rows*cols components are a matrix in
    row-major order.
    """

    n: int
    coeffs: Dict[Key, object] = field(default_factory=dict)
    lo: Optional[int] = None
    hi: Optional[int] = None
    shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        clean = {}
        for (a, b), c in self.coeffs.items():
            if not 1 <= b <= self.n:
                raise DomainError(f"component {b} outside 1..{self.n}")
            if is_zero(c):
                continue
            if self.lo is not None and a < self.lo:
                continue
            if self.hi is not None and a >= self.hi:
                continue
            clean[(a, b)] = Fraction(c) if isinstance(c, int) else c
        object.__setattr__(self, "coeffs", clean)
        if self.shape is not None and self.shape[0] * self.shape[1] != self.n:
            raise DomainError(f"shape {self.shape} does not match {self.n} components")

    # --- constructors ---
    @classmethod
    def monomial(cls, n: int, exponent: int, component: int, c=Fraction(1), shape=None) -> "VectorLaurent":
        return cls(n, {(exponent, component): c}, shape=shape)

    @classmethod
    def ones(cls, n: int, exponent: int = 0) -> "VectorLaurent":
        return cls(n, {(exponent, b): Fraction(1) for b in range(1, n + 1)})

    @classmethod
    def identity_matrix(cls, n: int) -> "VectorLaurent":
        return cls(n * n, {(0, (b - 1) * n + b): Fraction(1) for b in range(1, n + 1)}, shape=(n, n))

    # --- inspection ---
    @property
    def polynomial(self) -> bool:
        return self.lo is None and self.hi is None

    def certified(self, exponent: int) -> bool:
        return (self.lo is None or exponent >= self.lo) and (self.hi is None or exponent < self.hi)

    def coefficient(self, exponent: int, component: int):
        if not self.certified(exponent):
            raise CertificationError(
                f"coefficient u^{exponent} e_{component} outside window [{self.lo}, {self.hi})", "window"
            )
        return self.coeffs.get((exponent, component), Fraction(0))

    def support_range(self) -> Tuple[float, float]:
        if not self.coeffs:
            return INF, -INF
        exps = [a for a, _ in self.coeffs]
        return min(exps), max(exps)

    def component(self, b: int) -> Dict[int, object]:
        return {a: c for (a, bb), c in self.coeffs.items() if bb == b}

    def is_zero(self) -> bool:
        return not self.coeffs

    # --- linear structure ---
    def _joined_window(self, other: "VectorLaurent"):
        lo = max((w for w in (self.lo, other.lo) if w is not None), default=None)
        hi = min((w for w in (self.hi, other.hi) if w is not None), default=None)
        return lo, hi

    def __add__(self, other: "VectorLaurent") -> "VectorLaurent":
        if self.n != other.n:
            raise DomainError(f"component mismatch {self.n} vs {other.n}")
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        lo, hi = self._joined_window(other)
        return VectorLaurent(self.n, out, lo, hi, self.shape or other.shape)

    def __neg__(self) -> "VectorLaurent":
        return self.scale(Fraction(-1))

    def __sub__(self, other: "VectorLaurent") -> "VectorLaurent":
        return self + (-other)

    def scale(self, c) -> "VectorLaurent":
        return VectorLaurent(self.n, {k: v * c for k, v in self.coeffs.items()}, self.lo, self.hi, self.shape)

    def map_coeffs(self, fn) -> "VectorLaurent":
        return VectorLaurent(self.n, {k: fn(v) for k, v in self.coeffs.items()}, self.lo, self.hi, self.shape)

    def shift(self, k: int) -> "VectorLaurent":
        """Multiplication by u^k."""
        lo = None if self.lo is None else self.lo + k
        hi = None if self.hi is None else self.hi + k
        return VectorLaurent(self.n, {(a + k, b): c for (a, b), c in self.coeffs.items()}, lo, hi, self.shape)

    def restrict(self, lo: Optional[int] = None, hi: Optional[int] = None) -> "VectorLaurent":
        """Forget coefficients outside [lo, hi)."""
        new_lo = lo if self.lo is None else (self.lo if lo is None else max(lo, self.lo))
        new_hi = hi if self.hi is None else (self.hi if hi is None else min(hi, self.hi))
        return VectorLaurent(self.n, self.coeffs, new_lo, new_hi, self.shape)

    def drop_from(self, exponent: int) -> "VectorLaurent":
        """Discard terms u^a with a >= exponent (reduction modulo u^exponent E[[u]])."""
        coeffs = {(a, b): c for (a, b), c in self.coeffs.items() if a < exponent}
        return VectorLaurent(self.n, coeffs, self.lo, None, self.shape)

    def derivative(self) -> "VectorLaurent":
        """d/du applied to every component."""
        coeffs = {(a - 1, b): c * a for (a, b), c in self.coeffs.items() if a}
        lo = None if self.lo is None else self.lo - 1
        hi = None if self.hi is None else self.hi - 1
        return VectorLaurent(self.n, coeffs, lo, hi, self.shape)

    def monomial_inverse(self) -> "VectorLaurent":
        """Componentwise inverse; each component must be a single nonzero monomial."""
        out = {}
        for b in range(1, self.n + 1):
            comp = self.component(b)
            if len(comp) != 1 or not self.polynomial:
                raise DomainError(f"component {b} is not an invertible monomial")
            (a, c), = comp.items()
            out[(-a, b)] = 1 / c
        return VectorLaurent(self.n, out, shape=self.shape)

    def total_order(self) -> int:
        """Sum over components of the lowest exponent (the u-order of a componentwise unit)."""
        total = 0
        for b in range(1, self.n + 1):
            comp = self.component(b)
            if not comp:
                raise DomainError(f"component {b} vanishes")
            total += min(comp)
        return total

    # --- serialization ---
    def to_json(self):
        terms = []
        for (a, b), c in sorted(self.coeffs.items()):
            terms.append([a, b, c.to_json() if isinstance(c, TimePoly) else scalar_to_str(c)])
        data = {"n": self.n, "window": [self.lo, self.hi], "terms": terms}
        if self.shape is not None:
            data["shape"] = list(self.shape)
        return data

    @classmethod
    def from_json(cls, data, location: str = "vector") -> "VectorLaurent":
        if not isinstance(data, dict) or "n" not in data:
            raise SchemaError("vector must be an object with 'n' and 'terms'", location)
        coeffs = {}
        for k, entry in enumerate(data.get("terms", [])):
            try:
                a, b, c = entry
            except (TypeError, ValueError) as e:
                raise SchemaError("term must be [exponent, component, coefficient]", f"{location}.terms[{k}]") from e
            value = TimePoly.from_json(c) if isinstance(c, list) else to_scalar(c)
            coeffs[(int(a), int(b))] = value
        lo, hi = (data.get("window") or [None, None])
        shape = tuple(data["shape"]) if data.get("shape") else None
        try:
            return cls(int(data["n"]), coeffs, lo, hi, shape)
        except DomainError as e:
            raise SchemaError(str(e), location) from e


def _extent_possibly_nonzero(v: VectorLaurent):
    """(min, max) exponent where v may be nonzero, counting unknown regions."""
    smin, smax = v.support_range()
    if v.lo is not None:
        low = -INF
    else:
        low = min(smin, v.hi) if v.hi is not None else smin
    if v.hi is not None:
        high = INF
    else:
        high = max(smax, v.lo - 1) if v.lo is not None else smax
    return low, high


def product_window(f: VectorLaurent, g: VectorLaurent):
    """
    Window on which the product of f and g is certified. A coefficient e is
    certified iff no unknown coefficient of one factor meets a possibly
    nonzero coefficient of the other.
    """
    fmin, fmax = _extent_possibly_nonzero(f)
    gmin, gmax = _extent_possibly_nonzero(g)
    lows, highs = [], []
    if f.lo is not None and gmax != -INF:
        lows.append(f.lo + gmax)
    if g.lo is not None and fmax != -INF:
        lows.append(g.lo + fmax)
    if f.hi is not None and gmin != INF:
        highs.append(f.hi + gmin)
    if g.hi is not None and fmin != INF:
        highs.append(g.hi + fmin)
    lo = max(lows) if lows else None
    hi = min(highs) if highs else None
    if lo == INF or hi == -INF or (lo is not None and hi is not None and lo >= hi):
        raise CertificationError(
            f"empty product window for [{f.lo}, {f.hi}) x [{g.lo}, {g.hi}); widen the inputs", "window"
        )
    return lo, hi


def _pairs(f: VectorLaurent, g: VectorLaurent, law: str):
    """Yield (component of f, component of g, component of result) and the result size/shape."""
    if law == "componentwise":
        if f.n != g.n:
            raise DomainError(f"componentwise product needs equal sizes, got {f.n} and {g.n}")
        return [(b, b, b) for b in range(1, f.n + 1)], g.n, g.shape or f.shape
    if law == "diagonal":
        if g.n % f.n:
            raise DomainError(f"diagonal action of {f.n} components on {g.n} components")
        r = g.n // f.n
        return [((c - 1) // r + 1, c, c) for c in range(1, g.n + 1)], g.n, g.shape
    if law == "matrix":
        if f.shape is None or g.shape is None or f.shape[1] != g.shape[0]:
            raise DomainError(f"matrix product of shapes {f.shape} and {g.shape}")
        rows, inner = f.shape
        cols = g.shape[1]
        pairs = [
            ((i - 1) * inner + k, (k - 1) * cols + j, (i - 1) * cols + j)
            for i in range(1, rows + 1)
            for j in range(1, cols + 1)
            for k in range(1, inner + 1)
        ]
        return pairs, rows * cols, (rows, cols)
    raise DomainError(f"unknown composition law {law!r}")


def laurent_mul(f: VectorLaurent, g: VectorLaurent, law: str = "componentwise") -> VectorLaurent:
    pairs, size, shape = _pairs(f, g, law)
    lo, hi = product_window(f, g)
    by_comp_f: Dict[int, list] = {}
    for (a, b), c in f.coeffs.items():
        by_comp_f.setdefault(b, []).append((a, c))
    by_comp_g: Dict[int, list] = {}
    for (a, b), c in g.coeffs.items():
        by_comp_g.setdefault(b, []).append((a, c))
    out: Dict[Key, object] = {}
    for bf, bg, br in pairs:
        for a1, c1 in by_comp_f.get(bf, ()):
            for a2, c2 in by_comp_g.get(bg, ()):
                e = a1 + a2
                if (lo is not None and e < lo) or (hi is not None and e >= hi):
                    continue
                key = (e, br)
                prod = c1 * c2
                out[key] = out[key] + prod if key in out else prod
    return VectorLaurent(size, out, lo, hi, shape)


def exp_series_coefficients(x: Mapping[int, object], D: int, bound: Optional[int] = None):
    """
    Coefficients h_0..h_D of exp(sum_i x_i q^i), from w h_w = sum_i i x_i h_{w-i}.
    The x_i may be rationals or time polynomials.
    """
    h = [TimePoly.const(1, bound)]
    for w in range(1, D + 1):
        acc = TimePoly.zero(bound)
        for i in range(1, w + 1):
            xi = x.get(i)
            if xi is None or is_zero(xi):
                continue
            acc = acc + h[w - i] * xi * i
        h.append(acc * Fraction(1, w))
    return h


def group_element(
    n: int, D: int, s: Optional[Mapping[TimeIndex, object]] = None, ns: str = "s", sign: int = 1
) -> VectorLaurent:
    """
    exp(sign * sum_{i<=D, j} s_ij u^i T_j) truncated at weighted degree D (u = 1/z), as a
    Laurent polynomial with time-polynomial coefficients. `s` overrides the
    generators (shifted or rational times); by default s_ij are the variables.
    """
    if D < 0:
        raise DomainError("group_element needs D >= 0")
    coeffs: Dict[Key, object] = {}
    for j in range(1, n + 1):
        x = {}
        for i in range(1, D + 1):
            if s is None:
                xi = TimePoly.var(ns, i, j, D)
            else:
                xi = s.get(TimeIndex(i, j), 0)
                if not isinstance(xi, TimePoly):
                    xi = TimePoly.const(to_scalar(xi), D)
            x[i] = xi * sign
        for w, hw in enumerate(exp_series_coefficients(x, D, D)):
            if not hw.is_zero():
                coeffs[(w, j)] = hw
    return VectorLaurent(n, coeffs)
