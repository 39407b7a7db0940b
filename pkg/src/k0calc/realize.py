"""Realizations of ring elements: point counts over F_{p^k} and proxies derived from them.

Counting is exact.  Terms with a negative Lefschetz exponent give rationals
whose denominators are powers of p.  The Euler characteristic and the
Poincare proxy are read off an interpolated q-polynomial, which is only a
heuristic: a fit does not prove that a class is polynomial-count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .constructible import DEFAULT_BUDGET, ConstructibleSet, count_cell
from .errors import CharZeroUnsupported, InputError
from .gf import build_field
from .k0 import K0Element, class_of
from .qe import project

DEFAULT_K = 3


class _Sentinel:
    _name = "?"

    def __bool__(self):
        return False

    def __repr__(self):
        return self._name

    def __eq__(self, other):
        return type(other) is type(self)

    def __hash__(self):
        return hash(self._name)


class NoFit(_Sentinel):
    """No integer q-polynomial of degree < K-1 matches the count table."""
    _name = "NoFit"


class NoSeparation(_Sentinel):
    """All counts up to K agree; says nothing about equality."""
    _name = "NoSeparation"


NO_FIT = NoFit()
NO_SEPARATION = NoSeparation()

_COUNT_CACHE: dict = {}


def _as_number(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def count_class(a: K0Element, k: int, budget: int = DEFAULT_BUDGET):
    """Sum of coeff * |cell(F_q)| * q^e with q = p^(base_degree * k)."""
    p = a.field.p
    if p == 0:
        raise CharZeroUnsupported("counting needs a finite characteristic")
    if k < 1:
        raise InputError("extension degree must be >= 1")
    deg = a.base_degree * k
    ext = build_field(p, deg)
    q = ext.q
    total = Fraction(0)
    for (sym, e), c in a.sorted_terms():
        key = (sym, p, deg)
        n = _COUNT_CACHE.get(key)
        if n is None:
            n = 1 if not sym.ambient else count_cell(sym, ext, budget)
            _COUNT_CACHE[key] = n
        total += c * n * Fraction(q) ** e
    return _as_number(total)


@dataclass
class CountTable:
    p: int
    entries: dict = field(default_factory=dict)
    base_degree: int = 1

    @property
    def K(self) -> int:
        return len(self.entries)

    def counts(self) -> list:
        return [self.entries[k] for k in sorted(self.entries)]

    def q(self, k: int) -> int:
        return self.p ** (self.base_degree * k)

    def to_json(self, fit=None, euler=None) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "counts": [_jsonable(c) for c in self.counts()],
            "fit": None if not fit else {"coeffs": list(fit.coeffs)},
            "euler": None if isinstance(euler, NoFit) else euler,
        }


def _jsonable(x):
    return x if isinstance(x, int) else str(x)


def count_table(a: K0Element, K: int = DEFAULT_K, budget: int = DEFAULT_BUDGET) -> CountTable:
    return CountTable(a.field.p, {k: count_class(a, k, budget) for k in range(1, K + 1)}, a.base_degree)


@dataclass(frozen=True)
class QPolynomial:
    """Integer polynomial in q, coefficients from the constant term up."""
    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, q):
        return sum(c * q**i for i, c in enumerate(self.coeffs))

    def __str__(self):
        return _format_poly(self.coeffs, "q", 1)


def _format_poly(coeffs, var: str, step: int) -> str:
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        e = i * step
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        mag = abs(c)
        body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


@dataclass(frozen=True)
class TPolynomial:
    """Poincare proxy, a polynomial in T."""
    coeffs: tuple

    def __str__(self):
        return _format_poly(self.coeffs, "T", 1)


def _newton_coeffs(xs: Sequence[int], ys: Sequence[Fraction]) -> list:
    """Coefficients (constant first) of the interpolating polynomial."""
    n = len(xs)
    dd = [Fraction(y) for y in ys]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (q - xs[i]) + dd[i]
        shifted = [Fraction(0)] + poly[:-1]
        poly = [shifted[m] - xs[i] * poly[m] for m in range(n)]
        poly[0] += dd[i]
    return poly


def interpolate_qpoly(t: CountTable):
    """Unique polynomial of degree < K through (q_k, N_k); NoFit unless integral with a spare point."""
    if t.K < 2:
        raise InputError("interpolation needs at least two counts")
    ks = sorted(t.entries)
    xs = [t.q(k) for k in ks]
    coeffs = _newton_coeffs(xs, [Fraction(t.entries[k]) for k in ks])
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) - 1 >= t.K - 1:
        return NO_FIT
    if any(c.denominator != 1 for c in coeffs):
        return NO_FIT
    return QPolynomial(tuple(int(c) for c in coeffs))


def _fit(a, K):
    if isinstance(a, K0Element):
        a = count_table(a, K)
    if isinstance(a, CountTable):
        return interpolate_qpoly(a)
    return a


def euler_characteristic(a, K: int = DEFAULT_K):
    """Value at q = 1 of the fitted q-polynomial; accepts an element, a table or a fit."""
    fit = _fit(a, K)
    if isinstance(fit, NoFit):
        return fit
    return sum(fit.coeffs)


def poincare_proxy(a, K: int = DEFAULT_K):
    """sum a_i T^(2i) for the fitted q-polynomial sum a_i q^i."""
    fit = _fit(a, K)
    if isinstance(fit, NoFit):
        return fit
    out = [0] * (2 * len(fit.coeffs) - 1)
    for i, c in enumerate(fit.coeffs):
        out[2 * i] = c
    return TPolynomial(tuple(out))


def separate(a: K0Element, b: K0Element, K: int = DEFAULT_K, budget: int = DEFAULT_BUDGET):
    """Least k <= K where the counts differ, else NoSeparation."""
    for k in range(1, K + 1):
        if count_class(a, k, budget) != count_class(b, k, budget):
            return k
    return NO_SEPARATION


@dataclass
class FibrationReport:
    p: int
    K: int
    m: int
    base: ConstructibleSet
    rows: list
    passed: bool
    ambient_rows: list
    ambient_passed: bool

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "m": self.m,
            "base": str(self.base),
            "base_vars": list(self.base.ambient),
            "rows": self.rows,
            "pass": self.passed,
            "ambient_check": {"rows": self.ambient_rows, "pass": self.ambient_passed},
        }


def fibration_check(X: ConstructibleSet, m: int, Z: K0Element, K: int = 2,
                    budget: int = DEFAULT_BUDGET) -> FibrationReport:
    """Check |X(F_q)| = |Y(F_q)| * count(Z) for Y the projection of X to its first m coordinates.

    The report also compares against the whole base A^m, which is what a naive
    reading of the base would give.
    """
    if X.field.p == 0:
        raise CharZeroUnsupported("fibration check counts points")
    if not 0 <= m <= len(X.ambient):
        raise InputError(f"m = {m} outside 0..{len(X.ambient)}")
    Y = project(X, X.ambient[m:])
    cx = class_of(X)
    cy = class_of(Y)
    full = K0Element.lefschetz(X.field, m)
    rows, amb_rows = [], []
    for k in range(1, K + 1):
        nx = count_class(cx, k, budget)
        ny = count_class(cy, k, budget)
        nz = count_class(Z, k, budget)
        na = count_class(full, k, budget)
        rows.append({"k": k, "X": _jsonable(nx), "Y": _jsonable(ny), "Z": _jsonable(nz), "pass": nx == ny * nz})
        amb_rows.append({"k": k, "X": _jsonable(nx), "Y": _jsonable(na), "Z": _jsonable(nz), "pass": nx == na * nz})
    return FibrationReport(X.field.p, K, m, Y, rows, all(r["pass"] for r in rows),
                           amb_rows, all(r["pass"] for r in amb_rows))


def clear_cache():
    _COUNT_CACHE.clear()
