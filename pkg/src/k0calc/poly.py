"""Sparse multivariate polynomials over a prime field F_p or over Q.

A monomial is a tuple of ``(variable, exponent)`` pairs sorted by variable
name, so polynomials with different variable sets combine without any ring
declaration.  Term order (graded lexicographic) is only consulted when a
leading term or a printed form is requested; callers pass the variable
priority explicitly, falling back to alphabetical order.

    >>> F5 = FieldTag(5)
    >>> x, y = Polynomial.var(F5, "x"), Polynomial.var(F5, "y")
    >>> ((x + y) * (x - y)).format()
    'x^2 - y^2'
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import ArityError, DegenerateDivisor, DegenerateInput, FieldMismatch, InputError

Monomial = tuple  # tuple[tuple[str, int], ...]
Coeff = Union[int, Fraction]

NEG_INF = float("-inf")

_PRIMES = tuple(n for n in range(2, 98) if all(n % d for d in range(2, int(n**0.5) + 1)))


class FieldTag:
    """The coefficient field: ``FieldTag(p)`` for F_p (p prime, p <= 97), ``FieldTag(0)`` for Q."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if p != 0 and p not in _PRIMES:
            raise InputError(f"characteristic must be 0 or a prime <= 97, got {p}")
        object.__setattr__(self, "p", p)

    def __setattr__(self, name, value):
        raise AttributeError("FieldTag is immutable")

    def __eq__(self, other):
        return isinstance(other, FieldTag) and other.p == self.p

    def __hash__(self):
        return hash(("FieldTag", self.p))

    def __repr__(self):
        return f"FieldTag({self.p})"

    def __str__(self):
        return "Q" if self.p == 0 else f"F_{self.p}"

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def coerce(self, c) -> Coeff:
        if self.p:
            if isinstance(c, Fraction):
                return (c.numerator * pow(c.denominator, -1, self.p)) % self.p
            return int(c) % self.p
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c

    def inverse(self, c: Coeff) -> Coeff:
        if not c:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(c, -1, self.p)
        return self.coerce(Fraction(1) / Fraction(c))

    def signed(self, c: Coeff) -> Coeff:
        """Representative used for printing: residues above p/2 shown as negatives."""
        if self.p and c > self.p // 2:
            return c - self.p
        return c


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _mono_div(a: Monomial, b: Monomial):
    """a / b as a monomial, or None when b does not divide a."""
    da = dict(a)
    for v, e in b:
        if da.get(v, 0) < e:
            return None
        da[v] -= e
    return tuple(sorted((v, e) for v, e in da.items() if e))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def order_key(m: Monomial, order: Sequence[str]):
    """Graded-lex sort key; earlier names in ``order`` weigh more."""
    d = dict(m)
    rest = sorted(v for v in d if v not in order)
    return (_mono_degree(m), tuple(d.get(v, 0) for v in order) + tuple(d[v] for v in rest))


class Polynomial:
    """Immutable sparse polynomial; see the module docstring."""

    __slots__ = ("field", "_terms", "_hash", "_memo")

    def __init__(self, field: FieldTag, terms: Mapping[Monomial, Coeff] | None = None, *, _clean=False):
        object.__setattr__(self, "field", field)
        if _clean:
            clean = dict(terms)
        else:
            clean = {}
            for m, c in (terms or {}).items():
                c = field.coerce(c)
                if c:
                    m = tuple(sorted((v, e) for v, e in m if e))
                    c = field.coerce(clean.get(m, 0) + c)
                    if c:
                        clean[m] = c
                    else:
                        clean.pop(m, None)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_memo", {})

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # construction -----------------------------------------------------------

    @classmethod
    def constant(cls, field: FieldTag, c: Coeff) -> "Polynomial":
        c = field.coerce(c)
        return cls(field, {(): c} if c else {}, _clean=True)

    @classmethod
    def var(cls, field: FieldTag, name: str) -> "Polynomial":
        return cls(field, {((name, 1),): 1}, _clean=True)

    @classmethod
    def zero(cls, field: FieldTag) -> "Polynomial":
        return cls(field, {}, _clean=True)

    @classmethod
    def one(cls, field: FieldTag) -> "Polynomial":
        return cls(field, {(): 1}, _clean=True)

    # basic queries ----------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Coeff:
        return self._terms.get((), 0)

    @property
    def variables(self) -> frozenset:
        return frozenset(v for m in self._terms for v, _ in m)

    def total_degree(self):
        if not self._terms:
            return NEG_INF
        return max(_mono_degree(m) for m in self._terms)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field == other.field and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == Polynomial.constant(self.field, other)._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.field.p, frozenset(self._terms.items()))))
        return self._hash

    # arithmetic -------------------------------------------------------------

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.field != self.field:
                raise FieldMismatch(f"cannot combine {self.field} and {other.field} polynomials")
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.constant(self.field, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        field = self.field
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = field.coerce(out.get(m, 0) + c)
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(field, out, _clean=True)

    __radd__ = __add__

    def __neg__(self):
        f = self.field
        return Polynomial(f, {m: f.coerce(-c) for m, c in self._terms.items()}, _clean=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        field = self.field
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(field, {m: c for m, c in out.items()})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative exponent")
        result = Polynomial.one(self.field)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c: Coeff) -> "Polynomial":
        return self * Polynomial.constant(self.field, c)

    # univariate views -------------------------------------------------------

    def degree_in(self, x: str):
        """Degree in ``x``; the zero polynomial has degree ``NEG_INF``."""
        if not self._terms:
            return NEG_INF
        return max((e for m in self._terms for v, e in m if v == x), default=0)

    def coefficients_in(self, x: str) -> list:
        """Coefficients of x^0, x^1, ... as polynomials free of ``x``."""
        if not self._terms:
            return []
        buckets: dict = {}
        for m, c in self._terms.items():
            e = 0
            rest = []
            for v, ev in m:
                if v == x:
                    e = ev
                else:
                    rest.append((v, ev))
            buckets.setdefault(e, {})[tuple(rest)] = c
        d = max(buckets)
        zero = {}
        return [Polynomial(self.field, buckets.get(i, zero), _clean=True) for i in range(d + 1)]

    def lc_in(self, x: str) -> "Polynomial":
        coeffs = self.coefficients_in(x)
        return coeffs[-1] if coeffs else Polynomial.zero(self.field)

    @classmethod
    def from_coefficients(cls, field: FieldTag, coeffs: Sequence["Polynomial"], x: str) -> "Polynomial":
        out = Polynomial.zero(field)
        xv = Polynomial.var(field, x)
        for i, c in enumerate(coeffs):
            if c:
                out = out + c * xv**i
        return out

    # term order -------------------------------------------------------------

    def sorted_terms(self, order: Sequence[str] | None = None) -> list:
        order = tuple(order) if order is not None else tuple(sorted(self.variables))
        key = ("sorted", order)
        hit = self._memo.get(key)
        if hit is None:
            hit = sorted(self._terms.items(), key=lambda t: order_key(t[0], order), reverse=True)
            self._memo[key] = hit
        return list(hit)

    def leading_term(self, order: Sequence[str] | None = None):
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        return self.sorted_terms(order)[0]

    def monic(self, order: Sequence[str] | None = None) -> "Polynomial":
        """Scale so the graded-lex leading coefficient is 1 (zero stays zero)."""
        if not self._terms:
            return self
        _, c = self.leading_term(order)
        if c == 1:
            return self
        return self.scale(self.field.inverse(c))

    # substitution and evaluation --------------------------------------------

    def substitute(self, x: str, value: "Polynomial") -> "Polynomial":
        if x not in self.variables:
            return self
        value = self._lift(value)
        coeffs = self.coefficients_in(x)
        out = Polynomial.zero(self.field)
        power = Polynomial.one(self.field)
        for i, c in enumerate(coeffs):
            if i:
                power = power * value
            if c:
                out = out + c * power
        return out

    def rename(self, mapping: Mapping[str, str]) -> "Polynomial":
        out = {}
        for m, c in self._terms.items():
            nm = tuple(sorted((mapping.get(v, v), e) for v, e in m))
            # renaming two variables onto one merges exponents
            merged: dict = {}
            for v, e in nm:
                merged[v] = merged.get(v, 0) + e
            key = tuple(sorted(merged.items()))
            out[key] = out.get(key, 0) + c
        return Polynomial(self.field, out)

    def evaluate(self, point, variables: Sequence[str] | None = None):
        """Evaluate at ``point``.

        ``point`` is either a mapping from variable name to value or a tuple
        aligned with ``variables`` (default: the polynomial's variables in
        alphabetical order).  Values may be ints, Fractions or
        :class:`k0calc.gf.FieldElement` instances.
        """
        if isinstance(point, Mapping):
            env = point
        else:
            names = tuple(variables) if variables is not None else tuple(sorted(self.variables))
            if len(names) != len(point):
                raise ArityError(f"point has {len(point)} coordinates, expected {len(names)}")
            env = dict(zip(names, point))
        missing = self.variables - set(env)
        if missing:
            raise ArityError(f"no value for variables {sorted(missing)}")
        sample = next(iter(env.values()), None)
        if hasattr(sample, "field") and hasattr(sample, "coords"):
            from .gf import FieldElement

            if isinstance(sample, FieldElement) and sample.field.p != self.field.p:
                raise FieldMismatch("evaluation point lies over a different prime field")
            total = sample.field.zero
        else:
            total = 0 if self.field.p else Fraction(0)
        for m, c in self._terms.items():
            term = c
            for v, e in m:
                term = term * env[v] ** e
            total = total + term
        if isinstance(total, (int, Fraction)):
            return self.field.coerce(total)
        return total

    # printing ---------------------------------------------------------------

    def format(self, order: Sequence[str] | None = None) -> str:
        key = ("format", None if order is None else tuple(order))
        hit = self._memo.get(key)
        if hit is None:
            hit = self._format(order)
            self._memo[key] = hit
        return hit

    def _format(self, order) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms(order):
            c = self.field.signed(c)
            neg = c < 0
            mag = -c if neg else c
            names = [v if e == 1 else f"{v}^{e}" for v, e in _ordered_mono(m, order)]
            if not names:
                body = str(mag)
            elif mag == 1:
                body = "*".join(names)
            else:
                mag_s = str(mag) if not isinstance(mag, Fraction) or mag.denominator == 1 else f"({mag})"
                body = "*".join([mag_s] + names)
            parts.append(("- " if neg else "+ ", body))
        first_sign, first = parts[0]
        s = ("-" if first_sign == "- " else "") + first
        for sign, body in parts[1:]:
            s += f" {sign}{body}"
        return s

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"Polynomial({self.field}, {self.format()!r})"


def _ordered_mono(m: Monomial, order):
    if order is None:
        return m
    rank = {v: i for i, v in enumerate(order)}
    return sorted(m, key=lambda t: (rank.get(t[0], len(rank)), t[0]))


def _check_fields(*polys: Polynomial) -> FieldTag:
    field = polys[0].field
    for p in polys[1:]:
        if p.field != field:
            raise FieldMismatch(f"cannot combine {field} and {p.field} polynomials")
    return field


def arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    _check_fields(a, b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def degree_in(f: Polynomial, x: str):
    return f.degree_in(x)


def coefficients_in(f: Polynomial, x: str) -> list:
    return f.coefficients_in(x)


def evaluate(f: Polynomial, point, variables: Sequence[str] | None = None):
    return f.evaluate(point, variables)


def pseudo_divide(f: Polynomial, g: Polynomial, x: str):
    """Return ``(q, r, k)`` with ``lc_x(g)^k * f == q*g + r`` and ``deg_x r < deg_x g``.

    When the leading coefficient of ``g`` is a constant the division is exact
    and ``k`` stays 0.
    """
    field = _check_fields(f, g)
    dg = g.degree_in(x)
    if dg == NEG_INF or dg < 1:
        raise DegenerateDivisor(f"divisor has degree {dg} in {x}")
    lc = g.lc_in(x)
    unit = lc.is_constant()
    lc_inv = field.inverse(lc.constant_value()) if unit else None
    xv = Polynomial.var(field, x)
    q = Polynomial.zero(field)
    r = f
    k = 0
    while r and r.degree_in(x) >= dg:
        dr = r.degree_in(x)
        s = r.lc_in(x) * xv ** (dr - dg)
        if unit:
            s = s.scale(lc_inv)
            q = q + s
            r = r - s * g
        else:
            q = lc * q + s
            r = lc * r - s * g
            k += 1
    return q, r, k


def prem(f: Polynomial, g: Polynomial, x: str) -> Polynomial:
    return pseudo_divide(f, g, x)[1]


def exact_divide(a: Polynomial, b: Polynomial) -> Polynomial:
    """Exact quotient a / b; raises ValueError when b does not divide a."""
    field = _check_fields(a, b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    order = tuple(sorted(a.variables | b.variables))
    lm_b, lc_b = b.leading_term(order)
    inv = field.inverse(lc_b)
    q: dict = {}
    r = a
    while r:
        lm_r, lc_r = r.leading_term(order)
        m = _mono_div(lm_r, lm_b)
        if m is None:
            raise ValueError("inexact polynomial division")
        c = field.coerce(lc_r * inv)
        q[m] = c
        r = r - Polynomial(field, {m: c}, _clean=True) * b
    return Polynomial(field, q)


def divides(b: Polynomial, a: Polynomial) -> bool:
    if not b:
        return not a
    try:
        exact_divide(a, b)
    except ValueError:
        return False
    return True


def sylvester_matrix(f: Polynomial, g: Polynomial, x: str) -> list:
    """Rows of f's coefficients first, then g's; coefficients ascending (constant first)."""
    m, n = f.degree_in(x), g.degree_in(x)
    size = m + n
    zero = Polynomial.zero(f.field)
    cf, cg = f.coefficients_in(x), g.coefficients_in(x)
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(cf):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(cg):
            row[i + j] = c
        rows.append(row)
    return rows


def determinant(matrix: list) -> Polynomial:
    """Fraction-free (Bareiss) determinant of a square matrix of polynomials."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    field = matrix[0][0].field
    a = [list(row) for row in matrix]
    sign = 1
    prev = Polynomial.one(field)
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Polynomial.zero(field)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = exact_divide(a[i][j] * a[k][k] - a[i][k] * a[k][j], prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant(f: Polynomial, g: Polynomial, x: str) -> Polynomial:
    _check_fields(f, g)
    for h in (f, g):
        d = h.degree_in(x)
        if d == NEG_INF or d < 1:
            raise DegenerateInput(f"resultant needs positive degree in {x}, got {d}")
    return determinant(sylvester_matrix(f, g, x))


def product(polys: Iterable[Polynomial], field: FieldTag) -> Polynomial:
    out = Polynomial.one(field)
    for p in polys:
        out = out * p
    return out
