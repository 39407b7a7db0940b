"""Finite fields F_{p^k} in a polynomial basis over F_p.

Elements are stored as integers ``sum(c_i * p**i)`` where ``c_0..c_{k-1}`` are
the coordinates on the basis ``1, a, ..., a^(k-1)`` and ``a`` is the class of
``x`` modulo the defining polynomial.  Enumeration order is that integer
order, i.e. a base-p counter on the coordinates with ``c_0`` fastest.

The defining polynomial is the first monic irreducible of degree k when the
coefficient vectors ``(c_0, ..., c_{k-1})`` are listed in ascending
lexicographic order.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import CharZeroUnsupported, InputError, NoEmbedding, SizeLimit

MAX_FIELD_SIZE = 2**20
_PRIMES = tuple(n for n in range(2, 98) if all(n % d for d in range(2, int(n**0.5) + 1)))


# univariate helpers over F_p, coefficient lists in ascending degree ----------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = _trim([c % p for c in a])
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pgcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _powmod_x(e, m, p):
    """x^e mod m over F_p by square and multiply."""
    result = [1]
    base = _pmod([0, 1], m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        e >>= 1
        if e:
            base = _pmod(_pmul(base, base, p), m, p)
    return result


def is_irreducible(modulus, p: int) -> bool:
    """Monic ``modulus`` is irreducible iff gcd(modulus, x^{p^j} - x) = 1 for all j <= k/2."""
    k = len(modulus) - 1
    if k <= 1:
        return k == 1
    for j in range(1, k // 2 + 1):
        h = _powmod_x(p**j, modulus, p)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_pgcd(modulus, _trim(h), p)) > 1:
            return False
    return True


def _monic_candidates(p: int, k: int):
    # (c_0, ..., c_{k-1}) ascending lexicographically: c_0 is the most significant digit
    for n in range(p**k):
        digits = []
        for _ in range(k):
            digits.append(n % p)
            n //= p
        yield list(reversed(digits)) + [1]


def _prime_factors(n: int):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class ExtensionField:
    """F_{p^k}; build instances with :func:`build_field`."""

    def __init__(self, p: int, k: int, modulus):
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = tuple(modulus)
        self._log = None
        self._exp = None
        self._digits = None

    def __repr__(self):
        return f"ExtensionField(p={self.p}, k={self.k}, modulus={self.modulus_str()})"

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and (self.p, self.k, self.modulus) == (
            other.p, other.k, other.modulus)

    def __hash__(self):
        return hash((self.p, self.k, self.modulus))

    def __len__(self):
        return self.q

    def modulus_str(self, var: str = "x") -> str:
        parts = []
        for i in range(self.k, -1, -1):
            c = self.modulus[i]
            if not c:
                continue
            mono = "1" if i == 0 else (var if i == 1 else f"{var}^{i}")
            parts.append(mono if c == 1 and i else (str(c) if i == 0 else f"{c}*{mono}"))
        return " + ".join(parts)

    # integer-encoded arithmetic --------------------------------------------

    def coords_of(self, n: int) -> tuple:
        out = []
        for _ in range(self.k):
            out.append(n % self.p)
            n //= self.p
        return tuple(out)

    def int_of(self, coords) -> int:
        n = 0
        for c in reversed(coords):
            n = n * self.p + c % self.p
        return n

    def add_int(self, a: int, b: int) -> int:
        if self.k == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        return self.int_of([x + y for x, y in zip(self.coords_of(a), self.coords_of(b))])

    def neg_int(self, a: int) -> int:
        if self.k == 1:
            return -a % self.p
        return self.int_of([-x for x in self.coords_of(a)])

    def mul_int(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if self._exp is not None:
            if a == 0 or b == 0:
                return 0
            return int(self._exp[(self._log[a] + self._log[b]) % (self.q - 1)])
        prod = _pmul(list(self.coords_of(a)), list(self.coords_of(b)), self.p)
        return self.int_of(_pmod(prod, list(self.modulus), self.p))

    def pow_int(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul_int(result, base)
            e >>= 1
            if e:
                base = self.mul_int(base, base)
        return result

    def inv_int(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        return self.pow_int(a, self.q - 2)

    def scalar_int(self, c: int) -> int:
        """Embed an element of the prime field."""
        return c % self.p

    # elements ---------------------------------------------------------------

    def __call__(self, value) -> "FieldElement":
        if isinstance(value, FieldElement):
            return value
        if isinstance(value, (tuple, list)):
            if len(value) != self.k:
                raise InputError(f"expected {self.k} coordinates")
            return FieldElement(self, self.int_of(value))
        return FieldElement(self, self.scalar_int(int(value)))

    def from_int(self, n: int) -> "FieldElement":
        return FieldElement(self, n)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def generator(self) -> "FieldElement":
        """The class of x modulo the defining polynomial."""
        return FieldElement(self, self.int_of([0, 1] + [0] * (self.k - 2))) if self.k > 1 else FieldElement(
            self, (-self.modulus[0]) % self.p)

    def elements(self):
        return [FieldElement(self, n) for n in range(self.q)]

    # tables for vectorised evaluation ---------------------------------------

    def primitive_element(self) -> int:
        factors = _prime_factors(self.q - 1)
        for g in range(1, self.q):
            if all(self.pow_int(g, (self.q - 1) // r) != 1 for r in factors):
                return g
        return 1  # q == 2

    def tables(self):
        """(log, exp, digits) numpy tables; built once per field."""
        if self._exp is None:
            q = self.q
            g = self.primitive_element()
            exp = np.zeros(max(q - 1, 1), dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            cur = 1
            for i in range(q - 1):
                exp[i] = cur
                log[cur] = i
                cur = self.mul_int(cur, g)
            self._exp, self._log = exp, log
            self._digits = np.array([self.coords_of(n) for n in range(q)], dtype=np.int64).reshape(q, self.k)
        return self._log, self._exp, self._digits


class FieldElement:
    """An element of an :class:`ExtensionField`; immutable, supports + - * / **."""

    __slots__ = ("field", "value")

    def __init__(self, field: ExtensionField, value: int):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    @property
    def coords(self) -> tuple:
        return self.field.coords_of(self.value)

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise InputError("elements of different fields")
            return other.value
        if isinstance(other, int):
            return self.field.scalar_int(other)
        raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")

    def __add__(self, other):
        return FieldElement(self.field, self.field.add_int(self.value, self._other(other)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_int(self.value))

    def __sub__(self, other):
        return self + (-FieldElement(self.field, self._other(other)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul_int(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.mul_int(self.value, self.field.inv_int(self._other(other))))

    def __pow__(self, e: int):
        if e < 0:
            return FieldElement(self.field, self.field.pow_int(self.field.inv_int(self.value), -e))
        return FieldElement(self.field, self.field.pow_int(self.value, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == self.field.scalar_int(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.value))

    def __bool__(self):
        return self.value != 0

    def __lt__(self, other):
        return self.value < other.value

    def __repr__(self):
        return "[" + ",".join(str(c) for c in self.coords) + "]"


@lru_cache(maxsize=None)
def build_field(p: int, k: int = 1) -> ExtensionField:
    if p == 0:
        raise CharZeroUnsupported("finite fields need a positive characteristic")
    if p not in _PRIMES:
        raise SizeLimit(f"characteristic must be a prime <= 97, got {p}", cap="p<=97")
    if k < 1:
        raise SizeLimit(f"extension degree must be >= 1, got {k}", cap="k>=1")
    if p**k > MAX_FIELD_SIZE:
        raise SizeLimit(f"F_{p}^{k} has {p**k} elements, above the 2^20 cap", cap="p^k<=2^20")
    for cand in _monic_candidates(p, k):
        if k == 1 or is_irreducible(cand, p):
            return ExtensionField(p, k, cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


def enumerate_field(field: ExtensionField) -> list:
    return field.elements()


def frobenius(e: FieldElement) -> FieldElement:
    return e ** e.field.p


class Embedding:
    """Field homomorphism src -> dst sending the generator of src to ``image``."""

    def __init__(self, src: ExtensionField, dst: ExtensionField, image: FieldElement):
        self.src = src
        self.dst = dst
        self.image = image
        self._powers = [dst.one]
        for _ in range(1, src.k):
            self._powers.append(self._powers[-1] * image)

    def __call__(self, e: FieldElement) -> FieldElement:
        if e.field != self.src:
            raise InputError("element is not in the embedding's source field")
        out = self.dst.zero
        for c, pw in zip(e.coords, self._powers):
            if c:
                out = out + pw * c
        return out

    def __repr__(self):
        return f"Embedding(F_{self.src.q} -> F_{self.dst.q}, a -> {self.image!r})"


def embed_field(src: ExtensionField, dst: ExtensionField) -> Embedding:
    if src.p != dst.p or dst.k % src.k:
        raise NoEmbedding(f"F_{src.q} does not embed in F_{dst.q}")
    if src.k == 1:
        return Embedding(src, dst, dst.one)
    for r in dst.elements():
        acc = dst.zero
        for c in reversed(src.modulus):
            acc = acc * r + c
        if not acc:
            return Embedding(src, dst, r)
    raise NoEmbedding("defining polynomial has no root in target field")  # pragma: no cover


class VectorArithmetic:
    """Numpy versions of the field operations on integer-encoded element arrays."""

    def __init__(self, field: ExtensionField):
        self.field = field
        self.q = field.q
        self.log, self.exp, self.digits = field.tables()
        self._add_table = None
        if field.k > 1 and field.p != 2 and self.q <= 1024:
            s = (self.digits[:, None, :] + self.digits[None, :, :]) % field.p
            weights = field.p ** np.arange(field.k)
            self._add_table = (s * weights).sum(axis=2).astype(np.int64)

    def add(self, a, b):
        f = self.field
        if f.k == 1:
            return (a + b) % f.p
        if f.p == 2:
            return a ^ b
        if self._add_table is not None:
            return self._add_table[a, b]
        out = np.zeros_like(a)
        weight = 1
        for i in range(f.k):
            out += ((self.digits[a, i] + self.digits[b, i]) % f.p) * weight
            weight *= f.p
        return out

    def mul_scalar(self, a, c: int):
        """Multiply by an element of the prime field."""
        c %= self.field.p
        if c == 0:
            return np.zeros_like(a)
        if c == 1:
            return a
        if self.field.k == 1:
            return a * c % self.field.p
        lc = self.log[c]
        return np.where(a == 0, 0, self.exp[(self.log[a] + lc) % (self.q - 1)])

    def monomial(self, cols, exps, coeff: int, size: int):
        """coeff * prod(col_i ** e_i) for prime-field ``coeff``."""
        f = self.field
        if f.k == 1:
            out = np.full(size, coeff % f.p, dtype=np.int64)
            for col, e in zip(cols, exps):
                out = out * pow_mod_array(col, e, f.p) % f.p
            return out
        n = self.q - 1
        logsum = np.full(size, self.log[coeff % f.p], dtype=np.int64)
        zero = np.zeros(size, dtype=bool)
        for col, e in zip(cols, exps):
            zero |= col == 0
            logsum += self.log[col] * e
        return np.where(zero, 0, self.exp[logsum % n])


def pow_mod_array(a, e: int, p: int):
    result = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            result = result * base % p
        e >>= 1
        if e:
            base = base * base % p
    return result
