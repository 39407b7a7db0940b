"""Elements of the Grothendieck ring of constructible sets, and class comparison.

An element is a finite Z-combination of terms ``[C] * L^e`` where ``C`` is a
canonical cell symbol (a cell in positional coordinates ``x1..xn``) and ``L``
is the class of the affine line.  Negative ``e`` lives in the localization.

Canonical symbols already absorb two isomorphisms: coordinates that no
polynomial mentions become powers of ``L``, and a coordinate fixed by an
equation ``c*v + h`` with ``c`` a nonzero constant is projected away.  The
remaining presentation is minimised over coordinate permutations.

Equality is semi-decided.  ``a - b`` is normalised by scissor and
isomorphism rewrites into closed cells, then a common refinement of the
cells of each dimension checks that the resulting constructible function
vanishes.  Verified bijection certificates act as extra rewrite rules.
Distinctness comes from point counting (see :mod:`k0calc.realize`).  Both
verdicts are sound; ``Unknown`` is returned when neither search succeeds.
"""

from __future__ import annotations

import enum
import hashlib
import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .constructible import Cell, ConstructibleSet, cell_minus, ineq_product
from .errors import ArityError, FieldMismatch, InputError, NotABijection
from .formula import Formula, Not, conj, disj, free_vars, parse, pretty, rename_free
from .poly import FieldTag, Polynomial
from .qe import decide, exists_closure, forall_closure, surely_empty

MAX_PERMUTE = 6
DEFAULT_DEPTH = 3
_SPLIT_DEPTH = 10


def pos(i: int) -> str:
    return f"x{i + 1}"


def positional(n: int) -> tuple:
    return tuple(pos(i) for i in range(n))


# canonical symbols -----------------------------------------------------------

def _drop_absent(cell: Cell):
    used = cell.variables
    keep = tuple(v for v in cell.ambient if v in used)
    extra = len(cell.ambient) - len(keep)
    if extra:
        cell = Cell.build(keep, cell.equations, cell.inequation)
    return cell, extra


def _unit_linear(cell: Cell):
    """One elimination of a coordinate solved by a unit-coefficient linear equation."""
    for e in cell.equations:
        for v in cell.ambient:
            if e.degree_in(v) != 1:
                continue
            coeffs = e.coefficients_in(v)
            a = coeffs[1]
            if not a.is_constant():
                continue
            h = coeffs[0]
            value = -h.scale(e.field.inverse(a.constant_value()))
            amb = tuple(w for w in cell.ambient if w != v)
            others = [o.substitute(v, value) for o in cell.equations if o is not e]
            return Cell.build(amb, others, cell.inequation.substitute(v, value))
    return cell


def _permuted(cell: Cell, perm) -> Cell:
    mapping = {v: pos(perm[i]) for i, v in enumerate(cell.ambient)}
    amb = positional(len(cell.ambient))
    return Cell.build(amb, [e.rename(mapping) for e in cell.equations], cell.inequation.rename(mapping))


_CANON: dict = {}


def canonical(cell: Cell):
    """``(symbol, extra_exponent)`` with ``[cell] = [symbol] * L^extra``; None if trivially empty."""
    if cell is None:
        return None
    hit = _CANON.get(cell)
    if hit is not None:
        return hit
    cur, extra = cell, 0
    while cur is not None:
        cur, dropped = _drop_absent(cur)
        extra += dropped
        if cur is None:
            break
        nxt = _unit_linear(cur)
        if nxt is cur:
            break
        cur = nxt
    if cur is None:
        result = None
    else:
        n = len(cur.ambient)
        perms = itertools.permutations(range(n)) if n <= MAX_PERMUTE else [tuple(range(n))]
        best = None
        for perm in perms:
            cand = _permuted(cur, perm)
            if cand is None:
                continue
            key = str(cand)
            if best is None or key < best[0]:
                best = (key, cand)
        result = (best[1], extra) if best else None
    _CANON[cell] = result if result is not None else None
    return result


def point_symbol(field_tag: FieldTag) -> Cell:
    return Cell.build((), (), Polynomial.one(field_tag))


def symbol_str(sym: Cell) -> str:
    if not sym.ambient:
        return "1"
    return f"[{sym}]"


# ring elements ---------------------------------------------------------------

class K0Element:
    """Immutable Z-combination of ``(symbol, lefschetz_exponent)`` terms."""

    __slots__ = ("field", "terms", "base_degree", "_hash")

    def __init__(self, field_tag: FieldTag, terms=None, base_degree: int = 1):
        clean = {}
        for key, c in (terms or {}).items():
            if c:
                clean[key] = clean.get(key, 0) + c
                if not clean[key]:
                    del clean[key]
        object.__setattr__(self, "field", field_tag)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "base_degree", base_degree)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("K0Element is immutable")

    @classmethod
    def zero(cls, field_tag: FieldTag, base_degree: int = 1) -> "K0Element":
        return cls(field_tag, {}, base_degree)

    @classmethod
    def one(cls, field_tag: FieldTag, base_degree: int = 1) -> "K0Element":
        return cls(field_tag, {(point_symbol(field_tag), 0): 1}, base_degree)

    @classmethod
    def lefschetz(cls, field_tag: FieldTag, power: int = 1, base_degree: int = 1) -> "K0Element":
        return cls(field_tag, {(point_symbol(field_tag), power): 1}, base_degree)

    @classmethod
    def integer(cls, field_tag: FieldTag, n: int, base_degree: int = 1) -> "K0Element":
        return cls(field_tag, {(point_symbol(field_tag), 0): n}, base_degree)

    def _check(self, other: "K0Element"):
        if self.field != other.field or self.base_degree != other.base_degree:
            raise FieldMismatch("ring elements from different sessions")

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, K0Element):
            return NotImplemented
        return (self.field, self.base_degree, self.terms) == (other.field, other.base_degree, other.terms)

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.field, self.base_degree, frozenset(self.terms.items()))))
        return self._hash

    def __add__(self, other):
        if isinstance(other, int):
            other = K0Element.integer(self.field, other, self.base_degree)
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return K0Element(self.field, out, self.base_degree)

    __radd__ = __add__

    def __neg__(self):
        return K0Element(self.field, {k: -c for k, c in self.terms.items()}, self.base_degree)

    def __sub__(self, other):
        if isinstance(other, int):
            other = K0Element.integer(self.field, other, self.base_degree)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, n: int) -> "K0Element":
        return K0Element(self.field, {k: c * n for k, c in self.terms.items()}, self.base_degree)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        out: dict = {}
        for (s1, e1), c1 in self.terms.items():
            for (s2, e2), c2 in other.terms.items():
                res = symbol_product(s1, s2)
                if res is None:
                    continue
                sym, extra = res
                key = (sym, e1 + e2 + extra)
                out[key] = out.get(key, 0) + c1 * c2
        return K0Element(self.field, out, self.base_degree)

    __rmul__ = __mul__

    def lshift(self, e: int) -> "K0Element":
        return K0Element(self.field, {(s, k + e): c for (s, k), c in self.terms.items()}, self.base_degree)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0][0].ambient) + t[0][1], t[0][1], str(t[0][0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (sym, e), c in self.sorted_terms():
            factors = []
            if sym.ambient:
                factors.append(symbol_str(sym))
            if e:
                factors.append("L" if e == 1 else f"L^{e}")
            body = "*".join(factors) if factors else "1"
            if abs(c) != 1:
                body = f"{abs(c)}*{body}" if factors else str(abs(c))
            parts.append(("-" if c < 0 else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"K0Element({self})"

    def to_json(self):
        return [
            {"coeff": c, "cell": str(sym), "dim": len(sym.ambient), "lefschetz": e}
            for (sym, e), c in self.sorted_terms()
        ]


def presentation_symbol(cell: Cell | None):
    """``(symbol, e)``: the cell in positional coordinates; a cell with no conditions becomes L^n."""
    if cell is None:
        return None
    n = len(cell.ambient)
    if not cell.equations and cell.inequation.is_constant():
        return point_symbol(cell.field), n
    if cell.ambient == positional(n):
        return cell, 0
    mapping = {v: pos(i) for i, v in enumerate(cell.ambient)}
    sym = Cell.build(positional(n), [e.rename(mapping) for e in cell.equations], cell.inequation.rename(mapping))
    return sym, 0


def symbol_product(s1: Cell, s2: Cell):
    n1 = len(s1.ambient)
    mapping = {v: pos(n1 + i) for i, v in enumerate(s2.ambient)}
    amb = positional(n1 + len(s2.ambient))
    eqs = list(s1.equations) + [e.rename(mapping) for e in s2.equations]
    g = s1.inequation * s2.inequation.rename(mapping)
    return presentation_symbol(Cell.build(amb, eqs, g))


def _add_term(out: dict, cell: Cell, e: int, c: int):
    res = presentation_symbol(cell)
    if res is None:
        return
    sym, extra = res
    key = (sym, e + extra)
    out[key] = out.get(key, 0) + c


def class_of_cells(cells: Iterable[Cell], field_tag: FieldTag, base_degree: int = 1) -> K0Element:
    """Class of a union of cells that are already pairwise disjoint."""
    out: dict = {}
    for cell in cells:
        _add_term(out, cell, 0, 1)
    return K0Element(field_tag, out, base_degree)


def class_of(C: ConstructibleSet, base_degree: int = 1) -> K0Element:
    return class_of_cells(C.disjointify().cells, C.field, base_degree)


def add(a: K0Element, b: K0Element) -> K0Element:
    return a + b


def mul(a: K0Element, b: K0Element) -> K0Element:
    return a * b


def lshift(a: K0Element, e: int) -> K0Element:
    return a.lshift(e)


def base_extend(a: K0Element, m: int) -> K0Element:
    """The same class read in the session over F_{p^(base*m)}."""
    if a.field.p == 0:
        raise InputError("base extension is defined for finite base fields only")
    if m < 1:
        raise InputError("extension degree must be >= 1")
    return K0Element(a.field, a.terms, a.base_degree * m)


# scissor normalisation -------------------------------------------------------

def _homogenized_sub(p: Polynomial, v: str, num: Polynomial, den: Polynomial) -> Polynomial:
    """den^deg_v(p) * p(v = num/den)."""
    coeffs = p.coefficients_in(v)
    if len(coeffs) <= 1:
        return p
    d = len(coeffs) - 1
    out = Polynomial.zero(p.field)
    for j, c in enumerate(coeffs):
        if c:
            out = out + c * num**j * den ** (d - j)
    return out


def _linear_split(cell: Cell):
    """Find an equation a*v + h with a non-constant and free of v."""
    best = None
    for e in cell.equations:
        for v in cell.ambient:
            if e.degree_in(v) != 1:
                continue
            a = e.coefficients_in(v)[1]
            if a.is_constant():
                continue
            cost = (a.total_degree(), len(a), len(e), str(e), v)
            if best is None or cost < best[0]:
                best = (cost, e, v)
    return best


_EXPAND: dict = {}


def _expand_cell(cell: Cell, depth: int = 0) -> dict:
    """Closed-cell decomposition of [cell] as {(symbol, e): coeff}."""
    res = canonical(cell)
    if res is None:
        return {}
    sym, extra = res
    hit = _EXPAND.get(sym)
    if hit is None:
        hit = _expand_symbol(sym, depth)
        _EXPAND[sym] = hit
    if not extra:
        return hit
    return {(s, e + extra): c for (s, e), c in hit.items()}


def _merge(out: dict, part: dict, sign: int = 1):
    for k, c in part.items():
        out[k] = out.get(k, 0) + sign * c
        if not out[k]:
            del out[k]


def _expand_symbol(sym: Cell, depth: int) -> dict:
    if surely_empty(sym):
        return {}
    if depth < _SPLIT_DEPTH:
        found = _linear_split(sym)
        if found is not None:
            _, f, v = found
            coeffs = f.coefficients_in(v)
            a, h = coeffs[1], coeffs[0]
            num = -h
            amb = tuple(w for w in sym.ambient if w != v)
            others = [_homogenized_sub(o, v, num, a) for o in sym.equations if o is not f]
            g = _homogenized_sub(sym.inequation, v, num, a) * a
            out: dict = {}
            # a != 0: v = -h/a is a regular function, so the piece projects isomorphically
            _merge(out, _expand_cell(Cell.build(amb, others, g), depth + 1))
            rest = [o for o in sym.equations if o is not f] + [a, h]
            _merge(out, _expand_cell(Cell.build(sym.ambient, rest, sym.inequation), depth + 1))
            return out
    if not sym.is_closed:
        out = {}
        _merge(out, _expand_cell(Cell.build(sym.ambient, sym.equations, Polynomial.one(sym.field)), depth + 1))
        _merge(out, _expand_cell(Cell.build(sym.ambient, sym.equations + (sym.inequation,),
                                            Polynomial.one(sym.field)), depth + 1), -1)
        return out
    return {(sym, 0): 1}


def normalize(a: K0Element) -> K0Element:
    """Rewrite into closed canonical cells using scissor relations and isomorphisms."""
    out: dict = {}
    for (sym, e), c in a.terms.items():
        for (s2, e2), c2 in _expand_cell(sym).items():
            key = (s2, e + e2)
            out[key] = out.get(key, 0) + c * c2
    return K0Element(a.field, out, a.base_degree)


def _lift(sym: Cell, n_total: int) -> Cell:
    return Cell.build(positional(n_total), sym.equations, sym.inequation)


def _prune(cells) -> list:
    return [c for c in cells if c is not None and not surely_empty(c)]


def _refine_group(amb, field_tag, terms):
    """Venn refinement of closed cells in one ambient; returns [(cells, coefficient)]."""
    pieces: list = []
    seen: list = []
    for cell, c in terms:
        new = []
        for cells, k in pieces:
            inter = _prune(Cell.build(amb, p.equations + cell.equations, ineq_product(p.inequation, cell.inequation))
                           for p in cells)
            rest = _prune(x for p in cells for x in cell_minus(p, cell))
            if inter:
                new.append((inter, k + c))
            if rest:
                new.append((rest, k))
        left = [cell]
        for prev in seen:
            left = _prune(x for p in left for x in cell_minus(p, prev))
        if left:
            new.append((left, c))
        seen.append(cell)
        pieces = new
    return pieces


def refine(a: K0Element, renormalize: bool = True) -> K0Element:
    """Re-express ``a`` over a common refinement of its cells, dimension by dimension."""
    if not a.terms:
        return a
    e_min = min(e for (_, e) in a.terms)
    groups: dict = {}
    for (sym, e), c in a.terms.items():
        n = len(sym.ambient) + e - e_min
        groups.setdefault(n, []).append((_lift(sym, n), c))
    out = K0Element.zero(a.field, a.base_degree)
    for n in sorted(groups):
        amb = positional(n)
        terms = sorted(groups[n], key=lambda t: str(t[0]))
        if len(terms) == 1:
            cell, c = terms[0]
            out = out + class_of_cells([cell], a.field, a.base_degree).scale(c).lshift(e_min)
            continue
        for cells, k in _refine_group(amb, a.field, terms):
            if k:
                out = out + class_of_cells(cells, a.field, a.base_degree).scale(k).lshift(e_min)
    return normalize(out) if renormalize else out


def scissor_zero(a: K0Element, rounds: int = 2) -> bool:
    """Sound test that ``a`` vanishes by scissor relations and explicit isomorphisms.

    Terms that already share coordinates are compared set-theoretically first;
    this settles different presentations of one set without any rewriting.
    """
    if not a or not refine(a, renormalize=False):
        return True
    y = normalize(a)
    for _ in range(rounds):
        if not y:
            return True
        y2 = refine(y)
        if not y2:
            return True
        if y2 == y:
            break
        y = y2
    return not y


# bijection certificates ------------------------------------------------------

@dataclass
class BijectionCertificate:
    phi: Formula
    psi: Formula
    eta: Formula
    source_vars: tuple
    target_vars: tuple
    source: ConstructibleSet
    target: ConstructibleSet
    graph: ConstructibleSet
    verified: bool = False
    sentences: dict = field(default_factory=dict)

    @property
    def field(self) -> FieldTag:
        return self.source.field

    def record(self) -> dict:
        rec = {
            "phi": pretty(self.phi),
            "psi": pretty(self.psi),
            "eta": pretty(self.eta),
            "source_vars": list(self.source_vars),
            "target_vars": list(self.target_vars),
            "char": self.field.p,
        }
        rec["hash"] = hashlib.sha256(json.dumps(rec, sort_keys=True).encode()).hexdigest()
        return rec

    def relation(self) -> K0Element:
        return normalize(class_of(self.source)) - normalize(class_of(self.target))


class CertificateRegistry:
    """Append-only list of verified certificates."""

    def __init__(self, certificates: Iterable[BijectionCertificate] = ()):
        self._certs: list = []
        self._relations: list = []
        for c in certificates:
            self.append(c)

    def append(self, cert: BijectionCertificate):
        if not cert.verified:
            raise InputError("only verified certificates can be registered")
        self._certs.append(cert)
        self._relations.append(None)

    def __iter__(self):
        return iter(self._certs)

    def __len__(self):
        return len(self._certs)

    def relations(self) -> list:
        for i, c in enumerate(self._certs):
            if self._relations[i] is None:
                self._relations[i] = c.relation()
        return list(self._relations)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(c.record(), sort_keys=True) + "\n" for c in self._certs)

    @classmethod
    def from_jsonl(cls, text: str, field_tag: FieldTag) -> "CertificateRegistry":
        reg = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec.get("char", field_tag.p) != field_tag.p:
                raise FieldMismatch(f"registry record for characteristic {rec['char']}")
            register_bijection(
                parse(rec["phi"], field_tag), parse(rec["psi"], field_tag), parse(rec["eta"], field_tag),
                reg, source_vars=rec.get("source_vars"), target_vars=rec.get("target_vars"))
        return reg


def _eq_tuple(left: Sequence[str], right: Sequence[str], field_tag: FieldTag) -> Formula:
    from .formula import Atom, true

    parts = [Atom(Polynomial.var(field_tag, a) - Polynomial.var(field_tag, b), (a, b)) for a, b in zip(left, right)]
    return conj(parts) if parts else true(field_tag)


def _fresh(names: Sequence[str], taken: set) -> tuple:
    out = []
    for v in names:
        new = v + "_p"
        i = 1
        while new in taken:
            i += 1
            new = f"{v}_p{i}"
        taken.add(new)
        out.append(new)
    return tuple(out)


def bijection_sentences(phi, psi, eta, source_vars, target_vars) -> dict:
    from .formula import all_names, field_of

    fld = field_of(eta)
    xs, ys = tuple(source_vars), tuple(target_vars)
    taken = all_names(phi) | all_names(psi) | all_names(eta) | set(xs) | set(ys)
    ys2 = _fresh(ys, taken)
    xs2 = _fresh(xs, taken)
    eta_y2 = rename_free(eta, dict(zip(ys, ys2)))
    eta_x2 = rename_free(eta, dict(zip(xs, xs2)))
    return {
        "membership": forall_closure(disj([Not(eta), conj([phi, psi])]), xs + ys),
        "totality": forall_closure(disj([Not(phi), exists_closure(eta, ys)]), xs),
        "functionality": forall_closure(disj([Not(conj([eta, eta_y2])), _eq_tuple(ys, ys2, fld)]), xs + ys + ys2),
        "injectivity": forall_closure(disj([Not(conj([eta, eta_x2])), _eq_tuple(xs, xs2, fld)]), xs + xs2 + ys),
        "surjectivity": forall_closure(disj([Not(psi), exists_closure(eta, xs)]), ys),
    }


def register_bijection(phi: Formula, psi: Formula, eta: Formula, registry: CertificateRegistry | None = None,
                       source_vars: Sequence[str] | None = None,
                       target_vars: Sequence[str] | None = None) -> BijectionCertificate:
    """Verify that eta is the graph of a bijection C_phi -> C_psi and record it."""
    xs = tuple(source_vars) if source_vars is not None else free_vars(phi)
    ys = tuple(target_vars) if target_vars is not None else free_vars(psi)
    if set(xs) & set(ys):
        raise ArityError(f"source and target variables overlap: {sorted(set(xs) & set(ys))}")
    for name, f, allowed in (("phi", phi, xs), ("psi", psi, ys), ("eta", eta, xs + ys)):
        extra = set(free_vars(f)) - set(allowed)
        if extra:
            raise ArityError(f"{name} has undeclared free variables {sorted(extra)}")
    from .qe import quantifier_free

    source = quantifier_free(phi, ambient=xs)
    target = quantifier_free(psi, ambient=ys)
    graph = quantifier_free(eta, ambient=xs + ys)
    cert = BijectionCertificate(phi, psi, eta, xs, ys, source, target, graph)
    for check, sentence in bijection_sentences(phi, psi, eta, xs, ys).items():
        cert.sentences[check] = pretty(sentence)
        if not decide(sentence):
            raise NotABijection(check, pretty(sentence))
    cert.verified = True
    if registry is not None:
        registry.append(cert)
    return cert


# comparison ------------------------------------------------------------------

class Verdict(enum.Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


@dataclass
class Comparison:
    verdict: Verdict
    k: int | None = None
    branch: str | None = None
    certificates: list = field(default_factory=list)
    counts: tuple | None = None

    def to_json(self):
        out = {"verdict": self.verdict.value, "branch": self.branch}
        if self.k is not None:
            out["k"] = self.k
            out["counts"] = [str(c) for c in self.counts]
        if self.certificates:
            out["certificates"] = self.certificates
        return out


def equal_search(a: K0Element, b: K0Element, registry: CertificateRegistry | None = None,
                 depth: int = DEFAULT_DEPTH, max_frontier: int = 64):
    """Return the list of certificate indices used to rewrite a - b to 0, or None."""
    a._check(b)
    if scissor_zero(a - b):
        return []
    if not registry:
        return None
    relations = [(i, r) for i, r in enumerate(registry.relations()) if r]
    diff = normalize(a - b)
    frontier = [(diff, [])]
    seen = {diff}
    for _ in range(depth):
        nxt = []
        for y, path in frontier:
            for i, r in relations:
                for (sym, e), coeff in y.sorted_terms():
                    for (sym2, e2), rc in r.terms.items():
                        if sym2 != sym or coeff % rc:
                            continue
                        z = y - r.lshift(e - e2).scale(coeff // rc)
                        if z in seen:
                            continue
                        seen.add(z)
                        if scissor_zero(z):
                            return path + [i]
                        nxt.append((z, path + [i]))
        frontier = nxt[:max_frontier]
        if not frontier:
            break
    return None


def compare(a: K0Element, b: K0Element, registry: CertificateRegistry | None = None, K: int = 3,
            depth: int = DEFAULT_DEPTH) -> Comparison:
    a._check(b)
    used = equal_search(a, b, registry, depth)
    if used is not None:
        return Comparison(Verdict.EQUAL, branch="registry" if used else "scissor", certificates=used)
    if a.field.p:
        from .realize import NoSeparation, count_class, separate

        k = separate(a, b, K)
        if not isinstance(k, NoSeparation):
            return Comparison(Verdict.DISTINCT, k=k, branch="count",
                              counts=(count_class(a, k), count_class(b, k)))
    return Comparison(Verdict.UNKNOWN, branch=None)


def clear_caches():
    _CANON.clear()
    _EXPAND.clear()
