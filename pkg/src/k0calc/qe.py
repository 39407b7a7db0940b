"""Quantifier elimination for algebraically closed fields.

Existential elimination works cell by cell.  For ``E x. (E = 0 & g != 0)``
the equations are reduced by pseudo-division against one of minimal degree
in ``x``, branching on whether its leading coefficient vanishes.  Once a
single equation ``f`` with invertible leading coefficient remains, the
existence of a root of ``f`` that is not a root of ``g`` is equivalent to
``f`` not dividing ``g^deg(f)``, i.e. to some coefficient of the pseudo
remainder of ``g^deg(f)`` by ``f`` being nonzero.  With no equation left,
``g`` has a non-root iff some coefficient of ``g`` in ``x`` is nonzero,
because algebraically closed fields are infinite.
"""

from __future__ import annotations

from typing import Sequence

from .constructible import Cell, ConstructibleSet
from .errors import ArityError, NotASentence, VarError
from .formula import (And, Atom, Exists, ForAll, Formula, Not, Or, conj, disj, evaluate_closed, free_vars,
                      to_cells)
from .poly import Polynomial, divides, prem


class EliminationTrace:
    """Case-split tree recorded during elimination; one node per recursive step."""

    def __init__(self):
        self.root: list = []
        self._stack = [self.root]

    def node(self, action: str, **info):
        entry = {"action": action, **{k: str(v) for k, v in info.items()}, "children": []}
        self._stack[-1].append(entry)
        return entry

    def enter(self, entry):
        self._stack.append(entry["children"])

    def leave(self):
        self._stack.pop()

    def to_json(self):
        return self.root

    @classmethod
    def from_json(cls, nodes) -> "EliminationTrace":
        t = cls()
        t.root.extend(nodes)
        return t

    def to_text(self) -> str:
        lines = []

        def walk(nodes, depth):
            for n in nodes:
                extras = ", ".join(f"{k}={v}" for k, v in n.items() if k not in ("action", "children"))
                lines.append("  " * depth + n["action"] + (f" [{extras}]" if extras else ""))
                walk(n["children"], depth + 1)

        walk(self.root, 0)
        return "\n".join(lines)


class _Dead(Exception):
    pass


def _norm(p: Polynomial) -> Polynomial:
    return p.monic()


def _add_eq(Z: list, p: Polynomial) -> list:
    if p.is_zero():
        return Z
    if p.is_constant():
        raise _Dead
    p = _norm(p)
    return Z if p in Z else Z + [p]


def _add_neq(H: list, p: Polynomial) -> list:
    if p.is_zero():
        raise _Dead
    if p.is_constant():
        return H
    p = _norm(p)
    return H if p in H else H + [p]


def _elim(Z, H, E, g, x, amb, out, trace):
    one = g.field
    try:
        eqs = []
        for e in E:
            if e.degree_in(x) <= 0:
                Z = _add_eq(Z, e)
            else:
                eqs.append(e)
        if g.degree_in(x) <= 0:
            H = _add_neq(H, g)
            g = Polynomial.one(one)
        if any(h in Z for h in H):
            raise _Dead
    except _Dead:
        if trace:
            trace.node("dead")
        return

    def emit(Z2, H2):
        g2 = Polynomial.one(one)
        for h in H2:
            g2 = g2 * h
        c = Cell.build(amb, Z2, g2)
        if c is not None:
            out.append(c)
            if trace:
                trace.node("leaf", cell=c)

    if not eqs:
        if g.degree_in(x) <= 0:
            emit(Z, H)
            return
        if trace:
            trace.node("no equation: some coefficient of g nonzero", g=g.format())
        for c in g.coefficients_in(x):
            if c.is_zero():
                continue
            if c.is_constant():
                emit(Z, H)
                return
            try:
                emit(Z, _add_neq(H, c))
            except _Dead:
                pass
        return

    eqs.sort(key=lambda p: (p.degree_in(x), len(p), p.format()))
    f = eqs[0]
    d = f.degree_in(x)
    lc = f.lc_in(x)
    rest = eqs[1:]
    if not lc.is_constant():
        lc_n = _norm(lc)
        if lc_n not in H:
            node = trace.node("lc = 0", lc=lc.format(), f=f.format()) if trace else None
            if node:
                trace.enter(node)
            try:
                truncated = f - lc * Polynomial.var(one, x) ** d
                _elim(_add_eq(Z, lc), H, rest + [truncated], g, x, amb, out, trace)
            except _Dead:
                if trace:
                    trace.node("dead")
            if node:
                trace.leave()
        if lc_n in Z:
            return
        H = H + [lc_n] if lc_n not in H else H
        node = trace.node("lc != 0", lc=lc.format(), f=f.format()) if trace else None
    else:
        node = trace.node("pivot", f=f.format()) if trace else None
    if node:
        trace.enter(node)
    try:
        if rest:
            reduced = [prem(e, f, x) for e in rest]
            g2 = prem(g, f, x) if g.degree_in(x) >= d else g
            _guard(g2, *reduced)
            _elim(Z, H, [f] + reduced, g2, x, amb, out, trace)
            return
        if g.degree_in(x) <= 0:
            emit(Z, H)
            return
        r = prem(g, f, x) if g.degree_in(x) >= d else g
        if r.degree_in(x) <= 0:
            try:
                emit(Z, _add_neq(H, r))
            except _Dead:
                if trace:
                    trace.node("dead: f divides g")
            return
        s = r
        for _ in range(d - 1):
            s = prem(s * r, f, x)
            _guard(s)
        if trace:
            trace.node("single equation: f does not divide g^d", remainder=s.format())
        for c in s.coefficients_in(x):
            if c.is_zero():
                continue
            if c.is_constant():
                emit(Z, H)
                return
            try:
                emit(Z, _add_neq(H, c))
            except _Dead:
                pass
    finally:
        if node:
            trace.leave()


def eliminate_cell(cell: Cell, x: str, trace: EliminationTrace | None = None) -> list:
    """Cells over ``cell.ambient`` minus ``x`` whose union is the projection of ``cell``."""
    amb = tuple(v for v in cell.ambient if v != x)
    if x not in cell.variables:
        return [Cell.build(amb, cell.equations, cell.inequation)]
    out: list = []
    node = trace.node("eliminate", var=x, cell=cell) if trace else None
    if node:
        trace.enter(node)
    _elim([], [], list(cell.equations), cell.inequation, x, amb, out, trace)
    if node:
        trace.leave()
    return list(dict.fromkeys(c for c in out if c is not None))


def eliminate_exists(C: ConstructibleSet, x: str, trace: EliminationTrace | None = None) -> ConstructibleSet:
    if x not in C.ambient:
        raise VarError(f"{x} is not an ambient variable of {C.ambient}")
    amb = tuple(v for v in C.ambient if v != x)
    out = []
    for cell in C.cells:
        out.extend(eliminate_cell(cell, x, trace))
    return ConstructibleSet(amb, tuple(dict.fromkeys(out)), C.field)


def project(C: ConstructibleSet, variables: Sequence[str], trace: EliminationTrace | None = None):
    """Existentially eliminate ``variables`` (last first)."""
    for v in reversed(list(variables)):
        C = eliminate_exists(C, v, trace)
    return C


_EMPTY_CACHE: dict = {}
_TERM_CAP: int | None = None


def _guard(*polys):
    if _TERM_CAP is not None:
        for p in polys:
            if len(p) > _TERM_CAP:
                raise EffortExceeded(f"{len(p)} terms")


def _var_order(cell: Cell) -> list:
    """Variables to eliminate, cheapest first (low degree, few occurrences)."""

    def cost(v):
        return (max(p.degree_in(v) for p in cell.polynomials() if v in p.variables),
                sum(1 for p in cell.polynomials() if v in p.variables))

    return sorted(sorted(cell.variables), key=cost)


_WITNESS_TUPLES = 1 << 17
_EFFORT = 400


class EffortExceeded(Exception):
    """An emptiness proof produced polynomials larger than the allowed effort."""


def _has_small_point(cell: Cell) -> bool:
    """Look for a point over a small F_{p^k}; finding one proves the cell nonempty."""
    p = cell.field.p
    if p == 0:
        return False
    from .constructible import count_cell
    from .gf import build_field

    n = len(cell.ambient)
    for k in (1, 2, 3, 4):
        if (p**k) ** n > _WITNESS_TUPLES:
            break
        if count_cell(cell, build_field(p, k)):
            return True
    return False


def _monomial_split(cell: Cell):
    """Split x^a * y^b * h = 0 into x = 0, y = 0 or h = 0; None if there is nothing to split."""
    for e in cell.equations:
        common = None
        for mono, _ in e.items():
            d = dict(mono)
            common = d if common is None else {v: min(k, d[v]) for v, k in common.items() if v in d}
        if not common:
            continue
        h = Polynomial(cell.field, {tuple((v, k - common.get(v, 0)) for v, k in m if k > common.get(v, 0)): c
                                    for m, c in e.items()})
        if h.is_constant() and len(common) == 1 and set(common.values()) == {1}:
            continue
        rest = [o for o in cell.equations if o is not e]
        parts = [Cell.build(cell.ambient, rest + [Polynomial.var(cell.field, v)], cell.inequation)
                 for v in sorted(common)]
        if not h.is_constant():
            parts.append(Cell.build(cell.ambient, rest + [h], cell.inequation))
        return parts
    return None


def _is_empty(cell: Cell, top: bool = False) -> bool:
    hit = _EMPTY_CACHE.get(cell)
    if hit is not None:
        return hit
    used = cell.variables
    if not used:
        result = False  # Cell.build already rejected constant contradictions
    else:
        amb = tuple(v for v in cell.ambient if v in used)
        if amb != cell.ambient:
            result = _is_empty(Cell.build(amb, cell.equations, cell.inequation), top)
        elif any(divides(e, cell.inequation) for e in cell.equations):
            result = True
        elif top and _has_small_point(cell):
            result = False
        else:
            parts = _monomial_split(cell)
            if parts is not None:
                result = all(_is_empty(c) for c in parts if c is not None)
            else:
                result = None
                for x in _var_order(cell):
                    try:
                        result = all(_is_empty(c) for c in eliminate_cell(cell, x))
                        break
                    except EffortExceeded:
                        continue
                if result is None:
                    raise EffortExceeded(str(cell))
    _EMPTY_CACHE[cell] = result
    return result


def cell_is_empty(cell: Cell, max_terms: int | None = None) -> bool:
    """True iff the cell has no point over the algebraic closure.

    With ``max_terms`` set, raises EffortExceeded once an intermediate
    polynomial grows past that many terms.
    """
    global _TERM_CAP
    if cell is None:
        return True
    old = _TERM_CAP
    _TERM_CAP = max_terms
    try:
        return _is_empty(cell, top=True)
    finally:
        _TERM_CAP = old


def surely_empty(cell: Cell, max_terms: int = _EFFORT) -> bool:
    """Like cell_is_empty, but answers False when the proof is too expensive."""
    try:
        return cell_is_empty(cell, max_terms)
    except EffortExceeded:
        return False


def clear_cache():
    _EMPTY_CACHE.clear()


def _quant_block(f):
    kind = type(f)
    names = []
    while isinstance(f, kind):
        names.append(f.var)
        f = f.body
    return kind, names, f


def eliminate_all(f: Formula, trace: EliminationTrace | None = None) -> Formula:
    """Equivalent quantifier-free formula (innermost quantifier block first)."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Not):
        return Not(eliminate_all(f.arg, trace))
    if isinstance(f, And):
        return conj([eliminate_all(a, trace) for a in f.args])
    if isinstance(f, Or):
        return disj([eliminate_all(a, trace) for a in f.args])
    kind, names, body = _quant_block(f)
    inner = eliminate_all(body, trace)
    if kind is ForAll:
        inner = Not(inner)
    fv = free_vars(inner)
    outer = tuple(v for v in fv if v not in names)
    block = [v for v in names if v in fv]
    C = to_cells(inner, outer + tuple(block))
    for v in reversed(block):
        C = eliminate_exists(C, v, trace)
    res = C.to_formula()
    return Not(res) if kind is ForAll else res


def quantifier_free(f: Formula, trace: EliminationTrace | None = None, ambient=None) -> ConstructibleSet:
    """eliminate_all followed by DNF conversion, as a constructible set."""
    qf = eliminate_all(f, trace)
    amb = tuple(ambient) if ambient is not None else free_vars(f)
    return to_cells(qf, amb)


def decide(sentence: Formula, trace: EliminationTrace | None = None) -> bool:
    fv = free_vars(sentence)
    if fv:
        raise NotASentence(f"free variables {list(fv)}")
    return evaluate_closed(eliminate_all(sentence, trace))


def _close(kind, names, body):
    for v in reversed(list(names)):
        body = kind(v, body)
    return body


def definably_equivalent(phi: Formula, psi: Formula, variables: Sequence[str] | None = None) -> bool:
    """Whether phi and psi define the same set over every algebraically closed extension."""
    if variables is None:
        a, b = free_vars(phi), free_vars(psi)
        if set(a) != set(b):
            raise ArityError(f"free variables differ: {list(a)} vs {list(b)}")
        variables = a
    else:
        extra = (set(free_vars(phi)) | set(free_vars(psi))) - set(variables)
        if extra:
            raise ArityError(f"variables {sorted(extra)} not declared")
    diff = disj([conj([phi, Not(psi)]), conj([Not(phi), psi])])
    return not decide(_close(Exists, variables, diff))


def exists_closure(f: Formula, variables: Sequence[str]) -> Formula:
    return _close(Exists, variables, f)


def forall_closure(f: Formula, variables: Sequence[str]) -> Formula:
    return _close(ForAll, variables, f)
