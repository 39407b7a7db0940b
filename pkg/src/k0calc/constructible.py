"""Constructible sets as finite unions of locally closed cells.

A cell is ``{f_1 = ... = f_r = 0, g != 0}`` inside affine space with named
coordinates (the ambient).  Set operations go through formulas and the DNF
conversion; emptiness is decided by quantifier elimination; points over a
finite field are found by exhaustive vectorised evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AmbientError, CharZeroUnsupported, FieldMismatch, SizeLimit
from .formula import Atom, Formula, Not, conj, disj, false, fresh_name, to_cells, true
from .gf import ExtensionField, VectorArithmetic
from .poly import FieldTag, Polynomial, divides

DEFAULT_BUDGET = 10**7
_CHUNK = 1 << 17


def _poly_key(p: Polynomial, order):
    return (p.total_degree(), p.format(order))


@dataclass(frozen=True)
class Cell:
    ambient: tuple
    equations: tuple
    inequation: Polynomial

    @classmethod
    def build(cls, ambient: Sequence[str], equations: Iterable[Polynomial], inequation: Polynomial):
        """Canonical cell, or None when the data is trivially inconsistent."""
        ambient = tuple(ambient)
        if inequation.is_zero():
            return None
        eqs = {}
        for e in equations:
            if e.is_zero():
                continue
            if e.is_constant():
                return None
            e = e.monic(ambient)
            eqs[e] = None
        g = inequation.monic(ambient)
        ordered = tuple(sorted(eqs, key=lambda p: _poly_key(p, ambient)))
        return cls(ambient, ordered, g)

    @property
    def field(self) -> FieldTag:
        return self.inequation.field

    @property
    def is_closed(self) -> bool:
        return self.inequation.is_constant()

    def polynomials(self):
        return self.equations + (self.inequation,)

    @property
    def variables(self) -> frozenset:
        out = set()
        for p in self.polynomials():
            out |= p.variables
        return frozenset(out)

    def to_formula(self) -> Formula:
        parts = [Atom(e, tuple(v for v in self.ambient if v in e.variables)) for e in self.equations]
        if not self.inequation.is_constant():
            g = self.inequation
            parts.append(Not(Atom(g, tuple(v for v in self.ambient if v in g.variables))))
        if not parts:
            return true(self.field)
        return conj(parts)

    def rename(self, mapping: dict) -> "Cell":
        amb = tuple(mapping.get(v, v) for v in self.ambient)
        return Cell.build(amb, [e.rename(mapping) for e in self.equations], self.inequation.rename(mapping))

    def contains(self, point: dict) -> bool:
        return all(not e.evaluate(point) for e in self.equations) and bool(self.inequation.evaluate(point))

    def __str__(self):
        eqs = ", ".join(f"{e.format(self.ambient)} = 0" for e in self.equations)
        return "{" + eqs + " ; " + f"{self.inequation.format(self.ambient)} != 0" + "}"


@dataclass(frozen=True)
class ConstructibleSet:
    ambient: tuple
    cells: tuple
    field: FieldTag

    @classmethod
    def from_formula(cls, f: Formula, ambient: Sequence[str] | None = None) -> "ConstructibleSet":
        return to_cells(f, ambient)

    @classmethod
    def full(cls, ambient: Sequence[str], field_tag: FieldTag) -> "ConstructibleSet":
        ambient = tuple(ambient)
        return cls(ambient, (Cell.build(ambient, (), Polynomial.one(field_tag)),), field_tag)

    @classmethod
    def empty(cls, ambient: Sequence[str], field_tag: FieldTag) -> "ConstructibleSet":
        return cls(tuple(ambient), (), field_tag)

    def to_formula(self) -> Formula:
        if not self.cells:
            return false(self.field)
        return disj([c.to_formula() for c in self.cells])

    def __str__(self):
        if not self.cells:
            return "{}"
        return " u ".join(str(c) for c in self.cells)

    def __len__(self):
        return len(self.cells)

    def with_cells(self, cells: Iterable[Cell]) -> "ConstructibleSet":
        return ConstructibleSet(self.ambient, tuple(dict.fromkeys(c for c in cells if c is not None)), self.field)

    def contains(self, point: dict) -> bool:
        return any(c.contains(point) for c in self.cells)

    # Boolean operations -----------------------------------------------------

    def _same_ambient(self, other: "ConstructibleSet"):
        if self.ambient != other.ambient:
            raise AmbientError(f"ambients differ: {self.ambient} vs {other.ambient}")
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def intersect(self, other: "ConstructibleSet") -> "ConstructibleSet":
        self._same_ambient(other)
        out = []
        for a in self.cells:
            for b in other.cells:
                g = ineq_product(a.inequation, b.inequation)
                out.append(Cell.build(self.ambient, a.equations + b.equations, g))
        return self.with_cells(out)

    def union(self, other: "ConstructibleSet") -> "ConstructibleSet":
        self._same_ambient(other)
        return self.with_cells(self.cells + other.cells)

    def complement(self) -> "ConstructibleSet":
        return to_cells(Not(self.to_formula()), self.ambient)

    def difference(self, other: "ConstructibleSet") -> "ConstructibleSet":
        """Set difference as a union of pairwise disjoint refinements of self's cells."""
        self._same_ambient(other)
        pieces = list(self.cells)
        for c in other.cells:
            pieces = [p for piece in pieces for p in cell_minus(piece, c)]
        return self.with_cells(pieces)

    def product(self, other: "ConstructibleSet") -> "ConstructibleSet":
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")
        taken = set(self.ambient)
        mapping = {}
        for v in other.ambient:
            if v in taken:
                new = fresh_name(v, taken | set(other.ambient))
                mapping[v] = new
                taken.add(new)
            else:
                taken.add(v)
        right = [c.rename(mapping) for c in other.cells]
        amb = self.ambient + tuple(mapping.get(v, v) for v in other.ambient)
        out = [Cell.build(amb, a.equations + b.equations, a.inequation * b.inequation)
               for a in self.cells for b in right]
        return ConstructibleSet(amb, tuple(dict.fromkeys(c for c in out if c is not None)), self.field)

    def disjointify(self) -> "ConstructibleSet":
        """Refine left to right: C_i <- C_i minus (C_1 u ... u C_{i-1}); empty pieces dropped."""
        from .qe import surely_empty

        out = []
        for i, c in enumerate(self.cells):
            pieces = [c]
            for prev in self.cells[:i]:
                pieces = [p for piece in pieces for p in cell_minus(piece, prev)]
                pieces = [p for p in pieces if not surely_empty(p)]
            out.extend(p for p in pieces if not surely_empty(p))
        return self.with_cells(out)

    def is_empty(self) -> bool:
        from .qe import cell_is_empty

        return all(cell_is_empty(c) for c in self.cells)

    # finite-field points ----------------------------------------------------

    def points_over(self, ext: ExtensionField, budget: int = DEFAULT_BUDGET) -> list:
        idx = _matching_indices(self, ext, budget)
        n = len(self.ambient)
        out = []
        for i in idx.tolist():
            coords = []
            for _ in range(n):
                coords.append(ext.from_int(i % ext.q))
                i //= ext.q
            out.append(tuple(reversed(coords)))
        return out

    def count_over(self, ext: ExtensionField, budget: int = DEFAULT_BUDGET) -> int:
        return _count(self, ext, budget)


def ineq_product(a: Polynomial, b: Polynomial) -> Polynomial:
    """A polynomial vanishing exactly where a or b does, without repeating a shared factor."""
    if b.is_constant() or divides(b, a):
        return a
    if a.is_constant() or divides(a, b):
        return b
    return a * b


def cell_minus(piece: Cell, c: Cell) -> list:
    """piece minus c, as pairwise disjoint cells (disjoint complement of c)."""
    amb = piece.ambient
    out = []
    prefix: list = []
    for f in c.equations:
        out.append(Cell.build(amb, piece.equations + tuple(prefix), ineq_product(piece.inequation, f)))
        prefix.append(f)
    if not c.inequation.is_constant():
        out.append(Cell.build(amb, piece.equations + tuple(prefix) + (c.inequation,), piece.inequation))
    return [x for x in out if x is not None]


# module-level operation names ------------------------------------------------

def intersect(a: ConstructibleSet, b: ConstructibleSet) -> ConstructibleSet:
    return a.intersect(b)


def union(a: ConstructibleSet, b: ConstructibleSet) -> ConstructibleSet:
    return a.union(b)


def complement(a: ConstructibleSet) -> ConstructibleSet:
    return a.complement()


def product(a: ConstructibleSet, b: ConstructibleSet) -> ConstructibleSet:
    return a.product(b)


def disjointify(a: ConstructibleSet) -> ConstructibleSet:
    return a.disjointify()


def points_over(a: ConstructibleSet, ext: ExtensionField, budget: int = DEFAULT_BUDGET) -> list:
    return a.points_over(ext, budget)


def is_empty(a: ConstructibleSet) -> bool:
    return a.is_empty()


# vectorised evaluation -------------------------------------------------------

def _check_space(ambient, fld: FieldTag, ext: ExtensionField, budget: int) -> int:
    if fld.p == 0:
        raise CharZeroUnsupported("point enumeration needs a finite characteristic")
    if fld.p != ext.p:
        raise FieldMismatch(f"set over {fld} cannot be enumerated over F_{ext.q}")
    total = ext.q ** len(ambient)
    if total > budget:
        raise SizeLimit(f"{ext.q}^{len(ambient)} = {total} tuples exceeds the enumeration budget {budget}",
                        cap=f"budget={budget}")
    return total


def _compile(poly: Polynomial, ambient):
    pos = {v: i for i, v in enumerate(ambient)}
    return [([pos[v] for v, _ in m], [e for _, e in m], c) for m, c in poly.items()]


def _evaluate(compiled, cols, va: VectorArithmetic, size: int):
    acc = None
    for idx, exps, c in compiled:
        term = va.monomial([cols[i] for i in idx], exps, int(c), size)
        acc = term if acc is None else va.add(acc, term)
    if acc is None:
        return np.zeros(size, dtype=np.int64)
    return acc


def _cell_programs(cells, ambient):
    return [([_compile(e, ambient) for e in c.equations], _compile(c.inequation, ambient)) for c in cells]


def _chunk_masks(progs, ext: ExtensionField, va: VectorArithmetic, n: int, start: int, stop: int):
    size = stop - start
    idx = np.arange(start, stop, dtype=np.int64)
    cols = []
    for j in range(n):
        cols.append((idx // ext.q ** (n - 1 - j)) % ext.q)
    mask = np.zeros(size, dtype=bool)
    for eqs, ineq in progs:
        m = np.ones(size, dtype=bool)
        for e in eqs:
            m &= _evaluate(e, cols, va, size) == 0
            if not m.any():
                break
        if m.any():
            m &= _evaluate(ineq, cols, va, size) != 0
        mask |= m
    return idx, mask


def _matching_indices(a: ConstructibleSet, ext: ExtensionField, budget: int):
    total = _check_space(a.ambient, a.field, ext, budget)
    if not a.cells:
        return np.zeros(0, dtype=np.int64)
    va = VectorArithmetic(ext)
    progs = _cell_programs(a.cells, a.ambient)
    found = []
    for start in range(0, total, _CHUNK):
        idx, mask = _chunk_masks(progs, ext, va, len(a.ambient), start, min(total, start + _CHUNK))
        found.append(idx[mask])
    return np.concatenate(found)


def _count(a: ConstructibleSet, ext: ExtensionField, budget: int) -> int:
    total = _check_space(a.ambient, a.field, ext, budget)
    if not a.cells:
        return 0
    va = VectorArithmetic(ext)
    progs = _cell_programs(a.cells, a.ambient)
    count = 0
    for start in range(0, total, _CHUNK):
        _, mask = _chunk_masks(progs, ext, va, len(a.ambient), start, min(total, start + _CHUNK))
        count += int(mask.sum())
    return count


def count_cell(cell: Cell, ext: ExtensionField, budget: int = DEFAULT_BUDGET) -> int:
    return _count(ConstructibleSet(cell.ambient, (cell,), cell.field), ext, budget)
