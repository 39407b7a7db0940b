"""First-order formulas over the language of rings with field constants.

Atoms are always ``poly = 0``; ``p != 0`` is ``Not(Atom(p))``.  The text
grammar::

    formula := quant | or
    quant   := ("E" | "A") ident "." formula
    or      := and { "|" and }
    and     := lit { "&" lit }
    lit     := "!" lit | "(" formula ")" | quant | poly "=" poly | poly "!=" poly
             | "true" | "false"
    poly    := ["-"] term { ("+" | "-") term }
    term    := factor { "*" factor }
    factor  := base [ "^" integer ]
    base    := integer | ident | "(" poly ")"

Free variables are declared implicitly in order of first occurrence; that
order fixes the ambient coordinates of the defined set.  Bound variables are
renamed on parse so that they are pairwise distinct and distinct from every
free variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import BoundVarError, InputError, ParseError
from .poly import FieldTag, Polynomial


class Formula:
    """Base class of the formula AST; nodes are frozen dataclasses."""

    def __and__(self, other):
        return conj([self, other])

    def __or__(self, other):
        return disj([self, other])

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Atom(Formula):
    poly: Polynomial
    # textual order of the variables, used only to order free variables
    names: tuple = field(default=(), compare=False, repr=False)

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class And(Formula):
    args: tuple

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    body: Formula

    def __str__(self):
        return pretty(self)


Quantifier = (Exists, ForAll)


def true(field_tag: FieldTag) -> Atom:
    return Atom(Polynomial.zero(field_tag))


def false(field_tag: FieldTag) -> Atom:
    return Atom(Polynomial.one(field_tag))


def atom(poly: Polynomial) -> Atom:
    return Atom(poly, tuple(sorted(poly.variables)))


def conj(parts: Iterable[Formula]) -> Formula:
    flat = []
    for p in parts:
        flat.extend(p.args if isinstance(p, And) else (p,))
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(parts: Iterable[Formula]) -> Formula:
    flat = []
    for p in parts:
        flat.extend(p.args if isinstance(p, Or) else (p,))
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def field_of(f: Formula) -> FieldTag | None:
    if isinstance(f, Atom):
        return f.poly.field
    if isinstance(f, Not):
        return field_of(f.arg)
    if isinstance(f, (And, Or)):
        return field_of(f.args[0])
    return field_of(f.body)


# traversal -------------------------------------------------------------------

def free_vars(f: Formula) -> tuple:
    """Free variables in first-occurrence order."""
    out: list = []
    seen: set = set()

    def walk(g, bound):
        if isinstance(g, Atom):
            names = list(g.names) + sorted(g.poly.variables - set(g.names))
            for v in names:
                if v in g.poly.variables and v not in bound and v not in seen:
                    seen.add(v)
                    out.append(v)
        elif isinstance(g, Not):
            walk(g.arg, bound)
        elif isinstance(g, (And, Or)):
            for a in g.args:
                walk(a, bound)
        else:
            walk(g.body, bound | {g.var})

    walk(f, frozenset())
    return tuple(out)


def all_names(f: Formula) -> set:
    if isinstance(f, Atom):
        return set(f.poly.variables)
    if isinstance(f, Not):
        return all_names(f.arg)
    if isinstance(f, (And, Or)):
        return set().union(*(all_names(a) for a in f.args))
    return all_names(f.body) | {f.var}


def bound_vars(f: Formula) -> set:
    if isinstance(f, Atom):
        return set()
    if isinstance(f, Not):
        return bound_vars(f.arg)
    if isinstance(f, (And, Or)):
        return set().union(*(bound_vars(a) for a in f.args))
    return bound_vars(f.body) | {f.var}


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Atom):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    return False


def fresh_name(base: str, taken: set) -> str:
    stem = re.sub(r"_\d+$", "", base)
    i = 1
    while f"{stem}_{i}" in taken:
        i += 1
    return f"{stem}_{i}"


def rename_free(f: Formula, mapping: dict) -> Formula:
    """Rename free variables; the caller guarantees no capture."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.poly.rename(mapping), tuple(mapping.get(v, v) for v in f.names))
    if isinstance(f, Not):
        return Not(rename_free(f.arg, mapping))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(rename_free(a, mapping) for a in f.args))
    inner = {k: v for k, v in mapping.items() if k != f.var}
    return type(f)(f.var, rename_free(f.body, inner))


def substitute(f: Formula, var: str, value: Polynomial) -> Formula:
    """Capture-avoiding substitution of ``value`` for the free variable ``var``."""
    if var in bound_vars(f):
        raise BoundVarError(f"{var} is bound in the formula")
    taken = all_names(f) | set(value.variables)

    def walk(g):
        if isinstance(g, Atom):
            if var not in g.poly.variables:
                return g
            names = []
            for v in g.names:
                if v == var:
                    names.extend(sorted(value.variables))
                else:
                    names.append(v)
            return Atom(g.poly.substitute(var, value), tuple(dict.fromkeys(names)))
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(a) for a in g.args))
        v, body = g.var, g.body
        if v in value.variables:
            new = fresh_name(v, taken)
            taken.add(new)
            body = rename_free(body, {v: new})
            v = new
        return type(g)(v, walk(body))

    return walk(f)


# normal forms ----------------------------------------------------------------

def nnf(f: Formula, negate: bool = False) -> Formula:
    """Negation normal form of a quantifier-free formula."""
    if isinstance(f, Atom):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.arg, not negate)
    if isinstance(f, And):
        parts = [nnf(a, negate) for a in f.args]
        return disj(parts) if negate else conj(parts)
    if isinstance(f, Or):
        parts = [nnf(a, negate) for a in f.args]
        return conj(parts) if negate else disj(parts)
    raise InputError("normal forms require a quantifier-free formula")


def _norm(p: Polynomial) -> Polynomial:
    return p.monic()




def _dnf_conj(f: Formula):
    """List of (equations, inequations) frozenset pairs."""
    if isinstance(f, Atom):
        p = f.poly
        if p.is_zero():
            return [(frozenset(), frozenset())]
        if p.is_constant():
            return []
        return [(frozenset([_norm(p)]), frozenset())]
    if isinstance(f, Not):
        p = f.arg.poly
        if p.is_zero():
            return []
        if p.is_constant():
            return [(frozenset(), frozenset())]
        return [(frozenset(), frozenset([_norm(p)]))]
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(_dnf_conj(a))
        return _absorb(out)
    if isinstance(f, And):
        acc = [(frozenset(), frozenset())]
        for a in f.args:
            part = _dnf_conj(a)
            acc = _absorb([(e1 | e2, n1 | n2) for e1, n1 in acc for e2, n2 in part if not (e1 | e2) & (n1 | n2)])
            if not acc:
                return []
        return acc
    raise InputError("normal forms require a quantifier-free formula")


def _absorb(conjs):
    uniq = list(dict.fromkeys(conjs))
    out = []
    for i, (e, n) in enumerate(uniq):
        subsumed = any(j != i and e2 <= e and n2 <= n and (e2, n2) != (e, n) for j, (e2, n2) in enumerate(uniq))
        if not subsumed:
            out.append((e, n))
    return out


def dnf(f: Formula) -> list:
    """Disjunctive normal form as (equations, inequations) pairs of polynomial sets."""
    return _dnf_conj(nnf(f))


def to_cells(f: Formula, ambient: Sequence[str] | None = None):
    """Quantifier-free formula -> ConstructibleSet of locally closed cells."""
    from .constructible import Cell, ConstructibleSet

    if not is_quantifier_free(f):
        raise InputError("to_cells needs a quantifier-free formula")
    amb = tuple(ambient) if ambient is not None else free_vars(f)
    missing = set().union(*(set(p.variables) for p in _polys(f))) - set(amb) if _polys(f) else set()
    if missing:
        raise InputError(f"variables {sorted(missing)} are not in the ambient {amb}")
    fld = field_of(f)
    cells = []
    for eqs, ineqs in dnf(f):
        g = Polynomial.one(fld)
        for h in sorted(ineqs, key=str):
            g = g * h
        c = Cell.build(amb, eqs, g)
        if c is not None:
            cells.append(c)
    return ConstructibleSet(amb, tuple(dict.fromkeys(cells)), fld)


def _polys(f: Formula) -> list:
    if isinstance(f, Atom):
        return [f.poly]
    if isinstance(f, Not):
        return _polys(f.arg)
    if isinstance(f, (And, Or)):
        return [p for a in f.args for p in _polys(a)]
    return _polys(f.body)


def evaluate_closed(f: Formula) -> bool:
    """Truth value of a quantifier-free formula without variables."""
    if isinstance(f, Atom):
        if not f.poly.is_constant():
            raise InputError("formula still has free variables")
        return f.poly.is_zero()
    if isinstance(f, Not):
        return not evaluate_closed(f.arg)
    if isinstance(f, And):
        return all(evaluate_closed(a) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate_closed(a) for a in f.args)
    raise InputError("formula has quantifiers")


def holds_at(f: Formula, env: dict) -> bool:
    """Truth of a quantifier-free formula at a point (values: ints or FieldElements)."""
    if isinstance(f, Atom):
        return not f.poly.evaluate(env)
    if isinstance(f, Not):
        return not holds_at(f.arg, env)
    if isinstance(f, And):
        return all(holds_at(a, env) for a in f.args)
    if isinstance(f, Or):
        return any(holds_at(a, env) for a in f.args)
    raise InputError("holds_at needs a quantifier-free formula")


# printing --------------------------------------------------------------------

def pretty(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.poly.format()} = 0"
    if isinstance(f, Not):
        if isinstance(f.arg, Atom):
            return f"{f.arg.poly.format()} != 0"
        return "!" + _wrap(f.arg, (Not,))
    if isinstance(f, And):
        return " & ".join(_wrap(a, (Atom, Not)) for a in f.args)
    if isinstance(f, Or):
        return " | ".join(_wrap(a, (Atom, Not, And)) for a in f.args)
    tag = "E" if isinstance(f, Exists) else "A"
    return f"{tag} {f.var}. {pretty(f.body)}"


def _wrap(f: Formula, bare: tuple) -> str:
    s = pretty(f)
    return s if isinstance(f, bare) else f"({s})"


# parsing ---------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(!=|[=!&|()+\-*^.]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip():
                bad = pos + (len(rest) - len(rest.lstrip()))
                raise ParseError(f"unexpected character {text[bad]!r}", text, bad)
            break
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("int", m.group(1), start))
        elif m.group(2):
            toks.append(("id", m.group(2), start))
        else:
            toks.append(("op", m.group(3), start))
        pos = m.end()
    toks.append(("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, fld: FieldTag):
        self.text = text
        self.field = fld
        self.toks = _tokenize(text)
        self.i = 0
        self.names: list = []

    def peek(self, off=0):
        return self.toks[min(self.i + off, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            self.error(f"expected {want!r}, found {got!r}")
        self.i += 1
        return tok

    def at_quant(self):
        t0, t1, t2 = self.peek(), self.peek(1), self.peek(2)
        return t0[0] == "id" and t0[1] in ("E", "A") and t1[0] == "id" and t2 == ("op", ".", t2[2])

    # formulas
    def formula(self):
        if self.at_quant():
            return self.quant()
        return self.disjunction()

    def quant(self):
        q = self.take("id")[1]
        var = self.take("id")[1]
        self.take("op", ".")
        body = self.formula()
        return (Exists if q == "E" else ForAll)(var, body)

    def disjunction(self):
        parts = [self.conjunction()]
        while self.peek()[:2] == ("op", "|"):
            self.i += 1
            parts.append(self.conjunction())
        return disj(parts)

    def conjunction(self):
        parts = [self.literal()]
        while self.peek()[:2] == ("op", "&"):
            self.i += 1
            parts.append(self.literal())
        return conj(parts)

    def literal(self):
        tok = self.peek()
        if tok[:2] == ("op", "!"):
            self.i += 1
            return Not(self.literal())
        if self.at_quant():
            return self.quant()
        if tok[0] == "id" and tok[1] in ("true", "false"):
            self.i += 1
            return true(self.field) if tok[1] == "true" else false(self.field)
        if tok[:2] == ("op", "("):
            save, save_names = self.i, len(self.names)
            try:
                return self.relation()
            except ParseError:
                self.i = save
                del self.names[save_names:]
            self.take("op", "(")
            inner = self.formula()
            self.take("op", ")")
            return inner
        return self.relation()

    def relation(self):
        start = len(self.names)
        lhs = self.poly()
        tok = self.peek()
        if tok[:2] not in (("op", "="), ("op", "!=")):
            self.error("expected '=' or '!='")
        self.i += 1
        rhs = self.poly()
        names = tuple(dict.fromkeys(self.names[start:]))
        a = Atom(lhs - rhs, names)
        return a if tok[1] == "=" else Not(a)

    # polynomials
    def poly(self):
        neg = False
        if self.peek()[:2] == ("op", "-"):
            self.i += 1
            neg = True
        acc = self.term()
        if neg:
            acc = -acc
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while self.peek()[:2] == ("op", "*"):
            self.i += 1
            acc = acc * self.factor()
        return acc

    def factor(self):
        base = self.base()
        if self.peek()[:2] == ("op", "^"):
            self.i += 1
            e = int(self.take("int")[1])
            base = base**e
        return base

    def base(self):
        tok = self.peek()
        if tok[0] == "int":
            self.i += 1
            return Polynomial.constant(self.field, int(tok[1]))
        if tok[0] == "id":
            if tok[1] in ("true", "false"):
                self.error(f"{tok[1]!r} is not a polynomial")
            self.i += 1
            self.names.append(tok[1])
            return Polynomial.var(self.field, tok[1])
        if tok[:2] == ("op", "("):
            self.i += 1
            inner = self.poly()
            self.take("op", ")")
            return inner
        if tok[:2] == ("op", "-"):
            self.i += 1
            return -self.factor()
        self.error(f"unexpected {tok[1] or 'end of input'!r}")


def _alpha_rename(f: Formula) -> Formula:
    free = set(free_vars(f))
    taken = all_names(f)
    used_bound: set = set()

    def walk(g, env):
        if isinstance(g, Atom):
            if not env:
                return g
            return Atom(g.poly.rename(env), tuple(env.get(v, v) for v in g.names))
        if isinstance(g, Not):
            return Not(walk(g.arg, env))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(a, env) for a in g.args))
        v = g.var
        new = v
        if v in free or v in used_bound:
            new = fresh_name(v, taken)
            taken.add(new)
        used_bound.add(new)
        env2 = dict(env)
        if new != v:
            env2[v] = new
        else:
            env2.pop(v, None)
        return type(g)(new, walk(g.body, env2))

    return walk(f, {})


def parse(text: str, field_tag: FieldTag | int = 0) -> Formula:
    fld = field_tag if isinstance(field_tag, FieldTag) else FieldTag(field_tag)
    p = _Parser(text, fld)
    if p.peek()[0] == "eof":
        p.error("empty formula")
    f = p.formula()
    if p.peek()[0] != "eof":
        p.error(f"unexpected {p.peek()[1]!r}")
    return _alpha_rename(f)


def parse_polynomial(text: str, field_tag: FieldTag | int = 0) -> Polynomial:
    fld = field_tag if isinstance(field_tag, FieldTag) else FieldTag(field_tag)
    p = _Parser(text, fld)
    out = p.poly()
    if p.peek()[0] != "eof":
        p.error(f"unexpected {p.peek()[1]!r}")
    return out
