import itertools
import random

import pytest

from k0calc.errors import BoundVarError, ParseError
from k0calc.formula import (Atom, Exists, ForAll, Not, Or, free_vars, is_quantifier_free, parse,
                            parse_polynomial, pretty, substitute, to_cells)
from k0calc.poly import FieldTag

from oracles import SmallField, holds, random_qf

Q = FieldTag(0)


def P(text, fld=Q):
    return parse_polynomial(text, fld)


def test_parse_exists():
    f = parse("E x. x^2 = t")
    assert isinstance(f, Exists) and f.var == "x"
    assert isinstance(f.body, Atom) and f.body.poly == P("x^2 - t")
    assert free_vars(f) == ("t",)


def test_parse_or_not():
    f = parse("(x=0) | !(y=0)")
    assert isinstance(f, Or)
    a, b = f.args
    assert a.poly == P("x") and isinstance(b, Not) and b.arg.poly == P("y")


def test_parse_forall():
    f = parse("A a. E x. x^2 = a")
    assert isinstance(f, ForAll) and isinstance(f.body, Exists)
    assert f.body.body.poly == P("x^2 - a")
    assert free_vars(f) == ()


def test_inequation_sugar():
    f = parse("x != y")
    assert isinstance(f, Not) and f.arg.poly == P("x - y")


def test_free_vars_first_occurrence():
    assert free_vars(parse("y = 0 & x*z = 1")) == ("y", "x", "z")


def test_alpha_rename_separates_bound_and_free():
    f = parse("x = 0 & E x. x = 1")
    assert free_vars(f) == ("x",)
    inner = f.args[1]
    assert inner.var != "x"


def test_parse_errors_have_position():
    with pytest.raises(ParseError) as info:
        parse("x = = 1")
    assert "column" in str(info.value)
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(ParseError):
        parse("E x x = 0")


def test_substitute_examples():
    f = substitute(parse("x - y = 0"), "x", P("y"))
    assert f.poly.is_zero()
    g = substitute(parse("E x. x - t = 0"), "t", P("c^2"))
    assert isinstance(g, Exists) and g.body.poly == P(f"{g.var} - c^2")


def test_substitute_avoids_capture():
    f = parse("E x. x*t = 1")
    g = substitute(f, "t", P("x + 1"))
    assert g.var != "x"
    assert g.body.poly == P(f"{g.var}*x + {g.var} - 1")
    F = SmallField(3, 1)
    for xv in range(3):
        # E y. y*(x+1) = 1 holds exactly when x != -1
        assert holds(g, F, {"x": xv}) == ((xv + 1) % 3 != 0)


def test_substitute_bound_variable():
    with pytest.raises(BoundVarError):
        substitute(parse("E x. x = t"), "x", P("1"))


def test_to_cells_examples():
    C = to_cells(parse("!(x = 0 & y = 0)"))
    assert len(C.cells) == 2
    assert {c.inequation for c in C.cells} == {P("x"), P("y")}
    assert all(not c.equations for c in C.cells)

    C = to_cells(parse("x = 0 | x = 0"))
    assert len(C.cells) == 1 and C.cells[0].equations == (P("x"),)

    C = to_cells(parse("x = 0 & y != 0 & z != 0"))
    (c,) = C.cells
    assert c.equations == (P("x"),) and c.inequation == P("y*z")


def test_to_cells_empty_and_full():
    assert to_cells(parse("1 = 0")).cells == ()
    (c,) = to_cells(parse("0 = 0")).cells
    assert c.equations == () and c.inequation.is_constant()


@pytest.mark.parametrize("p", [2, 3])
def test_to_cells_matches_truth_table(p):
    rng = random.Random(100 + p)
    fld = FieldTag(p)
    variables = ("x", "y", "z")
    for _ in range(100):
        f = random_qf(rng, fld, variables, depth=3, atoms_max=4, max_deg=3)
        cells = to_cells(f, variables).to_formula()
        for k in (1, 2):
            F = SmallField(p, k)
            for pt in itertools.product(F.elements(), repeat=3):
                env = dict(zip(variables, pt))
                assert holds(f, F, env) == holds(cells, F, env)


def test_to_cells_pointwise_small():
    rng = random.Random(3)
    fld = FieldTag(5)
    variables = ("x", "y")
    F = SmallField(5, 1)
    for _ in range(30):
        f = random_qf(rng, fld, variables, depth=3)
        C = to_cells(f, variables)
        for a in range(5):
            for b in range(5):
                env = {"x": a, "y": b}
                assert holds(f, F, env) == holds(C.to_formula(), F, env)


def test_pretty_round_trip():
    for text in ["E x. x^2 - t = 0", "x = 0 | y != 0", "A a. E x. x^2 - a = 0",
                 "(x = 0 | y = 0) & z != 0", "!(x = 0 & y - 1 = 0)"]:
        f = parse(text)
        assert parse(pretty(f)) == f
        assert pretty(parse(pretty(f))) == pretty(f)


def test_pretty_round_trip_random():
    rng = random.Random(9)
    for _ in range(50):
        f = random_qf(rng, FieldTag(7), ("x", "y"), depth=3)
        g = parse(pretty(f), 7)
        canonical = pretty(g)
        assert parse(canonical, 7) == g
        assert pretty(parse(canonical, 7)) == canonical
        F = SmallField(7, 1)
        for a in range(0, 7, 2):
            for b in range(0, 7, 3):
                env = {"x": a, "y": b}
                assert holds(f, F, env) == holds(g, F, env)


def test_quantifier_free_flag():
    assert is_quantifier_free(parse("x = 0 & y != 0"))
    assert not is_quantifier_free(parse("E x. x = y"))
