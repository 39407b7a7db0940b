import itertools
import random

import pytest

from k0calc.constructible import (ConstructibleSet, complement, disjointify, intersect, is_empty,
                                  points_over, product, union)
from k0calc.errors import AmbientError, CharZeroUnsupported, SizeLimit
from k0calc.formula import parse, parse_polynomial, to_cells
from k0calc.gf import build_field
from k0calc.poly import FieldTag

from oracles import brute_count, random_qf


def S(text, p=0, ambient=None):
    return to_cells(parse(text, p), ambient)


def pts(C, p, k=1):
    return {tuple(e.coords[0] if k == 1 else e.coords for e in pt) for pt in points_over(C, build_field(p, k))}


def test_intersect_example():
    A = S("x = 0", ambient=("x", "y"))
    B = S("y != 0", ambient=("x", "y"))
    (c,) = intersect(A, B).cells
    assert c.equations == (parse_polynomial("x"),) and c.inequation == parse_polynomial("y")


def test_complement_example():
    (c,) = complement(S("x != 0")).cells
    assert c.equations == (parse_polynomial("x"),) and c.inequation.is_constant()


def test_product_example():
    A1 = ConstructibleSet.full(("x",), FieldTag(0))
    P = product(A1, ConstructibleSet.full(("y",), FieldTag(0)))
    assert P.ambient == ("x", "y")
    (c,) = P.cells
    assert not c.equations and c.inequation.is_constant()


def test_product_renames_clashing_names():
    A = S("x = 1")
    P = product(A, A)
    assert len(set(P.ambient)) == 2 and P.ambient[0] == "x"


def test_ambient_mismatch():
    with pytest.raises(AmbientError):
        union(S("x = 0"), S("y = 0"))


def test_points_over_examples():
    circle = S("x^2 + y^2 = 1", 5)
    assert pts(circle, 5) == {(0, 1), (0, 4), (1, 0), (4, 0)}
    off_diag = S("x != y", 3)
    assert len(points_over(off_diag, build_field(3))) == 6
    cusp = S("y^2 = x^3", 7)
    assert len(points_over(cusp, build_field(7))) == 7


def test_points_over_order_and_dedup():
    C = S("x = 0 | x = 0 & y = 1 | y = 1", 3)
    got = [tuple(e.coords[0] for e in pt) for pt in points_over(C, build_field(3))]
    assert got == sorted(set(got))
    assert len(got) == 5


def test_points_over_limits():
    with pytest.raises(CharZeroUnsupported):
        points_over(S("x = 0"), build_field(2))
    big = S("x + y + z + w = 0", 97)
    with pytest.raises(SizeLimit):
        points_over(big, build_field(97, 1), budget=10**6)


def test_is_empty_examples():
    assert is_empty(S("x = 0 & x != 0"))
    assert not is_empty(S("x^2 + 1 = 0", 3))
    assert is_empty(ConstructibleSet.empty(("x",), FieldTag(3)))
    assert not is_empty(S("x*y = 1"))
    assert is_empty(S("x*y = 1 & x = 0", 5))


def test_disjointify_examples():
    D = disjointify(S("x = 0 | x = 0 & y = 0"))
    assert len(D.cells) == 1 and D.cells[0].equations == (parse_polynomial("x"),)

    amb = ("x",)
    A = ConstructibleSet.full(amb, FieldTag(0)).union(S("x = 0", ambient=amb))
    D = disjointify(A)
    assert len(D.cells) == 1 and not D.cells[0].equations

    C = S("x^2 - y = 0 | x + y - 1 = 0", 5)
    D = disjointify(C)
    assert len(D.cells) == 2
    for k in (1, 2):
        F = build_field(5, k)
        assert sum(len(points_over(D.with_cells([c]), F)) for c in D.cells) == len(points_over(C, F))


def _random_set(rng, p, variables):
    return to_cells(random_qf(rng, FieldTag(p), variables, depth=2, atoms_max=3, max_deg=2, nonconstant=True),
                    variables)


@pytest.mark.parametrize("p", [2, 3])
def test_boolean_laws(p):
    rng = random.Random(p)
    amb = ("x", "y")
    for _ in range(25):
        A, B = _random_set(rng, p, amb), _random_set(rng, p, amb)
        pa, pb = pts(A, p), pts(B, p)
        universe = set(itertools.product(range(p), repeat=2))
        assert pts(complement(complement(A)), p) == pa
        assert pts(complement(union(A, B)), p) == universe - (pa | pb)
        assert pts(complement(intersect(A, B)), p) == universe - (pa & pb)
        assert pts(A.difference(B), p) == pa - pb


@pytest.mark.parametrize("p", [2, 3])
def test_disjointify_random(p):
    rng = random.Random(40 + p)
    amb = ("x", "y")
    for _ in range(20):
        C = union(_random_set(rng, p, amb), _random_set(rng, p, amb))
        D = disjointify(C)
        for a, b in itertools.combinations(D.cells, 2):
            assert is_empty(D.with_cells([a]).intersect(D.with_cells([b])))
        for k in (1, 2):
            F = build_field(p, k)
            total = sum(len(points_over(D.with_cells([c]), F)) for c in D.cells)
            assert total == len(points_over(C, F))


@pytest.mark.parametrize("p", [2, 3])
def test_product_counts(p):
    rng = random.Random(70 + p)
    for _ in range(10):
        A = _random_set(rng, p, ("x", "y"))
        B = _random_set(rng, p, ("z",))
        F = build_field(p, 2)
        assert len(points_over(product(A, B), F)) == len(points_over(A, F)) * len(points_over(B, F))


def test_points_match_oracle_over_extension():
    rng = random.Random(5)
    variables = ("x", "y")
    for _ in range(20):
        f = random_qf(rng, FieldTag(2), variables, depth=2)
        C = to_cells(f, variables)
        assert len(points_over(C, build_field(2, 3))) == brute_count(f, variables, 2, 3)


def test_cell_printing():
    (c,) = S("x = 0 & y != 0").cells
    assert str(c) == "{x = 0 ; y != 0}"


def test_cell_monic_in_char_p():
    (c,) = S("2*x + 4 = 0", 5).cells
    assert c.equations == (parse_polynomial("x + 2", 5),)
