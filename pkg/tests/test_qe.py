import itertools
import random

import pytest

from k0calc.errors import ArityError, NotASentence, VarError
from k0calc.formula import Exists, all_names, ForAll, Not, parse, parse_polynomial, to_cells
from k0calc.gf import build_field
from k0calc.poly import FieldTag
from k0calc.qe import (EliminationTrace, decide, definably_equivalent, eliminate_all, eliminate_exists,
                       quantifier_free)

from oracles import SmallField, exists_over_closure, holds, random_qf


def same_points(f, g, variables, p, ks=(1, 2)):
    for k in ks:
        F = SmallField(p, k)
        for pt in itertools.product(F.elements(), repeat=len(variables)):
            env = dict(zip(variables, pt))
            if holds(f, F, env) != holds(g, F, env):
                return False
    return True


@pytest.mark.parametrize("p", [2, 3, 5])
def test_linear_equation(p):
    C = to_cells(parse("a*x + b = 0", p), ("a", "b", "x"))
    R = eliminate_exists(C, "x")
    assert R.ambient == ("a", "b")
    expected = parse("a != 0 | a = 0 & b = 0", p)
    assert same_points(R.to_formula(), expected, ("a", "b"), p)


def test_square_root_everywhere():
    C = to_cells(parse("x^2 = t"), ("t", "x"))
    (c,) = eliminate_exists(C, "x").cells
    assert not c.equations and c.inequation.is_constant()


def test_inverse_exists():
    C = to_cells(parse("x*t = 1", 7), ("t", "x"))
    (c,) = eliminate_exists(C, "x").cells
    assert not c.equations and c.inequation == parse_polynomial("t", 7)


def test_var_not_in_ambient():
    with pytest.raises(VarError):
        eliminate_exists(to_cells(parse("t = 1")), "x")


def test_eliminate_all_examples():
    assert decide(parse("A a. E x. x^2 = a"))
    assert decide(parse("E x. A y. x*y = y"))
    assert decide(parse("E x. A y. x*y = y", 3))
    qf = parse("x = 0 | y != 1", 5)
    assert same_points(eliminate_all(qf), qf, ("x", "y"), 5)


def test_decide_examples():
    assert decide(parse("A a. E x. x^2 = a", 2))
    assert not decide(parse("E x. x != 0 & x = 0"))
    assert not decide(parse("E x. x^2 = 2 & x^3 = 2", 5))
    # cross-check by root search in F_5 and F_25
    s = parse("E x. x^2 = 2 & x^3 = 2", 5)
    assert not holds(s, SmallField(5, 1), {}) and not holds(s, SmallField(5, 2), {})


def test_decide_needs_sentence():
    with pytest.raises(NotASentence):
        decide(parse("E x. x = y"))


def test_definably_equivalent_examples():
    assert definably_equivalent(parse("x = 0"), parse("x^2 = 0"))
    assert not definably_equivalent(parse("x != 0"), parse("x = 0"))
    assert definably_equivalent(parse("E y. y^2 = x"), parse("x = x"), ("x",))
    with pytest.raises(ArityError):
        definably_equivalent(parse("x = 0"), parse("y = 0"))


@pytest.mark.parametrize("p", [2, 3])
def test_idempotent_on_quantifier_free(p):
    rng = random.Random(20 + p)
    variables = ("x", "y")
    for _ in range(30):
        f = random_qf(rng, FieldTag(p), variables, depth=2)
        assert same_points(eliminate_all(f), f, variables, p)


def test_double_negation_and_duality():
    sentences = ["A a. E x. x^2 = a", "E x. x^2 + 1 = 0 & x^4 = 1", "A x. x^2 = 1", "E x. A y. x*y = y",
                 "A x. E y. x*y = 1", "E x. x^3 = x & x != 0 & x != 1 & x + 1 != 0"]
    for p in (2, 3, 5):
        for text in sentences:
            s = parse(text, p)
            assert decide(Not(Not(s))) == decide(s)
            if isinstance(s, ForAll):
                assert decide(s) == (not decide(Exists(s.var, Not(s.body))))


def test_sentence_truth_values():
    assert decide(parse("E x. x^3 = x & x != 0 & x != 1 & x + 1 != 0", 5)) is False
    assert decide(parse("E x. x^3 = x & x != 0 & x != 1 & x + 1 != 0", 2)) is False
    assert decide(parse("A x. E y. x*y = 1")) is False
    assert decide(parse("E x. x^2 + 1 = 0 & x^4 = 1", 3)) is True


@pytest.mark.parametrize("p", [2, 3, 5])
def test_single_exists_against_oracle(p):
    rng = random.Random(300 + p)
    fld = FieldTag(p)
    F1 = SmallField(p, 1)
    done = 0
    while done < 60:
        params = ["a", "b"][:rng.randint(1, 2)]
        body = random_qf(rng, fld, params + ["x"], depth=2, atoms_max=3, max_deg=3, x="x")
        if "x" not in all_names(body):
            continue
        qf = eliminate_all(Exists("x", body))
        for pt in itertools.product(range(p), repeat=len(params)):
            env = dict(zip(params, pt))
            assert holds(qf, F1, env) == exists_over_closure(body, "x", p, env)
        done += 1


def test_trace_records_splits():
    tr = EliminationTrace()
    quantifier_free(parse("E x. a*x^2 + b*x + c = 0"), tr)
    data = tr.to_json()
    assert data
    assert EliminationTrace.from_json(data).to_text() == tr.to_text()
    assert "x" in tr.to_text()


def test_projection_over_extension_points():
    # E x. x^2 = a & a^2 + 1 = 0 over F_3: the a-points live in F_9
    f = parse("E x. x^2 = a & a^2 + 1 = 0", 3)
    qf = eliminate_all(f)
    F9 = SmallField(3, 2)
    roots = [v for v in F9.elements() if holds(parse("a^2 + 1 = 0", 3), F9, {"a": v})]
    assert len(roots) == 2
    assert all(holds(qf, F9, {"a": r}) for r in roots)
    assert build_field(3, 2).q == 9
