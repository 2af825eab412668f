from __future__ import annotations

from fractions import Fraction

import pytest

from grothlin.arith import LinTerm
from grothlin.formula import (
    And, Atom, Exists, FalseF, FormulaSyntaxError, Not, Or, QuantifierError, Rel, TRUE,
    UnknownIdentifierError, holds, negate_nnf, parse, parse_term, to_dnf, to_text,
)

from conftest import dnf

X = LinTerm.var(0)
Y = LinTerm.var(1)


def test_parse_interval():
    f = parse("0 < x & x < 1", ["x"])
    assert f == And((Atom(-X, Rel.LT), Atom(X.shift(-1), Rel.LT)))


def test_parse_binder_index():
    f = parse("EX y. (x < y & y < 1)", ["x"])
    assert f == Exists(1, And((Atom(X - Y, Rel.LT), Atom(Y.shift(-1), Rel.LT))))


def test_parse_forall_desugars():
    f = parse("ALL y. y = y", ["x"])
    assert isinstance(f, Not) and isinstance(f.arg, Exists)
    assert f.arg.var == 1 and isinstance(f.arg.body, Not)
    assert f.arg.body.arg == Atom(LinTerm.constant(0), Rel.EQ)


def test_parse_relations_desugar():
    le = parse("x <= 1", ["x"])
    assert isinstance(le, Or) and {a.rel for a in le.args} == {Rel.LT, Rel.EQ}
    ne = parse("x != 1", ["x"])
    assert isinstance(ne, Or) and all(a.rel is Rel.LT for a in ne.args)
    assert parse("x > 1", ["x"]) == parse("1 < x", ["x"])
    assert parse("x >= 1", ["x"]) == parse("1 <= x", ["x"])


def test_parse_rational_scalars():
    f = parse("1/2*x + 3/4 < y", ["x", "y"])
    # 1/2 x + 3/4 - y < 0, scaled by 4 to integers
    assert f == Atom(LinTerm.make({0: 2, 1: -4}, 3), Rel.LT)
    assert f.holds((Fraction(0), Fraction(1))) and not f.holds((Fraction(0), Fraction(0)))


def test_precedence():
    f = parse("x < 0 | 0 < x & x < 1", ["x"])
    assert isinstance(f, Or) and isinstance(f.args[1], And)
    g = parse("!x < 0 & 0 < x", ["x"])
    assert isinstance(g, And) and isinstance(g.args[0], Not)


def test_syntax_errors_carry_position():
    with pytest.raises(FormulaSyntaxError) as e:
        parse("0 < < x", ["x"])
    assert e.value.pos == 4
    with pytest.raises(FormulaSyntaxError):
        parse("x < 1/0", ["x"])
    with pytest.raises(FormulaSyntaxError):
        parse("(x < 1", ["x"])
    with pytest.raises(FormulaSyntaxError):
        parse("x # 1", ["x"])


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as e:
        parse("x < z", ["x"])
    assert e.value.name == "z"


def test_bound_name_scopes():
    with pytest.raises(UnknownIdentifierError):
        parse("(EX y. y < x) & y < 0", ["x"])


def test_true_false_literals():
    assert parse("true", []) is TRUE
    assert isinstance(parse("false", []), FalseF)


def test_negate_nnf_examples():
    lt0 = Atom(X, Rel.LT)
    assert negate_nnf(lt0) == Or((Atom(-X, Rel.LT), Atom(X, Rel.EQ)))
    eq0 = Atom(X, Rel.EQ)
    assert negate_nnf(eq0) == Or((Atom(X, Rel.LT), Atom(-X, Rel.LT)))
    a, b = Atom(X, Rel.LT), Atom(Y, Rel.EQ)
    assert negate_nnf(And((a, b))) == Or((negate_nnf(a), negate_nnf(b)))


def test_negate_nnf_refuses_quantifiers():
    with pytest.raises(QuantifierError):
        negate_nnf(parse("EX y. y < x", ["x"]))


def test_to_dnf_examples():
    assert to_dnf(parse("(x < 0 | 0 < x) & x = 0", ["x"]), 1).disjuncts == ()
    s = to_dnf(parse("x < 1", ["x"]), 1)
    assert s.disjuncts == ((Atom(X.shift(-1), Rel.LT),),)
    s = to_dnf(parse("(0 < x & x < 1) | (0 < x & x < 1)", ["x"]), 1)
    assert len(s.disjuncts) == 1


def test_to_dnf_refuses_quantifiers():
    with pytest.raises(QuantifierError):
        to_dnf(parse("EX y. y < x", ["x"]))


@pytest.mark.parametrize("text", [
    "x < 1",
    "0 < x",
    "0 < x & x < 1",
    "x = 0 | 0 < y",
    "EX z. (x < z & z < y)",
    "!(x < 1 & y = 2)",
    "1/2*x - 3 < y",
    "true",
])
def test_print_parse_roundtrip(text):
    names = ["x", "y"]
    f = parse(text, names)
    assert parse(to_text(f, names), names) == f


def test_parse_term():
    assert parse_term("x + 1/2*y - 3", ["x", "y"]) == LinTerm.make({0: 1, 1: Fraction(1, 2)}, -3)
    with pytest.raises(FormulaSyntaxError):
        parse_term("x <", ["x"])


def test_defset_contains_and_text():
    s = dnf("0 <= x & x < 1", "x")
    assert s.contains((Fraction(0),)) and not s.contains((Fraction(1),))
    assert holds(parse(s.text(["x"]), ["x"]), (Fraction(1, 2),))
