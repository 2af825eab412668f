from __future__ import annotations

from fractions import Fraction

import pytest

from grothlin.arith import (
    DimensionError, LinTerm, as_rational, lin_eval, lin_normalize, pick_between, rank,
)


def test_eval_examples():
    assert lin_eval(LinTerm.make({0: 1}, Fraction(-1, 2), 1), [Fraction(1, 2)]) == 0
    assert lin_eval(LinTerm.make({0: 2, 1: 3}, 1, 2), [1, 1]) == 6
    assert lin_eval(LinTerm.constant(0, 3), [5, 7, 9]) == 0


def test_eval_checks_dimension():
    with pytest.raises(DimensionError):
        lin_eval(LinTerm.var(0, 2), [1])
    with pytest.raises(DimensionError):
        lin_eval(LinTerm.var(0, 2), [1, 2, 3])


def test_normalize_examples():
    t, flipped = lin_normalize(LinTerm.make({0: -2}, 4, 1))
    assert t == LinTerm.make({0: 1}, -2) and flipped
    t, flipped = lin_normalize(LinTerm.var(0, 1))
    assert t == LinTerm.var(0) and not flipped
    t, flipped = lin_normalize(LinTerm.make({1: Fraction(2, 3)}, -2, 2))
    assert t == LinTerm.make({1: 1}, -3) and not flipped


def test_normalize_rejects_constants():
    with pytest.raises(ValueError):
        lin_normalize(LinTerm.constant(3))


def test_zero_coefficients_are_not_stored():
    t = LinTerm.make({0: 1, 1: 0}) + LinTerm.make({0: -1})
    assert t.coeffs == () and t.is_constant


def test_dim_is_metadata():
    a, b = LinTerm.var(0, 1), LinTerm.var(0, 4)
    assert a == b and hash(a) == hash(b)
    assert b.dim == 4
    assert LinTerm.make({3: 1}).dim == 4


def test_substitute_and_solve():
    t = LinTerm.make({0: 2, 1: -1}, 3)          # 2x - y + 3
    e = t.solve_for(1)                          # y = 2x + 3
    assert e == LinTerm.make({0: 2}, 3)
    assert t.substitute(1, e).is_constant and t.substitute(1, e).const == 0


def test_reindex_and_fix():
    t = LinTerm.make({0: 1, 2: 5}, 1, 3)
    assert t.reindex({0: 1, 2: 0}, 2) == LinTerm.make({1: 1, 0: 5}, 1)
    assert t.fix({2: Fraction(1, 5)}) == LinTerm.make({0: 1}, 2)


def test_render():
    assert LinTerm.make({0: 1, 1: Fraction(-1, 2)}, -3).render(["x", "y"]) == "x - 1/2*y - 3"
    assert LinTerm.constant(0).render() == "0"
    assert LinTerm.make({0: -1}).render(["x"]) == "-x"


def test_floats_refused():
    with pytest.raises(TypeError):
        as_rational(0.5)


@pytest.mark.parametrize("lo,hi,expected", [
    (None, None, 0),
    (Fraction(0), Fraction(1), Fraction(1, 2)),
    (Fraction(0), Fraction(5), 2),
    (None, Fraction(0), -1),
    (Fraction(3, 2), None, 2),
])
def test_pick_between(lo, hi, expected):
    v = pick_between(lo, hi)
    assert v == expected
    assert (lo is None or lo < v) and (hi is None or v < hi)


def test_rank():
    assert rank([[1, 0], [0, 1]]) == 2
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([]) == 0
