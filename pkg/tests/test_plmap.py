from __future__ import annotations

import json
from fractions import Fraction

import pytest

from grothlin.arith import DimensionError, LinTerm
from grothlin.formula import DefSet
from grothlin.plmap import (
    DomainError, PLMap, Piece, affine, apply, band_to_cylinder, certify_bijection, from_graph,
    graph, halve, identity, image, interval_injection, is_injective_on, make_map, permutation,
    reflect, shear, swap, translate,
)
from grothlin.qe import entails, equivalent

from conftest import dnf

X = LinTerm.var(0, 1)


def _abs_map() -> PLMap:
    return make_map([
        Piece(dnf("0 <= x", "x"), (X,)),
        Piece(dnf("x < 0", "x"), (-X,)),
    ], 1, 1)


def test_apply_examples():
    f = _abs_map()
    assert apply(f, [Fraction(-3, 2)]) == (Fraction(3, 2),)
    assert apply(f, [2]) == (2,)
    assert apply(shear(), [1, 2]) == (1, 3)


def test_apply_outside_domain():
    f = affine([X], 1, where=dnf("0 < x", "x"))
    with pytest.raises(DomainError):
        apply(f, [0])


def test_overlapping_pieces_rejected():
    with pytest.raises(ValueError, match="overlap"):
        make_map([Piece(dnf("0 <= x", "x"), (X,)), Piece(dnf("x <= 0", "x"), (-X,))], 1, 1)


def test_dimension_checks():
    with pytest.raises(DimensionError):
        PLMap(1, 2, (Piece(DefSet.universe(1), (X,)),))
    with pytest.raises(DimensionError):
        PLMap(1, 1, (Piece(DefSet.universe(2), (X,)),))


def test_graph_examples():
    assert equivalent(graph(_abs_map()), dnf("(0 <= x & y = x) | (x < 0 & y = -x)", "x, y"))
    assert equivalent(graph(halve()), dnf("2*y = x", "x, y"))


def test_image_examples():
    assert equivalent(image(halve(), dnf("0 < x & x < 1", "x")), dnf("0 < x & x < 1/2", "x"))
    assert equivalent(image(reflect(), dnf("0 < x", "x")), dnf("x < 0", "x"))
    assert equivalent(image(_abs_map(), dnf("x = x", "x")), dnf("0 <= x", "x"))
    sq = dnf("0 < x & x < 1 & 0 < y & y < 1", "x, y")
    assert equivalent(image(shear(), dnf("0 < x & 0 < y", "x, y")), dnf("0 < x & x < y", "x, y"))
    assert equivalent(image(swap(), sq), sq)


def test_image_requires_domain():
    f = affine([X], 1, where=dnf("0 < x", "x"))
    with pytest.raises(DomainError):
        image(f, dnf("x = x", "x"))


def test_injectivity():
    line = dnf("x = x", "x")
    assert not is_injective_on(_abs_map(), line)
    assert is_injective_on(_abs_map(), dnf("0 < x", "x"))
    assert is_injective_on(halve(), line)
    collapse = affine([LinTerm.var(0, 2)], 2)
    assert not is_injective_on(collapse, dnf("0 < x & x < 1 & 0 < y & y < 1", "x, y"))
    assert is_injective_on(collapse, dnf("0 < x & x < 1 & y = 0", "x, y"))


def test_certify_bijection():
    assert certify_bijection(translate([1]), dnf("0 < x & x < 1", "x"), dnf("1 < x & x < 2", "x"))
    assert not certify_bijection(translate([1]), dnf("0 < x & x < 1", "x"), dnf("1 < x & x <= 2", "x"))
    assert not certify_bijection(_abs_map(), dnf("x = x", "x"), dnf("0 <= x", "x"))


def test_band_to_cylinder():
    # (x, t) -> (x, x + t) sends (0,1) x (0,+inf) onto {0 < x < 1, x < y}
    f = band_to_cylinder(LinTerm.var(0, 1), 1, "lower")
    src = dnf("0 < x & x < 1 & 0 < y", "x, y")
    assert certify_bijection(f, src, dnf("0 < x & x < 1 & x < y", "x, y"))
    g = band_to_cylinder(LinTerm.var(0, 1), 1, "upper")
    assert certify_bijection(g, src, dnf("0 < x & x < 1 & y < x", "x, y"))
    with pytest.raises(ValueError):
        band_to_cylinder(X, 1, "middle")


def test_interval_injection_lands_in_band():
    lo, hi = LinTerm.constant(0, 1), X.shift(1)
    f = interval_injection(lo, hi)
    src = dnf("0 < x & x < 1", "x")
    band = dnf("0 < x & x < 1 & 0 < y & y < x + 1", "x, y")
    img = image(f, src)
    assert is_injective_on(f, src)
    assert equivalent(img, dnf("0 < x & x < 1 & 2*y = x + 1", "x, y"))
    assert entails(img, band)
    ray = interval_injection(None, X, a=Fraction(1, 3))
    assert apply(ray, [0]) == (0, Fraction(-1, 3))
    with pytest.raises(ValueError):
        interval_injection(None, None, a=0)


def test_permutation():
    f = permutation([2, 0, 1])
    assert apply(f, [1, 2, 3]) == (3, 1, 2)
    with pytest.raises(ValueError):
        permutation([0, 0, 1])


def test_from_graph_recovers_map():
    g = dnf("(0 <= x & y = x) | (x < 0 & y = -x)", "x, y")
    f = from_graph(g, 1, 1)
    for v in [Fraction(-5, 2), 0, Fraction(1, 3), 7]:
        assert apply(f, [v]) == (abs(Fraction(v)),)
    assert equivalent(graph(f), g)


def test_from_graph_rejects_relations():
    with pytest.raises(ValueError, match="single-valued"):
        from_graph(dnf("0 < y & y < x", "x, y"), 1, 1)
    with pytest.raises(ValueError, match="single-valued"):
        from_graph(dnf("y = x | y = 2*x", "x, y"), 1, 1)


def test_graph_consistent_with_apply():
    f = make_map([
        Piece(dnf("x < 0", "x, y"), (LinTerm.var(1, 2), LinTerm.var(0, 2).shift(1))),
        Piece(dnf("0 <= x", "x, y"), (LinTerm.var(0, 2) + LinTerm.var(1, 2), LinTerm.constant(0, 2))),
    ], 2, 2)
    g = graph(f)
    for p in [(-1, 3), (0, 0), (Fraction(1, 2), -2), (-7, Fraction(2, 3))]:
        p = tuple(Fraction(v) for v in p)
        assert g.contains(p + apply(f, p))
        assert not g.contains(p + tuple(v + 1 for v in apply(f, p)))


def test_json_roundtrip():
    f = _abs_map()
    doc = f.to_json(["x"])
    assert doc == {"src": 1, "dst": 1, "vars": ["x"],
                   "pieces": [{"where": "x = 0 | 0 < x", "rows": ["x"]},
                              {"where": "x < 0", "rows": ["-x"]}]}
    again = PLMap.from_json(json.loads(json.dumps(doc)))
    assert again == f
    assert PLMap.from_json(identity(2).to_json()) == identity(2)
