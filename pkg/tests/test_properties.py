from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings, strategies as st

from grothlin.arith import LinTerm, lin_eval, lin_normalize
from grothlin.euler import GClass, chi_b, chi_g, g_class, psi_b, psi_g
from grothlin.formula import And, Atom, Not, Or, Rel, holds, negate_nnf, parse, to_dnf, to_text
from grothlin.qe import product

NAMES = ["x", "y", "z"]
N = len(NAMES)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
small = st.integers(min_value=-6, max_value=6)


@st.composite
def terms(draw, nonconstant: bool = False):
    coeffs = draw(st.lists(rationals, min_size=N, max_size=N))
    if nonconstant and all(c == 0 for c in coeffs):
        coeffs[draw(st.integers(0, N - 1))] = Fraction(1)
    return LinTerm.make(dict(enumerate(coeffs)), draw(rationals), N)


points = st.tuples(rationals, rationals, rationals)

atoms = st.builds(Atom, terms(), st.sampled_from([Rel.LT, Rel.EQ]))


def formulas():
    return st.recursive(
        atoms,
        lambda kids: st.one_of(
            st.builds(lambda xs: And(tuple(xs)), st.lists(kids, min_size=2, max_size=3)),
            st.builds(lambda xs: Or(tuple(xs)), st.lists(kids, min_size=2, max_size=3)),
            st.builds(Not, kids),
        ),
        max_leaves=6,
    )


# -- arithmetic ----------------------------------------------------------------

@given(terms(nonconstant=True))
def test_normalize_idempotent(t):
    n, _ = lin_normalize(t)
    assert lin_normalize(n) == (n, False)


@given(terms(nonconstant=True), st.fractions(min_value=Fraction(1, 10), max_value=10))
def test_normalize_scale_invariant(t, k):
    assert lin_normalize(t.scale(k))[0] == lin_normalize(t)[0]
    assert lin_normalize(t.scale(-k))[0] == lin_normalize(t)[0]


@given(terms(), terms(), points)
def test_eval_additive(a, b, p):
    assert lin_eval(a + b, p) == lin_eval(a, p) + lin_eval(b, p)


@given(terms(), rationals, points)
def test_eval_homogeneous(a, k, p):
    assert lin_eval(a.scale(k), p) == k * lin_eval(a, p)


# -- formulas ----------------------------------------------------------------

@settings(max_examples=60)
@given(formulas(), points)
def test_print_parse_roundtrip(f, p):
    g = parse(to_text(f, NAMES), NAMES)
    assert holds(g, p) == holds(f, p)
    assert parse(to_text(g, NAMES), NAMES) == g


@settings(max_examples=60, deadline=None)
@given(formulas(), st.lists(points, min_size=5, max_size=5))
def test_to_dnf_preserves_satisfaction(f, pts):
    s = to_dnf(f, N)
    for p in pts:
        assert s.contains(p) == holds(f, p)


@settings(max_examples=60)
@given(formulas(), points)
def test_negate_nnf(f, p):
    n = negate_nnf(f)
    assert holds(n, p) == (not holds(f, p))
    assert holds(negate_nnf(n), p) == holds(f, p)


# -- the ring Z[T]/(T^2 + T) --------------------------------------------------

classes = st.builds(GClass, small, small)


@given(classes, classes, classes)
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a + (-a) == GClass(0, 0)
    assert a * GClass(1, 0) == a


@given(classes, classes)
def test_psi_are_ring_maps(a, b):
    for psi in (psi_g, psi_b):
        assert psi(a + b) == psi(a) + psi(b)
        assert psi(a * b) == psi(a) * psi(b)


@given(classes)
def test_class_recovered_from_characteristics(a):
    g, b = psi_g(a), psi_b(a)
    assert GClass(b, b - g) == a


# -- geometry ----------------------------------------------------------------

intervals = st.tuples(small, small).filter(lambda ab: ab[0] < ab[1])


@settings(max_examples=25, deadline=None)
@given(intervals, st.booleans(), st.booleans(), intervals)
def test_product_class_is_product(ab, lo_closed, hi_closed, cd):
    a, b = ab
    lo = "<=" if lo_closed else "<"
    hi = "<=" if hi_closed else "<"
    s = to_dnf(parse(f"{a} {lo} x & x {hi} {b}", ["x"]), 1)
    t = to_dnf(parse(f"{cd[0]} < y | y = {cd[1]}", ["y"]), 1)
    p = product(s, t)
    assert g_class(p) == g_class(s) * g_class(t)
    assert chi_g(p) == chi_g(s) * chi_g(t) and chi_b(p) == chi_b(s) * chi_b(t)
