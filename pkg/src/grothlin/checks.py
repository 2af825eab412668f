"""The invariant suites behind ``grothlin selftest`` and the acceptance tests.

Each suite returns a :class:`SuiteResult`; a suite never raises on a
mathematical failure, it records it. Randomness comes from a seeded
``random.Random`` so runs are reproducible.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .arith import LinTerm
from .cell import Decomposition, classify, CellKind, decompose, is_bounded, refine
from .corpus import CorpusEntry, load_corpus
from .euler import (
    GClass, T, bd_check, chi_b, chi_g, class_add, class_mul, g_class, psi_b, psi_g,
)
from .formula import DefSet, parse, to_dnf
from .oracle import CapExceeded, oracle_chi
from .plmap import (
    PLMap, band_to_cylinder, certify_bijection, halve, identity, image,
    interval_injection, permutation, reflect, scale, shear, swap, translate,
)
from .qe import fix_coordinates, intersection, product, remap, union
from .report import make_report


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, cond: bool, message: str) -> bool:
        self.checked += 1
        if not cond:
            self.failures.append(message)
        return cond

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "checked": self.checked,
                "failures": list(self.failures), "notes": list(self.notes),
                "seconds": round(self.seconds, 3)}


def dnf(text: str, names: Sequence[str]) -> DefSet:
    return to_dnf(parse(text, names), len(names))


def random_rational(rng: random.Random, span: int = 20, den: int = 12) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))


def random_functional(rng: random.Random, n: int) -> LinTerm:
    while True:
        coeffs = {i: rng.randint(-2, 2) for i in range(n)}
        if any(coeffs.values()):
            return LinTerm.make(coeffs, Fraction(rng.randint(-6, 6), 2), n)


def random_class(rng: random.Random, span: int = 6) -> GClass:
    return GClass(rng.randint(-span, span), rng.randint(-span, span))


# ---------------------------------------------------------------------------
# suites

def suite_claim1(rng: random.Random, verify: bool | None = None, trials: int = 10) -> SuiteResult:
    """Every open interval (a, b) has class -1."""
    r = SuiteResult("claim1")
    for _ in range(trials):
        a = b = random_rational(rng)
        while b == a:
            b = random_rational(rng)
        a, b = min(a, b), max(a, b)
        text = f"{a} < x & x < {b}"
        rep, _ = make_report(text, ["x"], verify)
        r.check(rep.gclass == "-1", f"({a}, {b}) has class {rep.gclass}")
    return r


def suite_claim2(rng: random.Random, verify: bool | None = None) -> SuiteResult:
    """The line has class 2*T + 1."""
    r = SuiteResult("claim2")
    for text in ("x = x", "true", "x < 0 | x = 0 | 0 < x"):
        rep, _ = make_report(text, ["x"], verify)
        r.check(rep.gclass == "2*T + 1", f"{text!r} has class {rep.gclass}")
    return r


def suite_claim3(rng: random.Random, verify: bool | None = None) -> SuiteResult:
    """T*T = -T, algebraically and on the open quadrant."""
    r = SuiteResult("claim3")
    r.check(class_mul(T, T) == -T, f"T*T = {class_mul(T, T)}")
    r.check(class_add(class_mul(T, T), T) == GClass(0, 0), "T*T + T is not 0")
    ray = g_class(dnf("0 < x", ["x"]), verify)
    quad = g_class(dnf("0 < x & 0 < y", ["x", "y"]), verify)
    r.check(ray == T, f"open ray has class {ray}")
    r.check(quad == class_mul(ray, ray), f"quadrant {quad} != ray*ray {class_mul(ray, ray)}")
    r.check(quad == -T, f"quadrant has class {quad}")
    return r


def suite_corpus(rng: random.Random, verify: bool | None = None,
                 corpus: Sequence[CorpusEntry] | None = None) -> SuiteResult:
    """Recorded (chi_g, chi_b, class) of every corpus file."""
    r = SuiteResult("corpus")
    for e in corpus if corpus is not None else load_corpus():
        d = decompose(e.defset(), verify=verify)
        g, b, c = chi_g(d), chi_b(d), g_class(d)
        r.check((g, b, c) == (e.chi_g, e.chi_b, e.gclass),
                f"{e.name}: got ({g}, {b}, {c}), recorded ({e.chi_g}, {e.chi_b}, {e.gclass})")
        r.check(psi_g(c) == g and psi_b(c) == b, f"{e.name}: psi maps disagree with chi")
    return r


def suite_ring(rng: random.Random, verify: bool | None = None,
               corpus: Sequence[CorpusEntry] | None = None, triples: int = 100) -> SuiteResult:
    """Corpus classes and random classes obey the ring laws of Z[T]/(T^2 + T)."""
    r = SuiteResult("ring")
    classes = [e.gclass for e in (corpus if corpus is not None else load_corpus())]
    for a, b in combinations(classes, 2):
        for c in (class_add(a, b), class_mul(a, b)):
            r.check(isinstance(c.m, int) and isinstance(c.n, int), f"{c!r} left Z + Z*T")
        r.check(psi_g(class_mul(a, b)) == psi_g(a) * psi_g(b), f"psi_g not multiplicative on {a}, {b}")
        r.check(psi_b(class_mul(a, b)) == psi_b(a) * psi_b(b), f"psi_b not multiplicative on {a}, {b}")
    pool = classes + [random_class(rng) for _ in range(20)]
    one = GClass(1, 0)
    for _ in range(triples):
        a, b, c = (rng.choice(pool) for _ in range(3))
        r.check(class_mul(class_mul(a, b), c) == class_mul(a, class_mul(b, c)),
                f"mul not associative on {a}, {b}, {c}")
        r.check(class_add(class_add(a, b), c) == class_add(a, class_add(b, c)),
                f"add not associative on {a}, {b}, {c}")
        r.check(class_mul(a, class_add(b, c)) == class_add(class_mul(a, b), class_mul(a, c)),
                f"not distributive on {a}, {b}, {c}")
        r.check(class_mul(a, b) == class_mul(b, a), f"mul not commutative on {a}, {b}")
        r.check(class_mul(one, a) == a, f"1 is not a unit for {a}")
        r.check(psi_g(class_add(a, b)) == psi_g(a) + psi_g(b), f"psi_g not additive on {a}, {b}")
        r.check(psi_b(class_add(a, b)) == psi_b(a) + psi_b(b), f"psi_b not additive on {a}, {b}")
    return r


def suite_refine(rng: random.Random, verify: bool | None = None,
                 corpus: Sequence[CorpusEntry] | None = None, rounds: int = 5) -> SuiteResult:
    """chi_b and chi_g do not change under randomized refinements."""
    r = SuiteResult("refine")
    for e in corpus if corpus is not None else load_corpus():
        d = decompose(e.defset(), verify=verify)
        base = (chi_g(d), chi_b(d))
        for k in range(rounds):
            extra = [random_functional(rng, e.dim)]
            fine = refine(d, extra, verify=verify)
            got = (chi_g(fine), chi_b(fine))
            r.check(got == base, f"{e.name}: refinement {k} by {extra[0]} gives {got}, default {base}")
            r.check(len(fine) >= len(d), f"{e.name}: refinement {k} has fewer cells")
    return r


def _all_cells(d: Decomposition):
    yield from d.cells
    for level in d.levels:
        yield from level


def suite_goodbounded(rng: random.Random, verify: bool | None = None,
                      corpus: Sequence[CorpusEntry] | None = None, rounds: int = 2) -> SuiteResult:
    """A cell is good exactly when it is bounded."""
    r = SuiteResult("goodbounded")
    for e in corpus if corpus is not None else load_corpus():
        d = decompose(e.defset(), verify=verify)
        decs = [d] + [refine(d, [random_functional(rng, e.dim)], verify=verify) for _ in range(rounds)]
        for dd in decs:
            for c in _all_cells(dd):
                r.check((classify(c) is CellKind.GOOD) == is_bounded(c),
                        f"{e.name}: cell {c.render()} is {classify(c).value} but bounded={is_bounded(c)}")
    return r


def suite_oracle(rng: random.Random, verify: bool | None = None,
                 corpus: Sequence[CorpusEntry] | None = None) -> SuiteResult:
    """The arrangement oracle agrees with the cell decomposition."""
    r = SuiteResult("oracle")
    for e in corpus if corpus is not None else load_corpus():
        s = e.defset()
        try:
            o = oracle_chi(s)
        except CapExceeded as exc:
            r.notes.append(f"{e.name}: skipped ({exc})")
            continue
        d = decompose(s, verify=verify)
        r.check(o == (chi_g(d), chi_b(d)), f"{e.name}: oracle {o}, cells ({chi_g(d)}, {chi_b(d)})")
    return r


def bijection_fixtures() -> list[tuple[str, PLMap, DefSet, DefSet]]:
    """(name, map, source, target) triples with the map a bijection source -> target."""
    x, xy, xyz = ["x"], ["x", "y"], ["x", "y", "z"]
    one = LinTerm.var(0, 1)
    return [
        ("halve", halve(), dnf("0 < x & x < 1", x), dnf("0 < x & x < 1/2", x)),
        ("reflect", reflect(), dnf("0 < x", x), dnf("x < 0", x)),
        ("translate", translate([Fraction(3, 2)]), dnf("0 <= x & x <= 1", x),
         dnf("3/2 <= x & x <= 5/2", x)),
        ("shear", shear(), dnf("0 < x & 0 < y", xy), dnf("0 < x & x < y", xy)),
        ("swap", swap(), dnf("0 < x & x < 1", xy), dnf("0 < y & y < 1", xy)),
        ("swap_triangle", swap(), dnf("0 < y & y < x & x < 1", xy), dnf("0 < x & x < y & y < 1", xy)),
        ("band_lower", band_to_cylinder(LinTerm.var(0, 1), 1, "lower"),
         dnf("0 < x & x < 1 & 0 < y", xy), dnf("0 < x & x < 1 & x < y", xy)),
        ("band_upper", band_to_cylinder(LinTerm.make({0: -1}, 1, 1), 1, "upper"),
         dnf("0 < x & x < 1 & 0 < y", xy), dnf("0 < x & x < 1 & y < 1 - x", xy)),
        ("interval_injection_ray", interval_injection(one, None),
         dnf("0 < x", x), dnf("0 < x & y = x + 1", xy)),
        ("interval_injection_bounded", interval_injection(LinTerm.constant(0, 1), LinTerm.constant(1, 1)),
         dnf("0 < x & x < 1", x), dnf("0 < x & x < 1 & 2*y = 1", xy)),
        ("scale_triangle", scale(3, 2), dnf("0 <= y & y <= x & x <= 1", xy),
         dnf("0 <= y & y <= x & x <= 3", xy)),
        ("cycle_simplex", permutation([1, 2, 0]), dnf("0 < x & x < y & y < z & z < 1", xyz),
         dnf("0 < z & z < x & x < y & y < 1", xyz)),
        ("identity_frame", identity(2),
         dnf("0 <= x & x <= 3 & 0 <= y & y <= 3 & !(1 < x & x < 2 & 1 < y & y < 2)", xy),
         dnf("0 <= x & x <= 3 & 0 <= y & y <= 3 & !(1 < x & x < 2 & 1 < y & y < 2)", xy)),
    ]


def suite_bijection(rng: random.Random, verify: bool | None = None) -> SuiteResult:
    """Certified bijections preserve chi_g and chi_b."""
    r = SuiteResult("bijection")
    for name, f, s, t in bijection_fixtures():
        if not r.check(certify_bijection(f, s, t), f"{name}: not certified as a bijection"):
            continue
        ds, dt = decompose(s, verify=verify), decompose(t, verify=verify)
        r.check(chi_g(ds) == chi_g(dt), f"{name}: chi_g {chi_g(ds)} -> {chi_g(dt)}")
        r.check(chi_b(ds) == chi_b(dt), f"{name}: chi_b {chi_b(ds)} -> {chi_b(dt)}")
    return r


def suite_boundedcondition(rng: random.Random, verify: bool | None = None) -> SuiteResult:
    """Bounded sources of certified bijections have bounded targets."""
    r = SuiteResult("boundedcondition")
    for name, f, s, t in bijection_fixtures():
        if not certify_bijection(f, s, t):
            r.check(False, f"{name}: not certified as a bijection")
            continue
        src_bounded = all(is_bounded(c) for c in decompose(s, verify=verify))
        if src_bounded:
            r.check(all(is_bounded(c) for c in decompose(image(f, s), verify=verify)),
                    f"{name}: bounded source with unbounded image")
    return r


def suite_unionproduct(rng: random.Random, verify: bool | None = None,
                       corpus: Sequence[CorpusEntry] | None = None, pairs: int = 12) -> SuiteResult:
    """Inclusion-exclusion for unions and multiplicativity for products."""
    r = SuiteResult("unionproduct")
    entries = list(corpus if corpus is not None else load_corpus())
    by_dim: dict[int, list[CorpusEntry]] = {}
    for e in entries:
        by_dim.setdefault(e.dim, []).append(e)
    same = [(a, b) for group in by_dim.values() for a, b in combinations(group, 2)]
    for a, b in rng.sample(same, min(pairs, len(same))):
        x, y = a.defset(), b.defset()
        u, i = union(x, y), intersection(x, y)
        for chi in (chi_b, chi_g):
            lhs = chi(u, verify) + chi(i, verify)
            rhs = chi(x, verify) + chi(y, verify)
            r.check(lhs == rhs, f"{chi.__name__}: {a.name} with {b.name}: {lhs} != {rhs}")
    small = [(a, b) for a in entries for b in entries if a.dim + b.dim <= 3]
    for a, b in rng.sample(small, min(pairs, len(small))):
        p = product(a.defset(), b.defset())
        d = decompose(p, verify=verify)
        r.check(chi_b(d) == a.chi_b * b.chi_b, f"chi_b of {a.name} x {b.name} is {chi_b(d)}")
        r.check(chi_g(d) == a.chi_g * b.chi_g, f"chi_g of {a.name} x {b.name} is {chi_g(d)}")
        r.check(g_class(d) == class_mul(a.gclass, b.gclass),
                f"class of {a.name} x {b.name} is {g_class(d)}")
    return r


FIBER_SETS = [
    "0 < x & x < 1 & 0 < y",
    "0 <= y & y <= x & x <= 1",
    "x = 0 | y = 0",
    "0 < x & -x < y & y < x",
    "0 < x & x < 2 & 0 < y & y < 2 & (x != 1 | y != 1)",
]


def suite_fiber(rng: random.Random, verify: bool | None = None,
                sets: Sequence[str] = FIBER_SETS, samples: int = 5) -> SuiteResult:
    """chi_b of vertical fibres is constant over each base cell and multiplies out."""
    r = SuiteResult("fiber")
    names = ["x", "y"]
    for text in sets:
        s = dnf(text, names)
        d = decompose(s, verify=verify)
        total = 0
        for base in d.levels[1]:
            values = {chi_b(fix_coordinates(s, [base.random_point(rng)[0]]), verify)
                      for _ in range(samples)}
            values.add(chi_b(fix_coordinates(s, list(base.sample)), verify))
            if not r.check(len(values) == 1, f"{text}: fibre chi_b over {base.render()} varies: {values}"):
                continue
            e_a = values.pop()
            over = intersection(s, remap(base.to_defset(), {0: 0}, 2))
            lhs = chi_b(over, verify)
            rhs = chi_b(base.to_defset(), verify) * e_a
            r.check(lhs == rhs, f"{text}: over {base.render()} chi_b {lhs} != {rhs}")
            total += rhs
        r.check(total == chi_b(d), f"{text}: fibre sum {total} != chi_b {chi_b(d)}")
    return r


def bd_fixtures() -> list[tuple[str, DefSet, DefSet]]:
    """(name, X, graph of d with the value first) for the stabilisation check."""
    x, tx, xy, txy = ["x"], ["t", "x"], ["x", "y"], ["t", "x", "y"]
    return [
        ("line_abs", dnf("x = x", x), dnf("(t = x & 0 <= x) | (t = -x & x < 0)", tx)),
        ("ray_identity", dnf("0 < x", x), dnf("t = x", tx)),
        ("interval_zero", dnf("0 < x & x < 1", x), dnf("t = 0", tx)),
        ("closed_ray_identity", dnf("0 <= x", x), dnf("t = x", tx)),
        ("strip_abs", dnf("0 < x & x < 1", xy), dnf("(t = y & 0 <= y) | (t = -y & y < 0)", txy)),
    ]


def suite_bd(rng: random.Random, verify: bool | None = None) -> SuiteResult:
    """chi_g of sublevel sets settles at chi_b beyond the computed threshold."""
    r = SuiteResult("bd")
    for name, s, d in bd_fixtures():
        rep = bd_check(s, d, verify=verify)
        r.check(rep.mu is not None, f"{name}: no threshold ({rep.checks})")
        r.check(all(v == "ok" for v in rep.checks.values()), f"{name}: preconditions {rep.checks}")
        for t0, g in rep.samples:
            r.check(g == rep.chi_b, f"{name}: chi_g at t={t0} is {g}, chi_b is {rep.chi_b}")
    return r


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "claim1": suite_claim1,
    "claim2": suite_claim2,
    "claim3": suite_claim3,
    "corpus": suite_corpus,
    "ring": suite_ring,
    "refine": suite_refine,
    "goodbounded": suite_goodbounded,
    "oracle": suite_oracle,
    "bijection": suite_bijection,
    "boundedcondition": suite_boundedcondition,
    "unionproduct": suite_unionproduct,
    "fiber": suite_fiber,
    "bd": suite_bd,
}

_TAKES_CORPUS = {"corpus", "ring", "refine", "goodbounded", "oracle", "unionproduct"}


def run_suites(names: Sequence[str] | None = None, seed: int = 0, verify: bool | None = None,
               corpus: Sequence[CorpusEntry] | None = None) -> list[SuiteResult]:
    """Run the named suites (all by default) with a fresh seeded generator each."""
    chosen = list(SUITES) if not names else list(names)
    unknown = [n for n in chosen if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}; known: {', '.join(SUITES)}")
    out = []
    for name in chosen:
        rng = random.Random(f"{seed}:{name}")
        start = time.perf_counter()
        kwargs = {"corpus": corpus} if name in _TAKES_CORPUS and corpus is not None else {}
        res = SUITES[name](rng, verify, **kwargs)
        res.seconds = time.perf_counter() - start
        out.append(res)
    return out
