"""Euler characteristics and classes in Z[T]/(T^2 + T).

``T`` is the class of the open ray (0, +inf). A class ``m + n*T`` is
recovered from the pair (chi_g, chi_b): chi_b of it is ``m`` and chi_g is
``m - n``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .arith import DimensionError, LinTerm
from .cell import CellKind, Decomposition, Graph, classify, decompose, is_bounded
from .formula import And, DefSet, Exists, Not, Or, Rel, make_atom
from .qe import (
    EliminationLimit, eliminate_vars, entails, intersection, is_empty, qe, remap,
)

SetLike = Union[DefSet, Decomposition]


@dataclass(frozen=True)
class GClass:
    """The element ``m + n*T`` of Z[T]/(T^2 + T)."""

    m: int
    n: int

    def __add__(self, other: GClass) -> GClass:
        return GClass(self.m + other.m, self.n + other.n)

    def __neg__(self) -> GClass:
        return GClass(-self.m, -self.n)

    def __sub__(self, other: GClass) -> GClass:
        return self + (-other)

    def __mul__(self, other: GClass) -> GClass:
        # (m + nT)(m' + n'T) = mm' + (mn' + m'n)T + nn'T^2, and T^2 = -T
        return GClass(self.m * other.m, self.m * other.n + other.m * self.n - self.n * other.n)

    def __str__(self) -> str:
        if self.n == 0:
            return str(self.m)
        head = {1: "T", -1: "-T"}.get(self.n, f"{self.n}*T")
        if self.m == 0:
            return head
        return f"{head} + {self.m}" if self.m > 0 else f"{head} - {-self.m}"

    @classmethod
    def parse(cls, text: str) -> GClass:
        s = text.replace(" ", "")
        m = re.fullmatch(r"(?:(-?\d*)\*?T)?([+-]?\d+)?", s)
        if not s or m is None or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"not a class: {text!r}")
        coef, const = m.group(1), m.group(2)
        if coef is None:
            n = 0
        elif coef in ("", "+"):
            n = 1
        elif coef == "-":
            n = -1
        else:
            n = int(coef)
        return cls(int(const) if const else 0, n)


ZERO = GClass(0, 0)
ONE = GClass(1, 0)
T = GClass(0, 1)


def class_add(a: GClass, b: GClass) -> GClass:
    return a + b


def class_mul(a: GClass, b: GClass) -> GClass:
    return a * b


def class_neg(a: GClass) -> GClass:
    return -a


def psi_g(a: GClass) -> int:
    return a.m - a.n


def psi_b(a: GClass) -> int:
    return a.m


def _cells(s: SetLike, verify: bool | None):
    return s if isinstance(s, Decomposition) else decompose(s, verify=verify)


def chi_g(s: SetLike, verify: bool | None = None) -> int:
    return sum((-1) ** c.dim for c in _cells(s, verify))


def chi_b(s: SetLike, verify: bool | None = None) -> int:
    total = 0
    for c in _cells(s, verify):
        kind = classify(c)
        if kind is CellKind.EXCEPTIONAL:
            raise ValueError("bounded Euler characteristic needs a partition without exceptional cells")
        if kind is CellKind.GOOD:
            total += (-1) ** c.dim
    return total


def g_class(s: SetLike, verify: bool | None = None) -> GClass:
    d = _cells(s, verify)
    b = chi_b(d)
    return GClass(b, b - chi_g(d))


# ---------------------------------------------------------------------------
# stabilisation of sublevel sets

@dataclass
class BdReport:
    """Outcome of :func:`bd_check`. ``checks`` maps each precondition to
    ``"ok"``, ``"failed"`` or ``"unverified"``."""

    checks: dict[str, str]
    mu: Fraction | None = None
    chi_b: int | None = None
    samples: list[tuple[Fraction, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.mu is not None
                and all(v != "failed" for v in self.checks.values())
                and all(g == self.chi_b for _, g in self.samples))

    def as_dict(self) -> dict:
        return {
            "checks": dict(sorted(self.checks.items())),
            "mu": None if self.mu is None else str(self.mu),
            "chi_b": self.chi_b,
            "samples": [{"t": str(t), "chi_g": g, "ok": g == self.chi_b} for t, g in self.samples],
            "ok": self.ok,
        }


def _fibres_bounded(gamma: DefSet, max_rounds: int | None) -> bool:
    """Decide: for all t >= 0 there is B with every x in the fibre inside (-B, B)^n."""
    n = gamma.dim - 1
    width = n + 2
    bvar = n + 1
    b = LinTerm.var(bvar, width)
    box = []
    for i in range(1, n + 1):
        x = LinTerm.var(i, width)
        box.append(make_atom(-b - x, Rel.LT))
        box.append(make_atom(x - b, Rel.LT))
    body = And((remap(gamma, {i: i for i in range(n + 1)}, width).to_formula(), Not(And(tuple(box)))))
    for i in range(n, 0, -1):
        body = Exists(i, body)
    t = LinTerm.var(0, width)
    nonneg = make_atom(-t, Rel.LT), make_atom(t, Rel.EQ)
    sentence = Not(Exists(0, And((Or(nonneg), Not(Exists(bvar, Not(body)))))))
    return bool(qe(sentence, dim=0, max_rounds=max_rounds).disjuncts)


def sublevel_set(gamma: DefSet, t0: Fraction) -> DefSet:
    """``{x : some (t, x) in gamma has t <= t0}`` for a graph in Q x Q^n."""
    t = LinTerm.var(0, gamma.dim)
    cap = DefSet(gamma.dim, ((make_atom(t.shift(-t0), Rel.LT),), (make_atom(t.shift(-t0), Rel.EQ),)))
    return eliminate_vars(intersection(gamma, cap), [0])


def bd_check(s: DefSet, d: DefSet, verify: bool | None = None,
             max_rounds: int | None = None) -> BdReport:
    """Check that chi_g of the sublevel sets of ``d`` settles at chi_b(s).

    ``d`` is the graph ``{(t, x) : d(x) = t}`` in Q x Q^n with the value as
    coordinate 0. Preconditions are reported one by one instead of raising.
    """
    if d.dim != s.dim + 1:
        raise DimensionError(f"graph in Q^{d.dim} does not match a set in Q^{s.dim}")
    n = s.dim
    gamma = intersection(d, remap(s, {i: i + 1 for i in range(n)}, n + 1))
    checks: dict[str, str] = {}

    checks["total"] = "ok" if entails(s, eliminate_vars(gamma, [0])) else "failed"

    two = remap(gamma, {0: 0, **{i: i + 1 for i in range(1, n + 1)}}, n + 2)
    other = remap(gamma, {0: 1, **{i: i + 1 for i in range(1, n + 1)}}, n + 2)
    diff = LinTerm.var(0, n + 2) - LinTerm.var(1, n + 2)
    apart = DefSet(n + 2, ((make_atom(diff, Rel.LT),), (make_atom(-diff, Rel.LT),)))
    clash = intersection(intersection(two, other), apart)
    checks["single_valued"] = "ok" if is_empty(clash) else "failed"

    neg = DefSet(n + 1, ((make_atom(LinTerm.var(0, n + 1), Rel.LT),),))
    checks["nonnegative"] = "ok" if is_empty(intersection(gamma, neg)) else "failed"

    try:
        checks["bounded_fibres"] = "ok" if _fibres_bounded(gamma, max_rounds) else "failed"
    except EliminationLimit:
        checks["bounded_fibres"] = "unverified"

    report = BdReport(checks)
    if any(v == "failed" for v in checks.values()):
        return report

    report.chi_b = chi_b(s, verify=verify)
    sup = None
    for c in decompose(gamma, verify=verify):
        if not is_bounded(c):
            continue
        first = c.stages[0]
        top = first.f.const if isinstance(first, Graph) else first.hi.const
        sup = top if sup is None else max(sup, top)
    mu = Fraction(0) if sup is None else max(Fraction(0), sup + 1)
    report.mu = mu
    for t0 in (mu + 1, 2 * mu + 2, 10 * mu + 10):
        report.samples.append((t0, chi_g(sublevel_set(gamma, t0), verify=verify)))
    return report
