"""Fourier-Motzkin quantifier elimination over (Q, <, +, 0).

Conjunctions of ``t < 0`` / ``t = 0`` atoms are the unit of work. Because Q
is dense and has no endpoints, eliminating ``x`` from a conjunction without
equalities on ``x`` needs only the pairings ``lower < upper``.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Sequence

from .arith import DimensionError, LinTerm, pick_between
from .formula import (
    FALSE, And, Atom, Conj, DefSet, Exists, FalseF, Formula, Not, Or, Rel,
    TrueF, conj_of, drop_subsumed, free_dim, make_atom, negated_atoms, simplify_conj,
)

DEPTH_ENV = "GROTHLIN_FM_DEPTH"


class EliminationLimit(RuntimeError):
    """The configured number of elimination rounds was exhausted."""


@dataclass
class _Budget:
    limit: int | None
    used: int = 0

    def tick(self) -> None:
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            raise EliminationLimit(f"more than {self.limit} elimination rounds")


def _default_limit() -> int | None:
    raw = os.environ.get(DEPTH_ENV)
    if not raw:
        return None
    return int(raw)


@dataclass(frozen=True)
class BoundPartition:
    """The atoms of a conjunction sorted by how they constrain one variable.

    ``lowers`` hold ``l`` with ``l < x``, ``uppers`` hold ``u`` with
    ``x < u`` and ``equalities`` hold ``e`` with ``x = e``.
    """

    var: int
    lowers: tuple[LinTerm, ...] = ()
    uppers: tuple[LinTerm, ...] = ()
    equalities: tuple[LinTerm, ...] = ()
    free: tuple[Atom, ...] = ()


def partition_bounds(var: int, conj: Iterable[Atom]) -> BoundPartition:
    lowers, uppers, equalities, free = [], [], [], []
    for a in sorted(conj, key=Atom.sort_key):
        c = a.term.coeff(var)
        if c == 0:
            free.append(a)
            continue
        e = a.term.solve_for(var)
        if a.rel is Rel.EQ:
            equalities.append(e)
        elif c > 0:
            uppers.append(e)
        else:
            lowers.append(e)
    return BoundPartition(var, tuple(lowers), tuple(uppers), tuple(equalities), tuple(free))


def _eliminate(var: int, conj: Conj) -> Conj | None:
    eqs = [a for a in conj if a.rel is Rel.EQ and a.term.coeff(var) != 0]
    if eqs:
        pivot = min(eqs, key=Atom.sort_key)
        e = pivot.term.solve_for(var)
        rest = [make_atom(a.term.substitute(var, e), a.rel) for a in conj if a != pivot]
        return simplify_conj(rest)
    bp = partition_bounds(var, conj)
    new = list(bp.free)
    for lo, hi in cartesian(bp.lowers, bp.uppers):
        new.append(make_atom(lo - hi, Rel.LT))
    return simplify_conj(new)


def _variables(conj: Conj) -> set[int]:
    return {i for a in conj for i in a.term.variables}


def _pick_var(conj: Conj) -> int:
    best = None
    for v in sorted(_variables(conj)):
        lo = up = 0
        has_eq = False
        for a in conj:
            c = a.term.coeff(v)
            if c == 0:
                continue
            if a.rel is Rel.EQ:
                has_eq = True
            elif c > 0:
                up += 1
            else:
                lo += 1
        cost = -1 if has_eq else lo * up - lo - up
        if best is None or cost < best[0]:
            best = (cost, v)
    return best[1]


def conj_is_empty(conj: Iterable[Atom]) -> bool:
    """Decide unsatisfiability of a conjunction by eliminating every variable."""
    c = simplify_conj(conj)
    return c is None or _canonical_is_empty(c)


@lru_cache(maxsize=1 << 16)
def _canonical_is_empty(c: Conj | None) -> bool:
    while c is not None:
        if not _variables(c):
            return False
        c = _eliminate(_pick_var(c), c)
    return True


def conj_entails_atom(conj: Iterable[Atom], a: Atom) -> bool:
    base = tuple(conj)
    return all(conj_is_empty(base + (n,)) for n in negated_atoms(a))


def remove_redundant(conj: Conj) -> Conj:
    """Drop atoms implied by the rest, testing in canonical order."""
    kept = list(conj)
    for a in conj:
        rest = [b for b in kept if b != a]
        if conj_entails_atom(rest, a):
            kept = rest
    return tuple(kept)


def prune_disjuncts(s: DefSet) -> DefSet:
    """Drop disjuncts contained in another disjunct and redundant atoms.

    Semantic rather than syntactic, so it costs a few emptiness
    checks per pair; meant for output, not for inner loops.
    """
    conjs = [remove_redundant(c) for c in s.disjuncts]
    kept: list[Conj] = []
    for i, c in enumerate(conjs):
        others = kept + conjs[i + 1:]
        if not any(all(conj_entails_atom(c, a) for a in d) for d in others):
            kept.append(c)
    return DefSet(s.dim, tuple(kept))


def eliminate_exists(var: int, conj: Iterable[Atom]) -> Formula:
    """Quantifier-free equivalent of ``EX x_var. AND(conj)``."""
    c = simplify_conj(conj)
    if c is None:
        return FALSE
    out = _eliminate(var, c)
    if out is None:
        return FALSE
    return conj_of(*remove_redundant(out))


def find_point(conj: Iterable[Atom], dim: int) -> tuple[Fraction, ...] | None:
    """A rational point satisfying ``conj`` in Q^dim, or ``None`` if there is none."""
    c = simplify_conj(conj)
    if c is None:
        return None
    stages = [c]
    for v in reversed(range(dim)):
        c = _eliminate(v, stages[-1])
        if c is None:
            return None
        stages.append(c)
    point: list[Fraction] = []
    for v in range(dim):
        known = dict(enumerate(point))
        lo = hi = exact = None
        for a in stages[dim - 1 - v]:
            t = a.term.fix(known)
            cv = t.coeff(v)
            if cv == 0:
                continue
            root = t.solve_for(v).const
            if a.rel is Rel.EQ:
                exact = root
            elif cv > 0:
                hi = root if hi is None else min(hi, root)
            else:
                lo = root if lo is None else max(lo, root)
        point.append(exact if exact is not None else pick_between(lo, hi))
    pt = tuple(point)
    assert all(a.holds(pt) for a in stages[0]), "witness construction failed"
    return pt


# ---------------------------------------------------------------------------
# formulas to DNF with quantifiers eliminated

def finish(dim: int, conjs: Iterable[Conj]) -> DefSet:
    """Build a DefSet keeping only satisfiable, non-subsumed disjuncts."""
    live = [tuple(a if a.term.dim == dim else Atom(a.term.with_dim(dim), a.rel) for a in c)
            for c in conjs if not conj_is_empty(c)]
    return DefSet(dim, tuple(drop_subsumed(live)))


def _merge(c: Conj, d: Conj) -> Conj | None:
    return simplify_conj(c + d)


def _complement(conjs: list[Conj]) -> list[Conj]:
    acc: list[Conj] = [()]
    for c in conjs:
        pieces = [n for a in c for n in negated_atoms(a)]
        nxt = []
        for r in acc:
            meet = simplify_conj(r + c)
            if meet is None or conj_is_empty(meet):
                nxt.append(r)
                continue
            for p in pieces:
                m = simplify_conj(r + (p,))
                if m is not None and not conj_is_empty(m):
                    nxt.append(m)
        acc = drop_subsumed(nxt)
        if not acc:
            break
    return acc


def _qe(f: Formula, budget: _Budget) -> list[Conj]:
    if isinstance(f, Atom):
        c = simplify_conj([f])
        return [] if c is None else [c]
    if isinstance(f, TrueF):
        return [()]
    if isinstance(f, FalseF):
        return []
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(_qe(a, budget))
        return drop_subsumed(out)
    if isinstance(f, And):
        acc: list[Conj] = [()]
        for a in f.args:
            sub = _qe(a, budget)
            acc = drop_subsumed(m for c, d in cartesian(acc, sub) if (m := _merge(c, d)) is not None)
            if not acc:
                break
        return acc
    if isinstance(f, Not):
        return _complement([c for c in _qe(f.arg, budget) if not conj_is_empty(c)])
    if isinstance(f, Exists):
        out = []
        for c in _qe(f.body, budget):
            budget.tick()
            e = _eliminate(f.var, c)
            if e is not None and not conj_is_empty(e):
                out.append(remove_redundant(e))
        return drop_subsumed(out)
    raise TypeError(f"not a formula: {f!r}")


def qe(f: Formula, dim: int | None = None, max_rounds: int | None = None) -> DefSet:
    """Quantifier-free DNF equivalent to ``f``, innermost quantifier first.

    ``max_rounds`` caps single-variable eliminations (one per quantifier per
    disjunct); it defaults to the ``GROTHLIN_FM_DEPTH`` environment variable.
    """
    budget = _Budget(max_rounds if max_rounds is not None else _default_limit())
    n = free_dim(f) if dim is None else dim
    return finish(n, _qe(f, budget))


# ---------------------------------------------------------------------------
# decisions and set algebra

def _same_dim(a: DefSet, b: DefSet) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"subsets of Q^{a.dim} and Q^{b.dim}")


def is_empty(s: DefSet) -> bool:
    return all(conj_is_empty(c) for c in s.disjuncts)


def meets(conj: Conj, s: DefSet) -> bool:
    """Whether the conjunction and ``s`` share a point."""
    for d in s.disjuncts:
        m = simplify_conj(conj + d)
        if m is not None and not conj_is_empty(m):
            return True
    return False


def witness(s: DefSet) -> tuple[Fraction, ...] | None:
    for c in s.disjuncts:
        p = find_point(c, s.dim)
        if p is not None:
            return p
    return None


def _subtract(pieces: list[Conj], b: DefSet) -> list[Conj]:
    for d in b.disjuncts:
        negs = [n for a in d for n in negated_atoms(a)]
        nxt = []
        for r in pieces:
            meet = simplify_conj(r + d)
            if meet is None or conj_is_empty(meet):
                nxt.append(r)
                continue
            for n in negs:
                m = simplify_conj(r + (n,))
                if m is not None and not conj_is_empty(m):
                    nxt.append(m)
        pieces = drop_subsumed(nxt)
        if not pieces:
            break
    return pieces


def difference(a: DefSet, b: DefSet) -> DefSet:
    _same_dim(a, b)
    out = []
    for c in a.disjuncts:
        out.extend(_subtract([c], b))
    return finish(a.dim, out)


def entails(a: DefSet, b: DefSet) -> bool:
    """True iff ``a`` is a subset of ``b``."""
    _same_dim(a, b)
    for c in a.disjuncts:
        p = find_point(c, a.dim)
        if p is None:
            continue
        # common case: c sits inside the one disjunct of b holding its witness
        near = [d for d in b.disjuncts if all(x.holds(p) for x in d)]
        if not near:
            return False
        if any(all(conj_entails_atom(c, x) for x in d) for d in near):
            continue
        if _subtract([c], b):
            return False
    return True


def equivalent(a: DefSet, b: DefSet) -> bool:
    return entails(a, b) and entails(b, a)


def intersection(a: DefSet, b: DefSet) -> DefSet:
    _same_dim(a, b)
    out = [m for c, d in cartesian(a.disjuncts, b.disjuncts) if (m := _merge(c, d)) is not None]
    return finish(a.dim, out)


def union(a: DefSet, b: DefSet) -> DefSet:
    _same_dim(a, b)
    return finish(a.dim, a.disjuncts + b.disjuncts)


def complement(a: DefSet) -> DefSet:
    return finish(a.dim, _complement(list(a.disjuncts)))


def remap(s: DefSet, mapping: dict[int, int], dim: int) -> DefSet:
    """Rename coordinates of ``s`` into Q^dim (a cylinder when ``dim`` grows)."""
    return DefSet(dim, tuple(
        tuple(sorted((Atom(a.term.reindex(mapping, dim), a.rel) for a in c), key=Atom.sort_key))
        for c in s.disjuncts))


def product(a: DefSet, b: DefSet) -> DefSet:
    """Cartesian product in Q^(a.dim + b.dim)."""
    n = a.dim + b.dim
    left = remap(a, {i: i for i in range(a.dim)}, n)
    right = remap(b, {i: a.dim + i for i in range(b.dim)}, n)
    return intersection(left, right)


def eliminate_vars(s: DefSet, variables: Sequence[int]) -> DefSet:
    """Project away ``variables`` and renumber the remaining coordinates."""
    drop = set(variables)
    out = []
    for c in s.disjuncts:
        cur: Conj | None = c
        for v in sorted(drop, reverse=True):
            cur = _eliminate(v, cur)
            if cur is None:
                break
        if cur is not None and not conj_is_empty(cur):
            out.append(remove_redundant(cur))
    keep = [i for i in range(s.dim) if i not in drop]
    mapping = {old: new for new, old in enumerate(keep)}
    return finish(len(keep), [tuple(Atom(a.term.reindex(mapping, len(keep)), a.rel) for a in c)
                              for c in out])


def project(s: DefSet, k: int) -> DefSet:
    """Image of ``s`` under projection onto the first ``k`` coordinates."""
    return eliminate_vars(s, range(k, s.dim))


def fix_coordinates(s: DefSet, values: Sequence[Fraction]) -> DefSet:
    """The fibre ``{y : (values, y) in s}`` as a subset of Q^(dim - len(values))."""
    k = len(values)
    fixed = dict(enumerate(values))
    n = s.dim - k
    mapping = {i: i - k for i in range(k, s.dim)}
    out = []
    for c in s.disjuncts:
        m = simplify_conj(make_atom(a.term.fix(fixed), a.rel) for a in c)
        if m is not None:
            out.append(tuple(Atom(a.term.reindex(mapping, n), a.rel) for a in m))
    return finish(n, out)


def coordinate_range(conj: Iterable[Atom], i: int, dim: int) -> tuple[bool, bool]:
    """Whether coordinate ``i`` is bounded below / above on a nonempty conjunction."""
    cur = simplify_conj(conj)
    for v in reversed(range(dim)):
        if v == i or cur is None:
            continue
        cur = _eliminate(v, cur)
    if cur is None:
        raise ValueError("empty conjunction has no coordinate range")
    below = above = False
    for a in cur:
        c = a.term.coeff(i)
        if c == 0:
            continue
        if a.rel is Rel.EQ:
            return True, True
        if c > 0:
            above = True
        else:
            below = True
    return below, above
