"""Piecewise-affine definable maps Q^m -> Q^n.

A map is a finite list of pieces; each piece pairs a domain (a DefSet in
Q^m) with ``n`` affine rows. Pieces must be pairwise disjoint and the map is
defined exactly on their union.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import DimensionError, LinTerm
from .cell import Band, Graph, decompose
from .formula import DefSet, Rel, make_atom, parse, parse_term, to_dnf, to_text
from .qe import (
    entails, equivalent, finish, eliminate_vars, intersection, is_empty, prune_disjuncts, remap,
    union,
)


class DomainError(ValueError):
    """A point or set lies outside the domain of a map."""


@dataclass(frozen=True)
class Piece:
    where: DefSet
    rows: tuple[LinTerm, ...]


@dataclass(frozen=True)
class PLMap:
    src: int
    dst: int
    pieces: tuple[Piece, ...]

    def __post_init__(self) -> None:
        for p in self.pieces:
            if p.where.dim != self.src:
                raise DimensionError(f"piece domain lives in Q^{p.where.dim}, map source is Q^{self.src}")
            if len(p.rows) != self.dst:
                raise DimensionError(f"piece has {len(p.rows)} rows, map target is Q^{self.dst}")
            for r in p.rows:
                if r.support_dim > self.src:
                    raise DimensionError(f"row {r} uses a variable outside Q^{self.src}")

    @property
    def domain(self) -> DefSet:
        out = DefSet.empty(self.src)
        for p in self.pieces:
            out = union(out, p.where)
        return out

    def overlapping_pieces(self) -> list[tuple[int, int]]:
        bad = []
        for i, p in enumerate(self.pieces):
            for j in range(i + 1, len(self.pieces)):
                if not is_empty(intersection(p.where, self.pieces[j].where)):
                    bad.append((i, j))
        return bad

    def to_json(self, var_names: Sequence[str] | None = None) -> dict:
        names = list(var_names) if var_names is not None else default_names(self.src)
        return {
            "src": self.src,
            "dst": self.dst,
            "vars": names,
            "pieces": [{"where": p.where.text(names),
                        "rows": [r.render(names) for r in p.rows]} for p in self.pieces],
        }

    @classmethod
    def from_json(cls, doc: dict, var_names: Sequence[str] | None = None, check: bool = True) -> PLMap:
        m, n = int(doc["src"]), int(doc["dst"])
        names = list(var_names or doc.get("vars") or default_names(m))
        if len(names) != m:
            raise DimensionError(f"{len(names)} variable names for a map from Q^{m}")
        pieces = []
        for p in doc["pieces"]:
            where = to_dnf(parse(p.get("where", "true"), names), m)
            rows = tuple(parse_term(r, names) for r in p["rows"])
            pieces.append(Piece(where, rows))
        return make_map(pieces, m, n, check=check)


def default_names(m: int) -> list[str]:
    return [f"x{i + 1}" for i in range(m)]


def make_map(pieces: Sequence[Piece], src: int, dst: int, check: bool = True) -> PLMap:
    f = PLMap(src, dst, tuple(Piece(p.where, tuple(r.with_dim(src) for r in p.rows)) for p in pieces))
    if check:
        bad = f.overlapping_pieces()
        if bad:
            raise ValueError(f"pieces {bad} overlap")
    return f


def affine(rows: Sequence[LinTerm], src: int, where: DefSet | None = None) -> PLMap:
    """A single-piece map, defined on ``where`` (everything by default)."""
    return make_map([Piece(where if where is not None else DefSet.universe(src), tuple(rows))],
                    src, len(rows), check=False)


def apply(f: PLMap, p: Sequence[Fraction]) -> tuple[Fraction, ...]:
    pt = tuple(Fraction(v) for v in p)
    for piece in f.pieces:
        if piece.where.contains(pt):
            return tuple(r.at(pt) for r in piece.rows)
    raise DomainError(f"point {tuple(str(v) for v in pt)} is outside the domain")


def graph(f: PLMap) -> DefSet:
    """The graph as a subset of Q^(m+n): source coordinates first."""
    m, n = f.src, f.dst
    width = m + n
    conjs = []
    for p in f.pieces:
        eqs = tuple(make_atom(LinTerm.var(m + i, width) - r.with_dim(width), Rel.EQ)
                    for i, r in enumerate(p.rows))
        lifted = remap(p.where, {i: i for i in range(m)}, width)
        conjs.extend(c + eqs for c in lifted.disjuncts)
    return finish(width, conjs)


def _require_inside(f: PLMap, s: DefSet) -> None:
    if s.dim != f.src:
        raise DimensionError(f"set lives in Q^{s.dim}, map source is Q^{f.src}")
    if not entails(s, f.domain):
        raise DomainError("set escapes the domain of the map")


def image(f: PLMap, s: DefSet) -> DefSet:
    _require_inside(f, s)
    m = f.src
    g = intersection(graph(f), remap(s, {i: i for i in range(m)}, m + f.dst))
    return prune_disjuncts(eliminate_vars(g, range(m)))


def is_injective_on(f: PLMap, s: DefSet) -> bool:
    """Decide whether two distinct points of ``s`` can share an image.

    Works in Q^(2m+n) with coordinates (x, x', y) and two copies of the graph.
    """
    _require_inside(f, s)
    m, n = f.src, f.dst
    width = 2 * m + n
    g = graph(f)
    first = remap(g, {**{i: i for i in range(m)}, **{m + j: 2 * m + j for j in range(n)}}, width)
    second = remap(g, {**{i: m + i for i in range(m)}, **{m + j: 2 * m + j for j in range(n)}}, width)
    s1 = remap(s, {i: i for i in range(m)}, width)
    s2 = remap(s, {i: m + i for i in range(m)}, width)
    apart = []
    for i in range(m):
        d = LinTerm.var(i, width) - LinTerm.var(m + i, width)
        apart.append((make_atom(d, Rel.LT),))
        apart.append((make_atom(-d, Rel.LT),))
    witness = intersection(intersection(intersection(first, second), intersection(s1, s2)),
                           DefSet(width, tuple(apart)))
    return is_empty(witness)


def certify_bijection(f: PLMap, s: DefSet, t: DefSet) -> bool:
    """True iff ``f`` maps ``s`` injectively onto exactly ``t``."""
    return is_injective_on(f, s) and equivalent(image(f, s), t)


# ---------------------------------------------------------------------------
# stock maps

def identity(m: int) -> PLMap:
    return affine([LinTerm.var(i, m) for i in range(m)], m)


def translate(offsets: Sequence[Fraction | int]) -> PLMap:
    m = len(offsets)
    return affine([LinTerm.var(i, m).shift(Fraction(a)) for i, a in enumerate(offsets)], m)


def scale(factor: Fraction | int, m: int = 1) -> PLMap:
    return affine([LinTerm.var(i, m).scale(Fraction(factor)) for i in range(m)], m)


def halve(m: int = 1) -> PLMap:
    """x -> x/2, the map behind (0, b) ~ (0, b/2)."""
    return scale(Fraction(1, 2), m)


def reflect(m: int = 1) -> PLMap:
    """x -> -x, e.g. (0, +inf) onto (-inf, 0)."""
    return scale(-1, m)


def permutation(sigma: Sequence[int]) -> PLMap:
    """Coordinate shuffle sending x to (x[sigma[0]], ..., x[sigma[m-1]])."""
    m = len(sigma)
    if sorted(sigma) != list(range(m)):
        raise ValueError(f"{list(sigma)} is not a permutation of 0..{m - 1}")
    return affine([LinTerm.var(j, m) for j in sigma], m)


def swap(m: int = 2, i: int = 0, j: int = 1) -> PLMap:
    sigma = list(range(m))
    sigma[i], sigma[j] = sigma[j], sigma[i]
    return permutation(sigma)


def shear() -> PLMap:
    """(x, y) -> (x, x + y)."""
    return affine([LinTerm.var(0, 2), LinTerm.var(0, 2) + LinTerm.var(1, 2)], 2)


def band_to_cylinder(bound: LinTerm, k: int, side: str = "lower") -> PLMap:
    """Send A x (0, +inf) onto the half-band above (``lower``) or below (``upper``)
    the graph of ``bound`` over A, where ``bound`` uses the first ``k`` coordinates.

    ``lower``: (x, t) -> (x, bound(x) + t);  ``upper``: (x, t) -> (x, bound(x) - t).
    """
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    w = k + 1
    b = bound.with_dim(w)
    t = LinTerm.var(k, w)
    last = b + t if side == "lower" else b - t
    return affine([LinTerm.var(i, w) for i in range(k)] + [last], w)


def interval_injection(lower: LinTerm | None, upper: LinTerm | None,
                       a: Fraction | int = 1) -> PLMap:
    """Injection of an interval I into the band between ``lower`` and ``upper`` over I.

    ``lower``/``upper`` are affine in x (``None`` for an infinite end). The
    offset ``a`` may be any positive rational; 1 is only a convenient choice.
    """
    a = Fraction(a)
    if a <= 0:
        raise ValueError("offset must be positive")
    x = LinTerm.var(0, 1)
    if lower is None and upper is None:
        second = x
    elif lower is None:
        second = upper.with_dim(1).shift(-a)
    elif upper is None:
        second = lower.with_dim(1).shift(a)
    else:
        second = (lower.with_dim(1) + upper.with_dim(1)).scale(Fraction(1, 2))
    return affine([x, second], 1)


def from_graph(g: DefSet, src: int, dst: int, verify: bool | None = None) -> PLMap:
    """Recover a map from its graph in Q^(src+dst), one piece per cell.

    Raises ``ValueError`` when ``g`` is not the graph of a function.
    """
    if g.dim != src + dst:
        raise DimensionError(f"graph lives in Q^{g.dim}, expected Q^{src + dst}")
    pieces = []
    seen = set()
    for c in decompose(g, verify=verify):
        head, tail = c.prefix(src), c.stages[src:]
        if any(isinstance(st, Band) for st in tail):
            raise ValueError(f"not single-valued over {head.render()}")
        if head in seen:
            raise ValueError(f"not single-valued over {head.render()}")
        seen.add(head)
        fixed: dict[int, LinTerm] = {}
        rows = []
        for k, st in enumerate(tail):
            assert isinstance(st, Graph)
            row = st.f.with_dim(src + k)
            for j in sorted(fixed, reverse=True):
                row = row.substitute(j, fixed[j])
            row = row.with_dim(src)
            fixed[src + k] = row
            rows.append(row)
        pieces.append(Piece(head.to_defset(), tuple(rows)))
    return make_map(pieces, src, dst, check=False)


def map_text(f: PLMap, names: Sequence[str]) -> str:
    lines = []
    for p in f.pieces:
        rows = ", ".join(r.render(names) for r in p.rows)
        lines.append(f"on {to_text(p.where.to_formula(), names)}: ({rows})")
    return "\n".join(lines)
