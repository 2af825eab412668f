"""Cylindrical cell decomposition of semilinear sets.

A cell in Q^n is a tower of ``n`` stages. Stage ``k`` constrains ``x_k``
over the cell formed by the earlier stages, either to the graph of an
affine function of ``x_0 .. x_{k-1}`` or to the band strictly between two
such functions (each end possibly infinite).

The decomposer follows the usual project-then-lift scheme. At every level
the coordinate itself is added to the functionals, so every fibre is split
at 0 and no stage is ever the whole line.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .arith import LinTerm, lin_normalize, pick_between
from .formula import Conj, DefSet, Rel, make_atom, simplify_conj
from .qe import conj_entails_atom, eliminate_vars, entails, is_empty, meets

#: Certify each decomposition with exact emptiness checks unless told otherwise.
VERIFY = True


class DecompositionError(AssertionError):
    """A certification check on a decomposition failed."""


class CellKind(enum.Enum):
    EXCEPTIONAL = "exceptional"
    BAD = "bad"
    GOOD = "good"


@dataclass(frozen=True)
class Graph:
    f: LinTerm


@dataclass(frozen=True)
class Band:
    lo: LinTerm | None = None  # None is -infinity
    hi: LinTerm | None = None  # None is +infinity


Stage = Graph | Band


@dataclass(frozen=True)
class Cell:
    stages: tuple[Stage, ...]

    @property
    def ambient(self) -> int:
        return len(self.stages)

    @property
    def dim(self) -> int:
        return sum(isinstance(s, Band) for s in self.stages)

    @property
    def kind(self) -> CellKind:
        return classify(self)

    @cached_property
    def sample(self) -> tuple[Fraction, ...]:
        """A canonical point of the cell, built stage by stage."""
        pt: list[Fraction] = []
        for st in self.stages:
            if isinstance(st, Graph):
                pt.append(st.f.at(pt))
            else:
                lo = None if st.lo is None else st.lo.at(pt)
                hi = None if st.hi is None else st.hi.at(pt)
                pt.append(pick_between(lo, hi))
        return tuple(pt)

    def prefix(self, k: int) -> Cell:
        return Cell(self.stages[:k])

    def constraints(self) -> Conj:
        n = self.ambient
        atoms = []
        for k, st in enumerate(self.stages):
            x = LinTerm.var(k, n)
            if isinstance(st, Graph):
                atoms.append(make_atom(x - st.f.with_dim(n), Rel.EQ))
            else:
                if st.lo is not None:
                    atoms.append(make_atom(st.lo.with_dim(n) - x, Rel.LT))
                if st.hi is not None:
                    atoms.append(make_atom(x - st.hi.with_dim(n), Rel.LT))
        c = simplify_conj(atoms)
        assert c is not None
        return c

    def to_defset(self) -> DefSet:
        return DefSet(self.ambient, (self.constraints(),))

    def contains(self, point: Sequence[Fraction]) -> bool:
        if len(point) != self.ambient:
            return False
        for k, st in enumerate(self.stages):
            v = point[k]
            if isinstance(st, Graph):
                if v != st.f.at(point):
                    return False
            else:
                if st.lo is not None and not st.lo.at(point) < v:
                    return False
                if st.hi is not None and not v < st.hi.at(point):
                    return False
        return True

    def random_point(self, rng: random.Random, spread: int = 5) -> tuple[Fraction, ...]:
        """A random point of the cell with modest denominators."""
        pt: list[Fraction] = []
        for st in self.stages:
            if isinstance(st, Graph):
                pt.append(st.f.at(pt))
                continue
            lo = None if st.lo is None else st.lo.at(pt)
            hi = None if st.hi is None else st.hi.at(pt)
            u = Fraction(rng.randint(1, 15), 16)
            if lo is not None and hi is not None:
                pt.append(lo + u * (hi - lo))
            elif lo is not None:
                pt.append(lo + u * rng.randint(1, spread))
            elif hi is not None:
                pt.append(hi - u * rng.randint(1, spread))
            else:
                pt.append(Fraction(rng.randint(-4 * spread, 4 * spread), 4))
        return tuple(pt)

    def render(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names is not None else [f"x{i}" for i in range(self.ambient)]
        parts = []
        for k, st in enumerate(self.stages):
            if isinstance(st, Graph):
                parts.append(f"{names[k]} = {st.f.render(names)}")
            else:
                lo = "-inf" if st.lo is None else st.lo.render(names)
                hi = "+inf" if st.hi is None else st.hi.render(names)
                parts.append(f"{names[k]} in ({lo}, {hi})")
        return ", ".join(parts) if parts else "point of Q^0"

    def to_json(self) -> dict:
        stages = []
        for st in self.stages:
            if isinstance(st, Graph):
                stages.append({"graph": term_to_json(st.f)})
            else:
                stages.append({"band": {
                    "lo": "-inf" if st.lo is None else term_to_json(st.lo),
                    "hi": "+inf" if st.hi is None else term_to_json(st.hi),
                }})
        return {"dim": self.dim, "kind": self.kind.value, "stages": stages}

    @classmethod
    def from_json(cls, doc: dict) -> Cell:
        stages: list[Stage] = []
        for k, st in enumerate(doc["stages"]):
            if "graph" in st:
                stages.append(Graph(term_from_json(st["graph"], k)))
            else:
                b = st["band"]
                lo = None if b["lo"] == "-inf" else term_from_json(b["lo"], k)
                hi = None if b["hi"] == "+inf" else term_from_json(b["hi"], k)
                stages.append(Band(lo, hi))
        return cls(tuple(stages))


def term_to_json(t: LinTerm) -> dict:
    return {"coeffs": {str(i): str(c) for i, c in t.coeffs}, "const": str(t.const)}


def term_from_json(doc: dict, dim: int) -> LinTerm:
    return LinTerm.make({int(i): Fraction(c) for i, c in doc["coeffs"].items()},
                        Fraction(doc["const"]), dim)


def dim(c: Cell) -> int:
    return c.dim


def classify(c: Cell) -> CellKind:
    bad = False
    for st in c.stages:
        if isinstance(st, Band):
            if st.lo is None and st.hi is None:
                return CellKind.EXCEPTIONAL
            if st.lo is None or st.hi is None:
                bad = True
    return CellKind.BAD if bad else CellKind.GOOD


def bounding_box(c: Cell) -> list[tuple[Fraction, Fraction]] | None:
    """A closed box containing ``c``, or ``None`` when some band is infinite."""
    box: list[tuple[Fraction, Fraction]] = []

    def span(t: LinTerm) -> tuple[Fraction, Fraction]:
        lo = hi = t.const
        for i, a in t.coeffs:
            l, h = box[i]
            lo += min(a * l, a * h)
            hi += max(a * l, a * h)
        return lo, hi

    for st in c.stages:
        if isinstance(st, Graph):
            box.append(span(st.f))
        elif st.lo is None or st.hi is None:
            return None
        else:
            box.append((span(st.lo)[0], span(st.hi)[1]))
    return box


def is_bounded(c: Cell) -> bool:
    return bounding_box(c) is not None


@dataclass(frozen=True)
class Decomposition:
    """Cells partitioning ``source``; ``levels[k]`` holds the cells of its
    projection onto the first ``k`` coordinates."""

    cells: tuple[Cell, ...]
    source: DefSet
    functionals: tuple[LinTerm, ...] = ()
    levels: tuple[tuple[Cell, ...], ...] = field(default=(), compare=False)

    @property
    def dim(self) -> int:
        return self.source.dim

    def __iter__(self):
        return iter(self.cells)

    def __len__(self) -> int:
        return len(self.cells)


def _norm(t: LinTerm, n: int) -> LinTerm | None:
    if t.is_constant:
        return None
    return lin_normalize(t)[0].with_dim(n)


def _roots(funcs: Iterable[LinTerm], k: int) -> list[LinTerm]:
    """Distinct solutions for ``x_{k-1}`` of the level-``k`` functionals using it."""
    out = {f.solve_for(k - 1).with_dim(k - 1) for f in funcs if f.coeff(k - 1) != 0}
    return sorted(out, key=LinTerm.sort_key)


def functional_levels(top: Iterable[LinTerm], n: int) -> list[list[LinTerm]]:
    """Projection closure: ``levels[k]`` are the functionals over x_0..x_{k-1}."""
    levels: list[list[LinTerm]] = [[] for _ in range(n + 1)]
    cur = {g for t in top if (g := _norm(t, n)) is not None}
    if n:
        cur.add(LinTerm.var(n - 1, n))
    for k in range(n, 0, -1):
        levels[k] = sorted(cur, key=LinTerm.sort_key)
        roots = _roots(cur, k)
        below = {f.with_dim(k - 1) for f in cur if f.coeff(k - 1) == 0}
        for r1, r2 in combinations(roots, 2):
            g = _norm(r1 - r2, k - 1)
            if g is not None:
                below.add(g)
        if k > 1:
            below.add(LinTerm.var(k - 2, k - 1))
        cur = below
    return levels


def _lift(base: Cell, roots: list[LinTerm], verify: bool) -> list[Cell]:
    pt = base.sample
    groups: dict[Fraction, list[LinTerm]] = {}
    for r in roots:
        groups.setdefault(r.at(pt), []).append(r)
    ordered = [min(groups[v], key=LinTerm.sort_key) for v in sorted(groups)]
    if verify:
        base_conj = base.constraints()
        for v in groups:
            rep = min(groups[v], key=LinTerm.sort_key)
            for r in groups[v]:
                if r != rep and not conj_entails_atom(base_conj, make_atom(r - rep, Rel.EQ)):
                    raise DecompositionError(f"roots {r} and {rep} differ over {base.render()}")
        for r1, r2 in zip(ordered, ordered[1:]):
            if not conj_entails_atom(base_conj, make_atom(r1 - r2, Rel.LT)):
                raise DecompositionError(f"root order {r1} < {r2} not constant over {base.render()}")
    st = base.stages
    out = [Cell(st + (Band(None, ordered[0] if ordered else None),))]
    for i, r in enumerate(ordered):
        out.append(Cell(st + (Graph(r),)))
        nxt = ordered[i + 1] if i + 1 < len(ordered) else None
        out.append(Cell(st + (Band(r, nxt),)))
    return out


def _projections(s: DefSet) -> list[DefSet]:
    proj = [s]
    for k in range(s.dim - 1, -1, -1):
        proj.append(eliminate_vars(proj[-1], [k]))
    return proj[::-1]


def decompose(s: DefSet, extra: Sequence[LinTerm] = (), verify: bool | None = None) -> Decomposition:
    """Partition ``s`` into cells, also sign-invariant for ``extra`` functionals."""
    verify = VERIFY if verify is None else verify
    n = s.dim
    top = list(s.functionals()) + [e.with_dim(n) for e in extra]
    funcs = functional_levels(top, n)
    proj = _projections(s)

    current: list[Cell] = [] if is_empty(proj[0]) else [Cell(())]
    levels = [tuple(current)]
    for k in range(1, n + 1):
        roots = _roots(funcs[k], k)
        nxt = []
        for base in current:
            for c in _lift(base, roots, verify):
                if proj[k].contains(c.sample):
                    nxt.append(c)
                elif verify and meets(c.constraints(), proj[k]):
                    raise DecompositionError(f"dropped cell {c.render()} meets the projection")
        current = nxt
        levels.append(tuple(current))
    d = Decomposition(tuple(current), s, tuple(funcs[n]), tuple(levels))
    if verify:
        problems = certify(d)
        if problems:
            raise DecompositionError("; ".join(problems))
    return d


def certify(d: Decomposition) -> list[str]:
    """Exact checks of the partition property; returns the problems found."""
    problems = []
    for c in d.cells:
        if classify(c) is CellKind.EXCEPTIONAL:
            problems.append(f"exceptional cell {c.render()}")
        if not c.contains(c.sample):
            problems.append(f"cell {c.render()} misses its own sample")
        if not entails(c.to_defset(), d.source):
            problems.append(f"cell {c.render()} leaves the source set")
    for c in d.cells:
        hits = sum(other.contains(c.sample) for other in d.cells)
        if hits != 1:
            problems.append(f"sample of {c.render()} lies in {hits} cells")
    return problems


def boundary_functionals(d: Decomposition) -> list[LinTerm]:
    """Functionals cutting out the cells of ``d``, lifted to its ambient space."""
    n = d.dim
    out = set(d.functionals)
    for c in d.cells:
        for k, st in enumerate(c.stages):
            x = LinTerm.var(k, n)
            for t in ([st.f] if isinstance(st, Graph) else [st.lo, st.hi]):
                if t is not None and (g := _norm(x - t.with_dim(n), n)) is not None:
                    out.add(g)
    return sorted(out, key=LinTerm.sort_key)


def refine(d: Decomposition, extra: Sequence[LinTerm], verify: bool | None = None) -> Decomposition:
    """Finer decomposition of ``d.source`` that is also sign-invariant for ``extra``."""
    if not extra:
        return d
    verify = VERIFY if verify is None else verify
    new = decompose(d.source, boundary_functionals(d) + [e.with_dim(d.dim) for e in extra], verify)
    if verify:
        for c in new.cells:
            owners = [o for o in d.cells if o.contains(c.sample)]
            if len(owners) != 1:
                raise DecompositionError(f"refined cell {c.render()} lies in {len(owners)} old cells")
            if not entails(c.to_defset(), owners[0].to_defset()):
                raise DecompositionError(f"refined cell {c.render()} leaves {owners[0].render()}")
    return new
