"""Brute-force Euler characteristics from a hyperplane arrangement.

The faces of the arrangement cut out by a set's own functionals (plus the
coordinate functionals) partition Q^n into relatively open polyhedra, and
the set is a union of some of them. Summing (-1)^dim over those faces gives
chi_g; restricting to bounded faces gives chi_b. Nothing here touches the
cell decomposer, which makes the two computations independent witnesses.

Adding the coordinate functionals keeps every face inside one closed
orthant, so no face contains a full line. A bounded face is then good in any
decomposition, and an unbounded one splits into cells whose bounded Euler
characteristic sums to zero.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .arith import LinTerm, lin_normalize, rank
from .formula import And, Atom, DefSet, Exists, Not, Rel, make_atom, simplify_conj
from .qe import conj_is_empty, coordinate_range, find_point, qe

MAX_DIM = 3
MAX_FUNCTIONALS = 8

Sign = int  # -1, 0 or +1


class CapExceeded(ValueError):
    """The input is too large for exhaustive face enumeration."""


@dataclass(frozen=True)
class Face:
    signs: tuple[Sign, ...]
    dim: int
    bounded: bool
    witness: tuple[Fraction, ...]
    inside: bool


def _sign_atom(f: LinTerm, sign: Sign) -> Atom:
    if sign < 0:
        return make_atom(f, Rel.LT)
    if sign > 0:
        return make_atom(-f, Rel.LT)
    return make_atom(f, Rel.EQ)


def arrangement_functionals(s: DefSet) -> list[LinTerm]:
    n = s.dim
    own = {lin_normalize(a.term)[0].with_dim(n) for a in s.atoms() if not a.term.is_constant}
    return sorted(own, key=LinTerm.sort_key)


def face_functionals(s: DefSet) -> list[LinTerm]:
    """The functionals whose signs index the faces, coordinates included."""
    n = s.dim
    extra = {LinTerm.var(i, n) for i in range(n)}
    return sorted(set(arrangement_functionals(s)) | extra, key=LinTerm.sort_key)


def face_is_bounded(conj: Sequence[Atom], n: int) -> bool:
    """Boundedness by projecting the face onto each coordinate axis."""
    return all(coordinate_range(conj, i, n) == (True, True) for i in range(n))


def face_is_bounded_symbolic(conj: Sequence[Atom], n: int) -> bool:
    """Decide ``EX B. not EX x. (face(x) & not (-B < x_i < B for all i))`` by QE.

    Exact but far slower than :func:`face_is_bounded`; kept as a cross-check.
    """
    if n == 0:
        return True
    width = n + 1
    b = LinTerm.var(n, width)
    box = []
    for i in range(n):
        x = LinTerm.var(i, width)
        box.append(make_atom(-b - x, Rel.LT))
        box.append(make_atom(x - b, Rel.LT))
    face = tuple(Atom(a.term.with_dim(width), a.rel) for a in conj)
    body: object = And(face + (Not(And(tuple(box))),))
    for i in range(n - 1, -1, -1):
        body = Exists(i, body)
    sentence = Exists(n, Not(body))
    return bool(qe(sentence, dim=0).disjuncts)


def arrangement_faces(s: DefSet, max_dim: int = MAX_DIM,
                      max_functionals: int = MAX_FUNCTIONALS) -> list[Face]:
    """All nonempty faces of the arrangement, with membership in ``s`` marked."""
    n = s.dim
    own = arrangement_functionals(s)
    if n > max_dim:
        raise CapExceeded(f"ambient dimension {n} exceeds {max_dim}")
    if len(own) > max_functionals:
        raise CapExceeded(f"{len(own)} functionals exceed {max_functionals}")
    funcs = face_functionals(s)

    faces: list[Face] = []

    def walk(k: int, signs: tuple[Sign, ...], conj: tuple[Atom, ...]) -> None:
        if k == len(funcs):
            pt = find_point(conj, n)
            assert pt is not None
            zero = [[f.coeff(i) for i in range(n)] for f, sg in zip(funcs, signs) if sg == 0]
            faces.append(Face(signs, n - rank(zero), face_is_bounded(conj, n), pt, s.contains(pt)))
            return
        for sg in (-1, 0, 1):
            nxt = simplify_conj(conj + (_sign_atom(funcs[k], sg),))
            if nxt is not None and not conj_is_empty(nxt):
                walk(k + 1, signs + (sg,), nxt)

    walk(0, (), ())
    return faces


def sign_vector(funcs: Sequence[LinTerm], point: Sequence[Fraction]) -> tuple[Sign, ...]:
    out = []
    for f in funcs:
        v = f.at(point)
        out.append((v > 0) - (v < 0))
    return tuple(out)


def oracle_chi(s: DefSet, max_dim: int = MAX_DIM,
               max_functionals: int = MAX_FUNCTIONALS) -> tuple[int, int]:
    """(chi_g, chi_b) of ``s`` from the faces it contains."""
    g = b = 0
    for face in arrangement_faces(s, max_dim, max_functionals):
        if not face.inside:
            continue
        g += (-1) ** face.dim
        if face.bounded:
            b += (-1) ** face.dim
    return g, b
