"""First-order formulas over (<, +, 0) with rational scalars.

Atoms come in two shapes only, ``t < 0`` and ``t = 0``; the parser desugars
every other comparison and ``ALL`` into these plus the connectives.
Bound variables are numbered after the free ones: a binder at nesting depth
``d`` (counting enclosing binders) gets index ``len(var_order) + d``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Sequence, Union

from .arith import DimensionError, LinTerm, lin_normalize


class Rel(enum.Enum):
    LT = "<"
    EQ = "="


@dataclass(frozen=True)
class Atom:
    term: LinTerm
    rel: Rel

    def truth(self) -> bool | None:
        """Truth value of a variable-free atom, ``None`` otherwise."""
        if not self.term.is_constant:
            return None
        c = self.term.const
        return c < 0 if self.rel is Rel.LT else c == 0

    def holds(self, point: Sequence[Fraction]) -> bool:
        v = self.term.at(point)
        return v < 0 if self.rel is Rel.LT else v == 0

    def sort_key(self) -> tuple:
        return (self.rel is Rel.LT, self.term.sort_key())


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


@dataclass(frozen=True)
class Not:
    arg: object


@dataclass(frozen=True)
class Exists:
    var: int
    body: object
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


TRUE = TrueF()
FALSE = FalseF()

Formula = Union[Atom, And, Or, Not, Exists, TrueF, FalseF]
Conj = tuple  # tuple[Atom, ...], sorted and duplicate free


class QuantifierError(ValueError):
    """A quantifier-free formula was required."""


def make_atom(term: LinTerm, rel: Rel) -> Atom:
    """Build an atom in canonical form.

    Equalities are scaled to the normalized functional. Strict atoms only
    get a positive rescaling, so ``t < 0`` keeps its orientation. Constant
    terms are kept verbatim.
    """
    if term.is_constant:
        return Atom(term, rel)
    if rel is Rel.EQ:
        return Atom(lin_normalize(term)[0], rel)
    return Atom(term.primitive(), rel)


def lt(term: LinTerm) -> Atom:
    return make_atom(term, Rel.LT)


def eq(term: LinTerm) -> Atom:
    return make_atom(term, Rel.EQ)


def conj_of(*args: Formula) -> Formula:
    flat = [a for a in args if not isinstance(a, TrueF)]
    if any(isinstance(a, FalseF) for a in flat):
        return FALSE
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj_of(*args: Formula) -> Formula:
    flat = [a for a in args if not isinstance(a, FalseF)]
    if any(isinstance(a, TrueF) for a in flat):
        return TRUE
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


# ---------------------------------------------------------------------------
# parsing

class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.text = text


class UnknownIdentifierError(ValueError):
    def __init__(self, name: str, pos: int):
        super().__init__(f"unknown identifier {name!r} at position {pos}")
        self.name = name
        self.pos = pos


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><=|>=|!=|[<>=!&|().+\-*/])
""", re.VERBOSE)

_KEYWORDS = {"EX", "ALL", "true", "false"}


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            val = m.group()
            if kind == "ident" and val in _KEYWORDS:
                kind = "kw"
            out.append((kind, val, pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, var_order: Sequence[str]):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.nfree = len(var_order)
        self.scopes: list[dict[str, int]] = [{v: k for k, v in enumerate(var_order)}]
        if len(self.scopes[0]) != len(var_order):
            raise ValueError(f"duplicate variable names in {list(var_order)}")
        self.depth = 0

    # token helpers
    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def accept(self, val: str) -> bool:
        if self.peek()[1] == val and self.peek()[0] in ("op", "kw"):
            self.i += 1
            return True
        return False

    def expect(self, val: str) -> None:
        kind, v, pos = self.peek()
        if v != val or kind not in ("op", "kw"):
            raise FormulaSyntaxError(f"expected {val!r}, found {v or 'end of input'!r}", pos, self.text)
        self.i += 1

    def fail(self, what: str):
        kind, v, pos = self.peek()
        raise FormulaSyntaxError(f"expected {what}, found {v or 'end of input'!r}", pos, self.text)

    # grammar
    def parse(self) -> Formula:
        f = self.formula()
        if self.peek()[0] != "eof":
            self.fail("end of input")
        return f

    def formula(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "kw" and val in ("EX", "ALL"):
            return self.quantified()
        return self.disj()

    def quantified(self) -> Formula:
        _, q, _ = self.take()
        kind, name, pos = self.peek()
        if kind != "ident":
            self.fail("a variable name")
        self.take()
        self.expect(".")
        idx = self.nfree + self.depth
        self.scopes.append({name: idx})
        self.depth += 1
        try:
            body = self.formula()
        finally:
            self.scopes.pop()
            self.depth -= 1
        if q == "EX":
            return Exists(idx, body, name)
        return Not(Exists(idx, Not(body), name))

    def disj(self) -> Formula:
        args = [self.conj()]
        while self.accept("|"):
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self) -> Formula:
        args = [self.unary()]
        while self.accept("&"):
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if self.accept("!"):
            return Not(self.unary())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        if kind == "kw" and val in ("EX", "ALL"):
            return self.quantified()
        if kind == "kw" and val == "true":
            self.take()
            return TRUE
        if kind == "kw" and val == "false":
            self.take()
            return FALSE
        return self.atom()

    def atom(self) -> Formula:
        left = self.term()
        kind, rel, pos = self.peek()
        if rel not in ("<", "<=", "=", "!=", ">", ">=") or kind != "op":
            self.fail("a comparison")
        self.take()
        right = self.term()
        d = left - right
        if rel == "<":
            return make_atom(d, Rel.LT)
        if rel == ">":
            return make_atom(-d, Rel.LT)
        if rel == "=":
            return make_atom(d, Rel.EQ)
        if rel == "<=":
            return Or((make_atom(d, Rel.LT), make_atom(d, Rel.EQ)))
        if rel == ">=":
            return Or((make_atom(-d, Rel.LT), make_atom(-d, Rel.EQ)))
        return Or((make_atom(d, Rel.LT), make_atom(-d, Rel.LT)))

    def term(self) -> LinTerm:
        t = self.signed()
        while True:
            if self.accept("+"):
                t = t + self.signed()
            elif self.accept("-"):
                t = t - self.signed()
            else:
                return t

    def signed(self) -> LinTerm:
        if self.accept("-"):
            return -self.signed()
        return self.primary()

    def primary(self) -> LinTerm:
        kind, val, pos = self.peek()
        dim = self.nfree + self.depth
        if kind == "num":
            q = self.rational()
            if self.accept("*"):
                return LinTerm.var(self.ident(), dim).scale(q)
            return LinTerm.constant(q, dim)
        if kind == "ident":
            return LinTerm.var(self.ident(), dim)
        self.fail("a term")

    def rational(self) -> Fraction:
        _, num, pos = self.take()
        if self.accept("/"):
            kind, den, dpos = self.peek()
            if kind != "num":
                raise FormulaSyntaxError("malformed rational literal: denominator must be a positive integer",
                                         dpos, self.text)
            self.take()
            if int(den) == 0:
                raise FormulaSyntaxError("malformed rational literal: zero denominator", dpos, self.text)
            return Fraction(int(num), int(den))
        return Fraction(int(num))

    def ident(self) -> int:
        kind, name, pos = self.peek()
        if kind != "ident":
            self.fail("a variable name")
        self.take()
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise UnknownIdentifierError(name, pos)


def parse(text: str, var_order: Sequence[str]) -> Formula:
    """Parse ``text`` with free variables resolved by position in ``var_order``."""
    return _Parser(text, list(var_order)).parse()


def parse_term(text: str, var_order: Sequence[str]) -> LinTerm:
    """Parse a single affine term such as ``x + 1/2*y - 3``."""
    p = _Parser(text, list(var_order))
    t = p.term()
    if p.peek()[0] != "eof":
        p.fail("end of term")
    return t.with_dim(len(var_order))


# ---------------------------------------------------------------------------
# printing

def _side(coeffs: list[tuple[str, Fraction]], const: Fraction) -> str:
    parts = [name if c == 1 else f"{c}*{name}" for name, c in coeffs]
    if const != 0:
        parts.append(str(const))
    return " + ".join(parts) if parts else "0"


def atom_text(a: Atom, names: Sequence[str]) -> str:
    t = a.term
    pos = [(names[i], c) for i, c in t.coeffs if c > 0]
    neg = [(names[i], -c) for i, c in t.coeffs if c < 0]
    lhs = _side(pos, t.const if t.const > 0 else Fraction(0))
    rhs = _side(neg, -t.const if t.const < 0 else Fraction(0))
    return f"{lhs} {a.rel.value} {rhs}"


def to_text(f: Formula, var_order: Sequence[str]) -> str:
    """Render ``f`` in the surface syntax accepted by :func:`parse`."""
    return _Printer(list(var_order)).show(f)


class _Printer:
    def __init__(self, names: list[str]):
        self.names = names

    def fresh(self, f: Exists) -> str:
        used = set(self.names)
        if f.name and f.name not in used and f.name not in _KEYWORDS:
            return f.name
        k = f.var
        while f"v{k}" in used:
            k += 1
        return f"v{k}"

    def show(self, f: Formula) -> str:
        if isinstance(f, Atom):
            return atom_text(f, self.names)
        if isinstance(f, TrueF):
            return "true"
        if isinstance(f, FalseF):
            return "false"
        if isinstance(f, Not):
            inner = self.show(f.arg)
            if isinstance(f.arg, (Atom, TrueF, FalseF, Not)):
                return "!" + inner
            return f"!({inner})"
        if isinstance(f, And):
            return " & ".join(self.wrap(a, (And, Or, Exists)) for a in f.args)
        if isinstance(f, Or):
            return " | ".join(self.wrap(a, (Or, Exists)) for a in f.args)
        if isinstance(f, Exists):
            name = self.fresh(f)
            saved = self.names
            names = list(saved) + [f"v{k}" for k in range(len(saved), f.var + 1)]
            names[f.var] = name
            self.names = names
            try:
                return f"EX {name}. {self.show(f.body)}"
            finally:
                self.names = saved
        raise TypeError(f"not a formula: {f!r}")

    def wrap(self, f: Formula, kinds: tuple) -> str:
        s = self.show(f)
        return f"({s})" if isinstance(f, kinds) else s


# ---------------------------------------------------------------------------
# normal forms

def negated_atoms(a: Atom) -> tuple[Atom, Atom]:
    """The two atoms whose disjunction is the negation of ``a``."""
    t = a.term
    if a.rel is Rel.LT:
        return make_atom(-t, Rel.LT), make_atom(t, Rel.EQ)
    return make_atom(t, Rel.LT), make_atom(-t, Rel.LT)


def nnf(f: Formula) -> Formula:
    """Negation normal form of a quantifier-free formula; no ``Not`` survives."""
    if isinstance(f, (Atom, TrueF, FalseF)):
        return f
    if isinstance(f, And):
        return And(tuple(nnf(a) for a in f.args))
    if isinstance(f, Or):
        return Or(tuple(nnf(a) for a in f.args))
    if isinstance(f, Not):
        return negate_nnf(f.arg)
    if isinstance(f, Exists):
        raise QuantifierError("quantifier encountered in negation normal form")
    raise TypeError(f"not a formula: {f!r}")


def negate_nnf(f: Formula) -> Formula:
    """Negation normal form of ``not f``."""
    if isinstance(f, Atom):
        return Or(negated_atoms(f))
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, And):
        return Or(tuple(negate_nnf(a) for a in f.args))
    if isinstance(f, Or):
        return And(tuple(negate_nnf(a) for a in f.args))
    if isinstance(f, Not):
        return nnf(f.arg)
    if isinstance(f, Exists):
        raise QuantifierError("quantifier encountered in negation normal form")
    raise TypeError(f"not a formula: {f!r}")


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Exists):
        return False
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    return True


def free_dim(f: Formula) -> int:
    """One more than the largest free variable index (0 for sentences)."""
    def walk(g: Formula, bound: frozenset) -> int:
        if isinstance(g, Atom):
            return max((i + 1 for i in g.term.variables if i not in bound), default=0)
        if isinstance(g, (And, Or)):
            return max((walk(a, bound) for a in g.args), default=0)
        if isinstance(g, Not):
            return walk(g.arg, bound)
        if isinstance(g, Exists):
            return walk(g.body, bound | {g.var})
        return 0
    return walk(f, frozenset())


def holds(f: Formula, point: Sequence[Fraction]) -> bool:
    """Truth of a quantifier-free formula at ``point``."""
    if isinstance(f, Atom):
        return f.holds(point)
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, And):
        return all(holds(a, point) for a in f.args)
    if isinstance(f, Or):
        return any(holds(a, point) for a in f.args)
    if isinstance(f, Not):
        return not holds(f.arg, point)
    raise QuantifierError("cannot evaluate a quantifier pointwise")


@lru_cache(maxsize=1 << 16)
def _split_term(t: LinTerm) -> tuple[LinTerm, Fraction]:
    """Write ``t = lam * (g - b)`` with ``g`` primitive on variables and ``lam > 0``."""
    g = t.var_part().primitive()
    lam = t.coeffs[0][1] / g.coeffs[0][1]
    return g, -t.const / lam


@lru_cache(maxsize=1 << 16)
def _normalized(g: LinTerm) -> tuple[LinTerm, bool]:
    return lin_normalize(g)


@lru_cache(maxsize=1 << 16)
def _rebuilt(g: LinTerm, b: Fraction, rel: Rel) -> tuple[tuple, Atom]:
    a = make_atom(g.shift(-b), rel)
    return a.sort_key(), a


def simplify_conj(atoms: Iterable[Atom]) -> Conj | None:
    """Canonical conjunction, or ``None`` when it is trivially unsatisfiable.

    Constant atoms are decided, duplicates merged, and among strict atoms
    with parallel functionals only the tightest is kept. Equalities sharing
    a functional are checked for agreement.
    """
    return _simplify_conj(tuple(atoms))


@lru_cache(maxsize=1 << 16)
def _simplify_conj(atoms: Conj) -> Conj | None:
    strict: dict[LinTerm, Fraction] = {}
    equal: dict[LinTerm, Fraction] = {}
    for a in atoms:
        t = a.term
        if t.is_constant:
            if not a.truth():
                return None
            continue
        g, b = _split_term(t)
        if a.rel is Rel.LT:
            if g not in strict or b < strict[g]:
                strict[g] = b
        else:
            gn, flip = _normalized(g)
            bn = -b if flip else b
            if gn in equal and equal[gn] != bn:
                return None
            equal[gn] = bn
    out = {}
    for g, b in equal.items():
        k, a = _rebuilt(g, b, Rel.EQ)
        out[k] = a
    for g, b in strict.items():
        gn, flip = _normalized(g)
        if gn in equal:
            v = -equal[gn] if flip else equal[gn]
            if not v < b:
                return None
            continue
        k, a = _rebuilt(g, b, Rel.LT)
        out[k] = a
    return tuple(out[k] for k in sorted(out))


def dnf_conjs(f: Formula) -> list[Conj]:
    """Distribute an NNF formula into conjunctions without semantic pruning."""
    if isinstance(f, Atom):
        c = simplify_conj([f])
        return [] if c is None else [c]
    if isinstance(f, TrueF):
        return [()]
    if isinstance(f, FalseF):
        return []
    if isinstance(f, Or):
        out: list[Conj] = []
        for a in f.args:
            out.extend(dnf_conjs(a))
        return _dedupe(out)
    if isinstance(f, And):
        acc: list[Conj] = [()]
        for a in f.args:
            parts = dnf_conjs(a)
            nxt = []
            for c, d in cartesian(acc, parts):
                m = simplify_conj(c + d)
                if m is not None:
                    nxt.append(m)
            acc = _dedupe(nxt)
            if not acc:
                break
        return acc
    if isinstance(f, Not):
        return dnf_conjs(nnf(f))
    raise QuantifierError("quantifier encountered in DNF conversion")


def _dedupe(conjs: Iterable[Conj]) -> list[Conj]:
    seen = set()
    out = []
    for c in conjs:
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def drop_subsumed(conjs: Iterable[Conj]) -> list[Conj]:
    """Remove duplicates and every conjunction that is a superset of another."""
    uniq = sorted(_dedupe(conjs), key=lambda c: (len(c), [a.sort_key() for a in c]))
    kept: list[Conj] = []
    sets: list[frozenset] = []
    for c in uniq:
        s = frozenset(c)
        if any(k <= s for k in sets):
            continue
        kept.append(c)
        sets.append(s)
    return sorted(kept, key=lambda c: [a.sort_key() for a in c])


# ---------------------------------------------------------------------------
# definable sets

@dataclass(frozen=True)
class DefSet:
    """A subset of Q^dim given by a quantifier-free DNF.

    Sets produced by :func:`to_dnf` and the ``qe`` module keep only
    satisfiable, duplicate-free, non-subsumed disjuncts. The raw constructor
    does not check this.
    """

    dim: int
    disjuncts: tuple[Conj, ...]

    def __post_init__(self) -> None:
        for c in self.disjuncts:
            for a in c:
                if a.term.support_dim > self.dim:
                    raise DimensionError(f"atom uses x{a.term.support_dim - 1} in a subset of Q^{self.dim}")

    @classmethod
    def universe(cls, dim: int) -> DefSet:
        return cls(dim, ((),))

    @classmethod
    def empty(cls, dim: int) -> DefSet:
        return cls(dim, ())

    @classmethod
    def from_atoms(cls, dim: int, atoms: Iterable[Atom]) -> DefSet:
        c = simplify_conj(atoms)
        return cls(dim, () if c is None else (c,))

    @property
    def is_syntactically_empty(self) -> bool:
        return not self.disjuncts

    def contains(self, point: Sequence[Fraction]) -> bool:
        if len(point) != self.dim:
            raise DimensionError(f"point has {len(point)} coordinates, set lives in Q^{self.dim}")
        return any(all(a.holds(point) for a in c) for c in self.disjuncts)

    def atoms(self) -> set[Atom]:
        return {a for c in self.disjuncts for a in c}

    def functionals(self) -> list[LinTerm]:
        """Distinct normalized non-constant functionals of the atoms."""
        out = {lin_normalize(a.term)[0].with_dim(self.dim)
               for a in self.atoms() if not a.term.is_constant}
        return sorted(out, key=LinTerm.sort_key)

    def to_formula(self) -> Formula:
        return disj_of(*(conj_of(*c) for c in self.disjuncts))

    def text(self, var_order: Sequence[str]) -> str:
        return to_text(self.to_formula(), var_order)


def to_dnf(f: Formula, dim: int | None = None) -> DefSet:
    """Quantifier-free ``f`` as a pruned DNF."""
    from .qe import finish

    if not is_quantifier_free(f):
        raise QuantifierError("to_dnf needs a quantifier-free formula")
    n = free_dim(f) if dim is None else dim
    return finish(n, dnf_conjs(nnf(f)))
