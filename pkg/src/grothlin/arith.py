"""Exact rationals and sparse affine functionals over Q^n."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd, lcm
from typing import Iterable, Mapping, Sequence

Rational = Fraction


class DimensionError(ValueError):
    """Raised when a point or operand does not match an ambient dimension."""


def as_rational(value: int | str | Fraction) -> Fraction:
    """Coerce ``value`` to a Fraction; floats are refused to keep arithmetic exact."""
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError(f"refusing inexact value {value!r}")
    return Fraction(value)


def render_rational(q: Fraction) -> str:
    return str(q)


def pick_between(lo: Fraction | None, hi: Fraction | None) -> Fraction:
    """A simple rational strictly inside the open interval (lo, hi).

    ``None`` stands for an infinite end. Integers are preferred when the
    interval holds one; otherwise the midpoint is used.
    """
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return Fraction(ceil(hi) - 1)
    if hi is None:
        return Fraction(floor(lo) + 1)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    first, last = floor(lo) + 1, ceil(hi) - 1
    if first <= last:
        mid = (lo + hi) / 2
        return Fraction(min(max(round(mid), first), last))
    return (lo + hi) / 2


@dataclass(frozen=True)
class LinTerm:
    """The affine functional ``const + sum(c * x_i for i, c in coeffs)``.

    ``coeffs`` is kept sorted by variable index with no zero entries. ``dim``
    records the ambient dimension; it is metadata and does not take part in
    equality or hashing.
    """

    coeffs: tuple[tuple[int, Fraction], ...] = ()
    const: Fraction = Fraction(0)
    dim: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        need = self.coeffs[-1][0] + 1 if self.coeffs else 0
        if self.dim < need:
            object.__setattr__(self, "dim", need)

    def __hash__(self) -> int:
        # terms are hashed constantly by the simplifier; Fraction hashing is slow
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.coeffs, self.const))
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def make(cls, coeffs: Mapping[int, Fraction | int] | Iterable[tuple[int, Fraction | int]] = (),
             const: Fraction | int | str = 0, dim: int = 0) -> LinTerm:
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict[int, Fraction] = {}
        for i, c in items:
            if i < 0:
                raise ValueError(f"negative variable index {i}")
            acc[i] = acc.get(i, Fraction(0)) + as_rational(c)
        clean = tuple(sorted((i, c) for i, c in acc.items() if c != 0))
        return cls(clean, as_rational(const), dim)

    @classmethod
    def var(cls, i: int, dim: int = 0) -> LinTerm:
        return cls(((i, Fraction(1)),), Fraction(0), dim)

    @classmethod
    def constant(cls, c: Fraction | int, dim: int = 0) -> LinTerm:
        return cls((), as_rational(c), dim)

    # -- inspection ---------------------------------------------------------

    def coeff(self, i: int) -> Fraction:
        for j, c in self.coeffs:
            if j == i:
                return c
        return Fraction(0)

    @property
    def variables(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.coeffs)

    @property
    def is_constant(self) -> bool:
        return not self.coeffs

    @property
    def support_dim(self) -> int:
        return self.coeffs[-1][0] + 1 if self.coeffs else 0

    def sort_key(self) -> tuple:
        return (tuple((i, c) for i, c in self.coeffs), self.const)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: LinTerm) -> LinTerm:
        acc = dict(self.coeffs)
        for i, c in other.coeffs:
            acc[i] = acc.get(i, Fraction(0)) + c
        return LinTerm(tuple(sorted((i, c) for i, c in acc.items() if c != 0)),
                       self.const + other.const, max(self.dim, other.dim))

    def __neg__(self) -> LinTerm:
        return LinTerm(tuple((i, -c) for i, c in self.coeffs), -self.const, self.dim)

    def __sub__(self, other: LinTerm) -> LinTerm:
        return self + (-other)

    def scale(self, k: Fraction | int) -> LinTerm:
        k = as_rational(k)
        if k == 0:
            return LinTerm((), Fraction(0), self.dim)
        return LinTerm(tuple((i, c * k) for i, c in self.coeffs), self.const * k, self.dim)

    def __mul__(self, k: Fraction | int) -> LinTerm:
        return self.scale(k)

    __rmul__ = __mul__

    def shift(self, c: Fraction | int) -> LinTerm:
        return LinTerm(self.coeffs, self.const + as_rational(c), self.dim)

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, point: Sequence[Fraction | int]) -> Fraction:
        """Exact value at ``point``, whose length must equal ``dim``."""
        if len(point) != self.dim:
            raise DimensionError(f"point has {len(point)} coordinates, term lives in Q^{self.dim}")
        return self.at(point)

    def at(self, point: Sequence[Fraction | int]) -> Fraction:
        """Exact value at any point long enough to cover the support."""
        if len(point) < self.support_dim:
            raise DimensionError(f"point has {len(point)} coordinates, term uses x{self.support_dim - 1}")
        total = self.const
        for i, c in self.coeffs:
            total += c * point[i]
        return Fraction(total)

    # -- rewriting ----------------------------------------------------------

    def substitute(self, i: int, expr: LinTerm) -> LinTerm:
        """Replace variable ``i`` by ``expr``."""
        c = self.coeff(i)
        if c == 0:
            return self
        rest = LinTerm(tuple((j, d) for j, d in self.coeffs if j != i), self.const, self.dim)
        return rest + expr.scale(c)

    def fix(self, values: Mapping[int, Fraction]) -> LinTerm:
        """Substitute constants for the variables named in ``values``."""
        const = self.const
        kept = []
        for i, c in self.coeffs:
            if i in values:
                const += c * values[i]
            else:
                kept.append((i, c))
        return LinTerm(tuple(kept), const, self.dim)

    def reindex(self, mapping: Mapping[int, int], dim: int) -> LinTerm:
        """Rename variables through ``mapping``; every used index must be mapped."""
        acc: dict[int, Fraction] = {}
        for i, c in self.coeffs:
            j = mapping[i]
            acc[j] = acc.get(j, Fraction(0)) + c
        return LinTerm(tuple(sorted((j, c) for j, c in acc.items() if c != 0)), self.const, dim)

    def with_dim(self, dim: int) -> LinTerm:
        if dim < self.support_dim:
            raise DimensionError(f"term uses x{self.support_dim - 1}, cannot live in Q^{dim}")
        return LinTerm(self.coeffs, self.const, dim)

    def solve_for(self, i: int) -> LinTerm:
        """The expression ``e`` with ``self = 0  <=>  x_i = e``."""
        c = self.coeff(i)
        if c == 0:
            raise ValueError(f"x{i} does not occur")
        rest = LinTerm(tuple((j, d) for j, d in self.coeffs if j != i), self.const, self.dim)
        return rest.scale(-1 / c)

    def primitive(self) -> LinTerm:
        """Positive multiple with coprime integer coefficients (constant included)."""
        values = [c for _, c in self.coeffs] + [self.const]
        den = lcm(*(v.denominator for v in values))
        ints = [v.numerator * (den // v.denominator) for v in values]
        g = gcd(*ints)
        if g == 0 or (den == 1 and g == 1):
            return self
        coeffs = tuple((i, Fraction(k // g)) for (i, _), k in zip(self.coeffs, ints))
        return LinTerm(coeffs, Fraction(ints[-1] // g), self.dim)

    def var_part(self) -> LinTerm:
        return LinTerm(self.coeffs, Fraction(0), self.dim)

    def render(self, names: Sequence[str] | None = None) -> str:
        parts: list[str] = []
        for i, c in self.coeffs:
            name = names[i] if names is not None and i < len(names) else f"x{i}"
            mag = abs(c)
            body = name if mag == 1 else f"{mag}*{name}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        if self.const != 0 or not parts:
            if not parts:
                parts.append(str(self.const))
            else:
                parts.append(f"+ {self.const}" if self.const > 0 else f"- {-self.const}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()


def lin_eval(t: LinTerm, point: Sequence[Fraction | int]) -> Fraction:
    return t.evaluate(point)


def lin_normalize(t: LinTerm) -> tuple[LinTerm, bool]:
    """Canonical multiple of ``t``: coprime integers, positive lowest-index coefficient.

    Returns the normalized term and whether the sign was flipped.
    """
    if t.is_constant:
        raise ValueError("cannot normalize a functional with no variables")
    p = t.primitive()
    if p.coeffs[0][1] < 0:
        return -p, True
    return p, False


def rank(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank of a rational matrix by exact Gaussian elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for col in range(ncols):
        pivot = next((k for k in range(r, len(m)) if m[k][col] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        for k in range(len(m)):
            if k != r and m[k][col] != 0:
                f = m[k][col] / m[r][col]
                m[k] = [a - f * b for a, b in zip(m[k], m[r])]
        r += 1
        if r == len(m):
            break
    return r
