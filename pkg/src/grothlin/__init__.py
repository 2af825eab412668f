"""Euler characteristics and Grothendieck classes of semilinear sets over Q."""
from __future__ import annotations

from .arith import DimensionError, LinTerm, Rational, lin_eval, lin_normalize
from .cell import Cell, CellKind, Decomposition, classify, decompose, is_bounded, refine
from .euler import (
    GClass, T, bd_check, chi_b, chi_g, class_add, class_mul, class_neg, g_class, psi_b, psi_g,
)
from .formula import (
    DefSet, FormulaSyntaxError, UnknownIdentifierError, parse, to_dnf, to_text,
)
from .oracle import CapExceeded, arrangement_faces, oracle_chi
from .plmap import PLMap, apply, certify_bijection, graph, image, is_injective_on
from .qe import (
    complement, difference, entails, equivalent, intersection, is_empty, product, qe, union,
)

__all__ = [
    "Cell", "CellKind", "CapExceeded", "Decomposition", "DefSet", "DimensionError",
    "FormulaSyntaxError", "GClass", "LinTerm", "PLMap", "Rational", "T",
    "UnknownIdentifierError", "apply", "arrangement_faces", "bd_check", "certify_bijection",
    "chi_b", "chi_g", "class_add", "class_mul", "class_neg", "classify", "complement",
    "decompose", "difference", "entails", "equivalent", "g_class", "graph", "image",
    "intersection", "is_bounded", "is_empty", "is_injective_on", "lin_eval", "lin_normalize",
    "oracle_chi", "parse", "product", "psi_b", "psi_g", "qe", "refine", "to_dnf", "to_text",
    "union",
]
