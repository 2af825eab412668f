"""Machine-readable summaries of a definable set."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from typing import Sequence

from .cell import CellKind, Decomposition, decompose
from .euler import chi_b, chi_g, g_class
from .formula import DefSet, is_quantifier_free, parse, to_dnf
from .qe import qe


def set_from_text(text: str, names: Sequence[str]) -> DefSet:
    """Parse a formula and return its set, eliminating quantifiers if present."""
    f = parse(text, names)
    if is_quantifier_free(f):
        return to_dnf(f, len(names))
    return qe(f, len(names))


@dataclass(frozen=True)
class Report:
    input: str
    vars: list[str]
    cell_count: int
    kinds: dict[str, int]
    dim: int | None  # largest cell dimension, None for the empty set
    chi_g: int
    chi_b: int
    gclass: str
    bounded: bool
    timing: float

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["class"] = doc.pop("gclass")
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> Report:
        doc = dict(doc)
        doc["gclass"] = doc.pop("class")
        return cls(**doc)

    def text(self) -> str:
        kinds = ", ".join(f"{k} {v}" for k, v in sorted(self.kinds.items()))
        lines = [
            f"input:   {self.input}",
            f"vars:    {', '.join(self.vars)}",
            f"cells:   {self.cell_count} ({kinds})",
            f"dim:     {'empty' if self.dim is None else self.dim}",
            f"chi_g:   {self.chi_g}",
            f"chi_b:   {self.chi_b}",
            f"class:   {self.gclass}",
            f"bounded: {'yes' if self.bounded else 'no'}",
        ]
        return "\n".join(lines)


def dumps(doc: dict) -> str:
    """The one JSON rendering used for all output."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)


def make_report(text: str, names: Sequence[str], verify: bool | None = None,
                s: DefSet | None = None) -> tuple[Report, Decomposition]:
    start = time.perf_counter()
    s = set_from_text(text, names) if s is None else s
    d = decompose(s, verify=verify)
    kinds = {k.value: 0 for k in CellKind}
    for c in d:
        kinds[c.kind.value] += 1
    report = Report(
        input=text,
        vars=list(names),
        cell_count=len(d),
        kinds=kinds,
        dim=max((c.dim for c in d), default=None),
        chi_g=chi_g(d),
        chi_b=chi_b(d),
        gclass=str(g_class(d)),
        bounded=all(c.kind is CellKind.GOOD for c in d),
        timing=round(time.perf_counter() - start, 6),
    )
    return report, d
