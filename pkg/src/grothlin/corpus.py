"""The bundled formula corpus and the ``.gl`` file format.

A ``.gl`` file is a formula, possibly spread over several lines, preceded
by ``# key: value`` header lines. Recognised keys are ``name``, ``vars``,
``chi_g``, ``chi_b``, ``class`` and ``source``; other comment lines are
ignored.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .euler import GClass
from .formula import DefSet, parse, to_dnf


class CorpusError(ValueError):
    """A corpus file is malformed; the message names the file."""


@dataclass(frozen=True)
class FormulaFile:
    text: str
    headers: dict

    @property
    def vars(self) -> list[str] | None:
        raw = self.headers.get("vars")
        return None if raw is None else split_vars(raw)


def split_vars(raw: str) -> list[str]:
    return [v.strip() for v in raw.split(",") if v.strip()]


def read_formula_text(raw: str) -> FormulaFile:
    headers = {}
    body = []
    for line in raw.splitlines():
        stripped = line.strip()
        if stripped.startswith("#"):
            key, sep, value = stripped[1:].partition(":")
            if sep and key.strip().isidentifier():
                headers[key.strip()] = value.strip()
            continue
        if stripped:
            body.append(stripped)
    return FormulaFile(" ".join(body), headers)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    vars: tuple[str, ...]
    text: str
    chi_g: int
    chi_b: int
    gclass: GClass
    source: str
    path: str

    @property
    def dim(self) -> int:
        return len(self.vars)

    def defset(self) -> DefSet:
        return _defset(self.text, self.vars)


@lru_cache(maxsize=None)
def _defset(text: str, names: tuple[str, ...]) -> DefSet:
    return to_dnf(parse(text, names), len(names))


def load_entry(path: Path | str, raw: str | None = None) -> CorpusEntry:
    path = Path(path)
    try:
        ff = read_formula_text(path.read_text(encoding="utf-8") if raw is None else raw)
        h = ff.headers
        missing = [k for k in ("vars", "chi_g", "chi_b", "class") if k not in h]
        if missing:
            raise ValueError(f"missing header(s) {', '.join(missing)}")
        if not ff.text:
            raise ValueError("no formula")
        entry = CorpusEntry(
            name=h.get("name", path.stem),
            vars=tuple(ff.vars or ()),
            text=ff.text,
            chi_g=int(h["chi_g"]),
            chi_b=int(h["chi_b"]),
            gclass=GClass.parse(h["class"]),
            source=h.get("source", ""),
            path=str(path),
        )
        entry.defset()
    except CorpusError:
        raise
    except (ValueError, OSError) as exc:
        raise CorpusError(f"{path}: {exc}") from exc
    return entry


def corpus_dir() -> Path:
    return Path(str(resources.files("grothlin") / "corpus"))


def load_corpus(directory: Path | str | None = None) -> list[CorpusEntry]:
    """All entries of a corpus directory (the bundled one by default), sorted by name."""
    d = Path(directory) if directory is not None else corpus_dir()
    if not d.is_dir():
        raise CorpusError(f"{d}: not a directory")
    entries = [load_entry(p) for p in sorted(d.glob("*.gl"))]
    return sorted(entries, key=lambda e: e.name)
