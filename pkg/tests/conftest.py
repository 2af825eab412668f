from __future__ import annotations

from fractions import Fraction

import pytest

from grothlin.corpus import load_corpus
from grothlin.formula import DefSet, parse, to_dnf


def dnf(text: str, names: str | list[str]) -> DefSet:
    if isinstance(names, str):
        names = [v.strip() for v in names.split(",")]
    return to_dnf(parse(text, names), len(names))


def q(v) -> Fraction:
    return Fraction(v)


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()
