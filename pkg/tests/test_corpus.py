from __future__ import annotations

import pytest

from grothlin.corpus import CorpusError, load_corpus, load_entry, read_formula_text
from grothlin.euler import chi_b, chi_g, g_class, psi_b, psi_g
from grothlin.oracle import oracle_chi


def test_corpus_size_and_spread(corpus):
    assert len(corpus) >= 20
    assert {e.dim for e in corpus} == {1, 2, 3}
    assert any(e.chi_b == e.chi_g for e in corpus)      # bounded examples
    assert any(e.chi_b != e.chi_g for e in corpus)      # unbounded examples
    assert len({e.name for e in corpus}) == len(corpus)


def test_every_entry_has_provenance(corpus):
    for e in corpus:
        assert e.source.endswith("cross-checked by the arrangement oracle"), e.name


def test_recorded_class_matches_characteristics(corpus):
    for e in corpus:
        assert psi_g(e.gclass) == e.chi_g and psi_b(e.gclass) == e.chi_b, e.name


def test_recorded_values_match_decomposer(corpus):
    for e in corpus:
        s = e.defset()
        assert (chi_g(s), chi_b(s), g_class(s)) == (e.chi_g, e.chi_b, e.gclass), e.name


def test_recorded_values_match_oracle(corpus):
    for e in corpus:
        assert oracle_chi(e.defset()) == (e.chi_g, e.chi_b), e.name


def test_read_formula_text_headers():
    ff = read_formula_text("# vars: a, b\n# just a comment\n0 < a &\n  a < b\n")
    assert ff.vars == ["a", "b"] and ff.text == "0 < a & a < b"
    assert read_formula_text("x < 1").vars is None


@pytest.mark.parametrize("raw,needle", [
    ("# vars: x\n# chi_g: -1\n# chi_b: -1\n0 < x\n", "class"),
    ("# vars: x\n# chi_g: -1\n# chi_b: -1\n# class: -1\n", "no formula"),
    ("# vars: x\n# chi_g: -1\n# chi_b: -1\n# class: -1\n0 < < x\n", "bad.gl"),
    ("# vars: x\n# chi_g: one\n# chi_b: -1\n# class: -1\n0 < x\n", "bad.gl"),
])
def test_malformed_entries_name_the_file(raw, needle):
    with pytest.raises(CorpusError) as e:
        load_entry("somewhere/bad.gl", raw)
    assert needle in str(e.value) and "bad.gl" in str(e.value)


def test_load_corpus_missing_dir(tmp_path):
    with pytest.raises(CorpusError):
        load_corpus(tmp_path / "nope")
