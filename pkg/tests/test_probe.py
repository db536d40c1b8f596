"""Test per la sonda di riconoscibilità."""

import pytest

from src.classes import BINARY_TREES, children_map, corpus, strings
from src.encodings import sibling_order_transduction
from src.errors import MalformedInput
from src.probe import recognizability_probe
from src.transduction import Copy, Transduction, identity, string_duplication


class TestProbe:
    def test_identity(self):
        report = recognizability_probe(identity(BINARY_TREES), n=4, sentence="(exists x (exists y (parent x y)))")
        assert len(report.rows) == len(corpus(BINARY_TREES, 4))
        assert report.table() == [r.size >= 2 for r in report.rows]
        assert report.agrees
        assert report.pulled_back is not None

    def test_through_colours(self):
        report = recognizability_probe(sibling_order_transduction(), n=4,
                                       sentence="(exists x (exists y (before x y)))")
        assert report.agrees
        for row, A in zip(report.rows, corpus(BINARY_TREES, 4)):
            assert row.value == any(len(kids) == 2 for kids in children_map(A).values())

    def test_copy_has_no_pullback(self):
        report = recognizability_probe(string_duplication(2), n=3, sentence="(exists x (a1 x))")
        assert report.note is not None
        assert all(r.direct is None for r in report.rows)
        assert report.agrees

    def test_callable_language(self):
        report = recognizability_probe(identity(strings(2)), lambda A: A.universe % 2 == 0, n=3)
        assert report.sentence is None
        assert report.table() == [r.size % 2 == 0 for r in report.rows]

    def test_json(self):
        doc = recognizability_probe(identity(BINARY_TREES), n=3, sentence="(exists x (= x x))").to_json()
        assert doc["checked"] == doc["accepted"]
        assert doc["disagreements"] == []

    def test_needs_language(self):
        with pytest.raises(MalformedInput):
            recognizability_probe(identity(BINARY_TREES), n=3)

    def test_needs_source(self):
        with pytest.raises(MalformedInput):
            recognizability_probe(Transduction(None, None, (Copy(2),)), lambda A: True)
