"""Test per trasduzioni, origini, composizione e pullback."""

from collections import Counter

import pytest

from src.classes import GRAPHS_EDGE, TREES, corpus, make, positions, string_structure, strings, word_of
from src.errors import ClassMismatch, MalformedInput, MSOError, VocabularyMismatch
from src.logic import Language, evaluate, parse
from src.structures import Structure, Vocabulary
from src.transduction import (
    Colour,
    Copy,
    Filter,
    Transduction,
    apply,
    check_encoding,
    compose,
    from_json,
    identity,
    identity_interpretation,
    is_deterministic,
    language_compose,
    pullback,
    string_duplication,
)


def outputs(t, A, dedup="origin"):
    return [(triple.output.dumps(), triple.origin) for triple in apply(t, A, dedup=dedup)]


class TestApply:
    def test_identity(self, path3):
        triples = apply(identity(GRAPHS_EDGE), path3)
        assert len(triples) == 1
        out = triples[0]
        assert out.source == path3
        assert sorted(out.origin) == [0, 1, 2]
        assert out.output.relabel(list(out.origin)) == path3

    def test_duplication_origins(self):
        A = string_structure([0, 1], 2)
        (triple,) = apply(string_duplication(2), A)
        order = positions(triple.output)
        assert word_of(triple.output) == [0, 1, 0, 1]
        assert [triple.origin[p] for p in order] == [0, 1, 0, 1]

    def test_colour_fanout(self):
        two = Structure(Vocabulary(), 2)
        t = Transduction(None, None, (Colour(2),))
        assert len(apply(t, two, dedup="none")) == 4
        assert len(apply(t, two, dedup="origin")) == 4
        assert len(apply(t, two, dedup="iso")) == 3

    def test_copy_origins_are_k_to_one(self, path3):
        (triple,) = apply(Transduction(None, None, (Copy(3),)), path3)
        assert triple.output.universe == 9
        assert Counter(triple.origin) == {0: 3, 1: 3, 2: 3}

    def test_filter(self, path3, triangle_graph):
        t = Transduction(GRAPHS_EDGE, GRAPHS_EDGE, (Filter(parse("(exists x (exists y (exists z (and (edge x y) (edge y z) (edge x z)))))")),))
        assert apply(t, path3) == []
        assert len(apply(t, triangle_graph)) == 1

    def test_wrong_vocabulary(self, path3):
        with pytest.raises(VocabularyMismatch):
            apply(identity(TREES), path3)

    def test_unknown_dedup(self, path3):
        with pytest.raises(MalformedInput):
            apply(identity(GRAPHS_EDGE), path3, dedup="maybe")


class TestCompose:
    def test_identity_is_neutral(self):
        dup = string_duplication(2)
        left = compose(identity(strings(2)), dup)
        right = compose(dup, identity(strings(2)))
        for A in corpus(strings(2), 3):
            expected = [o for o, _ in outputs(dup, A, "iso")]
            assert [o for o, _ in outputs(left, A, "iso")] == expected
            assert [o for o, _ in outputs(right, A, "iso")] == expected

    def test_duplicate_twice(self):
        t = compose(string_duplication(1), string_duplication(1))
        (triple,) = apply(t, string_structure([0], 1))
        assert triple.output.universe == 4
        assert word_of(triple.output) == [0, 0, 0, 0]

    def test_class_mismatch(self):
        with pytest.raises(ClassMismatch):
            compose(identity(TREES), identity(GRAPHS_EDGE))

    def test_target_checked(self):
        with pytest.raises(ClassMismatch):
            Transduction(GRAPHS_EDGE, TREES, (identity_interpretation(make(GRAPHS_EDGE, 1).vocabulary),))


class TestDeterminism:
    def test_interpretation(self):
        assert is_deterministic(identity(GRAPHS_EDGE))

    def test_colour(self):
        assert not is_deterministic(Transduction(None, None, (Colour(1),)))

    def test_duplication(self):
        assert is_deterministic(string_duplication(2))


class TestLanguageCompose:
    def test_identity(self):
        L = Language("(exists x (exists y (edge x y)))")
        composed = language_compose(identity(GRAPHS_EDGE), L)
        for A in corpus(GRAPHS_EDGE, 3):
            assert composed(A) == L(A)

    def test_false_filter(self):
        composed = language_compose(Transduction(None, None, (Filter(parse("false")),)), lambda A: True)
        assert not any(composed(A) for A in corpus(GRAPHS_EDGE, 3))

    def test_colour_always_hits(self):
        L = Language("(exists x (_col_1 x))")
        composed = language_compose(Transduction(None, None, (Colour(2),)), L)
        assert all(composed(A) for A in corpus(GRAPHS_EDGE, 2))


class TestCheckEncoding:
    def test_identity(self):
        report = check_encoding(identity(GRAPHS_EDGE), identity(GRAPHS_EDGE), corpus(GRAPHS_EDGE, 3))
        assert report.passed
        assert report.to_json()["total"] == 7

    def test_copy_is_not_inverted_by_identity(self, path3):
        report = check_encoding(Transduction(None, None, (Copy(2),)), Transduction(None, None, ()), [path3])
        assert not report.passed
        assert report.to_json()["passed"] == 0

    def test_native_maps(self, path3):
        report = check_encoding(lambda A: A, lambda B: [B], [path3])
        assert report.passed

    def test_exceptions_become_failures(self, path3):
        def broken(A):
            raise MSOError("rotto")
        report = check_encoding(broken, lambda B: B, [path3])
        assert "rotto" in report.failures[0].reason


class TestJson:
    def test_roundtrip(self):
        t = string_duplication(2)
        again = from_json(t.to_json())
        A = string_structure([1, 0], 2)
        assert outputs(again, A) == outputs(t, A)

    def test_bare_list(self):
        t = from_json([{"step": "colour", "k": 2}])
        assert t.source is None and not is_deterministic(t)

    @pytest.mark.parametrize("doc", [[{"step": "warp"}], [{"step": "copy"}], [{"step": "copy", "k": 1}], 3])
    def test_rejects(self, doc):
        with pytest.raises(MalformedInput):
            from_json(doc)


class TestPullback:
    SENTENCE = "(exists x (exists y (and (edge x y) (not (= x y)))))"

    def test_interpretation(self):
        t = identity(GRAPHS_EDGE)
        reduced = pullback(t, self.SENTENCE)
        for A in corpus(GRAPHS_EDGE, 3):
            assert evaluate(reduced, A) == any(evaluate(self.SENTENCE, T.output) for T in apply(t, A))

    def test_colour_and_filter(self):
        t = Transduction(None, None, (Filter(parse("(exists x (exists y (edge x y)))")), Colour(2)))
        reduced = pullback(t, "(exists x (_col_1 x))")
        for A in corpus(GRAPHS_EDGE, 3):
            assert evaluate(reduced, A) == language_compose(t, Language("(exists x (_col_1 x))"))(A)

    def test_copy_unsupported(self):
        with pytest.raises(MSOError):
            pullback(string_duplication(2), "(exists x (a0 x))")

    def test_requires_sentence(self):
        with pytest.raises(MalformedInput):
            pullback(identity(GRAPHS_EDGE), "(edge x y)")
