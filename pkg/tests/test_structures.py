"""Test per strutture, forma canonica e coppie."""

import random

import pytest

from src.classes import BOOL, GRAPHS_EDGE, corpus, make, string_structure, tree_structure
from src.errors import MalformedInput, VocabularyMismatch
from src.structures import (
    IsoWitness,
    Structure,
    Vocabulary,
    is_isomorphic,
    pair,
    project_left,
    project_right,
    validate,
)


class TestValidate:
    def test_minimal_structure(self):
        assert validate(Structure(Vocabulary(), 1)) is None

    def test_empty_universe(self):
        assert validate(Structure(Vocabulary(), 0)) == "empty universe"

    def test_id_out_of_range(self):
        voc = Vocabulary.of(("edge", "ee"))
        assert validate(Structure(voc, 3, {"edge": {(0, 5)}})) == "id out of range"

    def test_set_slots(self):
        voc = Vocabulary.of(("hyperedge", "s"))
        assert validate(Structure(voc, 3, {"hyperedge": {((2, 1),)}})) == "unsorted set slot"
        assert validate(Structure(voc, 3, {"hyperedge": {((1, 1),)}})) == "duplicate in set slot"
        assert validate(Structure(voc, 3, {"hyperedge": {(1,)}})) == "kind mismatch"

    def test_arity_mismatch(self):
        voc = Vocabulary.of(("edge", "ee"))
        assert validate(Structure(voc, 3, {"edge": {(0,)}})) == "arity mismatch"

    def test_mistyped_slots(self):
        voc = Vocabulary.of(("edge", "ee"))
        assert validate(Structure(voc, 3, {"edge": {(0, 1), (0, 1.5)}})) == "kind mismatch"
        assert validate(Structure(voc, 3, {"edge": {(0, True)}})) == "kind mismatch"

    def test_mixed_set_slots(self):
        doc = {
            "vocabulary": [{"name": "hyperedge", "kinds": ["set"]}],
            "universe": 2,
            "relations": {"hyperedge": [[["a"]], [[0]]]},
        }
        assert validate(Structure.from_json(doc)) == "kind mismatch"

    def test_build_normalizes(self):
        voc = Vocabulary.of(("hyperedge", "s"))
        s = Structure.build(voc, 3, {"hyperedge": [[[2, 1, 2]]]})
        assert s.tuples("hyperedge") == {((1, 2),)}
        assert validate(s) is None

    def test_unknown_relation(self):
        with pytest.raises(VocabularyMismatch):
            Structure(Vocabulary(), 1, {"edge": set()})

    def test_duplicate_relation_names(self):
        with pytest.raises(MalformedInput):
            Vocabulary.of(("edge", "ee"), ("edge", "e"))


class TestJson:
    def test_dumps_loads(self, path3):
        again = Structure.loads(path3.dumps())
        assert again == path3
        assert again.dumps() == path3.dumps()

    def test_loads_invalid(self):
        with pytest.raises(MalformedInput):
            Structure.loads("{not json")
        with pytest.raises(MalformedInput):
            Structure.loads("[1, 2]")

    @pytest.mark.parametrize("slot", [1.5, None, "a", {"x": 1}, [[0]]])
    def test_rejects_bad_slots(self, slot):
        doc = {
            "vocabulary": [{"name": "edge", "kinds": ["element", "element"]}],
            "universe": 2,
            "relations": {"edge": [[0, slot]]},
        }
        with pytest.raises(MalformedInput):
            Structure.from_json(doc)


class TestIsomorphism:
    def test_identity(self, path3):
        w = is_isomorphic(path3, path3)
        assert w is not None
        assert w.apply(path3) == path3

    def test_path_and_star(self, path3):
        star = make(GRAPHS_EDGE, 3, {"edge": [(0, 1), (1, 0), (0, 2), (2, 0)]})
        w = is_isomorphic(path3, star)
        assert w is not None
        assert w.apply(path3) == star

    def test_triangle_vs_path(self, path3, triangle_graph):
        assert is_isomorphic(triangle_graph, path3) is None

    def test_different_vocabularies(self, path3):
        with pytest.raises(VocabularyMismatch):
            is_isomorphic(path3, Structure(Vocabulary(), 3))

    def test_different_sizes(self, path3):
        assert is_isomorphic(path3, make(GRAPHS_EDGE, 2)) is None

    def test_colours_respected(self, path3):
        # il centro del cammino non può andare su un estremo colorato
        assert is_isomorphic(path3, path3, [1, 0, 0], [0, 1, 0]) is None
        assert is_isomorphic(path3, path3, [1, 0, 0], [0, 0, 1]) is not None

    def test_equivalence_on_graphs(self):
        rng = random.Random(3)
        graphs = corpus(GRAPHS_EDGE, 4)
        for g in graphs:
            perm = list(range(g.universe))
            rng.shuffle(perm)
            h = g.relabel(perm)
            w = is_isomorphic(g, h)
            assert w is not None and w.apply(g) == h
            back = w.inverse()
            assert back.apply(h) == g
            perm2 = list(range(g.universe))
            rng.shuffle(perm2)
            k = h.relabel(perm2)
            w2 = is_isomorphic(h, k)
            assert w.then(w2).apply(g) == k
        for a in graphs:
            for b in graphs:
                assert (is_isomorphic(a, b) is not None) == (a is b)

    def test_witness_composition(self):
        w = IsoWitness((1, 2, 0))
        assert w.then(w.inverse()).mapping == (0, 1, 2)


class TestPair:
    def test_bool_bool(self):
        p = pair(make(BOOL, 1), make(BOOL, 1))
        assert p.universe == 2
        assert p.tuples("left") == {(0,)}

    def test_sizes_and_projections(self):
        tree = tree_structure([None, 0, 0])
        word = string_structure([0, 1], 2)
        p = pair(tree, word)
        assert p.universe == 5
        assert is_isomorphic(project_left(p), tree) is not None
        assert is_isomorphic(project_right(p), word) is not None

    def test_project_non_pair(self, path3):
        with pytest.raises(VocabularyMismatch):
            project_left(path3)
