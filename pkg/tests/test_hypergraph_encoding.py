"""Test per la codifica di strutture arbitrarie in ipergrafi."""

import random

import pytest

from src.classes import GRAPHS_EDGE, HYPERGRAPHS, corpus, k_ary, make, member, strings
from src.errors import DecodeError
from src.hypergraph_encoding import decode_hypergraph, encode_hypergraph, encoded_size, max_arity
from src.structures import is_isomorphic


def shuffled(B, seed):
    mapping = list(range(B.universe))
    random.Random(seed).shuffle(mapping)
    return B.relabel(mapping)


class TestEncode:
    def test_size(self, triangle_graph):
        B = encode_hypergraph(GRAPHS_EDGE, triangle_graph)
        assert B.universe == encoded_size(GRAPHS_EDGE, 3) == 3 * 3 + 3
        assert member(HYPERGRAPHS, B)
        # 9 catene, 1 etichetta, 6 archi orientati
        assert len(B.tuples("hyperedge")) == 9 + 1 + 6

    def test_arity(self):
        assert max_arity(GRAPHS_EDGE) == 2
        assert max_arity(k_ary(3)) == 3
        assert max_arity(HYPERGRAPHS) == 1


class TestRoundtrip:
    @pytest.mark.parametrize("c,size", [
        (GRAPHS_EDGE, 3),
        (strings(2), 3),
        (HYPERGRAPHS, 2),
        (k_ary(2), 2),
    ])
    def test_corpus(self, c, size):
        for A in corpus(c, size):
            assert is_isomorphic(decode_hypergraph(c, encode_hypergraph(c, A)), A) is not None

    def test_relabelled(self, path3):
        B = shuffled(encode_hypergraph(GRAPHS_EDGE, path3), 11)
        assert is_isomorphic(decode_hypergraph(GRAPHS_EDGE, B), path3) is not None

    def test_empty_set_slot(self):
        A = make(HYPERGRAPHS, 2, {"hyperedge": [((),), ((0, 1),)]})
        assert is_isomorphic(decode_hypergraph(HYPERGRAPHS, encode_hypergraph(HYPERGRAPHS, A)), A) is not None


class TestDecodeErrors:
    def test_no_singletons(self):
        B = make(HYPERGRAPHS, 3, {"hyperedge": [((0, 1, 2),)]})
        with pytest.raises(DecodeError):
            decode_hypergraph(GRAPHS_EDGE, B)

    def test_broken_chain(self, path3):
        B = encode_hypergraph(GRAPHS_EDGE, path3)
        rows = [row for row in B.tuples("hyperedge") if row[0] != (0, 1)]
        with pytest.raises(DecodeError):
            decode_hypergraph(GRAPHS_EDGE, make(HYPERGRAPHS, B.universe, {"hyperedge": rows}))

    def test_missing_tag(self, path3):
        B = encode_hypergraph(GRAPHS_EDGE, path3)
        gadget = tuple(range(9, 12))
        rows = [row for row in B.tuples("hyperedge") if row[0] != gadget]
        with pytest.raises(DecodeError):
            decode_hypergraph(GRAPHS_EDGE, make(HYPERGRAPHS, B.universe, {"hyperedge": rows}))
