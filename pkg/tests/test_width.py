"""Test per rango di bipartizione, sensitività e decomposizioni compilate."""

import pytest

from src.classes import HYPERGRAPHS, corpus
from src.config import Budget
from src.decomposition import all_decompositions
from src.errors import BudgetExceeded, MalformedInput, MSOError
from src.matroid import RepresentedMatroid, represented_corpus
from src.width import (
    CompiledDecomposition,
    CompiledNode,
    Hypergraph,
    bipartition_rank,
    compile_decomposition,
    connectivity_sensitivity_report,
    decode_decomposition,
    decomposition_width,
    hyper_rankwidth,
    matroid_hypergraph,
    matroid_sensitivity,
    node_colouring,
    original_labels,
    sensitivity,
)


def hypergraphs(max_n):
    return [Hypergraph.from_structure(A) for A in corpus(HYPERGRAPHS, max_n)]


class TestHypergraph:
    def test_json(self):
        G = Hypergraph.from_json({"n": 3, "edges": [[0, 1], [], [2]]})
        assert G.to_json() == {"n": 3, "edges": [[], [2], [0, 1]]}
        assert Hypergraph.loads('{"n": 3, "edges": [[2], [0, 1], []]}') == G

    @pytest.mark.parametrize("doc", [{"edges": []}, {"n": 2, "edges": [[0], [0]]},
                                     {"n": 2, "edges": [[0, 0]]}, {"n": 2, "edges": [[2]]}])
    def test_rejects(self, doc):
        with pytest.raises(MalformedInput):
            Hypergraph.from_json(doc)

    def test_structure_roundtrip(self):
        G = Hypergraph(3, frozenset({0b011, 0b100, 0}))
        assert Hypergraph.from_structure(G.to_structure()) == G


class TestRank:
    def test_no_edges(self):
        G = Hypergraph(4, frozenset())
        assert all(bipartition_rank(G, s) == 0 for s in range(16))

    def test_full_edge(self):
        G = Hypergraph(4, frozenset({0b1111}))
        assert all(bipartition_rank(G, s) == 1 for s in range(1, 15))

    def test_complement(self):
        for G in hypergraphs(3):
            for s in range(1 << G.n):
                assert bipartition_rank(G, s) == bipartition_rank(G, G.full & ~s)

    def test_side_out_of_range(self):
        with pytest.raises(MalformedInput):
            bipartition_rank(Hypergraph(2, frozenset()), [2])

    def test_budget(self):
        G = Hypergraph(6, frozenset())
        with pytest.raises(BudgetExceeded):
            bipartition_rank(G, [0, 1, 2], Budget(cut_side=2))


class TestSensitivity:
    def test_empty_side(self):
        assert sensitivity(Hypergraph(3, frozenset({0b101})), 0) == 1

    def test_no_edges(self):
        G = Hypergraph(3, frozenset())
        assert all(sensitivity(G, s) == 1 for s in range(8))

    def test_bounds(self):
        for G in hypergraphs(3):
            for s in range(1 << G.n):
                r, sens = bipartition_rank(G, s), sensitivity(G, s)
                assert r <= sens <= 2 ** r

    def test_matroid_sensitivity(self, triangle):
        assert matroid_sensitivity(triangle, []) == 1
        assert matroid_sensitivity(triangle, [0]) == 2
        assert matroid_sensitivity(triangle, [0], "null") == 2

    def test_unknown_representation(self, triangle):
        with pytest.raises(MalformedInput):
            matroid_hypergraph(triangle, "circuits")


class TestHyperRankwidth:
    def test_empty_family(self):
        assert hyper_rankwidth(Hypergraph(1, frozenset()))[0] == 0
        assert hyper_rankwidth(Hypergraph(4, frozenset()))[0] == 0

    def test_two_pairs(self):
        G = Hypergraph(4, frozenset({0b0011, 0b1100}))
        width, tree = hyper_rankwidth(G)
        expected = min(decomposition_width(G, t) for t in all_decompositions(4))
        assert width == expected == 2
        assert decomposition_width(G, tree) == width

    def test_permutation_invariance(self):
        G = Hypergraph(4, frozenset({0b0011, 0b0110, 0b1111}))
        assert hyper_rankwidth(G.relabel([2, 0, 3, 1]))[0] == hyper_rankwidth(G)[0]


class TestCompile:
    def test_single_vertex(self):
        T = next(all_decompositions(1))
        for edges, differ in [(set(), False), ({0}, True), ({1}, True), ({0, 1}, False)]:
            S = compile_decomposition(Hypergraph(1, frozenset(edges)), T)
            (leaf,) = S.nodes
            assert (leaf.leaf[0] != leaf.leaf[1]) is differ

    def test_no_edges(self):
        G = Hypergraph(4, frozenset())
        S = compile_decomposition(G, next(all_decompositions(4)))
        assert S.k == 0
        assert all(node.alpha == ((1,),) for node in S.nodes if node.children)
        assert decode_decomposition(S) == G

    def test_pair(self):
        G = Hypergraph(2, frozenset({0b11}))
        S = compile_decomposition(G, next(all_decompositions(2)))
        assert original_labels(S, decode_decomposition(S)) == G

    def test_roundtrip(self):
        for G in hypergraphs(3):
            for T in all_decompositions(G.n):
                S = compile_decomposition(G, T)
                assert S.validate() is None
                assert original_labels(S, decode_decomposition(S)) == G

    @pytest.mark.slow
    def test_roundtrip_four_vertices(self):
        for G in hypergraphs(4):
            for T in all_decompositions(4):
                S = compile_decomposition(G, T)
                assert original_labels(S, decode_decomposition(S)) == G

    def test_every_root_edge(self):
        G = Hypergraph(4, frozenset({0b0011, 0b0110, 0b1110}))
        for T in all_decompositions(4):
            for split in T.splits:
                S = compile_decomposition(G, T, root_edge=split)
                assert original_labels(S, decode_decomposition(S)) == G

    def test_declared_k_too_small(self):
        G = Hypergraph(3, frozenset({0b001, 0b010, 0b100, 0b011}))
        with pytest.raises(MSOError):
            compile_decomposition(G, next(all_decompositions(3)), k=0)

    def test_colours_numbered_by_least_member(self):
        G = Hypergraph(2, frozenset({0b01}))
        colouring = node_colouring(G, 0b11)
        assert colouring[0] == 1
        assert sorted(set(colouring.values())) == list(range(1, len(set(colouring.values())) + 1))

    def test_json_roundtrip(self):
        G = Hypergraph(3, frozenset({0b011, 0b111}))
        S = compile_decomposition(G, next(all_decompositions(3)))
        again = CompiledDecomposition.from_json(S.to_json())
        assert again == S
        assert decode_decomposition(again) == decode_decomposition(S)

    def test_rejects_malformed(self):
        S = CompiledDecomposition(1, (CompiledNode(leaf=(1, 3)),), 0, frozenset())
        assert S.validate() is not None
        with pytest.raises(MalformedInput):
            decode_decomposition(S)

    def test_constant_automaton(self):
        leaf = CompiledNode(leaf=(1, 1))
        S = CompiledDecomposition(1, (leaf, leaf, CompiledNode(children=(0, 1), alpha=((2, 2), (2, 2)))), 2, frozenset({1}))
        assert decode_decomposition(S) == Hypergraph(2, frozenset())


class TestConnectivityReport:
    def test_null_gf2(self):
        report = connectivity_sensitivity_report(represented_corpus(2, 4, 2), "null")
        assert report["checked"] > 0
        assert report["lower_violations"] == 0
        assert report["upper_violations"] == 0

    def test_lower_bound_independence(self):
        report = connectivity_sensitivity_report(represented_corpus(2, 3, 2), "independence")
        assert report["lower_violations"] == 0

    def test_basis_pair(self):
        M = RepresentedMatroid(2, 2, ((1, 0), (0, 1)))
        report = connectivity_sensitivity_report([M], "null")
        assert report["checked"] == 2
