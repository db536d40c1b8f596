"""Test per le codifiche tra ipergrafi, grafi bipartiti, matroidi e matrici."""

import random

import pytest

from src.classes import BIPARTITE, MATROID_INDEPENDENCE, corpus, k_uniform, make, matrices, matroid_null, member
from src.errors import DecodeError, NotInClass
from src.matroid_encodings import (
    bipartite_matroid,
    copies,
    decode_bipartite_matroid,
    decode_matrix_bipartite,
    decode_matrix_null,
    decode_sparse_paving,
    distinct_left_neighbourhoods,
    encode_bipartite_matroid,
    encode_matrix_bipartite,
    encode_null_matrix,
    encode_sparse_paving,
    random_basis_orders,
    sparse_paving_violation,
)
from src.structures import LEFT, is_isomorphic


def family(B):
    return {frozenset(row[0]) for row in B.tuples("indep")}


class TestSparsePaving:
    def test_single_vertex_edge(self):
        A = make(k_uniform(1), 2, {"hyperedge": [((0,),)]})
        B = encode_sparse_paving(1, A)
        assert B.universe == 4
        sets = family(B)
        assert max(len(s) for s in sets) == 2
        assert frozenset({0, 1}) not in sets
        assert frozenset({0, 2}) in sets
        assert len(sets) == 1 + 4 + 5
        assert member(MATROID_INDEPENDENCE, B)

    def test_copies(self):
        assert copies([0, 2]) == frozenset({0, 1, 4, 5})

    def test_violation(self):
        assert sparse_paving_violation([frozenset({0, 1}), frozenset({0, 2})]) == ([0, 1], [0, 2])
        assert sparse_paving_violation([frozenset({0, 1}), frozenset({2, 3})]) is None

    @pytest.mark.parametrize("k,size", [(1, 4), (2, 4)])
    def test_roundtrip(self, k, size):
        for A in corpus(k_uniform(k), size):
            B = encode_sparse_paving(k, A)
            assert member(MATROID_INDEPENDENCE, B)
            assert is_isomorphic(decode_sparse_paving(k, B), A) is not None

    def test_roundtrip_after_relabel(self):
        A = make(k_uniform(2), 3, {"hyperedge": [((0, 1),), ((1, 2),)]})
        B = encode_sparse_paving(2, A)
        mapping = list(range(B.universe))
        random.Random(3).shuffle(mapping)
        assert is_isomorphic(decode_sparse_paving(2, B.relabel(mapping)), A) is not None

    def test_odd_ground(self):
        B = make(MATROID_INDEPENDENCE, 3, {"indep": [((),), ((0,),), ((1,),), ((2,),)]})
        with pytest.raises(DecodeError):
            decode_sparse_paving(1, B)

    def test_wrong_rank(self):
        A = make(k_uniform(1), 2, {"hyperedge": []})
        with pytest.raises(DecodeError):
            decode_sparse_paving(2, encode_sparse_paving(1, A))


class TestBipartite:
    def path(self):
        # sinistro 0 collegato ai destri 1 e 2
        return make(BIPARTITE, 3, {LEFT: [(0,)], "edge": [(0, 1), (0, 2)]})

    def test_vectors(self):
        M, origin = bipartite_matroid(self.path())
        assert M.size == 5
        assert origin == [("left", 0), ("right", 1), ("right", 1), ("right", 2), ("right", 2)]
        assert [tuple(int(x) for x in row) for row in M.matrix] == [(1, 1), (1, 0), (1, 0), (0, 1), (0, 1)]

    def test_same_neighbourhood(self):
        A = make(BIPARTITE, 3, {LEFT: [(0,), (1,)], "edge": [(0, 2), (1, 2)]})
        assert not distinct_left_neighbourhoods(A)
        with pytest.raises(NotInClass):
            encode_bipartite_matroid(A)

    def test_roundtrip(self):
        checked = 0
        for A in corpus(BIPARTITE, 5):
            if not distinct_left_neighbourhoods(A):
                continue
            B = encode_bipartite_matroid(A)
            assert is_isomorphic(decode_bipartite_matroid(B), A) is not None
            checked += 1
        assert checked > 10

    def test_two_loops(self):
        B = make(MATROID_INDEPENDENCE, 2, {"indep": [((),)]})
        with pytest.raises(DecodeError):
            decode_bipartite_matroid(B)


class TestNullMatrix:
    @pytest.mark.parametrize("q,size", [(2, 4), (3, 3)])
    def test_roundtrip(self, q, size):
        for S in corpus(matroid_null(q), size):
            A = encode_null_matrix(q, S)
            assert member(matrices(q), A)
            assert decode_matrix_null(q, A) == S

    def test_any_basis(self):
        rng = random.Random(7)
        for S in corpus(matroid_null(2), 4):
            for order in random_basis_orders(S.universe, rng, 3):
                assert decode_matrix_null(2, encode_null_matrix(2, S, order)) == S

    def test_orders_are_permutations(self):
        for order in random_basis_orders(5, random.Random(1), 4):
            assert sorted(order) == list(range(5))


class TestMatrixBipartite:
    def test_path_lengths(self):
        # riga 0, colonna 1 con valore 2 su GF(3)
        A = make(matrices(3), 2, {"row": [(0,)], "val1": [], "val2": [(0, 1)]})
        B = encode_matrix_bipartite(3, A)
        # 2 elementi, 4 foglie, 2 vertici interni del cammino di lunghezza 3
        assert B.universe == 8
        assert len(B.tuples("edge")) == 4 + 3
        assert member(BIPARTITE, B)

    @pytest.mark.parametrize("q,size", [(2, 4), (3, 3)])
    def test_roundtrip(self, q, size):
        for A in corpus(matrices(q), size):
            B = encode_matrix_bipartite(q, A)
            assert is_isomorphic(decode_matrix_bipartite(q, B), A) is not None

    def test_even_path(self):
        # cammino di lunghezza 2 tra due sinistri: non è una cella
        B = make(BIPARTITE, 7, {
            LEFT: [(0,), (1,)],
            "edge": [(0, 2), (0, 3), (1, 4), (1, 5), (0, 6), (1, 6)],
        })
        with pytest.raises(DecodeError):
            decode_matrix_bipartite(2, B)
