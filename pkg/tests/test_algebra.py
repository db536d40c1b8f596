"""Test per l'algebra di branchwidth e la compilazione dei termini."""

import json
import random

import pytest

from src.algebra import (
    Constant,
    PortedMatroid,
    Quotient,
    Rename,
    Union,
    eval_term,
    loads_term,
    port_profile,
    reproduces,
    sort,
    subterm_sorts,
    tagged_matroid,
    term_from_branch_decomposition,
    term_from_json,
    term_to_json,
)
from src.decomposition import BranchDecomposition, all_decompositions
from src.errors import MalformedInput, SortMismatch
from src.matroid import RepresentedMatroid, branchwidth, independent_sets, represented_corpus


def point(q=2):
    """Un elemento non nullo che fa anche da porta."""
    return Constant(PortedMatroid(RepresentedMatroid(q, 1, ((1,),)), (0,)))


def random_term(rng, q, depth):
    if depth == 0 or rng.random() < 0.3:
        n, d = rng.randint(1, 3), rng.randint(1, 3)
        vectors = tuple(tuple(rng.randrange(q) for _ in range(d)) for _ in range(n))
        ports = tuple(rng.sample(range(n), rng.randint(1, n)))
        return Constant(PortedMatroid(RepresentedMatroid(q, d, vectors), ports))
    t = Union(random_term(rng, q, depth - 1), random_term(rng, q, depth - 1))
    if rng.random() < 0.5:
        t = Quotient(tuple(rng.randrange(q) for _ in range(sort(t))), t)
    return t


class TestOperations:
    def test_quotient_makes_parallel(self):
        P = eval_term(Quotient((1, 1), Union(point(), point())))
        assert P.matroid.dim == 1
        assert P.matroid.vectors == ((1,), (1,))
        assert P.sort == 2

    def test_quotient_gf3(self):
        P = eval_term(Quotient((1, 2), Union(point(3), point(3))))
        assert P.matroid.vectors == ((1,), (1,))

    def test_zero_quotient(self):
        P = eval_term(Quotient((0,), point()))
        assert P.matroid.dim == 1

    def test_rename(self):
        P = eval_term(Rename((2,), Union(point(), point())))
        assert P.ports == (1,)
        assert P.sort == 1

    def test_union_tags(self):
        P = eval_term(Union(point(), point()))
        assert P.tags == (0, 0)
        assert P.ports == (0, 1)

    @pytest.mark.parametrize("q", [2, 3])
    def test_quotient_commutes_with_bijective_rename(self, q):
        rng = random.Random(q)
        for _ in range(60):
            t = random_term(rng, q, 2)
            k = sort(t)
            alpha = tuple(rng.sample(range(1, k + 1), k))
            coeffs = tuple(rng.randrange(q) for _ in range(k))
            # coefficienti riportati sulle porte del figlio: coeffs composto alpha^-1
            pulled = [0] * k
            for i, a in enumerate(alpha):
                pulled[a - 1] = coeffs[i]
            left = eval_term(Quotient(coeffs, Rename(alpha, t)))
            right = eval_term(Rename(alpha, Quotient(tuple(pulled), t)))
            assert left == right


class TestSort:
    def test_sorts(self):
        t = Rename((), Quotient((1, 1), Union(point(), point())))
        assert sort(t) == 0
        assert subterm_sorts(t) == [0, 2, 2, 1, 1]

    def test_rename_out_of_range(self):
        with pytest.raises(SortMismatch):
            sort(Rename((3,), Union(point(), point())))

    def test_quotient_length(self):
        with pytest.raises(SortMismatch):
            eval_term(Quotient((1,), Union(point(), point())))

    def test_mixed_fields(self):
        with pytest.raises(SortMismatch):
            sort(Union(point(2), point(3)))


class TestJson:
    def test_roundtrip(self):
        t = Rename((1,), Quotient((1, 1, 0), Union(point(), Union(point(), point()))))
        again = loads_term(json.dumps(term_to_json(t)))
        assert again == t

    def test_unknown_op(self):
        with pytest.raises(MalformedInput):
            term_from_json({"op": "somma"})

    def test_incomplete(self):
        with pytest.raises(MalformedInput):
            term_from_json({"op": "rename", "alpha": [1]})

    def test_bad_text(self):
        with pytest.raises(MalformedInput):
            loads_term("[")


class TestCompilation:
    def test_triangle(self, triangle):
        for T in all_decompositions(3):
            term = term_from_branch_decomposition(triangle, T)
            assert sort(term) == 0
            assert reproduces(triangle, eval_term(term))

    def test_tagged_order(self, triangle):
        T = next(all_decompositions(3))
        P = eval_term(term_from_branch_decomposition(triangle, T))
        restricted = tagged_matroid(P)
        assert independent_sets(restricted) == independent_sets(triangle)

    @pytest.mark.parametrize("field,elements,dim", [(2, 4, 2), (3, 3, 2)])
    def test_corpus(self, field, elements, dim):
        for M in represented_corpus(field, elements, dim):
            for T in all_decompositions(M.size):
                assert reproduces(M, eval_term(term_from_branch_decomposition(M, T)))

    @pytest.mark.slow
    def test_five_elements(self):
        M = RepresentedMatroid(2, 3, ((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (0, 1, 1)))
        for T in all_decompositions(5):
            assert reproduces(M, eval_term(term_from_branch_decomposition(M, T)))

    def test_wrong_leaves(self, triangle):
        with pytest.raises(MalformedInput):
            term_from_branch_decomposition(triangle, BranchDecomposition(2, frozenset()))

    def test_profile(self):
        M = RepresentedMatroid(2, 3, ((1, 0, 0), (0, 1, 0), (1, 1, 0), (0, 0, 1)))
        width, T = branchwidth(M)
        profile = port_profile(M, T)
        assert profile["width"] == width
        assert profile["max_sort"] <= 3 * width
        assert profile["operations"] > M.size
