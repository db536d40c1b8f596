"""Test per gli alberi cubici e la ricerca della decomposizione ottima."""

import pytest

from src.config import Budget
from src.decomposition import (
    BranchDecomposition,
    all_decompositions,
    bits,
    mask_of,
    min_leaf,
    optimal_decomposition,
    rooted_leaves,
)
from src.errors import BudgetExceeded, MalformedInput


class TestBits:
    def test_roundtrip(self):
        assert bits(mask_of([0, 3, 4])) == [0, 3, 4]
        assert mask_of([]) == 0


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(1, 1), (2, 1), (3, 1), (4, 3), (5, 15), (6, 105)])
    def test_double_factorial(self, n, count):
        trees = list(all_decompositions(n))
        assert len(trees) == count
        assert len({t.splits for t in trees}) == count
        assert all(t.validate() is None for t in trees)

    @pytest.mark.slow
    def test_seven_leaves(self):
        assert sum(1 for _ in all_decompositions(7)) == 945

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            list(all_decompositions(5, Budget(branch_leaves=4)))


class TestValidate:
    def test_wrong_edge_count(self):
        assert BranchDecomposition(3, frozenset({0b10})).validate() is not None

    def test_split_sets(self):
        t = BranchDecomposition(4, frozenset({0b10, 0b100, 0b1000, 0b1110, 0b110}))
        assert t.validate() is None
        bad = BranchDecomposition(4, frozenset({0b10, 0b100, 0b1000, 0b110, 0b1100}))
        assert bad.validate() is not None

    def test_from_json_rejects(self):
        with pytest.raises(MalformedInput):
            BranchDecomposition.from_json({"leaves": 3, "splits": [[1]]})
        with pytest.raises(MalformedInput):
            BranchDecomposition.from_json({"splits": []})

    def test_json_roundtrip(self):
        for t in all_decompositions(5):
            assert BranchDecomposition.from_json(t.to_json()) == t


class TestRooting:
    def test_every_leaf_once(self):
        for t in all_decompositions(6):
            leaves = rooted_leaves(t.rooted())
            assert sorted(leaves) == list(range(6))
            assert min_leaf(t.rooted()) == 0

    def test_root_edge_is_balanced(self):
        for t in all_decompositions(5):
            side = bin(t.root_edge()).count("1")
            assert max(side, 5 - side) == min(max(bin(s).count("1"), 5 - bin(s).count("1")) for s in t.splits)

    def test_unknown_split(self):
        t = next(all_decompositions(4))
        with pytest.raises(MalformedInput):
            t.rooted(0b1)

    def test_single_leaf(self):
        assert BranchDecomposition(1, frozenset()).rooted() == 0

    def test_dot(self):
        t = next(all_decompositions(3))
        dot = t.to_dot()
        assert dot.startswith("graph decomposition {")
        assert dot.count("--") == 3


class TestOptimal:
    def test_minimises_width(self):
        # larghezza 0 solo se ogni split separa {1,2} dal resto oppure è una foglia
        def cut(s):
            return 0 if s in (0b10, 0b100, 0b1000, 0b110, 0b1110) else 1
        width, tree = optimal_decomposition(4, cut)
        assert width == 0
        assert 0b110 in tree.splits

    def test_ties_are_deterministic(self):
        first = optimal_decomposition(5, lambda s: 1)
        second = optimal_decomposition(5, lambda s: 1)
        assert first == second
