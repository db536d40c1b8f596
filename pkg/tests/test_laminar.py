"""Test per la biiezione laminare/alberi e i pesi in Z_3."""

import pytest

from src.classes import LAMINAR, TREES, children_map, corpus, make, tree_root, tree_structure
from src.errors import AmbiguityError, DecodeError, MalformedInput, NotInClass
from src.laminar import (
    CHILD_TARGETS,
    LaminarForest,
    Z3Weights,
    chosen_child,
    decode_laminar_as_tree,
    encode_tree_as_laminar,
    laminar_to_tree,
    representative_vertex,
    selection_weights,
    tree_to_laminar,
    verify_left_right_selection,
    z3_weight_assignment,
)
from src.structures import is_isomorphic


def laminar(n, *edges):
    return make(LAMINAR, n, {"hyperedge": [(tuple(e),) for e in edges]})


class TestForest:
    def test_parents_and_children(self):
        A = laminar(4, [0, 1, 2], [0, 1], [3])
        forest = LaminarForest.of(A)
        assert forest.parent(frozenset({0, 1})) == frozenset({0, 1, 2})
        assert forest.children(None) == [frozenset({3}), frozenset({0, 1, 2})]
        assert forest.private_vertices(frozenset({0, 1, 2})) == [2]
        assert forest.branching == []

    def test_not_laminar(self):
        with pytest.raises(NotInClass):
            LaminarForest.of(laminar(3, [0, 1], [1, 2]))


class TestTreeBijection:
    def test_single_edge(self):
        A = laminar(2, [0, 1])
        T = laminar_to_tree(A)
        assert T.universe == 4
        kids = children_map(T)
        root = tree_root(T)
        assert len(kids[root]) == 1
        (red,) = kids[root]
        assert len(kids[red]) == 2 and all(not kids[c] for c in kids[red])
        assert tree_to_laminar(T) == A

    def test_empty_edge_marker(self):
        A = laminar(1, [], [0])
        T = laminar_to_tree(A)
        assert T.universe == 2 + 1 + 3
        assert is_isomorphic(tree_to_laminar(T), A) is not None

    def test_roundtrip(self):
        for A in corpus(LAMINAR, 5):
            assert is_isomorphic(tree_to_laminar(laminar_to_tree(A)), A) is not None

    def test_star_violation(self):
        path = tree_structure([None, 0, 1, 2, 3])
        with pytest.raises(DecodeError):
            tree_to_laminar(path)

    def test_trees_through_laminar(self):
        for T in corpus(TREES, 5):
            A = encode_tree_as_laminar(T)
            assert is_isomorphic(decode_laminar_as_tree(A), T) is not None

    def test_empty_edge_not_in_image(self):
        with pytest.raises(DecodeError):
            decode_laminar_as_tree(laminar(1, [], [0]))


class TestZ3Weights:
    def test_rejects_values(self):
        with pytest.raises(MalformedInput):
            Z3Weights((0, 3))

    def test_targets_table(self):
        assert CHILD_TARGETS == {0: (2, 1), 1: (1,), 2: (2,)}

    def test_three_children_target_one(self):
        A = laminar(3, [0, 1, 2], [0], [1], [2])
        w = z3_weight_assignment(A, target=1)
        assert [w.of([v]) for v in range(3)] == [1, 0, 0]

    def test_two_children_target_zero(self):
        A = laminar(2, [0, 1], [0], [1])
        w = z3_weight_assignment(A, target=0)
        assert (w.of([0]), w.of([1])) == (2, 1)
        assert w.of([0, 1]) == 0

    @pytest.mark.parametrize("a", [0, 1, 2])
    def test_base_case(self, a):
        assert z3_weight_assignment(laminar(1, [0]), target=a).weights == (a,)
        assert z3_weight_assignment(laminar(1), target=a).weights == (a,)

    def test_chosen_child_is_unique_maximum(self):
        for A in corpus(LAMINAR, 5):
            forest = LaminarForest.of(A)
            parents = [e for e in forest.edges if forest.children(e)]
            for e in parents:
                for pick in forest.children(e):
                    choice = {f: forest.children(f)[0] for f in parents}
                    choice[e] = pick
                    w = z3_weight_assignment(A, choice)
                    for f in parents:
                        assert chosen_child(forest, f, w) == choice[f]

    def test_foreign_choice(self):
        A = laminar(3, [0, 1], [0], [2])
        with pytest.raises(NotInClass):
            z3_weight_assignment(A, {frozenset({0, 1}): frozenset({2})})


class TestLeftRightSelection:
    def test_chain(self):
        A = laminar(3, [0, 1, 2], [0, 1], [0])
        forest = LaminarForest.of(A)
        assert forest.branching == []
        left, right = selection_weights(A)
        assert verify_left_right_selection(A, left, right) == {}

    def test_branching_root_with_two_chains(self):
        A = laminar(4, [0, 1, 2, 3], [0, 1], [0], [2, 3], [2])
        left, right = selection_weights(A)
        rep = verify_left_right_selection(A, left, right)
        assert rep == {frozenset({0, 1, 2, 3}): frozenset({0, 1})}
        assert representative_vertex(LaminarForest.of(A), frozenset({0, 1})) == 1

    def test_injective(self):
        for A in corpus(LAMINAR, 6):
            left, right = selection_weights(A)
            rep = verify_left_right_selection(A, left, right)
            assert len(set(rep.values())) == len(rep)
            assert set(rep) == set(LaminarForest.of(A).branching)

    def test_same_weights_are_ambiguous(self):
        A = laminar(2, [0, 1], [0], [1])
        left, _ = selection_weights(A)
        with pytest.raises(AmbiguityError):
            verify_left_right_selection(A, left, left)
