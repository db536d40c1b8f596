"""Test per monoidi finiti e alberi di fattorizzazione."""

import json
import random

import pytest

from src.errors import MalformedInput
from src.monoid import (
    FactorizationTree,
    FiniteMonoid,
    Homomorphism,
    factorization_tree,
    height_bound,
    idempotents,
    monoid_from_generators,
    parse_word,
    random_monoid,
    random_word,
)

Z2 = FiniteMonoid(((0, 1), (1, 0)))
# unità più due zeri sinistri: a·b = a per a, b in {1, 2}
LEFT_ZERO = FiniteMonoid(((0, 1, 2), (1, 1, 1), (2, 2, 2)))


class TestMonoid:
    def test_idempotents(self):
        assert idempotents(Z2) == [0]
        assert idempotents(LEFT_ZERO) == [0, 1, 2]

    def test_not_associative(self):
        with pytest.raises(MalformedInput):
            FiniteMonoid(((0, 1, 2), (1, 2, 0), (2, 1, 0)))

    def test_not_a_unit(self):
        with pytest.raises(MalformedInput):
            FiniteMonoid(((1, 0), (0, 1)))

    def test_ragged(self):
        with pytest.raises(MalformedInput):
            FiniteMonoid(((0, 1), (1,)))

    def test_product(self):
        assert Z2.product([1, 1, 1]) == 1
        assert LEFT_ZERO.product([2, 1, 1]) == 2
        assert Z2.product([]) == 0


class TestHomomorphism:
    def test_call(self):
        h = Homomorphism(Z2, (1, 0))
        assert h([0, 1, 0]) == 0
        assert h([0, 0, 0]) == 1

    def test_letter_out_of_alphabet(self):
        with pytest.raises(MalformedInput):
            Homomorphism(Z2, (1,))([0, 1])

    def test_json(self):
        h = Homomorphism(LEFT_ZERO, (1, 2))
        again = Homomorphism.loads(json.dumps(h.to_json()))
        assert again == h

    def test_bad_json(self):
        with pytest.raises(MalformedInput):
            Homomorphism.loads("{")

    def test_generators(self):
        h = monoid_from_generators([[1, 0]])
        assert h.monoid.size == 2
        assert idempotents(h.monoid) == [0]
        constant = monoid_from_generators([[0, 0]])
        assert constant.monoid.size == 2
        assert idempotents(constant.monoid) == [0, 1]


class TestParseWord:
    def test_letters(self):
        assert parse_word("abca") == [0, 1, 2, 0]

    def test_numbers(self):
        assert parse_word("0,1,1") == [0, 1, 1]

    def test_invalid(self):
        with pytest.raises(MalformedInput):
            parse_word("aB")


class TestFactorization:
    def test_idempotent_chain(self):
        h = Homomorphism(LEFT_ZERO, (1,))
        tree = factorization_tree(h, [0] * 5)
        assert tree.height == 1
        assert len(tree.children) == 5
        assert tree.validate(h) is None

    def test_group_needs_binary_nodes(self):
        h = Homomorphism(Z2, (1,))
        tree = factorization_tree(h, [0, 0, 0])
        assert tree.height == 2
        assert tree.label == 1
        assert tree.validate(h) is None

    def test_single_letter(self):
        h = Homomorphism(Z2, (1,))
        tree = factorization_tree(h, [0])
        assert tree.is_leaf and tree.height == 0

    def test_empty_word(self):
        with pytest.raises(MalformedInput):
            factorization_tree(Homomorphism(Z2, (1,)), [])

    @pytest.mark.parametrize("seed", range(8))
    def test_random_words(self, seed):
        rng = random.Random(seed)
        h = random_monoid(rng, max_size=6)
        word = random_word(rng, h, max_length=60)
        tree = factorization_tree(h, word)
        assert tree.word == word
        assert tree.label == h(word)
        assert tree.validate(h) is None
        assert tree.height <= height_bound(h.monoid)


class TestValidate:
    h = Homomorphism(Z2, (1, 0))

    def test_single_child(self):
        leaf = FactorizationTree(1, (), 0)
        assert "un solo figlio" in FactorizationTree(1, (leaf,)).validate(self.h)

    def test_wrong_product(self):
        leaf = FactorizationTree(1, (), 0)
        assert FactorizationTree(1, (leaf, leaf)).validate(self.h) is not None

    def test_wide_node_not_idempotent(self):
        leaf = FactorizationTree(1, (), 0)
        assert FactorizationTree(1, (leaf, leaf, leaf)).validate(self.h) is not None

    def test_wrong_leaf(self):
        assert FactorizationTree(0, (), 0).validate(self.h) is not None

    def test_to_json(self):
        leaf = FactorizationTree(0, (), 1)
        doc = FactorizationTree(0, (leaf, leaf)).to_json()
        assert doc == {"label": 0, "children": [{"label": 0, "letter": 1}, {"label": 0, "letter": 1}]}
