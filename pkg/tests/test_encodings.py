"""Test per il catalogo delle codifiche."""

import pytest

from src.classes import (
    BINARY_TREES,
    LAMINAR,
    ORDERED_BINARY_TREES,
    TREES,
    corpus,
    make,
    member,
    string_structure,
    strings,
    tree_structure,
    word_of,
)
from src.encodings import (
    ALIASES,
    NAMES,
    catalog,
    decode,
    encode,
    entry,
    forget_order,
    growth_report,
    random_images,
    roundtrip_report,
)
from src.errors import DecodeError, MalformedInput, NotInClass
from src.structures import is_isomorphic

FAST = [
    "strings-4-to-2",
    "ordered-tree-to-labelled-binary",
    "binary-to-ordered-binary",
    "laminar-to-tree",
    "tree-to-laminar",
    "structure-to-hypergraph",
    "k-uniform-to-matroid",
    "k-uniform-to-matroid:2",
    "bipartite-to-matroid",
    "matroid-null-to-matrix",
    "pairs",
]


class TestCatalog:
    def test_names(self):
        ids = [item.id for item in catalog()]
        assert len(ids) == len(NAMES)
        assert "k-uniform-to-matroid:1" in ids
        assert "matrix-to-bipartite:2" in ids

    def test_alias(self):
        assert ALIASES["laminar"] == "laminar-to-tree"
        assert entry("laminar").id == "laminar-to-tree"

    def test_parameters(self):
        assert entry("k-uniform-to-matroid:2").id == "k-uniform-to-matroid:2"
        assert str(entry("structure-to-hypergraph:strings:2").input) == str(strings(2))

    def test_unknown(self):
        with pytest.raises(MalformedInput):
            entry("nessuna")
        with pytest.raises(MalformedInput):
            entry("k-uniform-to-matroid:due")

    def test_json(self):
        data = entry("binary-to-ordered-binary").to_json()
        assert data["nondeterministic"] and data["transduction"]
        assert data["expansion"] == 1


class TestStrings:
    def test_letter_to_bits(self):
        B = encode("strings-4-to-2", string_structure([2], 4))
        assert word_of(B) == [1, 0]

    def test_decode(self):
        A = decode("strings-4-to-2", string_structure([1, 0, 1, 1], 2))
        assert word_of(A) == [2, 3]

    def test_odd_length(self):
        with pytest.raises(DecodeError):
            decode("strings-4-to-2", string_structure([1], 2))

    def test_not_in_class(self):
        A = make(strings(4), 2, {"lt": [(0, 1)]})
        with pytest.raises(NotInClass):
            encode("strings-4-to-2", A)


class TestLaminar:
    def test_single_edge(self):
        A = make(LAMINAR, 2, {"hyperedge": [((0, 1),)]})
        T = encode("laminar", A)
        assert member(TREES, T)
        assert is_isomorphic(decode("laminar", T), A) is not None


class TestRoundtrip:
    @pytest.mark.parametrize("ident", FAST)
    def test_catalog_corpus(self, ident):
        report = roundtrip_report(ident)
        assert report.total > 0
        assert report.passed, report.to_json()["failures"][:1]

    @pytest.mark.slow
    @pytest.mark.parametrize("ident", ["labelled-tree-to-unlabelled", "matrix-to-bipartite:2", "matrix-to-bipartite:3"])
    def test_large_corpus(self, ident):
        assert roundtrip_report(ident).passed

    def test_labelled_tree_gadget_separates_labels(self):
        # radice 2 con foglia 0 contro radice 1 con foglia 1
        first = tree_structure([None, 0], labels=[2, 0], k=3)
        second = tree_structure([None, 0], labels=[1, 1], k=3)
        U, V = (encode("labelled-tree-to-unlabelled:3", T) for T in (first, second))
        assert is_isomorphic(U, V) is None
        assert is_isomorphic(decode("labelled-tree-to-unlabelled:3", U), first) is not None
        assert is_isomorphic(decode("labelled-tree-to-unlabelled:3", V), second) is not None

    @pytest.mark.parametrize("ident", ["binary-to-ordered-binary", "matroid-null-to-matrix", "laminar"])
    def test_random_images(self, ident):
        report = roundtrip_report(ident, seed=5, images=2)
        assert report.passed

    def test_strings_as_transduction(self):
        report = roundtrip_report("strings-4-to-2", corpus(strings(4), 2), use_transduction=True)
        assert report.passed
        assert report.total == 4 + 16

    def test_sibling_order_as_transduction(self):
        report = roundtrip_report("binary-to-ordered-binary", corpus(BINARY_TREES, 4), use_transduction=True)
        assert report.passed

    def test_missing_transduction(self):
        with pytest.raises(MalformedInput):
            roundtrip_report("laminar", [], use_transduction=True)


class TestRandomImages:
    def test_sibling_orders(self):
        T = make(BINARY_TREES, 3, {"parent": [(1, 0), (2, 0)]})
        images = random_images("binary-to-ordered-binary", T, seed=1, count=4)
        assert len(images) == 4
        for B in images:
            assert member(ORDERED_BINARY_TREES, B)
            assert forget_order(B) == T

    def test_relabelled(self):
        T = tree_structure([None, 0, 0])
        for B in random_images("tree-to-laminar", T, seed=2, count=3):
            assert is_isomorphic(decode("tree-to-laminar", B), T) is not None


class TestGrowth:
    def test_strings(self):
        rows = growth_report("strings-4-to-2", sizes=(1, 2))
        assert [(r["input"], r["output"]) for r in rows] == [(4, 6), (20, 30)]
        assert all(r["holds"] for r in rows)

    def test_without_expansion(self):
        assert growth_report("laminar") == []
