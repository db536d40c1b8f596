"""
Classi di strutture

Ogni ClassId ha un vocabolario fisso, un validatore di appartenenza e un
generatore di rappresentanti canonici per dimensione, da cui census e i
corpus esaustivi dei test.

Limiti di census per classe (universo massimo enumerato):

    strings:k            6 (k <= 2), 4 altrimenti
    trees & varianti     7
    labelled-trees:k     5
    graphs-edge          5
    graphs-incidence     6
    acyclic-graphs       5
    hypergraphs          4
    laminar              6
    k-uniform:k          5
    k-ary:k              n massimo con n^k <= 10
    bipartite            6
    matrices:q           6 (q = 2), 5 altrimenti
    matroid-independence 5
    matroid-null:q       5 (q = 2), 3 altrimenti
    bool                 1 (nessuna struttura oltre)
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations, product
from math import comb, factorial
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .config import Budget, default_budget
from .errors import BudgetExceeded, MalformedInput, VocabularyMismatch
from .gf import is_prime
from .structures import (
    LEFT,
    Structure,
    Vocabulary,
    canonical_form,
    pair,
    pair_vocabulary,
    project_left,
    project_right,
    validate,
)

logger = logging.getLogger(__name__)


# -- identificatori -------------------------------------------------------------

PARAMETRIC = {
    "strings": 1,
    "labelled-trees": 1,
    "bounded-height-trees": 0,
    "k-uniform": 0,
    "k-ary": 1,
    "matrices": 2,
    "matroid-null": 2,
}
PLAIN = {
    "trees",
    "binary-trees",
    "ordered-trees",
    "ordered-binary-trees",
    "graphs-edge",
    "graphs-incidence",
    "acyclic-graphs",
    "hypergraphs",
    "laminar",
    "bipartite",
    "matroid-independence",
    "bool",
}
TREE_TAGS = {"trees", "binary-trees", "ordered-trees", "ordered-binary-trees", "bounded-height-trees", "labelled-trees"}


@dataclass(frozen=True)
class ClassId:
    """Classe di strutture: tag, parametro opzionale, componenti per pairs."""
    tag: str
    param: Optional[int] = None
    left: Optional["ClassId"] = None
    right: Optional["ClassId"] = None

    def __post_init__(self):
        if self.tag == "pairs":
            if self.left is None or self.right is None:
                raise MalformedInput("pairs richiede due componenti")
        elif self.tag in PARAMETRIC:
            if self.param is None:
                raise MalformedInput(f"La classe '{self.tag}' richiede un parametro")
            if self.param < PARAMETRIC[self.tag]:
                raise MalformedInput(f"Parametro troppo piccolo per '{self.tag}': {self.param}")
            if self.tag in ("matrices", "matroid-null") and not is_prime(self.param):
                raise MalformedInput(f"'{self.tag}' richiede un campo primo, non {self.param}")
        elif self.tag in PLAIN:
            if self.param is not None:
                raise MalformedInput(f"La classe '{self.tag}' non ha parametri")
        else:
            raise MalformedInput(f"Classe sconosciuta: '{self.tag}'")

    def __str__(self) -> str:
        if self.tag == "pairs":
            return f"pairs({self.left},{self.right})"
        if self.param is not None:
            return f"{self.tag}:{self.param}"
        return self.tag

    @property
    def is_tree(self) -> bool:
        return self.tag in TREE_TAGS

    @classmethod
    def parse(cls, text: str) -> "ClassId":
        """Interpreta 'trees', 'strings:4', 'pairs(trees,strings:2)'."""
        text = text.strip()
        if text.startswith("pairs(") and text.endswith(")"):
            inner = text[len("pairs("):-1]
            depth = 0
            for i, ch in enumerate(inner):
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                elif ch == "," and depth == 0:
                    return cls("pairs", None, cls.parse(inner[:i]), cls.parse(inner[i + 1:]))
            raise MalformedInput(f"pairs senza due componenti: '{text}'")
        if ":" in text:
            tag, raw = text.split(":", 1)
            try:
                return cls(tag.strip(), int(raw))
            except ValueError:
                raise MalformedInput(f"Parametro non intero in '{text}'")
        return cls(text)


def strings(k: int = 2) -> ClassId:
    return ClassId("strings", k)


def labelled_trees(k: int) -> ClassId:
    return ClassId("labelled-trees", k)


def bounded_height_trees(h: int) -> ClassId:
    return ClassId("bounded-height-trees", h)


def k_uniform(k: int) -> ClassId:
    return ClassId("k-uniform", k)


def k_ary(k: int) -> ClassId:
    return ClassId("k-ary", k)


def matrices(q: int) -> ClassId:
    return ClassId("matrices", q)


def matroid_null(q: int) -> ClassId:
    return ClassId("matroid-null", q)


def pairs(left: ClassId, right: ClassId) -> ClassId:
    return ClassId("pairs", None, left, right)


TREES = ClassId("trees")
BINARY_TREES = ClassId("binary-trees")
ORDERED_TREES = ClassId("ordered-trees")
ORDERED_BINARY_TREES = ClassId("ordered-binary-trees")
GRAPHS_EDGE = ClassId("graphs-edge")
GRAPHS_INCIDENCE = ClassId("graphs-incidence")
ACYCLIC_GRAPHS = ClassId("acyclic-graphs")
HYPERGRAPHS = ClassId("hypergraphs")
LAMINAR = ClassId("laminar")
BIPARTITE = ClassId("bipartite")
MATROID_INDEPENDENCE = ClassId("matroid-independence")
BOOL = ClassId("bool")


# -- vocabolari -------------------------------------------------------------------


def letters(k: int) -> List[str]:
    return [f"a{i}" for i in range(k)]


@lru_cache(maxsize=None)
def vocabulary(c: ClassId) -> Vocabulary:
    """Vocabolario fisso della classe."""
    tag = c.tag
    if tag == "strings":
        return Vocabulary.of(("lt", "ee"), *[(a, "e") for a in letters(c.param)])
    if tag in ("trees", "binary-trees", "bounded-height-trees"):
        return Vocabulary.of(("parent", "ee"))
    if tag == "labelled-trees":
        return Vocabulary.of(("parent", "ee"), *[(a, "e") for a in letters(c.param)])
    if tag in ("ordered-trees", "ordered-binary-trees"):
        return Vocabulary.of(("parent", "ee"), ("before", "ee"))
    if tag in ("graphs-edge", "acyclic-graphs"):
        return Vocabulary.of(("edge", "ee"))
    if tag == "graphs-incidence":
        return Vocabulary.of(("inc", "ee"))
    if tag in ("hypergraphs", "laminar", "k-uniform"):
        return Vocabulary.of(("hyperedge", "s"))
    if tag == "k-ary":
        return Vocabulary.of(("R", "e" * c.param))
    if tag == "bipartite":
        return Vocabulary.of((LEFT, "e"), ("edge", "ee"))
    if tag == "matrices":
        return Vocabulary.of(("row", "e"), *[(f"val{a}", "ee") for a in range(1, c.param)])
    if tag == "matroid-independence":
        return Vocabulary.of(("indep", "s"))
    if tag == "matroid-null":
        return Vocabulary.of(("null", "s" * (c.param - 1)))
    if tag == "bool":
        return Vocabulary()
    if tag == "pairs":
        return pair_vocabulary(vocabulary(c.left), vocabulary(c.right))
    raise MalformedInput(f"Classe sconosciuta: '{tag}'")


def make(c: ClassId, universe: int, relations: Optional[Dict[str, Iterable]] = None) -> Structure:
    """Costruisce una struttura nel vocabolario della classe (senza verificarne l'appartenenza)."""
    return Structure.build(vocabulary(c), universe, relations or {})


# -- costruttori e letture per stringhe e alberi ---------------------------------------


def string_structure(word: Sequence[int], k: int) -> Structure:
    """Stringa come struttura: predicati di lettera e ordine stretto lt."""
    if not word:
        raise MalformedInput("La stringa vuota non ha universo")
    rels: Dict[str, list] = {a: [] for a in letters(k)}
    for i, letter in enumerate(word):
        if not 0 <= letter < k:
            raise MalformedInput(f"Lettera {letter} fuori dall'alfabeto di {k} lettere")
        rels[f"a{letter}"].append((i,))
    rels["lt"] = [(i, j) for i in range(len(word)) for j in range(i + 1, len(word))]
    return make(strings(k), len(word), rels)


def parse_word(text: str) -> List[int]:
    """'abc' -> [0, 1, 2]"""
    return [ord(ch) - ord("a") for ch in text]


def word_text(word: Sequence[int]) -> str:
    return "".join(chr(ord("a") + i) for i in word)


def positions(A: Structure) -> List[int]:
    """Elementi di una stringa nell'ordine lt."""
    before = {x: 0 for x in range(A.universe)}
    for x, _ in A.tuples("lt"):
        before[x] += 1
    return sorted(range(A.universe), key=lambda x: -before[x])


def letter_of(A: Structure, x: int) -> int:
    for name in A.vocabulary.names:
        if name.startswith("a") and name[1:].isdigit() and (x,) in A.relations[name]:
            return int(name[1:])
    raise MalformedInput(f"L'elemento {x} non ha lettera")


def word_of(A: Structure) -> List[int]:
    return [letter_of(A, x) for x in positions(A)]


def tree_structure(
    parents: Sequence[Optional[int]],
    labels: Optional[Sequence[int]] = None,
    k: Optional[int] = None,
    ordered: bool = False,
) -> Structure:
    """
    Albero da un vettore di padri (None per la radice).

    Args:
        parents: parents[x] = padre di x
        labels: Etichette per nodo (alberi etichettati con k lettere)
        ordered: Se True aggiunge 'before' ordinando i fratelli per id
    """
    n = len(parents)
    rels: Dict[str, list] = {"parent": [(x, p) for x, p in enumerate(parents) if p is not None]}
    if labels is not None:
        k = k if k is not None else max(labels) + 1
        for a in letters(k):
            rels[a] = []
        for x, label in enumerate(labels):
            rels[f"a{label}"].append((x,))
        return make(labelled_trees(k), n, rels)
    if ordered:
        rels["before"] = [
            (x, y) for x in range(n) for y in range(x + 1, n)
            if parents[x] is not None and parents[x] == parents[y]
        ]
        return make(ORDERED_TREES, n, rels)
    return make(TREES, n, rels)


def parent_map(A: Structure) -> Dict[int, int]:
    return {child: par for child, par in A.tuples("parent")}


def children_map(A: Structure) -> Dict[int, List[int]]:
    """Figli per nodo; ordinati secondo 'before' se presente, altrimenti per id."""
    kids: Dict[int, List[int]] = {x: [] for x in range(A.universe)}
    for child, par in A.tuples("parent"):
        kids[par].append(child)
    if "before" in A.vocabulary:
        rank = {x: 0 for x in range(A.universe)}
        for x, _ in A.tuples("before"):
            rank[x] += 1
        for x in kids:
            kids[x].sort(key=lambda y: (-rank[y], y))
    else:
        for x in kids:
            kids[x].sort()
    return kids


def tree_root(A: Structure) -> int:
    parents = parent_map(A)
    roots = [x for x in range(A.universe) if x not in parents]
    if len(roots) != 1:
        raise MalformedInput(f"Attesa una radice, trovate {len(roots)}")
    return roots[0]


def depths(A: Structure) -> Dict[int, int]:
    parents = parent_map(A)
    out: Dict[int, int] = {}
    for x in range(A.universe):
        d, y = 0, x
        while y in parents and d <= A.universe:
            y = parents[y]
            d += 1
        out[x] = d
    return out


# -- appartenenza ---------------------------------------------------------------------


def _strict_total_order(elements: Sequence[int], pairs_: Set[Tuple[int, int]]) -> bool:
    for x in elements:
        if (x, x) in pairs_:
            return False
    for x, y in combinations(elements, 2):
        if ((x, y) in pairs_) == ((y, x) in pairs_):
            return False
    for x, y, z in permutations(elements, 3):
        if (x, y) in pairs_ and (y, z) in pairs_ and (x, z) not in pairs_:
            return False
    return True


def _exactly_one_label(A: Structure, names: Sequence[str]) -> bool:
    for x in range(A.universe):
        if sum((x,) in A.relations[a] for a in names) != 1:
            return False
    return True


def _is_tree(A: Structure) -> bool:
    parents: Dict[int, int] = {}
    for child, par in A.tuples("parent"):
        if child == par or child in parents:
            return False
        parents[child] = par
    roots = [x for x in range(A.universe) if x not in parents]
    if len(roots) != 1:
        return False
    for x in range(A.universe):
        y, steps = x, 0
        while y in parents:
            y = parents[y]
            steps += 1
            if steps > A.universe:
                return False
    return True


def _is_ordered(A: Structure) -> bool:
    parents = parent_map(A)
    before = set(A.tuples("before"))
    for x, y in before:
        if x not in parents or y not in parents or parents[x] != parents[y]:
            return False
    for siblings in children_map(A).values():
        if not _strict_total_order(siblings, before):
            return False
    return True


def independence_violation(n: int, family: Iterable[FrozenSet[int]]) -> Optional[str]:
    """Verifica gli assiomi di indipendenza; None se la famiglia è un matroide."""
    fam = {frozenset(s) for s in family}
    if frozenset() not in fam:
        return "empty set not independent"
    for s in fam:
        if any(x < 0 or x >= n for x in s):
            return "id out of range"
        for x in s:
            if s - {x} not in fam:
                return "not downward closed"
    ordered = sorted(fam, key=lambda s: (len(s), sorted(s)))
    for small in ordered:
        for large in ordered:
            if len(large) <= len(small):
                continue
            if not any(small | {x} in fam for x in large - small):
                return "exchange axiom"
    return None


def null_rows(vectors: Iterable[Sequence[int]], q: int) -> Set[Tuple[Tuple[int, ...], ...]]:
    """
    Tuple (X_1..X_{q-1}) della relazione null per un insieme di vettori di
    coefficienti: x compare in esattamente c_x degli insiemi.
    """
    rows = set()
    slots = q - 1
    for vector in vectors:
        choices = [list(combinations(range(slots), c)) for c in vector]
        for pick in product(*choices):
            sets: List[List[int]] = [[] for _ in range(slots)]
            for x, chosen in enumerate(pick):
                for i in chosen:
                    sets[i].append(x)
            rows.add(tuple(tuple(s) for s in sets))
    return rows


def null_vector(row: Sequence[Sequence[int]], n: int) -> Tuple[int, ...]:
    counts = [0] * n
    for s in row:
        for x in s:
            counts[x] += 1
    return tuple(counts)


def _null_is_subspace(A: Structure, q: int, budget: Budget) -> bool:
    n = A.universe
    budget.require("subsets", n * (q - 1), "matroid-null: n·(q-1)")
    rows = A.tuples("null")
    vectors = {null_vector(row, n) for row in rows}
    if len(null_rows(vectors, q)) != len(rows):
        return False
    if tuple([0] * n) not in vectors:
        return False
    for u in vectors:
        for v in vectors:
            if tuple((a + b) % q for a, b in zip(u, v)) not in vectors:
                return False
    return True


def member(c: ClassId, A: Structure, budget: Optional[Budget] = None) -> bool:
    """True se A soddisfa gli assiomi della classe c."""
    if A.vocabulary != vocabulary(c):
        raise VocabularyMismatch(f"La struttura non è nel vocabolario di {c}")
    if validate(A) is not None:
        return False
    tag, n = c.tag, A.universe
    if tag == "strings":
        return _strict_total_order(range(n), set(A.tuples("lt"))) and _exactly_one_label(A, letters(c.param))
    if tag in TREE_TAGS:
        if not _is_tree(A):
            return False
        kids = children_map(A)
        if tag in ("binary-trees", "ordered-binary-trees") and any(len(v) > 2 for v in kids.values()):
            return False
        if tag == "bounded-height-trees" and max(depths(A).values()) > c.param:
            return False
        if tag == "labelled-trees":
            return _exactly_one_label(A, letters(c.param))
        if tag in ("ordered-trees", "ordered-binary-trees"):
            return _is_ordered(A)
        return True
    if tag == "graphs-edge":
        edges = set(A.tuples("edge"))
        return all(x != y and (y, x) in edges for x, y in edges)
    if tag == "acyclic-graphs":
        graph = nx.DiGraph()
        graph.add_nodes_from(range(n))
        graph.add_edges_from(A.tuples("edge"))
        return nx.is_directed_acyclic_graph(graph)
    if tag == "graphs-incidence":
        ends: Dict[int, Set[int]] = {}
        for e, v in A.tuples("inc"):
            ends.setdefault(e, set()).add(v)
        vertices = set().union(*ends.values()) if ends else set()
        return not (vertices & set(ends)) and all(len(vs) == 2 for vs in ends.values())
    if tag == "hypergraphs":
        return True
    if tag == "laminar":
        edges = [set(row[0]) for row in A.tuples("hyperedge")]
        for e, f in combinations(edges, 2):
            if e & f and not (e <= f or f <= e):
                return False
        return True
    if tag == "k-uniform":
        return all(len(row[0]) == c.param for row in A.tuples("hyperedge"))
    if tag == "k-ary":
        return True
    if tag == "bipartite":
        left = {row[0] for row in A.tuples(LEFT)}
        return all(x in left and y not in left for x, y in A.tuples("edge"))
    if tag == "matrices":
        rows = {row[0] for row in A.tuples("row")}
        seen: Set[Tuple[int, int]] = set()
        for a in range(1, c.param):
            for r, col in A.tuples(f"val{a}"):
                if r not in rows or col in rows or (r, col) in seen:
                    return False
                seen.add((r, col))
        return True
    if tag == "matroid-independence":
        return independence_violation(n, (frozenset(row[0]) for row in A.tuples("indep"))) is None
    if tag == "matroid-null":
        return _null_is_subspace(A, c.param, budget or default_budget())
    if tag == "bool":
        return n == 1
    if tag == "pairs":
        lefts = {row[0] for row in A.tuples(LEFT)}
        if not lefts or len(lefts) == n:
            return False
        # nessuna relazione può attraversare le due componenti
        for name in A.vocabulary.names:
            if name == LEFT:
                continue
            side = name.startswith("l_")
            for row in A.relations[name]:
                ids = [s for slot in row for s in ((slot,) if isinstance(slot, int) else slot)]
                if any((x in lefts) != side for x in ids):
                    return False
        return member(c.left, project_left(A), budget) and member(c.right, project_right(A), budget)
    raise MalformedInput(f"Classe sconosciuta: '{tag}'")


# -- generatori ---------------------------------------------------------------------------


def census_bound(c: ClassId) -> int:
    """Universo massimo enumerabile per la classe."""
    tag = c.tag
    if tag == "strings":
        return 6 if c.param <= 2 else 4
    if tag == "labelled-trees":
        return 5
    if tag in TREE_TAGS:
        return 7
    if tag in ("graphs-edge", "acyclic-graphs", "k-uniform", "matroid-independence"):
        return 5
    if tag in ("graphs-incidence", "bipartite", "laminar"):
        return 6
    if tag == "hypergraphs":
        return 4
    if tag == "k-ary":
        n = 1
        while (n + 1) ** c.param <= 10:
            n += 1
        return n
    if tag == "matrices":
        return 6 if c.param == 2 else 5
    if tag == "matroid-null":
        return 5 if c.param == 2 else 3
    if tag == "bool":
        return 1
    if tag == "pairs":
        return min(census_bound(c.left), census_bound(c.right)) + 1
    raise MalformedInput(f"Classe sconosciuta: '{tag}'")


def _parent_arrays(n: int) -> Iterable[List[Optional[int]]]:
    # ogni albero radicato ammette una numerazione con padre < figlio
    for choice in product(*[range(i) for i in range(1, n)]):
        yield [None] + list(choice)


def _labelled_candidates(c: ClassId, n: int) -> Iterable[Structure]:
    tag = c.tag
    if tag == "strings":
        for word in product(range(c.param), repeat=n):
            yield string_structure(word, c.param)
    elif tag in ("trees", "binary-trees", "bounded-height-trees"):
        for parents in _parent_arrays(n):
            yield make(c, n, {"parent": [(x, p) for x, p in enumerate(parents) if p is not None]})
    elif tag == "labelled-trees":
        for shape in representatives(TREES, n):
            rows = shape.tuples("parent")
            for labels in product(range(c.param), repeat=n):
                rels: Dict[str, list] = {a: [] for a in letters(c.param)}
                for x, label in enumerate(labels):
                    rels[f"a{label}"].append((x,))
                rels["parent"] = list(rows)
                yield make(c, n, rels)
    elif tag in ("ordered-trees", "ordered-binary-trees"):
        for parents in _parent_arrays(n):
            ordered = tree_structure(parents, ordered=True)
            yield Structure(vocabulary(c), n, ordered.relations)
    elif tag == "graphs-edge":
        pairs_ = list(combinations(range(n), 2))
        for chosen in product((False, True), repeat=len(pairs_)):
            edges = [p for p, keep in zip(pairs_, chosen) if keep]
            yield make(c, n, {"edge": edges + [(y, x) for x, y in edges]})
    elif tag == "acyclic-graphs":
        pairs_ = list(combinations(range(n), 2))
        for chosen in product((False, True), repeat=len(pairs_)):
            yield make(c, n, {"edge": [p for p, keep in zip(pairs_, chosen) if keep]})
    elif tag == "graphs-incidence":
        for m in range(1, n + 1):
            for multiset in _edge_multisets(m, n - m):
                rows = []
                for i, (u, v) in enumerate(multiset):
                    rows += [(m + i, u), (m + i, v)]
                yield make(c, n, {"inc": rows})
    elif tag == "k-uniform":
        candidates = list(combinations(range(n), c.param))
        for chosen in product((False, True), repeat=len(candidates)):
            yield make(c, n, {"hyperedge": [(e,) for e, keep in zip(candidates, chosen) if keep]})
    elif tag == "k-ary":
        cells = list(product(range(n), repeat=c.param))
        for chosen in product((False, True), repeat=len(cells)):
            yield make(c, n, {"R": [t for t, keep in zip(cells, chosen) if keep]})
    elif tag == "bipartite":
        for a in range(n + 1):
            cells = [(x, y) for x in range(a) for y in range(a, n)]
            for chosen in product((False, True), repeat=len(cells)):
                yield make(c, n, {LEFT: [(x,) for x in range(a)],
                                  "edge": [t for t, keep in zip(cells, chosen) if keep]})
    elif tag == "matrices":
        for r in range(n + 1):
            cells = [(x, y) for x in range(r) for y in range(r, n)]
            for values in product(range(c.param), repeat=len(cells)):
                rels: Dict[str, list] = {f"val{a}": [] for a in range(1, c.param)}
                for cell, a in zip(cells, values):
                    if a:
                        rels[f"val{a}"].append(cell)
                rels["row"] = [(x,) for x in range(r)]
                yield make(c, n, rels)
    elif tag == "matroid-independence":
        for family in _matroid_families(n):
            yield make(c, n, {"indep": [(tuple(sorted(s)),) for s in family]})
    elif tag == "matroid-null":
        for space in _subspaces(n, c.param):
            yield make(c, n, {"null": null_rows(space, c.param)})
    else:
        raise MalformedInput(f"Nessun generatore per '{tag}'")


def _edge_multisets(m: int, count: int) -> Iterable[Tuple[Tuple[int, int], ...]]:
    """Multinsiemi di count coppie non ordinate di vertici distinti su m vertici."""
    return combinations_with_replacement(list(combinations(range(m), 2)), count)


def _matroid_families(n: int) -> Iterable[Set[FrozenSet[int]]]:
    # famiglie di basi con l'assioma di scambio, poi chiusura verso il basso
    for r in range(n + 1):
        candidates = [frozenset(s) for s in combinations(range(n), r)]
        for bits in range(1, 1 << len(candidates)):
            bases = [candidates[i] for i in range(len(candidates)) if bits >> i & 1]
            if _basis_exchange(bases):
                family: Set[FrozenSet[int]] = set()
                for b in bases:
                    for size in range(len(b) + 1):
                        family.update(frozenset(s) for s in combinations(sorted(b), size))
                yield family


def _basis_exchange(bases: Sequence[FrozenSet[int]]) -> bool:
    lookup = set(bases)
    for b1 in bases:
        for b2 in bases:
            for x in b1 - b2:
                if not any((b1 - {x}) | {y} in lookup for y in b2 - b1):
                    return False
    return True


def _subspaces(n: int, q: int) -> Iterable[Set[Tuple[int, ...]]]:
    """Tutti i sottospazi di GF(q)^n, uno per forma a scala ridotta."""
    for d in range(n + 1):
        for pivots in combinations(range(n), d):
            free = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivots]
            for values in product(range(q), repeat=len(free)):
                rows = [[0] * n for _ in range(d)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, j), v in zip(free, values):
                    rows[i][j] = v
                span = set()
                for coeffs in product(range(q), repeat=d):
                    span.add(tuple(sum(a * row[j] for a, row in zip(coeffs, rows)) % q for j in range(n)))
                yield span


def _hypergraph_orbits(n: int) -> List[int]:
    """
    Famiglie di sottoinsiemi (bitmask su 2^n bit) minime nella propria orbita:
    minimo lessicografico su tutte le permutazioni dei vertici.
    """
    subsets = 1 << n
    tables = []
    for perm in permutations(range(n)):
        image = [sum(1 << perm[i] for i in range(n) if m >> i & 1) for m in range(subsets)]
        chunks = []
        for start in range(0, subsets, 8):
            width = min(8, subsets - start)
            table = []
            for byte in range(1 << width):
                out = 0
                for b in range(width):
                    if byte >> b & 1:
                        out |= 1 << image[start + b]
                table.append(out)
            chunks.append((start, (1 << width) - 1, table))
        tables.append(chunks)
    reps = []
    for family in range(1 << subsets):
        for chunks in tables:
            img = 0
            for start, mask, table in chunks:
                img |= table[(family >> start) & mask]
            if img < family:
                break
        else:
            reps.append(family)
    return reps


def _laminar_size(block: tuple) -> int:
    free, subs = block
    return free + sum(_laminar_size(s) for s in subs)


@lru_cache(maxsize=None)
def _laminar_blocks(m: int) -> Tuple[tuple, ...]:
    """Iperarchi (con il loro contenuto) che coprono esattamente m vertici."""
    out = []
    for free in range(m + 1):
        for subs in _block_multisets(m - free, min(m - free, m - 1)):
            if free == 0 and len(subs) < 2:
                continue
            out.append((free, subs))
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _block_multisets(total: int, largest: int) -> Tuple[tuple, ...]:
    catalogue = [b for size in range(1, largest + 1) for b in _laminar_blocks(size)]
    result: List[tuple] = []

    def extend(start: int, remaining: int, chosen: List[tuple]) -> None:
        if remaining == 0:
            result.append(tuple(chosen))
            return
        for i in range(start, len(catalogue)):
            size = _laminar_size(catalogue[i])
            if size <= remaining:
                extend(i, remaining - size, chosen + [catalogue[i]])

    extend(0, total, [])
    return tuple(result)


def _laminar_families(n: int) -> Iterable[List[Tuple[int, ...]]]:
    """Famiglie laminari di insiemi non vuoti, una per forma di foresta."""
    for free in range(n + 1):
        for blocks in _block_multisets(n - free, n - free):
            edges: List[Tuple[int, ...]] = []
            counter = [free]

            def place(block: tuple) -> List[int]:
                own, subs = block
                members = list(range(counter[0], counter[0] + own))
                counter[0] += own
                for sub in subs:
                    members += place(sub)
                edges.append(tuple(sorted(members)))
                return members

            for block in blocks:
                place(block)
            yield edges


def _dedup(candidates: Iterable[Structure], budget: Budget) -> List[Structure]:
    seen: Dict[tuple, Structure] = {}
    for s in candidates:
        form = canonical_form(s, budget=budget)
        if form.key not in seen:
            seen[form.key] = s.relabel(form.labelling)
    return [seen[k] for k in sorted(seen)]


@lru_cache(maxsize=None)
def _representatives(c: ClassId, n: int, budget: Budget) -> Tuple[Structure, ...]:
    if n < 1:
        return ()
    tag = c.tag
    if tag == "bool":
        return (make(c, 1),) if n == 1 else ()
    if tag == "pairs":
        out = []
        for a in range(1, n):
            for left in _representatives(c.left, a, budget):
                for right in _representatives(c.right, n - a, budget):
                    out.append(pair(left, right))
        return tuple(out)
    if tag == "hypergraphs":
        out = []
        for family in _hypergraph_orbits(n):
            rows = [(tuple(i for i in range(n) if m >> i & 1),) for m in range(1 << n) if family >> m & 1]
            out.append(make(c, n, {"hyperedge": rows}))
        return tuple(out)
    if tag == "laminar":
        candidates = []
        for edges in _laminar_families(n):
            for with_empty in (False, True):
                rows = [(e,) for e in edges] + ([((),)] if with_empty else [])
                candidates.append(make(c, n, {"hyperedge": rows}))
        return tuple(_dedup(candidates, budget))
    candidates = (s for s in _labelled_candidates(c, n) if member(c, s, budget))
    return tuple(_dedup(candidates, budget))


def representatives(c: ClassId, n: int, budget: Optional[Budget] = None) -> List[Structure]:
    """
    Un rappresentante canonico per classe di isomorfismo con universo
    esattamente n.
    """
    if n > census_bound(c):
        raise BudgetExceeded(f"census({c}, {n}): oltre il limite documentato {census_bound(c)}")
    return list(_representatives(c, n, budget or default_budget()))


def corpus(c: ClassId, max_size: int, budget: Optional[Budget] = None) -> List[Structure]:
    """Rappresentanti di tutte le dimensioni 1..max_size."""
    out: List[Structure] = []
    for n in range(1, max_size + 1):
        out.extend(representatives(c, n, budget))
    return out


def census(c: ClassId, n: int, budget: Optional[Budget] = None) -> int:
    """Numero di classi di isomorfismo con universo <= n."""
    total = sum(len(representatives(c, m, budget)) for m in range(1, n + 1))
    logger.debug("census(%s, %d) = %d", c, n, total)
    return total


def labelled_count(c: ClassId, n: int) -> Optional[int]:
    """Numero di strutture etichettate su n elementi, dove esiste una formula chiusa."""
    tag = c.tag
    if tag == "k-ary":
        return 2 ** (n ** c.param)
    if tag == "hypergraphs":
        return 2 ** (2 ** n)
    if tag == "graphs-edge":
        return 2 ** comb(n, 2)
    if tag == "k-uniform":
        return 2 ** comb(n, c.param)
    if tag == "strings":
        return factorial(n) * c.param ** n
    if tag == "bool":
        return 1 if n == 1 else 0
    return None


def census_lower_bound(c: ClassId, n: int) -> int:
    """
    Limite inferiore per census(c, n) senza enumerare: ogni classe di
    isomorfismo contiene al più m! strutture etichettate.
    """
    total = 0
    for m in range(1, n + 1):
        count = labelled_count(c, m)
        if count is None:
            raise MalformedInput(f"Nessun conteggio etichettato per {c}")
        total += -(-count // factorial(m))
    return total
