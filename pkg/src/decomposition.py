"""
Alberi cubici con foglie etichettate

Una decomposizione è rappresentata dall'insieme dei suoi split: per ogni
spigolo, la bitmask delle foglie sul lato che non contiene la foglia 0.
Enumerazione per inserimento di foglie, ricerca esaustiva dell'ottimo,
radicamento su uno spigolo ed export DOT.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Tuple, Union

from .config import Budget, default_budget
from .errors import MalformedInput

logger = logging.getLogger(__name__)

RootedTree = Union[int, Tuple["RootedTree", "RootedTree"]]


def bits(mask: int) -> List[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def mask_of(elements) -> int:
    out = 0
    for x in elements:
        out |= 1 << x
    return out


@dataclass(frozen=True)
class BranchDecomposition:
    """Albero con nodi interni di grado 3; le foglie sono 0..leaves-1."""
    leaves: int
    splits: FrozenSet[int]

    @property
    def full(self) -> int:
        return (1 << self.leaves) - 2

    def validate(self) -> Optional[str]:
        n = self.leaves
        if n < 1:
            return "nessuna foglia"
        expected = 2 * n - 3 if n >= 2 else 0
        if len(self.splits) != expected:
            return f"attesi {expected} spigoli, trovati {len(self.splits)}"
        for s in self.splits:
            if s <= 0 or s & 1 or s > self.full:
                return f"taglio non valido {bits(s)}"
        for leaf in range(1, n):
            if (1 << leaf) not in self.splits:
                return f"la foglia {leaf} non ha uno spigolo pendente"
        if n >= 2 and self.full not in self.splits:
            return "la foglia 0 non ha uno spigolo pendente"
        for a in self.splits:
            for b in self.splits:
                if a & b and not (a & b == a or a & b == b):
                    return f"tagli incompatibili {bits(a)} / {bits(b)}"
        return None

    def width(self, cut: Callable[[int], int]) -> int:
        return max((cut(s) for s in self.splits), default=0)

    @cached_property
    def sorted_splits(self) -> Tuple[int, ...]:
        return tuple(sorted(self.splits))

    @cached_property
    def internal_ids(self) -> Dict[int, int]:
        """Nodo interno identificato dalla bitmask del sottoalbero sotto di esso."""
        internal = [s for s in self.sorted_splits if s & (s - 1)]
        return {s: self.leaves + i for i, s in enumerate(internal)}

    def _lower(self, s: int) -> int:
        return self.internal_ids[s] if s & (s - 1) else s.bit_length() - 1

    def edges(self) -> List[Tuple[int, int, int]]:
        """Spigoli espliciti (nodo superiore, nodo inferiore, split)."""
        out = []
        for s in self.sorted_splits:
            parents = [a for a in self.splits if a != s and a & s == s]
            upper = self._lower(min(parents, key=lambda a: bin(a).count("1"))) if parents else 0
            out.append((upper, self._lower(s), s))
        return out

    def adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, List[int]] = {x: [] for x in range(self.leaves)}
        for upper, lower, _ in self.edges():
            adj.setdefault(upper, []).append(lower)
            adj.setdefault(lower, []).append(upper)
        return adj

    def root_edge(self) -> Optional[int]:
        """Spigolo che minimizza il lato maggiore; parità risolta per bitmask."""
        if not self.splits:
            return None
        n = self.leaves

        def balance(s: int) -> Tuple[int, int]:
            size = bin(s).count("1")
            return (max(size, n - size), s)

        return min(self.splits, key=balance)

    def rooted(self, split: Optional[int] = None) -> RootedTree:
        """
        Albero binario radicato ottenuto suddividendo lo spigolo split
        (default: root_edge()). Figli ordinati per foglia minima.
        """
        if self.leaves == 1:
            return 0
        split = self.root_edge() if split is None else split
        if split not in self.splits:
            raise MalformedInput(f"Lo spigolo {bits(split)} non appartiene alla decomposizione")
        adj = self.adjacency()
        upper, lower = next((u, l) for u, l, s in self.edges() if s == split)

        def hang(node: int, parent: int) -> RootedTree:
            if node < self.leaves:
                return node
            kids = [hang(c, node) for c in adj[node] if c != parent]
            kids.sort(key=min_leaf)
            return (kids[0], kids[1])

        pair = sorted([hang(upper, lower), hang(lower, upper)], key=min_leaf)
        return (pair[0], pair[1])

    def to_json(self) -> Dict[str, object]:
        return {"leaves": self.leaves, "splits": [bits(s) for s in self.sorted_splits]}

    @classmethod
    def from_json(cls, doc) -> "BranchDecomposition":
        try:
            t = cls(int(doc["leaves"]), frozenset(mask_of(s) for s in doc.get("splits", [])))
        except (KeyError, TypeError, ValueError):
            raise MalformedInput("Decomposizione non valida: attesi 'leaves' e 'splits'")
        problem = t.validate()
        if problem:
            raise MalformedInput(f"Decomposizione non valida: {problem}")
        return t

    def to_dot(self, labels: Optional[List[str]] = None) -> str:
        lines = ["graph decomposition {"]
        for leaf in range(self.leaves):
            label = labels[leaf] if labels else str(leaf)
            lines.append(f'  {leaf} [shape=box, label="{label}"];')
        for node in self.internal_ids.values():
            lines.append(f'  {node} [shape=point];')
        for upper, lower, _ in self.edges():
            lines.append(f"  {upper} -- {lower};")
        lines.append("}")
        return "\n".join(lines)


def min_leaf(tree: RootedTree) -> int:
    return tree if isinstance(tree, int) else min(min_leaf(tree[0]), min_leaf(tree[1]))


def rooted_leaves(tree: RootedTree) -> List[int]:
    """Foglie in ordine DFS sinistra-destra."""
    if isinstance(tree, int):
        return [tree]
    return rooted_leaves(tree[0]) + rooted_leaves(tree[1])


def all_decompositions(n: int, budget: Optional[Budget] = None) -> Iterator[BranchDecomposition]:
    """Tutti gli alberi cubici con n foglie etichettate, ciascuno una volta."""
    budget = budget or default_budget()
    budget.require("branch_leaves", n, "foglie dell'albero cubico")
    if n < 1:
        raise MalformedInput("Una decomposizione richiede almeno una foglia")
    if n == 1:
        yield BranchDecomposition(1, frozenset())
        return

    def grow(splits: FrozenSet[int], leaf: int) -> Iterator[FrozenSet[int]]:
        if leaf == n:
            yield splits
            return
        bit = 1 << leaf
        for s in sorted(splits):
            inserted = {a | bit if a != s and a & s == s else a for a in splits if a != s}
            inserted |= {s, s | bit, bit}
            yield from grow(frozenset(inserted), leaf + 1)

    for splits in grow(frozenset({0b10}), 2):
        yield BranchDecomposition(n, splits)


def optimal_decomposition(
    n: int,
    cut: Callable[[int], int],
    budget: Optional[Budget] = None,
) -> Tuple[int, BranchDecomposition]:
    """
    Minimo della larghezza max_spigoli cut(split) su tutti gli alberi cubici.

    A parità di larghezza vince l'albero con la lista di split ordinata
    lessicograficamente minima.
    """
    cache: Dict[int, int] = {}

    def cached(s: int) -> int:
        if s not in cache:
            cache[s] = cut(s)
        return cache[s]

    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    best_tree: Optional[BranchDecomposition] = None
    count = 0
    for tree in all_decompositions(n, budget):
        count += 1
        limit = best[0] if best else None
        width = 0
        for s in tree.splits:
            width = max(width, cached(s))
            if limit is not None and width > limit:
                break
        if limit is not None and width > limit:
            continue
        key = (width, tree.sorted_splits)
        if best is None or key < best:
            best, best_tree = key, tree
    logger.debug("optimal_decomposition: %d alberi, larghezza %d", count, best[0] if best else 0)
    return best[0], best_tree
