"""
Hyper-rankwidth

Rango di una bipartizione (matrice di appartenenza su GF(2)), sensitività
(classi di Myhill-Nerode dei sottoinsiemi di un lato), larghezza ottima e la
compilazione di una decomposizione in un automa ad albero bottom-up con
2^k colori, con la relativa decodifica.
"""

import json
import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from .classes import HYPERGRAPHS, make
from .config import Budget, default_budget
from .decomposition import BranchDecomposition, RootedTree, bits, mask_of, optimal_decomposition, rooted_leaves
from .errors import InvariantViolation, MalformedInput, MSOError
from .gf import gf2_rank
from .matroid import RepresentedMatroid, connectivity, independent_sets
from .structures import Structure

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Hypergraph:
    """Vertici 0..n-1, iperarchi come bitmask (l'insieme vuoto è ammesso)."""
    n: int
    edges: FrozenSet[int]

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(self.edges))
        if self.n < 0:
            raise MalformedInput("Numero di vertici negativo")
        for e in self.edges:
            if e < 0 or e >> self.n:
                raise MalformedInput(f"Iperarco {bits(e)} fuori da 0..{self.n - 1}")

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def has_edge(self, subset: Iterable[int]) -> bool:
        return mask_of(subset) in self.edges

    def sorted_edges(self) -> List[List[int]]:
        return sorted((bits(e) for e in self.edges), key=lambda s: (len(s), s))

    def relabel(self, mapping: Sequence[int]) -> "Hypergraph":
        """mapping[vecchio] = nuovo"""
        return Hypergraph(self.n, frozenset(mask_of(mapping[v] for v in bits(e)) for e in self.edges))

    def to_json(self) -> Dict[str, Any]:
        return {"n": self.n, "edges": self.sorted_edges()}

    @classmethod
    def from_json(cls, doc: Any) -> "Hypergraph":
        try:
            n = int(doc["n"])
            edges = [list(e) for e in doc.get("edges", [])]
        except (KeyError, TypeError, ValueError):
            raise MalformedInput("Ipergrafo non valido: atteso {\"n\": ..., \"edges\": [[...], ...]}")
        masks = [mask_of(e) for e in edges]
        if len(set(masks)) != len(masks):
            raise MalformedInput("Iperarchi duplicati")
        if any(len(set(e)) != len(e) for e in edges):
            raise MalformedInput("Vertice ripetuto in un iperarco")
        return cls(n, frozenset(masks))

    @classmethod
    def loads(cls, text: str) -> "Hypergraph":
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"JSON non valido: {exc}")

    def to_structure(self) -> Structure:
        return make(HYPERGRAPHS, self.n, {"hyperedge": [(tuple(s),) for s in self.sorted_edges()]})

    @classmethod
    def from_structure(cls, A: Structure) -> "Hypergraph":
        return cls(A.universe, frozenset(mask_of(row[0]) for row in A.tuples("hyperedge")))


def _check_side(G: Hypergraph, side: int, budget: Optional[Budget]) -> None:
    if side & ~G.full:
        raise MalformedInput(f"Lato {bits(side)} fuori da 0..{G.n - 1}")
    size = bin(side).count("1")
    (budget or default_budget()).require("cut_side", min(size, G.n - size), "lato minore della bipartizione")


def _rows(G: Hypergraph, side: int) -> Dict[int, int]:
    """
    Righe non nulle della matrice M[X, Z] = [X ∪ Z iperarco], per X ⊆ side e
    Z ⊆ complemento. La riga di X è una bitmask indicizzata dalle maschere Z.
    """
    rows: Dict[int, int] = {}
    for e in G.edges:
        x = e & side
        rows[x] = rows.get(x, 0) | 1 << (e & ~side)
    return rows


def bipartition_rank(G: Hypergraph, side: Union[int, Iterable[int]], budget: Optional[Budget] = None) -> int:
    """Rango su GF(2) della matrice di appartenenza (righe distinte)."""
    side = side if isinstance(side, int) else mask_of(side)
    _check_side(G, side, budget)
    return gf2_rank(sorted(set(_rows(G, side).values())))


def sensitivity(G: Hypergraph, side: Union[int, Iterable[int]], budget: Optional[Budget] = None) -> int:
    """
    Numero di classi di X ~ Y sui sottoinsiemi di side, cioè di righe
    distinte della matrice di appartenenza (la riga nulla conta se esiste un
    X che non è traccia di alcun iperarco).
    """
    side = side if isinstance(side, int) else mask_of(side)
    _check_side(G, side, budget)
    rows = _rows(G, side)
    distinct = len(set(rows.values()))
    if len(rows) < 1 << bin(side).count("1"):
        distinct += 1
    r = gf2_rank(sorted(set(rows.values())))
    if not r <= distinct <= 1 << r:
        raise InvariantViolation(f"rank={r}, sensitività={distinct} per il lato {bits(side)}")
    return distinct


def hyper_rankwidth(G: Hypergraph, budget: Optional[Budget] = None) -> Tuple[int, BranchDecomposition]:
    if G.n < 1:
        raise MalformedInput("Hyper-rankwidth definita per almeno un vertice")
    return optimal_decomposition(G.n, lambda s: bipartition_rank(G, s, budget), budget)


def decomposition_width(G: Hypergraph, T: BranchDecomposition, budget: Optional[Budget] = None) -> int:
    if T.leaves != G.n:
        raise MalformedInput("La decomposizione non ha una foglia per vertice")
    return T.width(lambda s: bipartition_rank(G, s, budget))


def _least_member_key(mask: int) -> Tuple[int, ...]:
    return tuple(bits(mask))


def node_colouring(G: Hypergraph, side: int, budget: Optional[Budget] = None) -> Dict[int, int]:
    """
    Colore (da 1) di ogni X ⊆ side: le classi ~ sono numerate per membro
    lessicograficamente minimo.
    """
    budget = budget or default_budget()
    size = bin(side).count("1")
    budget.require("subsets", size, "sottoinsiemi di un nodo")
    rows = _rows(G, side)
    members = bits(side)
    subsets = [mask_of(m for m, keep in zip(members, pick) if keep) for pick in product((0, 1), repeat=size)]
    subsets.sort(key=_least_member_key)
    colour_of_row: Dict[int, int] = {}
    colouring: Dict[int, int] = {}
    for x in subsets:
        row = rows.get(x, 0)
        if row not in colour_of_row:
            colour_of_row[row] = len(colour_of_row) + 1
        colouring[x] = colour_of_row[row]
    return colouring


@dataclass(frozen=True)
class CompiledNode:
    """Foglia (colori di ∅ e {x}) oppure nodo binario con tabella alpha."""
    leaf: Optional[Tuple[int, int]] = None
    children: Optional[Tuple[int, int]] = None
    alpha: Optional[Tuple[Tuple[int, ...], ...]] = None

    def to_json(self) -> Dict[str, Any]:
        if self.leaf is not None:
            return {"leaf": list(self.leaf)}
        return {"children": list(self.children), "alpha": [list(r) for r in self.alpha]}


@dataclass(frozen=True)
class CompiledDecomposition:
    """
    Automa bottom-up con 2^k colori. I nodi sono in ordine post-visita
    (figli prima del padre); le foglie, in ordine DFS, sono i vertici
    dell'ipergrafo decodificato.
    """
    k: int
    nodes: Tuple[CompiledNode, ...]
    root: int
    accepting: FrozenSet[int]
    vertices: Tuple[int, ...] = field(default=())

    @property
    def colours(self) -> int:
        return 1 << self.k

    def validate(self) -> Optional[str]:
        if not self.nodes or not 0 <= self.root < len(self.nodes):
            return "root out of range"
        used = set()
        for i, node in enumerate(self.nodes):
            if (node.leaf is None) == (node.children is None):
                return f"node {i}: exactly one of leaf/children required"
            if node.leaf is not None:
                if len(node.leaf) != 2 or any(not 1 <= c <= self.colours for c in node.leaf):
                    return f"node {i}: leaf colours out of 1..{self.colours}"
                continue
            if len(node.children) != 2 or any(not 0 <= c < i for c in node.children):
                return f"node {i}: children must precede their parent"
            used.update(node.children)
            alpha = node.alpha or ()
            if len(alpha) != self.colours or any(len(r) != self.colours for r in alpha):
                return f"node {i}: alpha must be {self.colours}x{self.colours}"
            if any(not 1 <= c <= self.colours for r in alpha for c in r):
                return f"node {i}: alpha values out of 1..{self.colours}"
        if len(used) != len(self.nodes) - 1 or self.root in used:
            return "nodes do not form a single tree"
        if any(not 1 <= c <= self.colours for c in self.accepting):
            return "accepting colour out of range"
        return None

    @property
    def leaf_nodes(self) -> List[int]:
        """Indici dei nodi foglia in ordine DFS sinistra-destra."""
        out: List[int] = []

        def walk(i: int) -> None:
            node = self.nodes[i]
            if node.leaf is not None:
                out.append(i)
            else:
                walk(node.children[0])
                walk(node.children[1])

        walk(self.root)
        return out

    def to_json(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "k": self.k,
            "root": self.root,
            "nodes": [n.to_json() for n in self.nodes],
            "accepting": sorted(self.accepting),
        }
        if self.vertices:
            doc["vertices"] = list(self.vertices)
        return doc

    @classmethod
    def from_json(cls, doc: Any) -> "CompiledDecomposition":
        try:
            nodes = []
            for raw in doc["nodes"]:
                if "leaf" in raw:
                    nodes.append(CompiledNode(leaf=tuple(int(c) for c in raw["leaf"])))
                else:
                    nodes.append(CompiledNode(
                        children=tuple(int(c) for c in raw["children"]),
                        alpha=tuple(tuple(int(c) for c in r) for r in raw["alpha"]),
                    ))
            S = cls(int(doc["k"]), tuple(nodes), int(doc["root"]), frozenset(int(c) for c in doc["accepting"]),
                    tuple(int(v) for v in doc.get("vertices", [])))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"Decomposizione compilata non valida: {exc}")
        problem = S.validate()
        if problem:
            raise MalformedInput(f"Decomposizione compilata non valida: {problem}")
        return S


def _subtree_mask(tree: RootedTree) -> int:
    return mask_of(rooted_leaves(tree))


def compile_decomposition(
    G: Hypergraph,
    T: BranchDecomposition,
    root_edge: Optional[int] = None,
    k: Optional[int] = None,
    budget: Optional[Budget] = None,
) -> CompiledDecomposition:
    """
    Compila (G, T) in un automa: ogni nodo x colora X ∩ U_x con la sua
    classe ~_x e alpha_x combina i colori dei figli.

    Args:
        root_edge: split su cui radicare T (default: T.root_edge())
        k: numero di bit di colore; None sceglie il minimo sufficiente

    Raises:
        MSOError: se qualche nodo ha più di 2^k classi
    """
    budget = budget or default_budget()
    if T.leaves != G.n:
        raise MalformedInput("La decomposizione non ha una foglia per vertice")
    budget.require("subsets", G.n, "vertici dell'ipergrafo")
    tree = T.rooted(root_edge)

    colourings: List[Dict[int, int]] = []
    shapes: List[Tuple[Any, ...]] = []

    def visit(t: RootedTree) -> int:
        if isinstance(t, int):
            colourings.append(node_colouring(G, 1 << t, budget))
            shapes.append(("leaf", t))
        else:
            left, right = visit(t[0]), visit(t[1])
            colourings.append(node_colouring(G, _subtree_mask(t), budget))
            shapes.append(("node", left, right))
        return len(shapes) - 1

    root = visit(tree)
    needed = max(max(c.values()) for c in colourings)
    minimal = max(0, (needed - 1).bit_length())
    if k is None:
        k = minimal
    elif needed > 1 << k:
        raise MSOError(f"Sensitività {needed} oltre 2^{k} colori")
    size = 1 << k

    nodes: List[CompiledNode] = []
    for i, shape in enumerate(shapes):
        colouring = colourings[i]
        if shape[0] == "leaf":
            v = shape[1]
            nodes.append(CompiledNode(leaf=(colouring[0], colouring[1 << v])))
            continue
        _, left, right = shape
        table = [[1] * size for _ in range(size)]
        seen: Dict[Tuple[int, int], int] = {}
        for x, cx in colourings[left].items():
            for y, cy in colourings[right].items():
                value = colouring[x | y]
                if seen.setdefault((cx, cy), value) != value:
                    raise InvariantViolation(f"alpha non ben definita al nodo {i} su ({cx}, {cy})")
                table[cx - 1][cy - 1] = value
        nodes.append(CompiledNode(children=(left, right), alpha=tuple(tuple(r) for r in table)))

    root_colouring = colourings[root]
    accepting = frozenset(c for x, c in root_colouring.items() if x in G.edges)
    S = CompiledDecomposition(k, tuple(nodes), root, accepting, tuple(rooted_leaves(tree)))
    logger.debug("compile_decomposition: n=%d, k=%d, nodi=%d", G.n, k, len(nodes))
    return S


def run_automaton(S: CompiledDecomposition, chosen: int) -> List[int]:
    """
    Colore di ogni nodo per l'assegnazione indicatrice di chosen (bitmask
    sulle posizioni DFS delle foglie).
    """
    position = {node: i for i, node in enumerate(S.leaf_nodes)}
    colour = [0] * len(S.nodes)
    for i, node in enumerate(S.nodes):
        if node.leaf is not None:
            colour[i] = node.leaf[chosen >> position[i] & 1]
        else:
            a, b = node.children
            colour[i] = node.alpha[colour[a] - 1][colour[b] - 1]
    return colour


def decode_decomposition(S: CompiledDecomposition, budget: Optional[Budget] = None) -> Hypergraph:
    """Un insieme di foglie è un iperarco se la corsa termina in un colore accettante."""
    problem = S.validate()
    if problem:
        raise MalformedInput(f"Decomposizione compilata non valida: {problem}")
    n = len(S.leaf_nodes)
    (budget or default_budget()).require("subsets", n, "foglie della decomposizione compilata")
    edges = frozenset(x for x in range(1 << n) if run_automaton(S, x)[S.root] in S.accepting)
    return Hypergraph(n, edges)


def original_labels(S: CompiledDecomposition, H: Hypergraph) -> Hypergraph:
    """Riporta un ipergrafo decodificato sui vertici originali registrati in S.vertices."""
    if len(S.vertices) != H.n:
        raise MalformedInput("La decomposizione compilata non registra i vertici originali")
    return H.relabel(S.vertices)


def node_sides(S: CompiledDecomposition) -> List[int]:
    """Bitmask (posizioni DFS) delle foglie sotto ogni nodo."""
    position = {node: i for i, node in enumerate(S.leaf_nodes)}
    sides = [0] * len(S.nodes)
    for i, node in enumerate(S.nodes):
        if node.leaf is not None:
            sides[i] = 1 << position[i]
        else:
            sides[i] = sides[node.children[0]] | sides[node.children[1]]
    return sides


# -- matroidi -------------------------------------------------------------------------


def independence_hypergraph(M, budget: Optional[Budget] = None) -> Hypergraph:
    return Hypergraph(M.size, frozenset(mask_of(s) for s in independent_sets(M, budget)))


def null_hypergraph(M, budget: Optional[Budget] = None) -> Hypergraph:
    """Iperarchi: insiemi la cui somma (coefficienti 1) è il vettore nullo."""
    if not isinstance(M, RepresentedMatroid):
        raise MSOError("La rappresentazione null richiede un matroide rappresentato")
    (budget or default_budget()).require("subsets", M.size, "elementi del matroide")
    edges = set()
    for x in range(1 << M.size):
        total = [0] * M.dim
        for e in bits(x):
            total = [(a + b) % M.field for a, b in zip(total, M.vectors[e])]
        if not any(total):
            edges.add(x)
    return Hypergraph(M.size, frozenset(edges))


REPRESENTATIONS = ("independence", "null")


def matroid_hypergraph(M, representation: str = "independence", budget: Optional[Budget] = None) -> Hypergraph:
    if representation == "independence":
        return independence_hypergraph(M, budget)
    if representation == "null":
        return null_hypergraph(M, budget)
    raise MalformedInput(f"Rappresentazione sconosciuta: '{representation}'. Valori validi: {list(REPRESENTATIONS)}")


def matroid_sensitivity(M, side: Iterable[int], representation: str = "independence", budget: Optional[Budget] = None) -> int:
    return sensitivity(matroid_hypergraph(M, representation, budget), mask_of(side), budget)


def connectivity_sensitivity_report(
    matroids: Iterable[Any],
    representation: str = "independence",
    budget: Optional[Budget] = None,
    limit: int = 20,
) -> Dict[str, Any]:
    """
    Confronta connettività e sensitività su ogni bipartizione propria.

    Verifica la direzione dimostrata (conn <= sens <= 1 + q^conn) e, solo come
    documentazione, quella visualizzata (sens <= conn <= 1 + q^sens).
    """
    checked = 0
    lower, upper, displayed = [], [], 0
    for M in matroids:
        H = matroid_hypergraph(M, representation, budget)
        q = getattr(M, "field", 2)
        for side in range(1, (1 << M.size) - 1):
            conn = connectivity(M, bits(side))
            sens = sensitivity(H, side, budget)
            checked += 1
            case = {"matroid": M.to_json(), "side": bits(side), "connectivity": conn, "sensitivity": sens}
            if conn > sens:
                lower.append(case)
            if sens > 1 + q ** conn:
                upper.append(case)
            if sens <= conn <= 1 + q ** sens:
                displayed += 1
    for case in (lower + upper)[:limit]:
        logger.warning("connettività/sensitività (%s): %s", representation, case)
    return {
        "representation": representation,
        "checked": checked,
        "lower_violations": len(lower),
        "upper_violations": len(upper),
        "displayed_holds": displayed,
        "displayed_fails": checked - displayed,
        "examples": (lower + upper)[:limit],
    }
