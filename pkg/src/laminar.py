"""
Ipergrafi laminari e alberi

Biiezione tra ipergrafi laminari e alberi con la proprietà (*): se un nodo
non radice ha un solo figlio, quel figlio è una foglia. La radice è l'intero
insieme di vertici, le foglie sono i vertici, gli altri nodi sono gli
iperarchi non vuoti. L'iperarco vuoto, se presente, diventa un cammino
marcatore radice -> m1 -> m2 -> m3 che viola (*) e quindi non è ambiguo.

Contiene anche i pesi in Z_3 che scelgono un figlio per iperarco e la
selezione sinistra/destra che riduce gli iperarchi ramificati a quelli non
ramificati.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Tuple

from .classes import LAMINAR, children_map, make, member, parent_map, tree_root, tree_structure
from .errors import AmbiguityError, DecodeError, MalformedInput, NotInClass
from .structures import Structure

logger = logging.getLogger(__name__)

Edge = FrozenSet[int]


def _key(edge: Edge) -> Tuple[int, Tuple[int, ...]]:
    return (len(edge), tuple(sorted(edge)))


@dataclass(frozen=True)
class LaminarForest:
    """Iperarchi non vuoti di un ipergrafo laminare ordinati per inclusione."""
    n: int
    edges: Tuple[Edge, ...]
    has_empty: bool = False

    @classmethod
    def of(cls, A: Structure) -> "LaminarForest":
        if not member(LAMINAR, A):
            raise NotInClass("L'ipergrafo non è laminare")
        family = {frozenset(row[0]) for row in A.tuples("hyperedge")}
        nonempty = tuple(sorted((e for e in family if e), key=_key))
        return cls(A.universe, nonempty, frozenset() in family)

    def parent(self, node: Edge) -> Optional[Edge]:
        """Iperarco minimo che contiene strettamente node (None: la radice)."""
        above = [e for e in self.edges if node < e]
        return min(above, key=_key) if above else None

    def vertex_parent(self, v: int) -> Optional[Edge]:
        above = [e for e in self.edges if v in e]
        return min(above, key=_key) if above else None

    def children(self, node: Optional[Edge]) -> List[Edge]:
        """Iperarchi figli (None per la radice virtuale), ordinati per dimensione e membri."""
        return [e for e in self.edges if self.parent(e) == node]

    def private_vertices(self, node: Optional[Edge]) -> List[int]:
        return sorted(v for v in range(self.n) if self.vertex_parent(v) == node)

    def is_branching(self, edge: Edge) -> bool:
        return len(self.children(edge)) >= 2

    @property
    def branching(self) -> List[Edge]:
        return [e for e in self.edges if self.is_branching(e)]

    @property
    def non_branching(self) -> List[Edge]:
        return [e for e in self.edges if not self.is_branching(e)]


# -- biiezione con gli alberi ------------------------------------------------------------


def laminar_to_tree(A: Structure) -> Structure:
    """Albero con radice 0, foglie 1..n per i vertici, poi un nodo per iperarco."""
    forest = LaminarForest.of(A)
    n = forest.n
    node_of: Dict[Edge, int] = {e: n + 1 + i for i, e in enumerate(forest.edges)}
    parents: List[Optional[int]] = [None] * (n + 1 + len(forest.edges))
    for v in range(n):
        above = forest.vertex_parent(v)
        parents[1 + v] = node_of[above] if above is not None else 0
    for e in forest.edges:
        above = forest.parent(e)
        parents[node_of[e]] = node_of[above] if above is not None else 0
    if forest.has_empty:
        m1 = len(parents)
        parents += [0, m1, m1 + 1]
    return tree_structure(parents)


def _strip_marker(kids: Dict[int, List[int]], root: int) -> Tuple[bool, set]:
    """Riconosce il cammino marcatore sotto la radice; restituisce (trovato, nodi da ignorare)."""
    found = []
    for m1 in kids[root]:
        if len(kids[m1]) != 1:
            continue
        m2 = kids[m1][0]
        if len(kids[m2]) == 1 and not kids[kids[m2][0]]:
            found.append({m1, m2, kids[m2][0]})
    if len(found) > 1:
        raise DecodeError("Più di un cammino marcatore per l'iperarco vuoto")
    return (True, found[0]) if found else (False, set())


def tree_to_laminar(T: Structure) -> Structure:
    """Foglie come vertici; ogni nodo interno non radice dà l'insieme delle foglie discendenti."""
    kids = children_map(T)
    root = tree_root(T)
    has_empty, ignored = _strip_marker(kids, root)
    nodes = [x for x in range(T.universe) if x not in ignored]
    leaves = [x for x in nodes if not kids[x] and x != root]
    if not leaves:
        raise DecodeError("L'albero non ha foglie: nessun vertice")
    index = {x: i for i, x in enumerate(leaves)}

    def below(x: int) -> List[int]:
        if not kids[x]:
            return [index[x]]
        return [v for c in kids[x] for v in below(c)]

    edges = []
    for x in nodes:
        if x == root or not kids[x]:
            continue
        if len(kids[x]) == 1 and kids[kids[x][0]]:
            raise DecodeError(f"Il nodo {x} ha un solo figlio non foglia: proprietà (*) violata")
        edges.append((tuple(sorted(below(x))),))
    if has_empty:
        edges.append(((),))
    return make(LAMINAR, len(leaves), {"hyperedge": edges})


def star(T: Structure) -> Structure:
    """Aggiunge una foglia sotto ogni nodo: il risultato soddisfa (*)."""
    parents = parent_map(T)
    n = T.universe
    vector: List[Optional[int]] = [parents.get(x) for x in range(n)] + list(range(n))
    return tree_structure(vector)


def unstar(T: Structure) -> Structure:
    kids = children_map(T)
    keep = [x for x in range(T.universe) if kids[x]]
    if not keep:
        raise DecodeError("Albero senza nodi interni")
    for x in keep:
        if not any(not kids[c] for c in kids[x]):
            raise DecodeError(f"Il nodo {x} non ha la foglia aggiunta")
    return T.restrict(keep)


def encode_tree_as_laminar(T: Structure) -> Structure:
    return tree_to_laminar(star(T))


def decode_laminar_as_tree(A: Structure) -> Structure:
    if any(not row[0] for row in A.tuples("hyperedge")):
        raise DecodeError("L'iperarco vuoto non appartiene all'immagine")
    return unstar(laminar_to_tree(A))


# -- pesi in Z_3 -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Z3Weights:
    """Peso in {0, 1, 2} per ogni vertice."""
    weights: Tuple[int, ...]

    def __post_init__(self):
        if any(w not in (0, 1, 2) for w in self.weights):
            raise MalformedInput(f"Pesi fuori da Z_3: {self.weights}")

    def of(self, edge: Iterable[int]) -> int:
        return sum(self.weights[v] for v in edge) % 3

    def to_json(self) -> Dict[str, Any]:
        return {"weights": list(self.weights)}


# pesi dei figli (scelto per primo) in funzione del peso richiesto al padre
CHILD_TARGETS = {0: (2, 1), 1: (1,), 2: (2,)}


def default_choice(forest: LaminarForest) -> Dict[Edge, Edge]:
    """Primo figlio (per dimensione, poi membri) di ogni iperarco non foglia."""
    return {e: forest.children(e)[0] for e in forest.edges if forest.children(e)}


def z3_weight_assignment(
    A: Structure,
    chosen: Optional[Dict[Edge, Edge]] = None,
    target: int = 0,
) -> Z3Weights:
    """
    Pesi tali che, per ogni iperarco non foglia, il figlio scelto abbia peso
    diverso dagli altri figli e massimo nell'ordine 0 < 1 < 2. Il peso totale
    dei vertici è target.

    Args:
        chosen: figlio scelto per iperarco (default: default_choice)
    """
    forest = LaminarForest.of(A)
    chosen = default_choice(forest) if chosen is None else chosen
    weights = [0] * forest.n

    def assign(node: Optional[Edge], a: int) -> None:
        kids = forest.children(node)
        if node is not None and kids:
            pick = chosen.get(node, kids[0])
            if pick not in kids:
                raise NotInClass(f"{sorted(pick)} non è figlio di {sorted(node)}")
            kids = [pick] + [k for k in kids if k != pick]
        if not kids:
            members = sorted(node) if node is not None else forest.private_vertices(None)
            if not members:
                if a:
                    raise NotInClass("Nessun vertice su cui realizzare il peso richiesto")
                return
            weights[members[0]] = a
            return
        if len(kids) == 1:
            assign(kids[0], a)
            return
        targets = CHILD_TARGETS[a] if node is not None else (a,)
        for i, kid in enumerate(kids):
            assign(kid, targets[i] if i < len(targets) else 0)

    assign(None, target % 3)
    result = Z3Weights(tuple(weights))
    logger.debug("z3_weight_assignment: %s", result.weights)
    return result


def chosen_child(forest: LaminarForest, edge: Edge, weights: Z3Weights) -> Edge:
    """Figlio di peso massimo; deve essere unico."""
    kids = forest.children(edge)
    best = max(weights.of(k) for k in kids)
    winners = [k for k in kids if weights.of(k) == best]
    if len(winners) != 1:
        raise AmbiguityError(f"{len(winners)} figli di peso massimo sotto {sorted(edge)}")
    return winners[0]


def left_right_choices(forest: LaminarForest) -> Tuple[Dict[Edge, Edge], Dict[Edge, Edge]]:
    """Figlio sinistro e destro (i primi due) per ogni iperarco ramificato."""
    left = default_choice(forest)
    right = dict(left)
    for e in forest.branching:
        right[e] = forest.children(e)[1]
    return left, right


def selection_weights(A: Structure) -> Tuple[Z3Weights, Z3Weights]:
    forest = LaminarForest.of(A)
    left, right = left_right_choices(forest)
    return z3_weight_assignment(A, left), z3_weight_assignment(A, right)


def verify_left_right_selection(A: Structure, weights_left: Z3Weights, weights_right: Z3Weights) -> Dict[Edge, Edge]:
    """
    Per ogni iperarco ramificato Y, il rappresentante non ramificato Z
    ottenuto scendendo al figlio sinistro e poi ai figli destri. Z deve essere
    l'unico iperarco non ramificato Z ⊊ Y tale che ogni U con Z ⊆ U ⊊ Y sia
    figlio di Y se e solo se è il figlio sinistro di Y, altrimenti un figlio
    destro, e coincida con Z se e solo se è non ramificato.

    Raises:
        AmbiguityError: se i pesi non individuano un solo candidato
    """
    forest = LaminarForest.of(A)
    left = {e: chosen_child(forest, e, weights_left) for e in forest.branching}
    right = {e: chosen_child(forest, e, weights_right) for e in forest.branching}
    for e in forest.branching:
        if left[e] == right[e]:
            raise AmbiguityError(f"Figlio sinistro e destro coincidono sotto {sorted(e)}")

    def satisfies(Y: Edge, Z: Edge) -> bool:
        for U in forest.edges:
            if not (Z <= U < Y):
                continue
            parent = forest.parent(U)
            if (parent == Y) != (U == left[Y]):
                return False
            if parent != Y and right.get(parent) != U:
                return False
            if (U == Z) != (not forest.is_branching(U)):
                return False
        return True

    representative: Dict[Edge, Edge] = {}
    for Y in forest.branching:
        walk = left[Y]
        while forest.is_branching(walk):
            walk = right[walk]
        candidates = [Z for Z in forest.non_branching if Z < Y and satisfies(Y, Z)]
        if candidates != [walk]:
            raise AmbiguityError(f"{len(candidates)} candidati per l'iperarco ramificato {sorted(Y)}")
        representative[Y] = walk
    return representative


def representative_vertex(forest: LaminarForest, edge: Edge) -> int:
    """Vertice di un iperarco non ramificato che non sta in nessun iperarco più piccolo."""
    own = [v for v in sorted(edge) if forest.vertex_parent(v) == edge]
    if not own:
        raise AmbiguityError(f"L'iperarco {sorted(edge)} non ha vertici propri")
    return own[0]
