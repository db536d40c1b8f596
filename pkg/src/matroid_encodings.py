"""
Codifiche verso e da matroidi e matrici

* ipergrafi k-uniformi -> matroidi sparse paving di rango 2k (ogni vertice
  ha due copie, i non-basi sono le copie degli iperarchi);
* grafi bipartiti -> matroidi su GF(2) (destri come base canonica
  duplicata, sinistri come somma dei vicini);
* matroidi null -> matrici dei coefficienti rispetto a una base;
* matrici -> grafi bipartiti (cammini di lunghezza 2a-1 per il valore a).
"""

import logging
import random
from itertools import combinations, product
from math import comb
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from . import gf
from .classes import BIPARTITE, MATROID_INDEPENDENCE, k_uniform, make, matrices, matroid_null, null_rows
from .errors import DecodeError, NotInClass
from .matroid import RepresentedMatroid, independence_structure, represent_from_nulls
from .structures import LEFT, Structure

logger = logging.getLogger(__name__)


def _family(B: Structure) -> Set[FrozenSet[int]]:
    return {frozenset(row[0]) for row in B.tuples("indep")}


# -- ipergrafi k-uniformi ----------------------------------------------------------------


def copies(edge: Iterable[int]) -> FrozenSet[int]:
    return frozenset(c for v in edge for c in (2 * v, 2 * v + 1))


def non_bases(A: Structure) -> List[FrozenSet[int]]:
    return sorted((copies(row[0]) for row in A.tuples("hyperedge")), key=lambda s: sorted(s))


def sparse_paving_violation(family: Sequence[FrozenSet[int]]) -> Optional[Tuple[List[int], List[int]]]:
    """Due non-basi che differiscono per un solo elemento, se esistono."""
    for a, b in combinations(family, 2):
        if len(a) == len(b) and len(a - b) == 1:
            return sorted(a), sorted(b)
    return None


def encode_sparse_paving(k: int, A: Structure) -> Structure:
    n = A.universe
    ground = 2 * n
    rank = min(2 * k, ground)
    dependent = set(non_bases(A))
    family = [frozenset(c) for size in range(rank + 1) for c in combinations(range(ground), size)]
    family = [s for s in family if len(s) < rank or s not in dependent]
    return make(MATROID_INDEPENDENCE, ground, {"indep": [(tuple(sorted(s)),) for s in family]})


def decode_sparse_paving(k: int, B: Structure) -> Structure:
    """
    Ritrova la partizione in copie dalle firme (insieme dei non-basi che
    contengono un elemento) e legge gli iperarchi dai non-basi.
    """
    m = B.universe
    if m % 2:
        raise DecodeError(f"Numero dispari di elementi: {m}")
    family = _family(B)
    rank = min(2 * k, m)
    if any(len(s) > rank for s in family):
        raise DecodeError(f"Indipendenti oltre il rango atteso {rank}")
    if sum(1 for s in family if len(s) < rank) != sum(comb(m, i) for i in range(rank)):
        raise DecodeError("Un insieme sotto il rango non è indipendente")
    dependent = [frozenset(c) for c in combinations(range(m), rank) if frozenset(c) not in family]
    if dependent and rank != 2 * k:
        raise DecodeError("Non-basi in un matroide di rango pieno")

    groups: Dict[FrozenSet[FrozenSet[int]], List[int]] = {}
    for x in range(m):
        signature = frozenset(N for N in dependent if x in N)
        groups.setdefault(signature, []).append(x)
    pair_of: Dict[int, int] = {}
    vertex = 0
    for signature in sorted(groups, key=lambda s: groups[s]):
        members = groups[signature]
        if len(members) % 2:
            raise DecodeError(f"Classe di copie di dimensione dispari: {members}")
        for i in range(0, len(members), 2):
            pair_of[members[i]] = pair_of[members[i + 1]] = vertex
            vertex += 1

    edges = []
    for N in dependent:
        vertices = {pair_of[x] for x in N}
        if len(vertices) != k or any(sum(pair_of[x] == v for x in N) != 2 for v in vertices):
            raise DecodeError(f"Il non-base {sorted(N)} non è unione di coppie di copie")
        edges.append((tuple(sorted(vertices)),))
    return make(k_uniform(k), m // 2, {"hyperedge": edges})


# -- grafi bipartiti ------------------------------------------------------------------------


def neighbourhoods(A: Structure) -> Dict[int, FrozenSet[int]]:
    left = sorted(row[0] for row in A.tuples(LEFT))
    out: Dict[int, Set[int]] = {x: set() for x in left}
    for x, y in A.tuples("edge"):
        out[x].add(y)
    return {x: frozenset(v) for x, v in out.items()}


def distinct_left_neighbourhoods(A: Structure) -> bool:
    """Nessuna coppia di vertici sinistri con lo stesso vicinato."""
    seen = list(neighbourhoods(A).values())
    return len(seen) == len(set(seen))


def bipartite_matroid(A: Structure) -> Tuple[RepresentedMatroid, List[Tuple[str, int]]]:
    """
    Matroide su GF(2) e, per ogni elemento, ('left', x) oppure ('right', y).
    """
    if not distinct_left_neighbourhoods(A):
        raise NotInClass("Due vertici sinistri hanno lo stesso vicinato")
    hoods = neighbourhoods(A)
    right = [y for y in range(A.universe) if y not in hoods]
    axis = {y: i for i, y in enumerate(right)}
    vectors: List[Tuple[int, ...]] = []
    origin: List[Tuple[str, int]] = []
    for v in range(A.universe):
        if v in hoods:
            vectors.append(tuple(1 if y in hoods[v] else 0 for y in right))
            origin.append(("left", v))
        else:
            unit = tuple(1 if axis[v] == i else 0 for i in range(len(right)))
            vectors += [unit, unit]
            origin += [("right", v), ("right", v)]
    return RepresentedMatroid(2, len(right), tuple(vectors)), origin


def encode_bipartite_matroid(A: Structure) -> Structure:
    M, _ = bipartite_matroid(A)
    return independence_structure(M)


def decode_bipartite_matroid(B: Structure) -> Structure:
    """
    Classi parallele: 2 elementi per un vertice destro, 3 se c'è anche un
    sinistro di grado 1 (quale dei tre sia il sinistro è indifferente),
    singoletti per i sinistri di grado >= 2, cappi per il sinistro isolato.
    Il vicinato di un sinistro è il circuito fondamentale rispetto ai
    rappresentanti destri.
    """
    family = _family(B)
    m = B.universe
    loops = [x for x in range(m) if frozenset({x}) not in family]
    if len(loops) > 1:
        raise DecodeError("Più di un vertice sinistro isolato")
    classes: List[List[int]] = []
    for x in range(m):
        if x in loops:
            continue
        for cls in classes:
            if frozenset({x, cls[0]}) not in family:
                cls.append(x)
                break
        else:
            classes.append([x])

    lefts = list(loops)
    rights: List[int] = []
    for cls in classes:
        if len(cls) == 1:
            lefts.append(cls[0])
        elif len(cls) == 2:
            rights.append(cls[0])
        elif len(cls) == 3:
            rights.append(cls[0])
            lefts.append(cls[-1])
        else:
            raise DecodeError(f"Classe parallela di {len(cls)} elementi")

    base = frozenset(rights)
    if base not in family:
        raise DecodeError("I rappresentanti destri non sono indipendenti")
    edges = []
    for x in sorted(lefts):
        if base | {x} in family:
            raise DecodeError(f"L'elemento {x} non dipende dai destri")
        support = set(base)
        for r in sorted(base):
            if frozenset(support - {r}) | {x} not in family:
                support.discard(r)
        edges += [(x, r) for r in support]

    order = sorted(lefts) + sorted(rights)
    index = {e: i for i, e in enumerate(order)}
    return make(BIPARTITE, len(order), {
        LEFT: [(index[x],) for x in lefts],
        "edge": [(index[x], index[r]) for x, r in edges],
    })


# -- matroidi null e matrici ------------------------------------------------------------------


def greedy_basis(M: RepresentedMatroid, order: Optional[Sequence[int]] = None) -> List[int]:
    basis: List[int] = []
    for x in (order if order is not None else range(M.size)):
        if M.rank(basis + [x]) > len(basis):
            basis.append(x)
    return sorted(basis)


def encode_null_matrix(q: int, S: Structure, order: Optional[Sequence[int]] = None) -> Structure:
    """
    Sceglie una base B (greedy nell'ordine dato) e scrive ogni elemento fuori
    da B nelle coordinate di B: righe = B, colonne = il resto.
    """
    M = represent_from_nulls(S, q)
    basis = greedy_basis(M, order)
    rels: Dict[str, List[Tuple[int, int]]] = {f"val{a}": [] for a in range(1, q)}
    if basis:
        vectors = M.matrix[basis]
        for e in range(M.size):
            if e in basis:
                continue
            coeffs = gf.coordinates(vectors, M.matrix[e], q)
            if coeffs is None:
                raise DecodeError(f"L'elemento {e} non è nello span della base")
            for b, c in zip(basis, coeffs):
                if int(c):
                    rels[f"val{int(c)}"].append((b, e))
    rels_all: Dict[str, list] = {"row": [(b,) for b in basis], **rels}
    return make(matrices(q), S.universe, rels_all)


def decode_matrix_null(q: int, A: Structure) -> Structure:
    """Nulli generati da e - sum_b c_{b,e} b per ogni colonna e."""
    n = A.universe
    rows = {row[0] for row in A.tuples("row")}
    columns = [x for x in range(n) if x not in rows]
    generators = []
    for e in columns:
        v = [0] * n
        v[e] = q - 1
        for a in range(1, q):
            for b, col in A.tuples(f"val{a}"):
                if col == e:
                    v[b] = a
        generators.append(v)
    vectors = set()
    for coeffs in product(range(q), repeat=len(generators)):
        total = np.zeros(n, dtype=np.int64)
        for c, g in zip(coeffs, generators):
            total = (total + c * np.array(g, dtype=np.int64)) % q
        vectors.add(tuple(int(x) for x in total))
    return make(matroid_null(q), n, {"null": null_rows(vectors, q)})


def random_basis_orders(n: int, rng: random.Random, count: int) -> List[List[int]]:
    """Ordini casuali degli elementi: la base greedy cambia con l'ordine."""
    orders = []
    for _ in range(count):
        order = list(range(n))
        rng.shuffle(order)
        orders.append(order)
    return orders


def encode_matrix_bipartite(q: int, A: Structure) -> Structure:
    """
    Righe a sinistra, colonne a destra, due foglie pendenti per ogni elemento
    originale; il valore a in (r, c) è un cammino di lunghezza 2a-1.
    """
    n = A.universe
    rows = {row[0] for row in A.tuples("row")}
    left: Set[int] = set(rows)
    edges: List[Tuple[int, int]] = []
    nxt = n

    def link(u: int, v: int) -> None:
        edges.append((u, v) if u in left else (v, u))

    for v in range(n):
        for _ in range(2):
            if v not in rows:
                left.add(nxt)
            link(v, nxt)
            nxt += 1
    for a in range(1, q):
        for r, c in sorted(A.tuples(f"val{a}")):
            previous = r
            for step in range(2 * a - 2):
                if step % 2:
                    left.add(nxt)
                link(previous, nxt)
                previous = nxt
                nxt += 1
            link(previous, c)
    return make(BIPARTITE, nxt, {LEFT: [(x,) for x in sorted(left)], "edge": edges})


def decode_matrix_bipartite(q: int, B: Structure) -> Structure:
    graph = nx.Graph()
    graph.add_nodes_from(range(B.universe))
    graph.add_edges_from(B.tuples("edge"))
    left = {row[0] for row in B.tuples(LEFT)}
    leaves = {v for v in graph if graph.degree(v) == 1}
    originals = sorted(v for v in graph if sum(u in leaves for u in graph.neighbors(v)) >= 2)
    original_set = set(originals)
    for v in leaves:
        if next(iter(graph.neighbors(v))) not in original_set:
            raise DecodeError(f"Foglia {v} non appesa a un elemento originale")
    for v in graph:
        if v not in leaves and v not in original_set and graph.degree(v) != 2:
            raise DecodeError(f"Vertice di cammino {v} di grado {graph.degree(v)}")

    index = {v: i for i, v in enumerate(originals)}
    rels: Dict[str, list] = {"row": [(index[v],) for v in originals if v in left]}
    rels.update({f"val{a}": [] for a in range(1, q)})
    seen: Set[Tuple[int, int]] = set()
    for r in originals:
        if r not in left:
            continue
        for start in graph.neighbors(r):
            if start in leaves:
                continue
            previous, current, length = r, start, 1
            while current not in original_set:
                previous, current = current, next(u for u in graph.neighbors(current) if u != previous)
                length += 1
            a = (length + 1) // 2
            if current in left or length % 2 == 0 or not 1 <= a < q:
                raise DecodeError(f"Cammino di lunghezza {length} tra {r} e {current}")
            if (r, current) in seen:
                raise DecodeError(f"Due valori per la cella ({r}, {current})")
            seen.add((r, current))
            rels[f"val{a}"].append((index[r], index[current]))
    return make(matrices(q), len(originals), rels)
