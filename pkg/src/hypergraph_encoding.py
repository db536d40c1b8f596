"""
Codifica di strutture arbitrarie in ipergrafi

Ogni elemento a diventa K+1 copie (a, 0..K), con K l'arità massima del
vocabolario. I colori delle copie sono fissati da una catena di iperarchi
annidati {(a,0)} ⊂ {(a,0),(a,1)} ⊂ ... ⊂ {(a,0..K)}: è l'unica famiglia che
contiene copie di colore 0. Una tupla (A_1..A_k) della relazione j diventa
l'iperarco delle copie di colore i degli elementi di A_i, più i due vertici
di etichetta di j. Le etichette vivono in un iperarco senza elementi di
dimensione j+3.
"""

import logging
from typing import Dict, FrozenSet, List, Set, Tuple

from .classes import HYPERGRAPHS, ClassId, make, vocabulary
from .errors import DecodeError
from .structures import Kind, Structure

logger = logging.getLogger(__name__)


def max_arity(c: ClassId) -> int:
    return max((r.arity for r in vocabulary(c).relations), default=0)


def _slot_members(slot) -> Tuple[int, ...]:
    return (slot,) if isinstance(slot, int) else tuple(slot)


def encode_hypergraph(c: ClassId, A: Structure) -> Structure:
    voc = vocabulary(c)
    K = max_arity(c)
    width = K + 1
    n = A.universe
    edges: List[Tuple[int, ...]] = []
    for a in range(n):
        for colour in range(width):
            edges.append(tuple(a * width + i for i in range(colour + 1)))

    next_vertex = n * width
    tags: Dict[str, Tuple[int, int]] = {}
    for j, rel in enumerate(voc.relations):
        gadget = tuple(range(next_vertex, next_vertex + j + 3))
        next_vertex += j + 3
        tags[rel.name] = (gadget[0], gadget[1])
        edges.append(gadget)

    for rel in voc.relations:
        for row in A.tuples(rel.name):
            edge = set(tags[rel.name])
            for i, slot in enumerate(row):
                edge.update(x * width + i + 1 for x in _slot_members(slot))
            edges.append(tuple(sorted(edge)))
    return make(HYPERGRAPHS, next_vertex, {"hyperedge": [(e,) for e in edges]})


def decode_hypergraph(c: ClassId, B: Structure) -> Structure:
    """
    Inverte encode_hypergraph su qualunque rietichettatura della sua immagine.

    Raises:
        DecodeError: se B non ha la forma prodotta dalla codifica
    """
    voc = vocabulary(c)
    K = max_arity(c)
    edges: List[FrozenSet[int]] = [frozenset(row[0]) for row in B.tuples("hyperedge")]
    roots = sorted(next(iter(e)) for e in edges if len(e) == 1)
    if not roots:
        raise DecodeError("Nessun iperarco singoletto: mancano le copie di colore 0")
    root_set = set(roots)

    copy_of: Dict[int, Tuple[int, int]] = {}
    for a, z in enumerate(roots):
        chain = sorted((e for e in edges if z in e), key=len)
        if [len(e) for e in chain] != list(range(1, K + 2)):
            raise DecodeError(f"Catena di colori malformata attorno al vertice {z}")
        previous: FrozenSet[int] = frozenset()
        for colour, e in enumerate(chain):
            if not previous < e:
                raise DecodeError(f"Catena di colori non annidata attorno al vertice {z}")
            (v,) = e - previous
            if v in copy_of:
                raise DecodeError(f"Il vertice {v} compare in due catene")
            copy_of[v] = (a, colour)
            previous = e

    elements = frozenset(copy_of)
    rest = [e for e in edges if not e & root_set]
    gadgets: Dict[int, FrozenSet[int]] = {}
    tuples_: List[FrozenSet[int]] = []
    for e in rest:
        if not e & elements and len(e) >= 3:
            j = len(e) - 3
            if j in gadgets or j >= len(voc.relations):
                raise DecodeError(f"Iperarco etichetta inatteso di dimensione {len(e)}")
            gadgets[j] = e
        else:
            tuples_.append(e)
    if len(gadgets) != len(voc.relations):
        raise DecodeError(f"Trovate {len(gadgets)} etichette di relazione, attese {len(voc.relations)}")

    rows: Dict[str, Set[tuple]] = {r.name: set() for r in voc.relations}
    for e in tuples_:
        tag = e - elements
        owners = [j for j, g in gadgets.items() if len(tag) == 2 and tag <= g]
        if len(owners) != 1:
            raise DecodeError(f"Iperarco {sorted(e)} senza etichetta di relazione univoca")
        rel = voc.relations[owners[0]]
        slots: List[List[int]] = [[] for _ in range(rel.arity)]
        for v in e & elements:
            a, colour = copy_of[v]
            if not 1 <= colour <= rel.arity:
                raise DecodeError(f"Copia di colore {colour} in una tupla di '{rel.name}'")
            slots[colour - 1].append(a)
        row = []
        for kind, members in zip(rel.kinds, slots):
            if kind is Kind.ELEMENT:
                if len(members) != 1:
                    raise DecodeError(f"Slot elemento di '{rel.name}' con {len(members)} elementi")
                row.append(members[0])
            else:
                row.append(tuple(sorted(members)))
        rows[rel.name].add(tuple(row))
    return make(c, len(roots), rows)


def encoded_size(c: ClassId, n: int) -> int:
    """Vertici dell'ipergrafo prodotto da una struttura con n elementi."""
    m = len(vocabulary(c).relations)
    return n * (max_arity(c) + 1) + sum(j + 3 for j in range(m))

