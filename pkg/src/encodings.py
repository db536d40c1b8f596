"""
Catalogo delle codifiche

Ogni voce ha una mappa di codifica (deterministica, scelta minima) e una di
decodifica che è inversa unilaterale: decode(encode(A)) ≅ A sul corpus
documentato. Le voci non deterministiche forniscono anche immagini casuali
legali, che la decodifica deve accettare. Alcune voci sono realizzate anche
come trasduzione MSO esplicita.

Identificatori parametrici: 'id[:parametro]', per esempio
'k-uniform-to-matroid:2' o 'structure-to-hypergraph:strings:2'.
"""

import logging
import random
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .classes import (
    BINARY_TREES,
    BIPARTITE,
    BOOL,
    GRAPHS_EDGE,
    HYPERGRAPHS,
    LAMINAR,
    MATROID_INDEPENDENCE,
    ORDERED_BINARY_TREES,
    ORDERED_TREES,
    TREES,
    ClassId,
    census,
    census_bound,
    children_map,
    corpus,
    depths,
    k_uniform,
    labelled_trees,
    letter_of,
    make,
    matrices,
    matroid_null,
    member,
    pairs,
    parent_map,
    string_structure,
    strings,
    tree_root,
    tree_structure,
    word_of,
)
from .config import Budget, default_budget
from .errors import BudgetExceeded, DecodeError, MalformedInput, NotInClass
from .hypergraph_encoding import decode_hypergraph, encode_hypergraph
from .laminar import decode_laminar_as_tree, encode_tree_as_laminar, laminar_to_tree, tree_to_laminar
from .logic import Atom, Equal, parse
from .matroid_encodings import (
    decode_bipartite_matroid,
    decode_matrix_bipartite,
    decode_matrix_null,
    decode_sparse_paving,
    distinct_left_neighbourhoods,
    encode_bipartite_matroid,
    encode_matrix_bipartite,
    encode_null_matrix,
    encode_sparse_paving,
    random_basis_orders,
)
from .structures import LEFT, Kind, Structure, pair, project_left
from .transduction import (
    Colour,
    Copy,
    EncodingReport,
    Filter,
    Interpretation,
    OutputRelation,
    Transduction,
    check_encoding,
)

logger = logging.getLogger(__name__)

Map = Callable[[Structure], Structure]


@dataclass(frozen=True)
class CatalogEntry:
    """Coppia codifica/decodifica tra due classi."""
    id: str
    input: ClassId
    output: ClassId
    forward: Map
    backward: Map
    description: str = ""
    # fattore di espansione k per census(input, n) <= census(output, k·n)
    expansion: Optional[int] = None
    # corpus esaustivo documentato
    corpus: Optional[Callable[[], List[Structure]]] = None
    # immagine legale casuale della codifica (voci non deterministiche)
    random_image: Optional[Callable[[Structure, random.Random], Structure]] = None
    transduction: Optional[Callable[[], Transduction]] = None
    decode_transduction: Optional[Callable[[], Transduction]] = None

    def to_json(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "input": str(self.input),
            "output": str(self.output),
            "description": self.description,
            "expansion": self.expansion,
            "transduction": self.transduction is not None,
            "nondeterministic": self.random_image is not None,
        }


# -- stringhe ---------------------------------------------------------------------------------


def encode_string_bits(A: Structure) -> Structure:
    """Lettera i di 4 -> due lettere binarie (i >> 1, i & 1)."""
    bits: List[int] = []
    for letter in word_of(A):
        bits += [letter >> 1, letter & 1]
    return string_structure(bits, 2)


def decode_string_bits(B: Structure) -> Structure:
    bits = word_of(B)
    if len(bits) % 2:
        raise DecodeError(f"Stringa binaria di lunghezza dispari: {len(bits)}")
    return string_structure([2 * bits[i] + bits[i + 1] for i in range(0, len(bits), 2)], 4)


def string_bits_transduction() -> Transduction:
    """Copy(2), poi ordine e lettere del risultato: la copia 1 porta il bit alto."""
    first = "(exists w (_copy_2 x w))"
    second = "(exists w (_copy_2 w x))"
    lt = parse(
        "(or (lt x y) (_copy_2 x y)"
        " (and (exists w (_copy_2 x w)) (exists w (_copy_2 w y)) (exists z (and (_copy_2 z y) (lt x z))))"
        " (and (exists w (_copy_2 w x)) (exists w (_copy_2 y w)) (exists z (and (_copy_2 z x) (lt z y)))))"
    )
    high = f"(or (and {first} (or (a2 x) (a3 x))) (and {second} (or (a1 x) (a3 x))))"
    rels = (
        OutputRelation("lt", (Kind.ELEMENT, Kind.ELEMENT), ("x", "y"), lt),
        OutputRelation("a0", (Kind.ELEMENT,), ("x",), parse(f"(not {high})")),
        OutputRelation("a1", (Kind.ELEMENT,), ("x",), parse(high)),
    )
    return Transduction(strings(4), strings(2), (Copy(2), Interpretation("x", Equal("x", "x"), rels)))


def string_bits_decoder() -> Transduction:
    even_size = parse("(exists-set X (and (forall x (in x X)) (divisible 2 X)))")
    even_position = parse("(exists-set P (and (forall y (iff (in y P) (lt y x))) (divisible 2 P)))")
    succ = "(and (lt x y) (not (exists z (and (lt x z) (lt z y)))))"
    rels = [OutputRelation("lt", (Kind.ELEMENT, Kind.ELEMENT), ("x", "y"), Atom("lt", ("x", "y")))]
    for i in range(4):
        hi, lo = f"a{i >> 1}", f"a{i & 1}"
        rels.append(OutputRelation(f"a{i}", (Kind.ELEMENT,), ("x",),
                                   parse(f"(and ({hi} x) (exists y (and {succ} ({lo} y))))")))
    return Transduction(strings(2), strings(4), (Filter(even_size), Interpretation("x", even_position, tuple(rels))))


# -- alberi -------------------------------------------------------------------------------------


def _labels(T: Structure) -> List[int]:
    return [letter_of(T, x) for x in range(T.universe)]


def encode_labelled_tree(k: int, T: Structure) -> Structure:
    """
    Suddivide ogni arco e appende j+1 foglie a ogni nodo originale di
    etichetta j. I nodi originali restano a profondità pari.
    """
    n = T.universe
    labels = _labels(T)
    parents: List[Optional[int]] = [None] * n
    for child, par in sorted(T.tuples("parent")):
        middle = len(parents)
        parents.append(par)
        parents[child] = middle
    for x in range(n):
        parents += [x] * (labels[x] + 1)
    return tree_structure(parents)


def decode_labelled_tree(k: int, U: Structure) -> Structure:
    depth = depths(U)
    kids = children_map(U)
    parents = parent_map(U)
    originals = sorted(x for x in range(U.universe) if depth[x] % 2 == 0)
    index = {x: i for i, x in enumerate(originals)}
    labels = []
    for x in originals:
        leaves = sum(1 for c in kids[x] if not kids[c])
        if not 1 <= leaves <= k:
            raise DecodeError(f"Il nodo {x} ha {leaves} foglie: etichetta fuori da 0..{k - 1}")
        if any(kids[c] and len(kids[c]) != 1 for c in kids[x]):
            raise DecodeError(f"Nodo di suddivisione sotto {x} con più figli")
        labels.append(leaves - 1)
    vector: List[Optional[int]] = [None] * len(originals)
    for x in originals:
        if x in parents:
            grand = parents.get(parents[x])
            if grand not in index:
                raise DecodeError(f"Il nodo {x} non sta sotto un nodo originale")
            vector[index[x]] = index[grand]
    return tree_structure(vector, labels, k)


def encode_first_child(T: Structure) -> Structure:
    """
    Primo figlio / fratello successivo: il padre binario di x è il fratello
    precedente (etichetta a1) oppure il padre originale (a0).
    """
    kids = children_map(T)
    parents: List[Optional[int]] = [None] * T.universe
    labels = [0] * T.universe
    for par, ordered in kids.items():
        for i, child in enumerate(ordered):
            if i == 0:
                parents[child] = par
            else:
                parents[child] = ordered[i - 1]
                labels[child] = 1
    return tree_structure(parents, labels, 2)


def decode_first_child(B: Structure) -> Structure:
    kids = children_map(B)
    parents = parent_map(B)
    labels = [letter_of(B, x) for x in range(B.universe)]
    root = tree_root(B)
    if labels[root] != 0:
        raise DecodeError("La radice deve essere etichettata come primo figlio")
    for x, below in kids.items():
        if sorted(labels[c] for c in below) not in ([], [0], [1], [0, 1]):
            raise DecodeError(f"Il nodo {x} ha figli binari con etichette ripetute")

    def original(x: int) -> Tuple[Optional[int], int]:
        # (padre originale, posizione tra i fratelli)
        if x == root:
            return None, 0
        if labels[x] == 0:
            return parents[x], 0
        par, pos = original(parents[x])
        return par, pos + 1

    placed = {x: original(x) for x in range(B.universe)}
    vector = [placed[x][0] for x in range(B.universe)]
    if sum(1 for p in vector if p is None) != 1:
        raise DecodeError("La catena dei fratelli risale alla radice")
    before = [(x, y) for x in range(B.universe) for y in range(B.universe)
              if x != y and vector[x] is not None and vector[x] == vector[y] and placed[x][1] < placed[y][1]]
    rels = {"parent": [(x, p) for x, p in enumerate(vector) if p is not None], "before": before}
    return make(ORDERED_TREES, B.universe, rels)


def order_siblings(T: Structure, choice: Optional[random.Random] = None) -> Structure:
    """Ordina i fratelli per id o, con choice, in un ordine casuale."""
    kids = children_map(T)
    before = []
    for ordered in kids.values():
        ordered = list(ordered)
        if choice is not None:
            choice.shuffle(ordered)
        before += [(ordered[i], ordered[j]) for i in range(len(ordered)) for j in range(i + 1, len(ordered))]
    return make(ORDERED_BINARY_TREES, T.universe, {"parent": sorted(T.tuples("parent")), "before": before})


def forget_order(T: Structure) -> Structure:
    return make(BINARY_TREES, T.universe, {"parent": sorted(T.tuples("parent"))})


def sibling_order_transduction() -> Transduction:
    """Indovina l'ordine con due colori: fratelli di colore diverso, prima il colore 1."""
    sibling = "(and (not (= x y)) (exists p (and (parent x p) (parent y p))))"
    proper = parse(f"(forall x (forall y (implies {sibling} (not (iff (_col_1 x) (_col_1 y))))))")
    rels = (
        OutputRelation("before", (Kind.ELEMENT, Kind.ELEMENT), ("x", "y"), parse(f"(and {sibling} (_col_1 x) (_col_2 y))")),
        OutputRelation("parent", (Kind.ELEMENT, Kind.ELEMENT), ("x", "y"), Atom("parent", ("x", "y"))),
    )
    return Transduction(BINARY_TREES, ORDERED_BINARY_TREES,
                        (Colour(2), Filter(proper), Interpretation("x", Equal("x", "x"), rels)))


def forget_order_transduction() -> Transduction:
    rels = (OutputRelation("parent", (Kind.ELEMENT, Kind.ELEMENT), ("x", "y"), Atom("parent", ("x", "y"))),)
    return Transduction(ORDERED_BINARY_TREES, BINARY_TREES, (Interpretation("x", Equal("x", "x"), rels),))


# -- coppie ----------------------------------------------------------------------------------------


def pair_with_point(A: Structure) -> Structure:
    return pair(A, make(BOOL, 1))


# -- catalogo ---------------------------------------------------------------------------------------


def _relabelled(encode: Map) -> Callable[[Structure, random.Random], Structure]:
    def image(A: Structure, rng: random.Random) -> Structure:
        B = encode(A)
        mapping = list(range(B.universe))
        rng.shuffle(mapping)
        return B.relabel(mapping)
    return image


def _null_image(q: int) -> Callable[[Structure, random.Random], Structure]:
    def image(S: Structure, rng: random.Random) -> Structure:
        (order,) = random_basis_orders(S.universe, rng, 1)
        return encode_null_matrix(q, S, order)
    return image


def _small_matrices(q: int) -> List[Structure]:
    limit = min(6, census_bound(matrices(q)))
    return [A for A in corpus(matrices(q), limit)
            if len(A.tuples("row")) <= 3 and A.universe - len(A.tuples("row")) <= 3]


def _small_bipartite() -> List[Structure]:
    out = []
    for A in corpus(BIPARTITE, 6):
        left = len(A.tuples(LEFT))
        if left <= 3 and A.universe - left <= 3 and distinct_left_neighbourhoods(A):
            out.append(A)
    return out


def _build(name: str, param: Optional[str]) -> CatalogEntry:
    def number(default: int) -> int:
        if param is None:
            return default
        try:
            return int(param)
        except ValueError:
            raise MalformedInput(f"Parametro non intero per '{name}': '{param}'")

    if name == "strings-4-to-2":
        return CatalogEntry(
            name, strings(4), strings(2), encode_string_bits, decode_string_bits,
            "ogni lettera di 4 diventa due lettere binarie", expansion=2,
            corpus=lambda: corpus(strings(4), 4),
            transduction=string_bits_transduction, decode_transduction=string_bits_decoder,
        )
    if name == "labelled-tree-to-unlabelled":
        k = number(3)
        return CatalogEntry(
            f"{name}:{k}", labelled_trees(k), TREES,
            lambda T: encode_labelled_tree(k, T), lambda U: decode_labelled_tree(k, U),
            "archi suddivisi, j+1 foglie pendenti per l'etichetta j",
            corpus=lambda: corpus(labelled_trees(k), 5),
        )
    if name == "ordered-tree-to-labelled-binary":
        return CatalogEntry(
            name, ORDERED_TREES, labelled_trees(2), encode_first_child, decode_first_child,
            "primo figlio / fratello successivo", expansion=1,
            corpus=lambda: corpus(ORDERED_TREES, 7),
        )
    if name == "binary-to-ordered-binary":
        return CatalogEntry(
            name, BINARY_TREES, ORDERED_BINARY_TREES, order_siblings, forget_order,
            "indovina l'ordine dei fratelli con due colori", expansion=1,
            corpus=lambda: corpus(BINARY_TREES, 7),
            random_image=lambda T, rng: order_siblings(T, rng),
            transduction=sibling_order_transduction, decode_transduction=forget_order_transduction,
        )
    if name == "laminar-to-tree":
        return CatalogEntry(
            name, LAMINAR, TREES, laminar_to_tree, tree_to_laminar,
            "radice = insieme dei vertici, foglie = vertici, nodi = iperarchi",
            corpus=lambda: corpus(LAMINAR, 5),
        )
    if name == "tree-to-laminar":
        return CatalogEntry(
            name, TREES, LAMINAR, encode_tree_as_laminar, decode_laminar_as_tree,
            "una foglia in più sotto ogni nodo, poi la biiezione con i laminari", expansion=1,
            corpus=lambda: corpus(TREES, 7),
        )
    if name == "structure-to-hypergraph":
        c = ClassId.parse(param) if param else GRAPHS_EDGE
        return CatalogEntry(
            f"{name}:{c}", c, HYPERGRAPHS,
            lambda A: encode_hypergraph(c, A), lambda B: decode_hypergraph(c, B),
            "K+1 copie colorate da catene, tuple etichettate per relazione",
            corpus=lambda: corpus(c, min(4, census_bound(c))),
        )
    if name == "k-uniform-to-matroid":
        k = number(1)
        return CatalogEntry(
            f"{name}:{k}", k_uniform(k), MATROID_INDEPENDENCE,
            lambda A: encode_sparse_paving(k, A), lambda B: decode_sparse_paving(k, B),
            "sparse paving di rango 2k, non-basi = copie degli iperarchi", expansion=2,
            corpus=lambda: corpus(k_uniform(k), 5),
        )
    if name == "bipartite-to-matroid":
        return CatalogEntry(
            name, BIPARTITE, MATROID_INDEPENDENCE, encode_bipartite_matroid, decode_bipartite_matroid,
            "destri = base canonica duplicata, sinistri = somma dei vicini su GF(2)",
            corpus=_small_bipartite,
        )
    if name == "matrix-to-bipartite":
        q = number(2)
        return CatalogEntry(
            f"{name}:{q}", matrices(q), BIPARTITE,
            lambda A: encode_matrix_bipartite(q, A), lambda B: decode_matrix_bipartite(q, B),
            "cammini di lunghezza 2a-1 per il valore a, due foglie per elemento",
            corpus=lambda: _small_matrices(q),
        )
    if name == "matroid-null-to-matrix":
        q = number(2)
        return CatalogEntry(
            f"{name}:{q}", matroid_null(q), matrices(q),
            lambda S: encode_null_matrix(q, S), lambda A: decode_matrix_null(q, A),
            "coefficienti rispetto a una base", expansion=1,
            corpus=lambda: corpus(matroid_null(q), census_bound(matroid_null(q))),
            random_image=_null_image(q),
        )
    if name == "pairs":
        c = ClassId.parse(param) if param else TREES
        return CatalogEntry(
            f"{name}:{c}", c, pairs(c, BOOL), pair_with_point, project_left,
            "coppia con la struttura a un punto, decodifica per proiezione",
            corpus=lambda: corpus(c, min(4, census_bound(c))),
        )
    raise MalformedInput(f"Voce di catalogo sconosciuta: '{name}'")


NAMES = (
    "strings-4-to-2",
    "labelled-tree-to-unlabelled",
    "ordered-tree-to-labelled-binary",
    "binary-to-ordered-binary",
    "laminar-to-tree",
    "tree-to-laminar",
    "structure-to-hypergraph",
    "k-uniform-to-matroid",
    "bipartite-to-matroid",
    "matrix-to-bipartite",
    "matroid-null-to-matrix",
    "pairs",
)
ALIASES = {"laminar": "laminar-to-tree"}


def entry(ident: str) -> CatalogEntry:
    """Voce da 'id' o 'id:parametro'."""
    name, _, param = ident.strip().partition(":")
    name = ALIASES.get(name, name)
    return _build(name, param or None)


def catalog() -> List[CatalogEntry]:
    return [entry(name) for name in NAMES]


def encode(ident: str, A: Structure, budget: Optional[Budget] = None) -> Structure:
    item = entry(ident)
    if not member(item.input, A, budget):
        raise NotInClass(f"La struttura non appartiene a {item.input}")
    return item.forward(A)


def decode(ident: str, B: Structure, budget: Optional[Budget] = None) -> Structure:
    item = entry(ident)
    if not member(item.output, B, budget):
        raise DecodeError(f"La struttura non appartiene a {item.output}")
    return item.backward(B)


def random_images(ident: str, A: Structure, seed: int, count: int = 5) -> List[Structure]:
    """
    Immagini legali casuali di A: scelte non deterministiche della voce
    oppure rietichettature casuali della codifica.
    """
    item = entry(ident)
    rng = random.Random(seed)
    image = item.random_image or _relabelled(item.forward)
    return [image(A, rng) for _ in range(count)]


def roundtrip_report(
    ident: str,
    structures: Optional[Sequence[Structure]] = None,
    budget: Optional[Budget] = None,
    use_transduction: bool = False,
    seed: Optional[int] = None,
    images: int = 3,
) -> EncodingReport:
    """
    Verifica decode ∘ encode ≅ id sul corpus (default: quello documentato
    della voce). Con seed si aggiungono immagini casuali legali.
    """
    item = entry(ident)
    structures = list(structures) if structures is not None else item.corpus()
    if use_transduction:
        if item.transduction is None:
            raise MalformedInput(f"La voce '{item.id}' non ha una realizzazione come trasduzione")
        return check_encoding(item.transduction(), item.decode_transduction(), structures, budget)

    forward: Callable[[Structure], Any] = item.forward
    if seed is not None:
        rng = random.Random(seed)
        image = item.random_image or _relabelled(item.forward)

        def forward(A: Structure) -> List[Structure]:
            return [item.forward(A)] + [image(A, rng) for _ in range(images)]

    report = check_encoding(forward, item.backward, structures, budget)
    logger.info("roundtrip %s: %d/%d", item.id, report.total - len(report.failures), report.total)
    return report


def growth_report(ident: str, sizes: Sequence[int] = (1, 2, 3), budget: Optional[Budget] = None) -> List[Dict[str, Any]]:
    """census(input, n) <= census(output, k·n) dove il census è calcolabile."""
    item = entry(ident)
    budget = budget or default_budget()
    rows: List[Dict[str, Any]] = []
    if item.expansion is None:
        return rows
    for n in sizes:
        m = item.expansion * n
        row: Dict[str, Any] = {"n": n, "output_n": m}
        try:
            row["input"] = census(item.input, n, budget)
            row["output"] = census(item.output, m, budget)
            row["holds"] = row["input"] <= row["output"]
            if not row["holds"]:
                logger.warning("crescita violata per %s a n=%d: %d > %d", item.id, n, row["input"], row["output"])
        except BudgetExceeded as exc:
            row["skipped"] = str(exc)
        rows.append(row)
    return rows
