"""
Matroidi

Matroidi rappresentati su GF(p), matroidi generali (famiglia di
indipendenti), multi-matroidi e partizioni ordinate. Operazioni: rango,
circuiti, componenti, duale, minori, connettività, branchwidth e i controlli
di omogeneità.
"""

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, combinations_with_replacement, product
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from . import gf
from .classes import MATROID_INDEPENDENCE, independence_violation, make, matroid_null, null_rows, null_vector
from .config import Budget, default_budget
from .decomposition import BranchDecomposition, bits, optimal_decomposition
from .errors import InvariantViolation, MalformedInput, MSOError
from .structures import Structure

logger = logging.getLogger(__name__)

Subset = FrozenSet[int]


@dataclass(frozen=True)
class RepresentedMatroid:
    """Elementi rappresentati da vettori di GF(field)^dim."""
    field: int
    dim: int
    vectors: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        gf.require_prime(self.field)
        object.__setattr__(self, "vectors", tuple(tuple(int(c) for c in v) for v in self.vectors))
        if not self.vectors:
            raise MalformedInput("Un matroide richiede almeno un elemento")
        for v in self.vectors:
            if len(v) != self.dim:
                raise MalformedInput(f"Vettore {list(v)} di lunghezza diversa da dim={self.dim}")
            if any(not 0 <= c < self.field for c in v):
                raise MalformedInput(f"Coordinate di {list(v)} fuori da GF({self.field})")

    @property
    def size(self) -> int:
        return len(self.vectors)

    @cached_property
    def matrix(self) -> np.ndarray:
        return np.array(self.vectors, dtype=np.int64).reshape(self.size, self.dim)

    def rows(self, subset: Iterable[int]) -> np.ndarray:
        return self.matrix[sorted(subset)] if subset else np.zeros((0, self.dim), dtype=np.int64)

    def rank(self, subset: Iterable[int]) -> int:
        subset = list(subset)
        if not subset or self.dim == 0:
            return 0
        return gf.rank(self.rows(subset), self.field)

    def to_json(self) -> Dict[str, Any]:
        return {"field": self.field, "dim": self.dim, "vectors": [list(v) for v in self.vectors]}


@dataclass(frozen=True)
class GeneralMatroid:
    """Matroide dato dalla famiglia degli indipendenti su 0..ground-1."""
    ground: int
    independent: FrozenSet[Subset]

    def __post_init__(self):
        object.__setattr__(self, "independent", frozenset(frozenset(s) for s in self.independent))
        if self.ground < 1:
            raise MalformedInput("Un matroide richiede almeno un elemento")
        problem = independence_violation(self.ground, self.independent)
        if problem:
            raise MalformedInput(f"Famiglia non valida: {problem}")

    @property
    def size(self) -> int:
        return self.ground

    def rank(self, subset: Iterable[int]) -> int:
        s = frozenset(subset)
        return max(len(i) for i in self.independent if i <= s)

    @cached_property
    def bases(self) -> FrozenSet[Subset]:
        top = max(len(i) for i in self.independent)
        return frozenset(i for i in self.independent if len(i) == top)

    def to_json(self) -> Dict[str, Any]:
        family = sorted((sorted(s) for s in self.independent), key=lambda s: (len(s), s))
        return {"ground": self.ground, "independent": family}


Matroid = Union[RepresentedMatroid, GeneralMatroid]


@dataclass(frozen=True)
class MultiMatroid:
    """Famiglia non vuota di matroidi sullo stesso insieme di elementi."""
    members: Tuple[Matroid, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise MalformedInput("Un multi-matroide richiede almeno un matroide")
        sizes = {m.size for m in self.members}
        if len(sizes) != 1:
            raise MalformedInput(f"Membri con insiemi di elementi diversi: {sorted(sizes)}")

    @property
    def size(self) -> int:
        return self.members[0].size

    @property
    def degree(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class OrderedPartition:
    """Blocchi X_1 < ... < X_m che partizionano gli elementi."""
    blocks: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(tuple(sorted(b)) for b in self.blocks))
        seen: Set[int] = set()
        for b in self.blocks:
            if not b:
                raise MalformedInput("Blocco vuoto nella partizione ordinata")
            if seen & set(b):
                raise MalformedInput("Blocchi non disgiunti")
            seen |= set(b)
        if seen != set(range(len(seen))):
            raise MalformedInput("La partizione non copre 0..n-1")

    @property
    def size(self) -> int:
        return sum(len(b) for b in self.blocks)

    @cached_property
    def index(self) -> Dict[int, int]:
        """Indice (da 1) del blocco di ogni elemento."""
        return {x: i + 1 for i, b in enumerate(self.blocks) for x in b}


# -- lettura / scrittura ---------------------------------------------------------------


def from_json(doc: Any) -> Matroid:
    if not isinstance(doc, dict):
        raise MalformedInput("Un matroide deve essere un oggetto JSON")
    try:
        if "vectors" in doc:
            vectors = doc["vectors"]
            dim = int(doc.get("dim", len(vectors[0]) if vectors else 0))
            return RepresentedMatroid(int(doc["field"]), dim, tuple(tuple(v) for v in vectors))
        if "independent" in doc:
            return GeneralMatroid(int(doc["ground"]), frozenset(frozenset(s) for s in doc["independent"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"Matroide non valido: {exc}")
    raise MalformedInput("Atteso {field, dim, vectors} oppure {ground, independent}")


def loads(text: str) -> Matroid:
    try:
        return from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"JSON non valido: {exc}")


def to_json(M: Matroid) -> Dict[str, Any]:
    return M.to_json()


# -- primitive -------------------------------------------------------------------------------


def rank(M: Matroid, subset: Iterable[int] = ()) -> int:
    subset = list(subset)
    if any(not 0 <= x < M.size for x in subset):
        raise MalformedInput(f"Elementi fuori dal matroide: {subset}")
    return M.rank(subset)


def full_rank(M: Matroid) -> int:
    return M.rank(range(M.size))


def is_independent(M: Matroid, subset: Iterable[int]) -> bool:
    s = frozenset(subset)
    if isinstance(M, GeneralMatroid):
        return s in M.independent
    return M.rank(s) == len(s)


def all_subsets(n: int) -> Iterable[Subset]:
    for k in range(n + 1):
        for c in combinations(range(n), k):
            yield frozenset(c)


def independent_sets(M: Matroid, budget: Optional[Budget] = None) -> FrozenSet[Subset]:
    if isinstance(M, GeneralMatroid):
        return M.independent
    (budget or default_budget()).require("subsets", M.size, "elementi del matroide")
    return frozenset(s for s in all_subsets(M.size) if is_independent(M, s))


def to_general(M: Matroid, budget: Optional[Budget] = None) -> GeneralMatroid:
    if isinstance(M, GeneralMatroid):
        return M
    return GeneralMatroid(M.size, independent_sets(M, budget))


def independence_structure(M: Matroid, budget: Optional[Budget] = None) -> Structure:
    family = independent_sets(M, budget)
    return make(MATROID_INDEPENDENCE, M.size, {"indep": [(tuple(sorted(s)),) for s in family]})


def null_vectors(M: RepresentedMatroid) -> Set[Tuple[int, ...]]:
    """Vettori di coefficienti c con somma c_x v_x = 0."""
    q, n = M.field, M.size
    if M.dim == 0:
        basis = np.eye(n, dtype=np.int64)
    else:
        basis = gf.nullspace(M.matrix.T, q)
    out = set()
    for coeffs in product(range(q), repeat=basis.shape[0]):
        v = (np.array(coeffs, dtype=np.int64) @ basis) % q if basis.shape[0] else np.zeros(n, dtype=np.int64)
        out.add(tuple(int(c) for c in v))
    return out


def null_structure(M: RepresentedMatroid, budget: Optional[Budget] = None) -> Structure:
    """Relazione null di arità q-1 su insiemi."""
    q = M.field
    (budget or default_budget()).require("subsets", M.size * (q - 1), "matroid-null: n·(q-1)")
    return make(matroid_null(q), M.size, {"null": null_rows(null_vectors(M), q)})


def represent_from_nulls(S: Structure, q: int) -> RepresentedMatroid:
    """
    Ricostruisce una rappresentazione dalla relazione null: i vettori sono
    le colonne di una base di N^⊥, dove N è lo spazio dei nulli.
    """
    n = S.universe
    vectors = sorted({null_vector(row, n) for row in S.tuples("null")})
    basis = gf.span_basis(np.array(vectors, dtype=np.int64).reshape(-1, n), q) if vectors else np.zeros((0, n), dtype=np.int64)
    if basis.shape[0] == 0:
        h = np.eye(n, dtype=np.int64)
    else:
        h = gf.nullspace(basis, q)
    dim = h.shape[0]
    return RepresentedMatroid(q, dim, tuple(tuple(int(h[i, x]) for i in range(dim)) for x in range(n)))


def circuits(M: Matroid, budget: Optional[Budget] = None) -> List[Tuple[int, ...]]:
    """Insiemi dipendenti minimali, ordinati per dimensione e poi lessicograficamente."""
    (budget or default_budget()).require("subsets", M.size, "elementi del matroide")
    out: List[Tuple[int, ...]] = []
    for s in all_subsets(M.size):
        if s and not is_independent(M, s) and all(is_independent(M, s - {x}) for x in s):
            out.append(tuple(sorted(s)))
    out.sort(key=lambda c: (len(c), c))
    return out


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        a, b = self.find(x), self.find(y)
        if a != b:
            self.parent[max(a, b)] = min(a, b)

    def classes(self) -> List[List[int]]:
        groups: Dict[int, List[int]] = {}
        for x in range(len(self.parent)):
            groups.setdefault(self.find(x), []).append(x)
        return sorted(groups.values())


def connected_components(M: Matroid, budget: Optional[Budget] = None) -> List[List[int]]:
    """Classi della relazione 'un circuito contiene entrambi'."""
    uf = _UnionFind(M.size)
    for c in circuits(M, budget):
        for x in c[1:]:
            uf.union(c[0], x)
    return uf.classes()


def separation_components(M: Matroid, budget: Optional[Budget] = None) -> List[List[int]]:
    """
    Componenti via separazioni: x e y stanno insieme se nessuna bipartizione
    (X, Y) con r(X) + r(Y) = r(M) li separa.
    """
    n = M.size
    (budget or default_budget()).require("subsets", n, "separazioni")
    total = full_rank(M)
    together = [[True] * n for _ in range(n)]
    for mask in range(1, (1 << n) - 1):
        side = [x for x in range(n) if mask >> x & 1]
        other = [x for x in range(n) if not mask >> x & 1]
        if M.rank(side) + M.rank(other) == total:
            for x in side:
                for y in other:
                    together[x][y] = together[y][x] = False
    uf = _UnionFind(n)
    for x in range(n):
        for y in range(x + 1, n):
            if together[x][y]:
                uf.union(x, y)
    return uf.classes()


def dual(M: Matroid, budget: Optional[Budget] = None) -> GeneralMatroid:
    """Le basi del duale sono i complementi delle basi."""
    G = to_general(M, budget)
    ground = frozenset(range(G.ground))
    family: Set[Subset] = set()
    for b in G.bases:
        co = sorted(ground - b)
        for k in range(len(co) + 1):
            family.update(frozenset(c) for c in combinations(co, k))
    return GeneralMatroid(G.ground, frozenset(family))


def _check_removal(M: Matroid, removed: Iterable[int]) -> Tuple[Subset, List[int]]:
    removed = frozenset(removed)
    if any(not 0 <= x < M.size for x in removed):
        raise MalformedInput(f"Elementi fuori dal matroide: {sorted(removed)}")
    keep = [x for x in range(M.size) if x not in removed]
    if not keep:
        raise MSOError("Rimuovere tutti gli elementi produrrebbe un matroide vuoto")
    return removed, keep


def _relabel_family(family: Iterable[Subset], keep: Sequence[int]) -> FrozenSet[Subset]:
    index = {x: i for i, x in enumerate(keep)}
    return frozenset(frozenset(index[x] for x in s) for s in family if all(x in index for x in s))


def delete(M: Matroid, removed: Iterable[int], budget: Optional[Budget] = None) -> Matroid:
    """Restrizione al complemento; gli elementi restanti sono rinumerati in ordine."""
    removed, keep = _check_removal(M, removed)
    if isinstance(M, RepresentedMatroid):
        return RepresentedMatroid(M.field, M.dim, tuple(M.vectors[x] for x in keep))
    return GeneralMatroid(len(keep), _relabel_family(M.independent, keep))


def contract_via_dual(M: Matroid, removed: Iterable[int], budget: Optional[Budget] = None) -> GeneralMatroid:
    """M / X = (M* \\ X)*"""
    return dual(delete(dual(M, budget), removed, budget), budget)


def contract_via_extension(M: Matroid, removed: Iterable[int], budget: Optional[Budget] = None) -> GeneralMatroid:
    """I è indipendente in M / X se I ∪ Y è indipendente, con Y massimale indipendente in X."""
    removed, keep = _check_removal(M, removed)
    G = to_general(M, budget)
    basis_of_x: Subset = frozenset()
    for x in sorted(removed):
        if basis_of_x | {x} in G.independent:
            basis_of_x = basis_of_x | {x}
    family = [s for s in G.independent if not s & removed and s | basis_of_x in G.independent]
    return GeneralMatroid(len(keep), _relabel_family(family, keep))


def contract(M: Matroid, removed: Iterable[int], budget: Optional[Budget] = None) -> GeneralMatroid:
    """Contrazione calcolata in due modi; il disaccordo è un errore."""
    removed = list(removed)
    via_dual = contract_via_dual(M, removed, budget)
    via_extension = contract_via_extension(M, removed, budget)
    if via_dual != via_extension:
        raise InvariantViolation(f"Contrazione di {sorted(removed)}: le due definizioni non coincidono")
    return via_dual


def minor(M: Matroid, deleted: Iterable[int] = (), contracted: Iterable[int] = (), budget: Optional[Budget] = None) -> Matroid:
    """M / contracted \\ deleted, con gli elementi restanti rinumerati in ordine."""
    deleted, contracted = frozenset(deleted), frozenset(contracted)
    if deleted & contracted:
        raise MalformedInput("Un elemento non può essere sia cancellato sia contratto")
    result: Matroid = M
    if contracted:
        result = contract(M, contracted, budget)
    keep = [x for x in range(M.size) if x not in contracted]
    index = {x: i for i, x in enumerate(keep)}
    if deleted:
        result = delete(result, [index[x] for x in deleted], budget)
    return result


def connectivity(M: Matroid, side: Iterable[int]) -> int:
    """
    r(X1) + r(X2) - r(M) per la bipartizione (X1, complemento).

    Per i matroidi rappresentati coincide con la dimensione dell'intersezione
    degli spazi generati dai due lati; l'uguaglianza è verificata.
    """
    x1 = sorted(set(side))
    if any(not 0 <= x < M.size for x in x1):
        raise MalformedInput(f"Elementi fuori dal matroide: {x1}")
    x2 = [x for x in range(M.size) if x not in x1]
    if not x1 or not x2:
        raise MSOError("Connettività definita solo per bipartizioni proprie")
    value = M.rank(x1) + M.rank(x2) - full_rank(M)
    if isinstance(M, RepresentedMatroid) and M.dim > 0:
        interface = gf.span_intersection(M.rows(x1), M.rows(x2), M.field).shape[0]
        if interface != value:
            raise InvariantViolation(f"Connettività {value} diversa dalla dimensione dell'interfaccia {interface}")
    return value


def branchwidth(M: Matroid, budget: Optional[Budget] = None) -> Tuple[int, BranchDecomposition]:
    """Larghezza ottima e decomposizione testimone (ricerca esaustiva)."""
    return optimal_decomposition(M.size, lambda s: connectivity(M, bits(s)), budget)


def decomposition_width(M: Matroid, T: BranchDecomposition) -> int:
    if T.leaves != M.size:
        raise MalformedInput("La decomposizione non ha una foglia per elemento")
    return T.width(lambda s: connectivity(M, bits(s)))


def multi_connected_components(MM: MultiMatroid, budget: Optional[Budget] = None) -> List[List[int]]:
    """Unione (join) delle partizioni in componenti dei membri."""
    uf = _UnionFind(MM.size)
    for member in MM.members:
        for component in connected_components(member, budget):
            for x in component[1:]:
                uf.union(component[0], x)
    return uf.classes()


def _all_circuits(M: Union[Matroid, MultiMatroid], budget: Optional[Budget]) -> List[Tuple[int, ...]]:
    members = M.members if isinstance(M, MultiMatroid) else (M,)
    found: Set[Tuple[int, ...]] = set()
    for member in members:
        found.update(circuits(member, budget))
    return sorted(found, key=lambda c: (len(c), c))


@dataclass
class HomogeneityReport:
    ok: bool
    violation: Optional[Dict[str, Any]] = None

    def to_json(self) -> Dict[str, Any]:
        return {"homogeneous": self.ok, "violation": self.violation}


def is_homogeneous(M: Union[Matroid, MultiMatroid], P: OrderedPartition, budget: Optional[Budget] = None) -> HomogeneityReport:
    """
    Omogeneità di una partizione ordinata:
    (1) gli indici usati da ogni circuito formano un intervallo;
    (2) due elementi con indici che differiscono di delta in {0, 1} stanno
        in un circuito che usa al più delta + 3 indici.
    """
    if P.size != M.size:
        raise MalformedInput("La partizione non copre gli elementi del matroide")
    index = P.index
    found = _all_circuits(M, budget)
    for c in found:
        used = sorted({index[x] for x in c})
        if used[-1] - used[0] + 1 != len(used):
            return HomogeneityReport(False, {"condition": "interval", "circuit": list(c), "indices": used})
    for x in range(M.size):
        for y in range(x + 1, M.size):
            delta = abs(index[x] - index[y])
            if delta > 1:
                continue
            if not any(x in c and y in c and len({index[z] for z in c}) <= delta + 3 for c in found):
                return HomogeneityReport(False, {"condition": "short-circuit", "pair": [x, y], "delta": delta})
    return HomogeneityReport(True)


def mod5_colour_claim(M: Union[Matroid, MultiMatroid], P: OrderedPartition, budget: Optional[Budget] = None) -> List[Dict[str, Any]]:
    """
    Per una partizione omogenea e delta in {0, 1}: idx(y) - idx(x) = delta
    se e solo se i colori (indice mod 5) differiscono di delta modulo 5 e
    qualche circuito per x e y evita almeno un colore.

    Returns:
        Le coppie (x, y, delta) su cui l'equivalenza fallisce.
    """
    index = P.index
    found = _all_circuits(M, budget)
    failures = []
    for x in range(M.size):
        for y in range(M.size):
            if x == y:
                continue
            for delta in (0, 1):
                by_index = index[y] - index[x] == delta
                by_colour = (index[y] - index[x]) % 5 == delta and any(
                    x in c and y in c and len({index[z] % 5 for z in c}) < 5 for c in found
                )
                if by_index != by_colour:
                    failures.append({"x": x, "y": y, "delta": delta, "index": by_index, "colour": by_colour})
    if failures:
        logger.warning("mod5_colour_claim: %d coppie in disaccordo", len(failures))
    return failures


def permute(M: Matroid, mapping: Sequence[int]) -> Matroid:
    """Rinomina gli elementi: mapping[vecchio] = nuovo."""
    if isinstance(M, RepresentedMatroid):
        vectors: List[Tuple[int, ...]] = [()] * M.size
        for old, new in enumerate(mapping):
            vectors[new] = M.vectors[old]
        return RepresentedMatroid(M.field, M.dim, tuple(vectors))
    return GeneralMatroid(M.ground, frozenset(frozenset(mapping[x] for x in s) for s in M.independent))


def enumerate_represented(field: int, max_elements: int, max_dim: int) -> List[RepresentedMatroid]:
    """Tutti i matroidi rappresentati (con vettori esplicitamente elencati) entro i limiti."""
    out = []
    for dim in range(1, max_dim + 1):
        space = list(product(range(field), repeat=dim))
        for n in range(1, max_elements + 1):
            for vectors in product(space, repeat=n):
                out.append(RepresentedMatroid(field, dim, tuple(vectors)))
    return out


def represented_corpus(field: int, max_elements: int, max_dim: int) -> List[RepresentedMatroid]:
    """
    Un rappresentante per matroide distinto (stesso sistema di indipendenti e
    di nulli) tra tutti quelli con al più max_elements vettori in GF(field)^dim,
    dim <= max_dim. I vettori sono presi in ordine non decrescente.
    """
    seen: Set[Tuple[int, FrozenSet[Tuple[int, ...]]]] = set()
    out = []
    for dim in range(1, max_dim + 1):
        space = sorted(product(range(field), repeat=dim))
        for n in range(1, max_elements + 1):
            for combo in combinations_with_replacement(space, n):
                M = RepresentedMatroid(field, dim, tuple(combo))
                key = (n, frozenset(null_vectors(M)))
                if key not in seen:
                    seen.add(key)
                    out.append(M)
    return out

