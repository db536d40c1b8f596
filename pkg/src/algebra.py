"""
Algebra di branchwidth

Matroidi rappresentati con k porte (elementi distinti) e quattro operazioni:
costanti, rinomina delle porte, quoziente per una combinazione lineare delle
porte e unione disgiunta. Un termine si valuta in un PortedMatroid; ogni
elemento porta un'etichetta (tag) che ne ricorda l'origine, None per gli
elementi ausiliari introdotti dalla compilazione.

term_from_branch_decomposition compila una decomposizione di un matroide
rappresentato in un termine la cui valutazione, ristretta agli elementi con
tag, coincide con il matroide. Le porte di ogni sottotermine sono una base
dello spazio di interfaccia span(X) ∩ span(E - X).
"""

import json
import logging
import typing
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import gf
from .config import Budget
from .decomposition import BranchDecomposition, RootedTree, bits
from .errors import InvariantViolation, MalformedInput, SortMismatch
from .matroid import RepresentedMatroid, connectivity, independent_sets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PortedMatroid:
    matroid: RepresentedMatroid
    ports: Tuple[int, ...] = ()
    tags: Tuple[Optional[int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ports", tuple(int(p) for p in self.ports))
        if not self.tags:
            object.__setattr__(self, "tags", tuple(range(self.matroid.size)))
        object.__setattr__(self, "tags", tuple(None if t is None else int(t) for t in self.tags))
        if len(self.tags) != self.matroid.size:
            raise MalformedInput(f"{len(self.tags)} tag per {self.matroid.size} elementi")
        if any(not 0 <= p < self.matroid.size for p in self.ports):
            raise MalformedInput(f"Porte fuori dagli elementi: {list(self.ports)}")

    @property
    def sort(self) -> int:
        return len(self.ports)

    @property
    def field(self) -> int:
        return self.matroid.field

    def to_json(self) -> Dict[str, Any]:
        doc = self.matroid.to_json()
        doc.update({"ports": list(self.ports), "tags": list(self.tags)})
        return doc

    @classmethod
    def from_json(cls, doc: Any) -> "PortedMatroid":
        try:
            matroid = RepresentedMatroid(int(doc["field"]), int(doc["dim"]),
                                         tuple(tuple(v) for v in doc["vectors"]))
            return cls(matroid, tuple(doc.get("ports", [])), tuple(doc.get("tags", [])))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"Matroide con porte non valido: {exc}")


# -- termini -------------------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: PortedMatroid


@dataclass(frozen=True)
class Rename:
    """La porta i dell'output è la porta alpha[i] (da 1) dell'input."""
    alpha: Tuple[int, ...]
    child: "BranchTerm"


@dataclass(frozen=True)
class Quotient:
    coeffs: Tuple[int, ...]
    child: "BranchTerm"


@dataclass(frozen=True)
class Union:
    left: "BranchTerm"
    right: "BranchTerm"


BranchTerm = typing.Union[Constant, Rename, Quotient, Union]


def _field(t: BranchTerm) -> int:
    if isinstance(t, Constant):
        return t.value.field
    if isinstance(t, Union):
        return _field(t.left)
    return _field(t.child)


def sort(t: BranchTerm) -> int:
    """
    Sort (numero di porte) del termine.

    Raises:
        SortMismatch: se un'operazione riceve un argomento del sort sbagliato
    """
    if isinstance(t, Constant):
        return t.value.sort
    if isinstance(t, Rename):
        k = sort(t.child)
        bad = [a for a in t.alpha if not 1 <= a <= k]
        if bad:
            raise SortMismatch(f"Rinomina verso porte {bad} inesistenti in un termine di sort {k}")
        return len(t.alpha)
    if isinstance(t, Quotient):
        k = sort(t.child)
        if len(t.coeffs) != k:
            raise SortMismatch(f"Quoziente con {len(t.coeffs)} coefficienti su un termine di sort {k}")
        return k
    if isinstance(t, Union):
        if _field(t.left) != _field(t.right):
            raise SortMismatch(f"Unione di matroidi su campi diversi: {_field(t.left)} e {_field(t.right)}")
        return sort(t.left) + sort(t.right)
    raise MalformedInput(f"Termine sconosciuto: {t!r}")


def _rename(P: PortedMatroid, alpha: Sequence[int]) -> PortedMatroid:
    return PortedMatroid(P.matroid, tuple(P.ports[a - 1] for a in alpha), P.tags)


def _quotient(P: PortedMatroid, coeffs: Sequence[int]) -> PortedMatroid:
    M = P.matroid
    q = M.field
    v = np.zeros(M.dim, dtype=np.int64)
    for a, port in zip(coeffs, P.ports):
        v = (v + int(a) * M.matrix[port]) % q
    if not v.any():
        return P
    pivot = int(np.flatnonzero(v)[0])
    scale = gf.inverse_mod(int(v[pivot]), q)
    vectors = []
    for u in M.matrix:
        w = (u - (int(u[pivot]) * scale) * v) % q
        vectors.append(tuple(int(c) for i, c in enumerate(w) if i != pivot))
    return PortedMatroid(RepresentedMatroid(q, M.dim - 1, tuple(vectors)), P.ports, P.tags)


def _union(P1: PortedMatroid, P2: PortedMatroid) -> PortedMatroid:
    d1, d2 = P1.matroid.dim, P2.matroid.dim
    vectors = [v + (0,) * d2 for v in P1.matroid.vectors] + [(0,) * d1 + v for v in P2.matroid.vectors]
    shift = P1.matroid.size
    return PortedMatroid(
        RepresentedMatroid(P1.field, d1 + d2, tuple(vectors)),
        P1.ports + tuple(p + shift for p in P2.ports),
        P1.tags + P2.tags,
    )


def eval_term(t: BranchTerm) -> PortedMatroid:
    sort(t)
    return _eval(t)


def _eval(t: BranchTerm) -> PortedMatroid:
    if isinstance(t, Constant):
        return t.value
    if isinstance(t, Rename):
        return _rename(_eval(t.child), t.alpha)
    if isinstance(t, Quotient):
        return _quotient(_eval(t.child), t.coeffs)
    return _union(_eval(t.left), _eval(t.right))


def subterm_sorts(t: BranchTerm) -> List[int]:
    """Sort di tutti i sottotermini, in pre-ordine."""
    out = [sort(t)]
    if isinstance(t, (Rename, Quotient)):
        out += subterm_sorts(t.child)
    elif isinstance(t, Union):
        out += subterm_sorts(t.left) + subterm_sorts(t.right)
    return out


def size(t: BranchTerm) -> int:
    if isinstance(t, Constant):
        return 1
    if isinstance(t, Union):
        return 1 + size(t.left) + size(t.right)
    return 1 + size(t.child)


# -- JSON -------------------------------------------------------------------------------------------


def term_to_json(t: BranchTerm) -> Dict[str, Any]:
    if isinstance(t, Constant):
        return {"op": "constant", **t.value.to_json()}
    if isinstance(t, Rename):
        return {"op": "rename", "alpha": list(t.alpha), "child": term_to_json(t.child)}
    if isinstance(t, Quotient):
        return {"op": "quotient", "coeffs": list(t.coeffs), "child": term_to_json(t.child)}
    return {"op": "union", "left": term_to_json(t.left), "right": term_to_json(t.right)}


def term_from_json(doc: Any) -> BranchTerm:
    if not isinstance(doc, dict) or "op" not in doc:
        raise MalformedInput(f"Termine non valido: {doc!r}")
    op = doc["op"]
    try:
        if op == "constant":
            return Constant(PortedMatroid.from_json(doc))
        if op == "rename":
            return Rename(tuple(int(a) for a in doc["alpha"]), term_from_json(doc["child"]))
        if op == "quotient":
            return Quotient(tuple(int(a) for a in doc["coeffs"]), term_from_json(doc["child"]))
        if op == "union":
            return Union(term_from_json(doc["left"]), term_from_json(doc["right"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"Operazione '{op}' incompleta: {exc}")
    raise MalformedInput(f"Operazione sconosciuta: '{op}'")


def loads_term(text: str) -> BranchTerm:
    try:
        return term_from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"JSON non valido: {exc}")


# -- compilazione da una decomposizione ----------------------------------------------------------


def tagged_matroid(P: PortedMatroid) -> RepresentedMatroid:
    """Restrizione agli elementi con tag, ordinati per tag."""
    tagged = sorted((t, i) for i, t in enumerate(P.tags) if t is not None)
    if len({t for t, _ in tagged}) != len(tagged):
        raise InvariantViolation("Tag ripetuti nel matroide valutato")
    return RepresentedMatroid(P.field, P.matroid.dim, tuple(P.matroid.vectors[i] for _, i in tagged))


def reproduces(M: RepresentedMatroid, P: PortedMatroid, budget: Optional[Budget] = None) -> bool:
    """Stessi insiemi indipendenti sotto la corrispondenza dei tag."""
    restricted = tagged_matroid(P)
    if restricted.size != M.size:
        return False
    return independent_sets(M, budget) == independent_sets(restricted, budget)


def _helper(q: int) -> Constant:
    return Constant(PortedMatroid(RepresentedMatroid(q, 1, ((1,),)), (0,), (None,)))


@dataclass
class _Compiled:
    term: BranchTerm
    vectors: List[np.ndarray]   # vettore originale di ogni elemento del termine
    ports: Tuple[int, ...]      # elementi che fanno da porta
    leaves: frozenset


def term_from_branch_decomposition(M: RepresentedMatroid, T: BranchDecomposition) -> BranchTerm:
    """
    Termine di sort 0 che genera M.

    Ogni nodo con insieme di foglie X diventa Union dei figli, un Quotient
    per ogni vettore di una base di span(X1) ∩ span(X2), eventuali elementi
    ausiliari per completare una base dell'interfaccia di X, e una Rename che
    seleziona quella base come porte.
    """
    if T.leaves != M.size:
        raise MalformedInput(f"Decomposizione con {T.leaves} foglie per {M.size} elementi")
    problem = T.validate()
    if problem:
        raise MalformedInput(problem)
    q = M.field
    everything = frozenset(range(M.size))

    def rows(X: frozenset) -> np.ndarray:
        return M.rows(sorted(X))

    def interface(X: frozenset) -> np.ndarray:
        rest = everything - X
        if not X or not rest or M.dim == 0:
            return np.zeros((0, M.dim), dtype=np.int64)
        return gf.span_intersection(rows(X), rows(rest), q)

    def coefficients(vectors: List[np.ndarray], target: np.ndarray) -> np.ndarray:
        if not vectors:
            raise InvariantViolation("Vettore di interfaccia senza porte")
        coeffs = gf.coordinates(np.array(vectors, dtype=np.int64), target, q)
        if coeffs is None:
            raise InvariantViolation("Vettore di interfaccia fuori dallo span delle porte")
        return coeffs

    def leaf(x: int) -> _Compiled:
        vector = M.matrix[x]
        dim = 1 if vector.any() else 0
        ports = (0,) if interface(frozenset({x})).shape[0] else ()
        value = PortedMatroid(RepresentedMatroid(q, dim, ((1,) if dim else (),)), ports, (x,))
        return _Compiled(Constant(value), [vector], ports, frozenset({x}))

    def merge(a: _Compiled, b: _Compiled) -> _Compiled:
        term: BranchTerm = Union(a.term, b.term)
        vectors = a.vectors + b.vectors
        ports = a.ports + tuple(p + len(a.vectors) for p in b.ports)
        left_ports = [a.vectors[p] for p in a.ports]
        right_ports = [b.vectors[p] for p in b.ports]
        for u in gf.span_intersection(rows(a.leaves), rows(b.leaves), q):
            x = coefficients(left_ports, u)
            y = coefficients(right_ports, u)
            term = Quotient(tuple(int(c) for c in x) + tuple(int(-c) % q for c in y), term)

        leaves = a.leaves | b.leaves
        target = interface(leaves)
        chosen: List[int] = []

        def independent(candidate: List[np.ndarray]) -> bool:
            return gf.rank(np.array(candidate, dtype=np.int64), q) == len(candidate)

        for p in ports:
            v = vectors[p]
            inside = gf.rank(np.vstack([target, v]), q) == target.shape[0] if target.shape[0] else False
            if inside and independent([vectors[c] for c in chosen] + [v]):
                chosen.append(p)
        for w in target:
            if independent([vectors[c] for c in chosen] + [w]):
                coeffs = coefficients([vectors[p] for p in ports], w)
                term = Quotient(tuple(int(c) for c in coeffs) + (q - 1,), Union(term, _helper(q)))
                vectors.append(w)
                ports = ports + (len(vectors) - 1,)
                chosen.append(len(vectors) - 1)
        alpha = tuple(ports.index(c) + 1 for c in chosen)
        return _Compiled(Rename(alpha, term), vectors, tuple(chosen), leaves)

    def compile_node(node: RootedTree) -> _Compiled:
        if isinstance(node, int):
            return leaf(node)
        return merge(compile_node(node[0]), compile_node(node[1]))

    compiled = compile_node(T.rooted())
    if compiled.ports:
        raise InvariantViolation(f"Porte residue alla radice: {list(compiled.ports)}")
    logger.debug("term_from_branch_decomposition: %d operazioni, sort massimo %d",
                 size(compiled.term), max(subterm_sorts(compiled.term)))
    return compiled.term


def port_profile(M: RepresentedMatroid, T: BranchDecomposition) -> Dict[str, Any]:
    """Sort massimo del termine compilato confrontato con la larghezza di T."""
    term = term_from_branch_decomposition(M, T)
    width = max((connectivity(M, bits(s)) for s in T.splits), default=0)
    return {"max_sort": max(subterm_sorts(term)), "width": width, "operations": size(term)}
