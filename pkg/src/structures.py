"""
Strutture relazionali finite

Vocabolari con slot di tipo elemento o insieme, strutture immutabili su
universi 0..n-1, forma canonica per l'isomorfismo e coppie di strutture.
"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .config import Budget, default_budget
from .errors import BudgetExceeded, MalformedInput, VocabularyMismatch

logger = logging.getLogger(__name__)

Slot = Union[int, Tuple[int, ...]]
Row = Tuple[Slot, ...]

# Nomi generati dai passi Copy e Colour: vietati nei vocabolari utente
RESERVED_PREFIXES = ("_copy_", "_col_")


class Kind(Enum):
    """Tipo di uno slot di relazione."""
    ELEMENT = "element"
    SET = "set"


@dataclass(frozen=True)
class Relation:
    """Nome di relazione con la sequenza dei tipi dei suoi argomenti."""
    name: str
    kinds: Tuple[Kind, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.kinds)

    @property
    def signature(self) -> str:
        return "".join("e" if k is Kind.ELEMENT else "s" for k in self.kinds)

    def to_json(self) -> Dict[str, Any]:
        return {"name": self.name, "kinds": [k.value for k in self.kinds]}


def relation(name: str, signature: str = "") -> Relation:
    """
    Crea una relazione da una firma compatta.

    Args:
        name: Nome della relazione
        signature: Una lettera per argomento, 'e' (elemento) o 's' (insieme)
    """
    kinds = []
    for letter in signature:
        if letter == "e":
            kinds.append(Kind.ELEMENT)
        elif letter == "s":
            kinds.append(Kind.SET)
        else:
            raise MalformedInput(f"Firma non valida '{signature}' per '{name}'")
    return Relation(name, tuple(kinds))


@dataclass(frozen=True)
class Vocabulary:
    """Insieme di relazioni con nomi distinti, mantenuto ordinato per nome."""
    relations: Tuple[Relation, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.relations, key=lambda r: r.name))
        names = [r.name for r in ordered]
        if len(set(names)) != len(names):
            duplicates = sorted({n for n in names if names.count(n) > 1})
            raise MalformedInput(f"Nomi di relazione duplicati: {duplicates}")
        object.__setattr__(self, "relations", ordered)

    @classmethod
    def of(cls, *specs: Tuple[str, str]) -> "Vocabulary":
        """Vocabulary.of(("edge", "ee"), ("hyperedge", "s"))"""
        return cls(tuple(relation(name, sig) for name, sig in specs))

    @cached_property
    def _by_name(self) -> Dict[str, Relation]:
        return {r.name: r for r in self.relations}

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def get(self, name: str) -> Relation:
        try:
            return self._by_name[name]
        except KeyError:
            raise VocabularyMismatch(f"Relazione sconosciuta: '{name}'")

    def extend(self, *relations: Relation) -> "Vocabulary":
        return Vocabulary(self.relations + tuple(relations))

    def without(self, *names: str) -> "Vocabulary":
        return Vocabulary(tuple(r for r in self.relations if r.name not in names))

    def reserved_names(self) -> List[str]:
        return [n for n in self.names if n.startswith(RESERVED_PREFIXES)]

    def to_json(self) -> List[Dict[str, Any]]:
        return [r.to_json() for r in self.relations]

    @classmethod
    def from_json(cls, doc: Any) -> "Vocabulary":
        if not isinstance(doc, list):
            raise MalformedInput("Il vocabolario deve essere una lista di relazioni")
        relations = []
        for entry in doc:
            try:
                name = entry["name"]
                kinds = tuple(Kind(k) for k in entry.get("kinds", []))
            except (KeyError, TypeError, ValueError, AttributeError):
                raise MalformedInput(f"Relazione non valida nel vocabolario: {entry!r}")
            relations.append(Relation(str(name), kinds))
        return cls(tuple(relations))


def _slot_key(slot: Any) -> tuple:
    if isinstance(slot, int) and not isinstance(slot, bool):
        return (0, slot)
    if isinstance(slot, tuple):
        return (1, tuple(_slot_key(x) for x in slot))
    return (2, repr(slot))


def _row_key(row: Row) -> tuple:
    # confrontabile anche su righe mal tipizzate (float, stringhe, bool)
    return tuple(_slot_key(s) for s in row)


def _slot_from_json(name: str, slot: Any) -> Any:
    # interi e liste di scalari; tipi e intervalli li controlla validate()
    if isinstance(slot, int):
        return slot
    if isinstance(slot, list) and not any(isinstance(x, (list, dict)) for x in slot):
        return tuple(slot)
    raise MalformedInput(f"Slot non valido in '{name}': {slot!r}")


def normalize_row(rel: Relation, row: Sequence[Any]) -> Row:
    """Converte una riga grezza nella forma canonica (insiemi ordinati)."""
    if len(row) != rel.arity:
        raise MalformedInput(f"'{rel.name}' ha arità {rel.arity}, riga {list(row)!r}")
    out: List[Slot] = []
    for kind, slot in zip(rel.kinds, row):
        if kind is Kind.ELEMENT:
            out.append(int(slot))
        else:
            out.append(tuple(sorted({int(x) for x in slot})))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Structure:
    """
    Struttura relazionale finita.

    Gli elementi sono 0..universe-1; ogni relazione è un insieme di righe in
    cui gli slot elemento sono interi e gli slot insieme tuple ordinate.
    """
    vocabulary: Vocabulary
    universe: int
    relations: Mapping[str, FrozenSet[Row]] = field(default_factory=dict)

    def __post_init__(self):
        unknown = sorted(set(self.relations) - set(self.vocabulary.names))
        if unknown:
            raise VocabularyMismatch(f"Relazioni fuori vocabolario: {unknown}")
        rels = {name: frozenset(self.relations.get(name, ())) for name in self.vocabulary.names}
        object.__setattr__(self, "relations", rels)

    @classmethod
    def build(
        cls,
        vocabulary: Vocabulary,
        universe: int,
        relations: Optional[Mapping[str, Iterable[Sequence[Any]]]] = None,
    ) -> "Structure":
        """Costruttore che normalizza le righe (slot insieme ordinati, senza duplicati)."""
        normalized = {}
        for name, rows in (relations or {}).items():
            rel = vocabulary.get(name)
            normalized[name] = frozenset(normalize_row(rel, row) for row in rows)
        return cls(vocabulary, int(universe), normalized)

    # -- accesso -----------------------------------------------------------

    def tuples(self, name: str) -> FrozenSet[Row]:
        if name not in self.relations:
            raise VocabularyMismatch(f"Relazione sconosciuta: '{name}'")
        return self.relations[name]

    def sorted_rows(self, name: str) -> List[Row]:
        return sorted(self.tuples(name), key=_row_key)

    @cached_property
    def key(self) -> tuple:
        rows = tuple((name, tuple(self.sorted_rows(name))) for name in self.vocabulary.names)
        return (self.vocabulary, self.universe, rows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    @cached_property
    def incidence(self) -> List[List[Tuple[str, Row]]]:
        """Per ogni elemento, le righe (nome, riga) che lo contengono."""
        table: List[List[Tuple[str, Row]]] = [[] for _ in range(self.universe)]
        for name in self.vocabulary.names:
            for row in self.relations[name]:
                members = set()
                for s in row:
                    if isinstance(s, int):
                        members.add(s)
                    else:
                        members.update(s)
                for x in members:
                    if 0 <= x < self.universe:
                        table[x].append((name, row))
        return table

    # -- trasformazioni ------------------------------------------------------

    def relabel(self, mapping: Sequence[int]) -> "Structure":
        """Rinomina gli elementi: mapping[vecchio] = nuovo."""
        rels = {}
        for name, rows in self.relations.items():
            rels[name] = frozenset(
                tuple(mapping[s] if isinstance(s, int) else tuple(sorted(mapping[x] for x in s)) for s in row)
                for row in rows
            )
        return Structure(self.vocabulary, self.universe, rels)

    def restrict(self, keep: Sequence[int]) -> "Structure":
        """Sottostruttura indotta su keep, rinumerata nell'ordine dato."""
        if not keep:
            raise MalformedInput("La restrizione produrrebbe un universo vuoto")
        index = {x: i for i, x in enumerate(keep)}
        rels = {}
        for name, rows in self.relations.items():
            kept = set()
            for row in rows:
                mapped = []
                for s in row:
                    if isinstance(s, int):
                        if s not in index:
                            break
                        mapped.append(index[s])
                    else:
                        if any(x not in index for x in s):
                            break
                        mapped.append(tuple(sorted(index[x] for x in s)))
                else:
                    kept.add(tuple(mapped))
            rels[name] = frozenset(kept)
        return Structure(self.vocabulary, len(keep), rels)

    # -- serializzazione -----------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        relations = {}
        for name in self.vocabulary.names:
            relations[name] = [[list(s) if not isinstance(s, int) else s for s in row] for row in self.sorted_rows(name)]
        return {"vocabulary": self.vocabulary.to_json(), "universe": self.universe, "relations": relations}

    def dumps(self) -> str:
        """Serializzazione canonica (relazioni per nome, righe in ordine lessicografico)."""
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, doc: Any) -> "Structure":
        """Legge il formato JSON senza normalizzare: validate() segnala le violazioni."""
        if not isinstance(doc, dict):
            raise MalformedInput("Una struttura deve essere un oggetto JSON")
        vocabulary = Vocabulary.from_json(doc.get("vocabulary", []))
        try:
            universe = int(doc.get("universe", 0))
        except (TypeError, ValueError):
            raise MalformedInput(f"Universo non intero: {doc.get('universe')!r}")
        raw = doc.get("relations", {}) or {}
        if not isinstance(raw, dict):
            raise MalformedInput("'relations' deve essere un oggetto")
        relations = {}
        for name, rows in raw.items():
            if not isinstance(rows, list):
                raise MalformedInput(f"Le righe di '{name}' devono essere una lista")
            converted = set()
            for row in rows:
                if not isinstance(row, list):
                    raise MalformedInput(f"Riga non valida in '{name}': {row!r}")
                converted.add(tuple(_slot_from_json(name, s) for s in row))
            relations[name] = frozenset(converted)
        return cls(vocabulary, universe, relations)

    @classmethod
    def loads(cls, text: str) -> "Structure":
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"JSON non valido: {exc}")


def validate(structure: Structure) -> Optional[str]:
    """
    Controlla gli invarianti di una struttura.

    Returns:
        None se la struttura è valida, altrimenti il nome della prima
        violazione ("empty universe", "id out of range", ...).
    """
    n = structure.universe
    if n < 1:
        return "empty universe"
    for rel in structure.vocabulary.relations:
        for row in sorted(structure.relations[rel.name], key=_row_key):
            if len(row) != rel.arity:
                return "arity mismatch"
            for kind, slot in zip(rel.kinds, row):
                if kind is Kind.ELEMENT:
                    if not isinstance(slot, int) or isinstance(slot, bool):
                        return "kind mismatch"
                    if not 0 <= slot < n:
                        return "id out of range"
                else:
                    if not isinstance(slot, tuple) or not all(isinstance(x, int) for x in slot):
                        return "kind mismatch"
                    if any(not 0 <= x < n for x in slot):
                        return "id out of range"
                    if len(set(slot)) != len(slot):
                        return "duplicate in set slot"
                    if list(slot) != sorted(slot):
                        return "unsorted set slot"
    return None


# -- isomorfismo ----------------------------------------------------------------


@dataclass(frozen=True)
class IsoWitness:
    """Permutazione che porta gli elementi di A in quelli di B."""
    mapping: Tuple[int, ...]

    def apply(self, structure: Structure) -> Structure:
        return structure.relabel(self.mapping)

    def inverse(self) -> "IsoWitness":
        inv = [0] * len(self.mapping)
        for old, new in enumerate(self.mapping):
            inv[new] = old
        return IsoWitness(tuple(inv))

    def then(self, other: "IsoWitness") -> "IsoWitness":
        """Composizione: prima self, poi other."""
        return IsoWitness(tuple(other.mapping[x] for x in self.mapping))


@dataclass(frozen=True)
class CanonicalForm:
    """Chiave canonica e relativa etichettatura (labelling[vecchio] = nuovo)."""
    key: tuple
    labelling: Tuple[int, ...]


def _rank(values: Sequence[Any]) -> List[int]:
    order = {v: i for i, v in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


def _refine(incidence: List[List[Tuple[str, Row]]], colours: Sequence[int]) -> List[int]:
    """Raffinamento di colori fino a stabilità (colori = ranghi 0..c-1)."""
    colours = _rank(colours)
    while True:
        signatures = []
        for x, rows in enumerate(incidence):
            entries = []
            for name, row in rows:
                shape = []
                for s in row:
                    if isinstance(s, int):
                        shape.append((0, colours[s], s == x))
                    else:
                        shape.append((1, tuple(sorted(colours[y] for y in s)), x in s))
                entries.append((name, tuple(shape)))
            entries.sort()
            signatures.append((colours[x], tuple(entries)))
        refined = _rank(signatures)
        if max(refined, default=-1) == max(colours, default=-1):
            return refined
        colours = refined


def _relabelled_rows(structure: Structure, labelling: Sequence[int]) -> tuple:
    out = []
    for name in structure.vocabulary.names:
        mapped = [
            tuple(labelling[s] if isinstance(s, int) else tuple(sorted(labelling[x] for x in s)) for s in row)
            for row in structure.relations[name]
        ]
        mapped.sort(key=_row_key)
        out.append((name, tuple(mapped)))
    return tuple(out)


def canonical_form(
    structure: Structure,
    colours: Optional[Sequence[int]] = None,
    budget: Optional[Budget] = None,
) -> CanonicalForm:
    """
    Forma canonica per raffinamento e individualizzazione.

    Due strutture (con eventuali colori iniziali) sono isomorfe, rispettando
    i colori, se e solo se hanno la stessa chiave.

    Args:
        structure: Struttura da canonizzare
        colours: Colori iniziali opzionali per elemento (es. origini)
        budget: Limiti; canonical_leaves limita le foglie della ricerca
    """
    budget = budget or default_budget()
    n = structure.universe
    initial = list(colours) if colours is not None else [0] * n
    if len(initial) != n:
        raise MalformedInput("Numero di colori diverso dalla dimensione dell'universo")
    incidence = structure.incidence
    best_rows = None
    best_labelling: Tuple[int, ...] = ()
    leaves = 0
    stack = [_refine(incidence, initial)]
    while stack:
        cols = stack.pop()
        cells: Dict[int, List[int]] = {}
        for x, c in enumerate(cols):
            cells.setdefault(c, []).append(x)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            leaves += 1
            if leaves > budget.canonical_leaves:
                raise BudgetExceeded(
                    f"Forma canonica: oltre {budget.canonical_leaves} foglie di ricerca (n={n})"
                )
            rows = _relabelled_rows(structure, cols)
            if best_rows is None or rows < best_rows:
                best_rows, best_labelling = rows, tuple(cols)
            continue
        for v in reversed(target):
            split = [2 * c + (0 if x == v else 1) for x, c in enumerate(cols)]
            stack.append(_refine(incidence, split))
    colour_key = tuple(sorted(initial))
    key = (structure.vocabulary.names, n, colour_key, best_rows)
    return CanonicalForm(key, best_labelling)


def canonical_key(structure: Structure, colours: Optional[Sequence[int]] = None, budget: Optional[Budget] = None) -> tuple:
    return canonical_form(structure, colours, budget).key


def is_isomorphic(
    a: Structure,
    b: Structure,
    colours_a: Optional[Sequence[int]] = None,
    colours_b: Optional[Sequence[int]] = None,
    budget: Optional[Budget] = None,
) -> Optional[IsoWitness]:
    """
    Decide l'isomorfismo tramite forme canoniche.

    Returns:
        Un IsoWitness (a -> b) se esiste, altrimenti None.
    """
    if a.vocabulary != b.vocabulary:
        raise VocabularyMismatch("Isomorfismo richiesto tra vocabolari diversi")
    if a.universe != b.universe:
        return None
    fa = canonical_form(a, colours_a, budget)
    fb = canonical_form(b, colours_b, budget)
    if fa.key != fb.key:
        return None
    inverse_b = [0] * b.universe
    for old, new in enumerate(fb.labelling):
        inverse_b[new] = old
    return IsoWitness(tuple(inverse_b[fa.labelling[x]] for x in range(a.universe)))


# -- coppie -------------------------------------------------------------------------

LEFT = "left"


def pair_vocabulary(left: Vocabulary, right: Vocabulary) -> Vocabulary:
    rels = [relation(LEFT, "e")]
    rels += [Relation("l_" + r.name, r.kinds) for r in left.relations]
    rels += [Relation("r_" + r.name, r.kinds) for r in right.relations]
    return Vocabulary(tuple(rels))


def pair(a: Structure, b: Structure) -> Structure:
    """Unione disgiunta di a e b con una relazione unaria che seleziona a."""
    shift = a.universe
    rels: Dict[str, set] = {LEFT: {(x,) for x in range(a.universe)}}
    for name, rows in a.relations.items():
        rels["l_" + name] = set(rows)
    for name, rows in b.relations.items():
        rels["r_" + name] = {
            tuple(s + shift if isinstance(s, int) else tuple(x + shift for x in s) for s in row) for row in rows
        }
    return Structure(pair_vocabulary(a.vocabulary, b.vocabulary), a.universe + b.universe,
                     {k: frozenset(v) for k, v in rels.items()})


def _project(p: Structure, prefix: str, selected: bool) -> Structure:
    if LEFT not in p.vocabulary:
        raise VocabularyMismatch("La struttura non è una coppia (manca 'left')")
    left = {row[0] for row in p.tuples(LEFT)}
    keep = [x for x in range(p.universe) if (x in left) == selected]
    if not keep:
        raise MalformedInput("Componente vuota nella coppia")
    part = p.restrict(keep)
    rels = [Relation(r.name[len(prefix):], r.kinds) for r in p.vocabulary.relations if r.name.startswith(prefix)]
    vocabulary = Vocabulary(tuple(rels))
    return Structure(vocabulary, part.universe,
                     {r.name: part.relations[prefix + r.name] for r in vocabulary.relations})


def project_left(p: Structure) -> Structure:
    return _project(p, "l_", True)


def project_right(p: Structure) -> Structure:
    return _project(p, "r_", False)
