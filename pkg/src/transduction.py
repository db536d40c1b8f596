"""
Trasduzioni MSO con origini

Passi elementari (Interpretation, Filter, Copy, Colour), composizione,
applicazione con mappa delle origini, composizione con linguaggi, verifica
di coppie codifica/decodifica e pullback di enunciati.
"""

import json
import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Union

from .classes import ClassId, letters, strings, vocabulary as class_vocabulary
from .config import Budget, default_budget
from .errors import ClassMismatch, MalformedInput, MSOError, VocabularyMismatch
from .logic import (
    And,
    Atom,
    Equal,
    Exists,
    ExistsSet,
    ForAll,
    ForAllSet,
    Formula,
    Iff,
    Implies,
    Member,
    Not,
    Or,
    check_formula,
    conj,
    evaluate,
    free_variables,
    fresh_name,
    is_set_variable,
    parse,
    rename_bound,
    rename_free,
    replace_atoms,
    to_sexp,
    variables,
)
from .structures import Kind, Relation, Structure, Vocabulary, canonical_form, is_isomorphic

logger = logging.getLogger(__name__)

Origin = Tuple[int, ...]


# -- passi elementari ---------------------------------------------------------------


@dataclass(frozen=True)
class OutputRelation:
    """Relazione di output definita da una formula con variabili parametro."""
    name: str
    kinds: Tuple[Kind, ...]
    variables: Tuple[str, ...]
    formula: Formula

    def __post_init__(self):
        if len(self.kinds) != len(self.variables):
            raise MalformedInput(f"'{self.name}': {len(self.kinds)} tipi ma {len(self.variables)} variabili")
        for kind, var in zip(self.kinds, self.variables):
            if is_set_variable(var) != (kind is Kind.SET):
                raise MalformedInput(f"'{self.name}': variabile '{var}' di tipo errato")
        extra = free_variables(self.formula) - set(self.variables)
        if extra:
            raise MalformedInput(f"'{self.name}': variabili libere non dichiarate {sorted(extra)}")

    @property
    def relation(self) -> Relation:
        return Relation(self.name, self.kinds)


@dataclass(frozen=True)
class Interpretation:
    """Formula di universo phi(x) e una formula per ogni relazione di output."""
    universe_var: str
    universe: Formula
    relations: Tuple[OutputRelation, ...]

    def __post_init__(self):
        extra = free_variables(self.universe) - {self.universe_var}
        if extra or is_set_variable(self.universe_var):
            raise MalformedInput(f"Formula di universo non valida (libere extra: {sorted(extra)})")

    def output_vocabulary(self, source: Vocabulary) -> Vocabulary:
        check_formula(self.universe, source)
        for rel in self.relations:
            check_formula(rel.formula, source)
        return Vocabulary(tuple(r.relation for r in self.relations))

    def run(self, A: Structure, budget: Budget) -> List[Tuple[Structure, Origin]]:
        kept = [x for x in range(A.universe)
                if evaluate(self.universe, A, {self.universe_var: x}, budget)]
        if not kept:
            return []
        index = {x: i for i, x in enumerate(kept)}
        subsets: Optional[List[frozenset]] = None
        rels: Dict[str, frozenset] = {}
        for rel in self.relations:
            if Kind.SET in rel.kinds and subsets is None:
                budget.require("subsets", len(kept), "sottoinsiemi dell'universo interpretato")
                subsets = [frozenset(c) for k in range(len(kept) + 1) for c in combinations(kept, k)]
            domains = [kept if kind is Kind.ELEMENT else subsets for kind in rel.kinds]
            rows = set()
            for values in product(*domains):
                if evaluate(rel.formula, A, dict(zip(rel.variables, values)), budget):
                    rows.add(tuple(index[v] if isinstance(v, int) else tuple(sorted(index[x] for x in v))
                                   for v in values))
            rels[rel.name] = frozenset(rows)
        out = Structure(self.output_vocabulary(A.vocabulary), len(kept), rels)
        return [(out, tuple(kept))]

    def to_json(self) -> Dict[str, Any]:
        return {
            "step": "interpretation",
            "universe_var": self.universe_var,
            "universe": to_sexp(self.universe),
            "relations": [
                {"name": r.name, "kinds": [k.value for k in r.kinds], "vars": list(r.variables),
                 "formula": to_sexp(r.formula)}
                for r in self.relations
            ],
        }


@dataclass(frozen=True)
class Filter:
    """Lascia passare la struttura solo se l'enunciato è vero."""
    sentence: Formula

    def __post_init__(self):
        if free_variables(self.sentence):
            raise MalformedInput("Il filtro richiede un enunciato chiuso")

    def output_vocabulary(self, source: Vocabulary) -> Vocabulary:
        check_formula(self.sentence, source)
        return source

    def run(self, A: Structure, budget: Budget) -> List[Tuple[Structure, Origin]]:
        if evaluate(self.sentence, A, None, budget):
            return [(A, tuple(range(A.universe)))]
        return []

    def to_json(self) -> Dict[str, Any]:
        return {"step": "filter", "sentence": to_sexp(self.sentence)}


@dataclass(frozen=True)
class Copy:
    """k copie disgiunte più la relazione k-aria _copy_k."""
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise MalformedInput(f"Copy richiede k >= 2, non {self.k}")

    @property
    def relation_name(self) -> str:
        return f"_copy_{self.k}"

    def output_vocabulary(self, source: Vocabulary) -> Vocabulary:
        if self.relation_name in source:
            raise VocabularyMismatch(f"'{self.relation_name}' già presente nel vocabolario")
        return source.extend(Relation(self.relation_name, (Kind.ELEMENT,) * self.k))

    def run(self, A: Structure, budget: Budget) -> List[Tuple[Structure, Origin]]:
        n = A.universe
        rels: Dict[str, set] = {}
        for name, rows in A.relations.items():
            copied = set()
            for i in range(self.k):
                shift = i * n
                for row in rows:
                    copied.add(tuple(s + shift if isinstance(s, int) else tuple(x + shift for x in s) for s in row))
            rels[name] = copied
        rels[self.relation_name] = {tuple(i * n + x for i in range(self.k)) for x in range(n)}
        out = Structure(self.output_vocabulary(A.vocabulary), self.k * n, {k: frozenset(v) for k, v in rels.items()})
        return [(out, tuple(x for _ in range(self.k) for x in range(n)))]

    def to_json(self) -> Dict[str, Any]:
        return {"step": "copy", "k": self.k}


@dataclass(frozen=True)
class Colour:
    """Tutte le k^n colorazioni con predicati unari _col_1.._col_k."""
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise MalformedInput(f"Colour richiede k >= 1, non {self.k}")

    @property
    def names(self) -> List[str]:
        return [f"_col_{i}" for i in range(1, self.k + 1)]

    def output_vocabulary(self, source: Vocabulary) -> Vocabulary:
        clash = [n for n in self.names if n in source]
        if clash:
            raise VocabularyMismatch(f"Colori già presenti nel vocabolario: {clash}")
        return source.extend(*[Relation(n, (Kind.ELEMENT,)) for n in self.names])

    def run(self, A: Structure, budget: Budget) -> List[Tuple[Structure, Origin]]:
        n = A.universe
        budget.require("colour_fanout", self.k ** n, f"Colour{{{self.k}}} su {n} elementi")
        voc = self.output_vocabulary(A.vocabulary)
        identity = tuple(range(n))
        outputs = []
        for colouring in product(range(self.k), repeat=n):
            rels = dict(A.relations)
            for i, name in enumerate(self.names):
                rels[name] = frozenset((x,) for x in range(n) if colouring[x] == i)
            outputs.append((Structure(voc, n, rels), identity))
        return outputs

    def to_json(self) -> Dict[str, Any]:
        return {"step": "colour", "k": self.k}


Step = Union[Interpretation, Filter, Copy, Colour]


# -- trasduzioni ------------------------------------------------------------------------


@dataclass(frozen=True)
class OriginTriple:
    """Input, output e origine di ogni elemento dell'output."""
    source: Structure
    output: Structure
    origin: Origin


@dataclass(frozen=True)
class Transduction:
    """
    Sequenza di passi elementari tra due classi.

    source/target None indicano un vocabolario libero: la concatenazione dei
    vocabolari viene allora verificata all'applicazione.
    """
    source: Optional[ClassId]
    target: Optional[ClassId]
    steps: Tuple[Step, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.source is not None:
            final = self.output_vocabulary(class_vocabulary(self.source))
            if self.target is not None and final != class_vocabulary(self.target):
                raise ClassMismatch(f"I passi non producono il vocabolario di {self.target}")

    def output_vocabulary(self, source: Vocabulary) -> Vocabulary:
        voc = source
        for step in self.steps:
            voc = step.output_vocabulary(voc)
        return voc

    def apply(self, A: Structure, budget: Optional[Budget] = None, dedup: str = "origin") -> List[OriginTriple]:
        return apply(self, A, budget, dedup)

    def to_json(self) -> Dict[str, Any]:
        return {
            "input": str(self.source) if self.source else None,
            "output": str(self.target) if self.target else None,
            "steps": [s.to_json() for s in self.steps],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _step_from_json(doc: Any) -> Step:
    if not isinstance(doc, dict) or "step" not in doc:
        raise MalformedInput(f"Passo non valido: {doc!r}")
    kind = doc["step"]
    try:
        if kind == "copy":
            return Copy(int(doc["k"]))
        if kind == "colour":
            return Colour(int(doc["k"]))
        if kind == "filter":
            return Filter(parse(doc["sentence"]))
        if kind == "interpretation":
            rels = tuple(
                OutputRelation(r["name"], tuple(Kind(k) for k in r.get("kinds", [])),
                               tuple(r.get("vars", [])), parse(r["formula"]))
                for r in doc.get("relations", [])
            )
            return Interpretation(doc.get("universe_var", "x"), parse(doc.get("universe", "true")), rels)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"Passo '{kind}' incompleto: {exc}")
    raise MalformedInput(f"Tipo di passo sconosciuto: '{kind}'")


def from_json(doc: Any) -> Transduction:
    """Legge {"input", "output", "steps": [...]} oppure un array di passi."""
    if isinstance(doc, list):
        return Transduction(None, None, tuple(_step_from_json(s) for s in doc))
    if not isinstance(doc, dict):
        raise MalformedInput("Una trasduzione deve essere un oggetto o un array di passi")
    source = ClassId.parse(doc["input"]) if doc.get("input") else None
    target = ClassId.parse(doc["output"]) if doc.get("output") else None
    return Transduction(source, target, tuple(_step_from_json(s) for s in doc.get("steps", [])))


def loads(text: str) -> Transduction:
    try:
        return from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"JSON non valido: {exc}")


def identity_interpretation(voc: Vocabulary) -> Interpretation:
    rels = []
    for rel in voc.relations:
        names = tuple(f"X{i}" if k is Kind.SET else f"x{i}" for i, k in enumerate(rel.kinds))
        rels.append(OutputRelation(rel.name, rel.kinds, names, Atom(rel.name, names)))
    return Interpretation("x", Equal("x", "x"), tuple(rels))


def identity(c: ClassId) -> Transduction:
    return Transduction(c, c, (identity_interpretation(class_vocabulary(c)),))


def string_duplication(k: int = 2) -> Transduction:
    """w -> ww: due copie, con la prima copia interamente prima della seconda."""
    c = strings(k)
    lt = parse("(or (lt x y) (and (exists z (_copy_2 x z)) (exists z (_copy_2 z y))))")
    rels = [OutputRelation("lt", (Kind.ELEMENT, Kind.ELEMENT), ("x", "y"), lt)]
    rels += [OutputRelation(a, (Kind.ELEMENT,), ("x",), Atom(a, ("x",))) for a in letters(k)]
    return Transduction(c, c, (Copy(2), Interpretation("x", Equal("x", "x"), tuple(rels))))


def compose(first: Transduction, second: Transduction) -> Transduction:
    """Prima first, poi second."""
    if first.target is not None and second.source is not None and first.target != second.source:
        raise ClassMismatch(f"Composizione impossibile: {first.target} != {second.source}")
    return Transduction(first.source, second.target, first.steps + second.steps)


def is_deterministic(t: Transduction) -> bool:
    return not any(isinstance(s, Colour) for s in t.steps)


def _canonical_triple(output: Structure, origin: Origin, colours: bool, budget: Budget) -> Tuple[tuple, Structure, Origin]:
    form = canonical_form(output, list(origin) if colours else None, budget)
    relabelled = output.relabel(form.labelling)
    new_origin = [0] * len(origin)
    for old, new in enumerate(form.labelling):
        new_origin[new] = origin[old]
    return form.key, relabelled, tuple(new_origin)


def apply(t: Transduction, A: Structure, budget: Optional[Budget] = None, dedup: str = "origin") -> List[OriginTriple]:
    """
    Applica t ad A.

    Args:
        dedup: "origin" (isomorfismo che rispetta le origini), "iso" (solo
            isomorfismo) oppure "none"

    Returns:
        Triple (input, output, origine) ordinate per forma canonica
    """
    if dedup not in ("origin", "iso", "none"):
        raise MalformedInput(f"Modalità di deduplicazione sconosciuta: '{dedup}'")
    budget = budget or default_budget()
    reserved = A.vocabulary.reserved_names()
    if reserved:
        raise VocabularyMismatch(f"Nomi riservati nel vocabolario di input: {reserved}")
    if t.source is not None and A.vocabulary != class_vocabulary(t.source):
        raise VocabularyMismatch(f"La struttura non è nel vocabolario di {t.source}")
    states: List[Tuple[Structure, Origin]] = [(A, tuple(range(A.universe)))]
    for step in t.steps:
        produced: List[Tuple[Structure, Origin]] = []
        for current, origin in states:
            for out, local in step.run(current, budget):
                produced.append((out, tuple(origin[i] for i in local)))
        states = _dedup_states(produced, dedup, budget)
        logger.debug("%s: %d stati", type(step).__name__, len(states))
    if dedup == "none":
        return [OriginTriple(A, out, origin) for out, origin in states]
    keyed = [_canonical_triple(out, origin, dedup == "origin", budget) for out, origin in states]
    keyed.sort(key=lambda item: (item[0], item[2]))
    return [OriginTriple(A, out, origin) for _, out, origin in keyed]


def _dedup_states(states: List[Tuple[Structure, Origin]], dedup: str, budget: Budget) -> List[Tuple[Structure, Origin]]:
    if dedup == "none":
        return states
    seen: Dict[tuple, Tuple[Structure, Origin]] = {}
    for out, origin in states:
        key = canonical_form(out, list(origin) if dedup == "origin" else None, budget).key
        seen.setdefault(key, (out, origin))
    return list(seen.values())


def language_compose(t: Transduction, L: Callable[[Structure], bool], budget: Optional[Budget] = None) -> Callable[[Structure], bool]:
    """A -> True se qualche output di t(A) appartiene a L."""
    def composed(A: Structure) -> bool:
        return any(L(triple.output) for triple in apply(t, A, budget))
    return composed


# -- verifica di codifiche ----------------------------------------------------------------

Mapping_ = Union[Transduction, Callable[[Structure], Any]]


@dataclass
class EncodingFailure:
    index: int
    reason: str
    structure: Dict[str, Any]


@dataclass
class EncodingReport:
    """Esito di decode(encode(A)) ≅ A su un corpus."""
    total: int = 0
    failures: List[EncodingFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> Dict[str, Any]:
        return {
            "total": self.total,
            "passed": self.total - len(self.failures),
            "ok": self.passed,
            "failures": [{"index": f.index, "reason": f.reason, "structure": f.structure} for f in self.failures],
        }


def _outputs(mapping: Mapping_, A: Structure, budget: Budget) -> List[Tuple[Structure, Optional[Origin]]]:
    if isinstance(mapping, Transduction):
        return [(t.output, t.origin) for t in apply(mapping, A, budget)]
    result = mapping(A)
    if result is None:
        return []
    if isinstance(result, Structure):
        return [(result, None)]
    return [(r, None) for r in result]


def _matches(A: Structure, C: Structure, origin: Optional[Origin], budget: Budget) -> bool:
    if C.vocabulary != A.vocabulary or C.universe != A.universe:
        return False
    if is_isomorphic(C, A, budget=budget) is None:
        return False
    if origin is None:
        return True
    return sorted(origin) == list(range(A.universe))


def check_encoding(enc: Mapping_, dec: Mapping_, corpus: Iterable[Structure], budget: Optional[Budget] = None) -> EncodingReport:
    """
    Verifica la legge di inversa unilaterale: per ogni A e ogni output B di
    enc, dec(B) contiene una struttura isomorfa ad A (con origini composte
    biiettive quando entrambe le mappe le forniscono).
    """
    budget = budget or default_budget()
    report = EncodingReport()
    for index, A in enumerate(corpus):
        report.total += 1
        try:
            encoded = _outputs(enc, A, budget)
            if not encoded:
                report.failures.append(EncodingFailure(index, "encode senza output", A.to_json()))
                continue
            for B, enc_origin in encoded:
                decoded = _outputs(dec, B, budget)
                ok = False
                for C, dec_origin in decoded:
                    origin = None
                    if enc_origin is not None and dec_origin is not None:
                        origin = tuple(enc_origin[i] for i in dec_origin)
                    if _matches(A, C, origin, budget):
                        ok = True
                        break
                if not ok:
                    report.failures.append(EncodingFailure(index, "nessuna decodifica isomorfa all'input", A.to_json()))
                    break
        except MSOError as exc:
            report.failures.append(EncodingFailure(index, f"{type(exc).__name__}: {exc}", A.to_json()))
    logger.info("check_encoding: %d/%d superati", report.total - len(report.failures), report.total)
    return report


# -- pullback ------------------------------------------------------------------------------


def _pullback_interpretation(step: Interpretation, phi: Formula) -> Formula:
    used = set(variables(phi)) | set(variables(step.universe)) | {step.universe_var}
    for rel in step.relations:
        used |= set(variables(rel.formula)) | set(rel.variables)
    phi = rename_bound(phi, used)
    definitions = {rel.name: rel for rel in step.relations}

    def in_universe(var: str) -> Formula:
        body = rename_bound(step.universe, used)
        return rename_free(body, {step.universe_var: var})

    def substitute(atom: Atom) -> Formula:
        rel = definitions.get(atom.relation)
        if rel is None:
            raise VocabularyMismatch(f"Relazione '{atom.relation}' non definita dall'interpretazione")
        body = rename_bound(rel.formula, used)
        return rename_free(body, dict(zip(rel.variables, atom.args)))

    def walk(f: Formula) -> Formula:
        if isinstance(f, Atom):
            return substitute(f)
        if isinstance(f, (Exists, ForAll)):
            guard = in_universe(f.var)
            body = walk(f.body)
            return Exists(f.var, And((guard, body))) if isinstance(f, Exists) else ForAll(f.var, Implies(guard, body))
        if isinstance(f, (ExistsSet, ForAllSet)):
            y = fresh_name("y", used)
            guard = ForAll(y, Implies(Member(y, f.var), in_universe(y)))
            body = walk(f.body)
            return ExistsSet(f.var, And((guard, body))) if isinstance(f, ExistsSet) else ForAllSet(f.var, Implies(guard, body))
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, And):
            return And(tuple(walk(p) for p in f.parts))
        if isinstance(f, Or):
            return Or(tuple(walk(p) for p in f.parts))
        if isinstance(f, Implies):
            return Implies(walk(f.left), walk(f.right))
        if isinstance(f, Iff):
            return Iff(walk(f.left), walk(f.right))
        return f

    u = fresh_name("u", used)
    return conj(Exists(u, in_universe(u)), walk(phi))


def _pullback_colour(step: Colour, phi: Formula) -> Formula:
    used = set(variables(phi))
    sets = [fresh_name("C", used) for _ in step.names]
    by_name = dict(zip(step.names, sets))

    def recolour(atom: Atom) -> Formula:
        if atom.relation in by_name:
            return Member(atom.args[0], by_name[atom.relation])
        return atom

    body = replace_atoms(phi, recolour)
    y = fresh_name("y", used)
    exactly_one = Or(tuple(
        And(tuple(Member(y, s) if s == chosen else Not(Member(y, s)) for s in sets)) for chosen in sets
    ))
    result: Formula = And((ForAll(y, exactly_one), body))
    for s in reversed(sets):
        result = ExistsSet(s, result)
    return result


def pullback(t: Transduction, sentence: Union[Formula, str]) -> Formula:
    """
    Enunciato sull'input vero esattamente quando qualche output di t
    soddisfa sentence. Supporta Interpretation, Filter e Colour.
    """
    phi = parse(sentence) if isinstance(sentence, str) else sentence
    if free_variables(phi):
        raise MalformedInput("Il pullback richiede un enunciato chiuso")
    for step in reversed(t.steps):
        if isinstance(step, Interpretation):
            phi = _pullback_interpretation(step, phi)
        elif isinstance(step, Filter):
            phi = conj(step.sentence, phi)
        elif isinstance(step, Colour):
            phi = _pullback_colour(step, phi)
        else:
            raise MSOError("pullback non supportato per il passo Copy")
    return phi
