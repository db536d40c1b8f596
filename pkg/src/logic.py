"""
MSO con conteggio modulare

Sintassi astratta, parser/serializzatore s-expression e valutatore a forza
bruta su Structure.

Grammatica (EBNF):

    formula  = "true" | "false"
             | "(" "=" evar evar ")"
             | "(" "in" evar svar ")"
             | "(" "not" formula ")"
             | "(" ( "and" | "or" ) { formula } ")"
             | "(" ( "implies" | "iff" ) formula formula ")"
             | "(" ( "exists" | "forall" ) evar formula ")"
             | "(" ( "exists-set" | "forall-set" ) svar formula ")"
             | "(" "divisible" intero svar ")"
             | "(" relazione { evar | svar } ")"
    evar     = identificatore con iniziale minuscola
    svar     = identificatore con iniziale maiuscola

Le variabili elemento iniziano con una minuscola, quelle insiemistiche con
una maiuscola. Esempio: (exists-set X (and (forall x (in x X)) (divisible 2 X))).
"""

import logging
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

from .config import Budget, default_budget
from .errors import MalformedInput, UnboundVariable, VocabularyMismatch
from .structures import Kind, Structure, Vocabulary

logger = logging.getLogger(__name__)

KEYWORDS = {
    "=", "in", "not", "and", "or", "implies", "iff", "exists", "forall",
    "exists-set", "forall-set", "divisible", "true", "false",
}


# -- sintassi astratta ------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    relation: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class Equal:
    left: str
    right: str


@dataclass(frozen=True)
class Member:
    element: str
    set_var: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    parts: Tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Truth:
    value: bool


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ExistsSet:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class ForAllSet:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Divisible:
    """|X| divisibile per modulus."""
    modulus: int
    var: str

    def __post_init__(self):
        if self.modulus < 2:
            raise MalformedInput(f"divisible richiede p >= 2, non {self.modulus}")


Formula = Union[Atom, Equal, Member, Not, And, Or, Implies, Iff, Truth,
                Exists, ForAll, ExistsSet, ForAllSet, Divisible]
Quantifier = (Exists, ForAll, ExistsSet, ForAllSet)
Value = Union[int, FrozenSet[int]]

TRUE = Truth(True)
FALSE = Truth(False)


def is_set_variable(name: str) -> bool:
    return name[:1].isupper()


def conj(*parts: Formula) -> Formula:
    flat = [p for p in parts if p != TRUE]
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*parts: Formula) -> Formula:
    flat = [p for p in parts if p != FALSE]
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


# -- parser ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-']*$")


def _tokenize(text: str) -> List[str]:
    return _TOKEN.findall(text)


def _read(tokens: List[str], pos: int):
    """Legge una s-expression grezza (stringa o lista annidata)."""
    if pos >= len(tokens):
        raise MalformedInput("Formula troncata")
    token = tokens[pos]
    if token == ")":
        raise MalformedInput("Parentesi chiusa inattesa")
    if token != "(":
        return token, pos + 1
    items = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise MalformedInput("Parentesi non chiusa")
        if tokens[pos] == ")":
            return items, pos + 1
        item, pos = _read(tokens, pos)
        items.append(item)


def _variable(token, kind: Optional[bool] = None) -> str:
    if not isinstance(token, str) or token in KEYWORDS or not _NAME.match(token):
        raise MalformedInput(f"Variabile non valida: {token!r}")
    if kind is not None and is_set_variable(token) != kind:
        expected = "insiemistica" if kind else "elemento"
        raise MalformedInput(f"Attesa variabile {expected}, trovato '{token}'")
    return token


def _build(sexp) -> Formula:
    if isinstance(sexp, str):
        if sexp == "true":
            return TRUE
        if sexp == "false":
            return FALSE
        raise MalformedInput(f"Atomo non valido: '{sexp}'")
    if not sexp:
        raise MalformedInput("Lista vuota nella formula")
    head, rest = sexp[0], sexp[1:]
    if not isinstance(head, str):
        raise MalformedInput("L'operatore deve essere un simbolo")

    def arity(count: int) -> None:
        if len(rest) != count:
            raise MalformedInput(f"'{head}' richiede {count} argomenti, trovati {len(rest)}")

    if head == "=":
        arity(2)
        return Equal(_variable(rest[0], False), _variable(rest[1], False))
    if head == "in":
        arity(2)
        return Member(_variable(rest[0], False), _variable(rest[1], True))
    if head == "not":
        arity(1)
        return Not(_build(rest[0]))
    if head == "and":
        return And(tuple(_build(r) for r in rest))
    if head == "or":
        return Or(tuple(_build(r) for r in rest))
    if head == "implies":
        arity(2)
        return Implies(_build(rest[0]), _build(rest[1]))
    if head == "iff":
        arity(2)
        return Iff(_build(rest[0]), _build(rest[1]))
    if head in ("exists", "forall"):
        arity(2)
        cls = Exists if head == "exists" else ForAll
        return cls(_variable(rest[0], False), _build(rest[1]))
    if head in ("exists-set", "forall-set"):
        arity(2)
        cls = ExistsSet if head == "exists-set" else ForAllSet
        return cls(_variable(rest[0], True), _build(rest[1]))
    if head == "divisible":
        arity(2)
        try:
            modulus = int(rest[0])
        except (TypeError, ValueError):
            raise MalformedInput(f"Modulo non intero: {rest[0]!r}")
        return Divisible(modulus, _variable(rest[1], True))
    if head in KEYWORDS or not _NAME.match(head):
        raise MalformedInput(f"Operatore non valido: '{head}'")
    return Atom(head, tuple(_variable(r) for r in rest))


def parse(text: str) -> Formula:
    """Interpreta una formula in sintassi s-expression."""
    tokens = _tokenize(text)
    if not tokens:
        raise MalformedInput("Formula vuota")
    sexp, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise MalformedInput(f"Testo in eccesso dopo la formula: {' '.join(tokens[pos:])}")
    return _build(sexp)


def to_sexp(phi: Formula) -> str:
    if isinstance(phi, Truth):
        return "true" if phi.value else "false"
    if isinstance(phi, Atom):
        return "(" + " ".join((phi.relation,) + phi.args) + ")"
    if isinstance(phi, Equal):
        return f"(= {phi.left} {phi.right})"
    if isinstance(phi, Member):
        return f"(in {phi.element} {phi.set_var})"
    if isinstance(phi, Not):
        return f"(not {to_sexp(phi.body)})"
    if isinstance(phi, (And, Or)):
        op = "and" if isinstance(phi, And) else "or"
        return "(" + " ".join([op] + [to_sexp(p) for p in phi.parts]) + ")"
    if isinstance(phi, Implies):
        return f"(implies {to_sexp(phi.left)} {to_sexp(phi.right)})"
    if isinstance(phi, Iff):
        return f"(iff {to_sexp(phi.left)} {to_sexp(phi.right)})"
    if isinstance(phi, Divisible):
        return f"(divisible {phi.modulus} {phi.var})"
    names = {Exists: "exists", ForAll: "forall", ExistsSet: "exists-set", ForAllSet: "forall-set"}
    return f"({names[type(phi)]} {phi.var} {to_sexp(phi.body)})"


# -- analisi sintattica ----------------------------------------------------------------


def children(phi: Formula) -> Tuple[Formula, ...]:
    if isinstance(phi, Not):
        return (phi.body,)
    if isinstance(phi, (And, Or)):
        return phi.parts
    if isinstance(phi, (Implies, Iff)):
        return (phi.left, phi.right)
    if isinstance(phi, Quantifier):
        return (phi.body,)
    return ()


def _atomic_variables(phi: Formula) -> Tuple[str, ...]:
    if isinstance(phi, Atom):
        return phi.args
    if isinstance(phi, Equal):
        return (phi.left, phi.right)
    if isinstance(phi, Member):
        return (phi.element, phi.set_var)
    if isinstance(phi, Divisible):
        return (phi.var,)
    return ()


def free_variables(phi: Formula) -> FrozenSet[str]:
    if isinstance(phi, Quantifier):
        return free_variables(phi.body) - {phi.var}
    out = set(_atomic_variables(phi))
    for child in children(phi):
        out |= free_variables(child)
    return frozenset(out)


def variables(phi: Formula) -> FrozenSet[str]:
    """Tutte le variabili, libere e legate."""
    out = set(_atomic_variables(phi))
    if isinstance(phi, Quantifier):
        out.add(phi.var)
    for child in children(phi):
        out |= variables(child)
    return frozenset(out)


def set_depth(phi: Formula) -> int:
    """Annidamento massimo dei quantificatori insiemistici."""
    inner = max((set_depth(c) for c in children(phi)), default=0)
    return inner + 1 if isinstance(phi, (ExistsSet, ForAllSet)) else inner


def check_formula(phi: Formula, vocabulary: Vocabulary, bound: FrozenSet[str] = frozenset()) -> None:
    """
    Verifica la buona tipizzazione rispetto al vocabolario.

    Raises:
        VocabularyMismatch: relazione sconosciuta
        MalformedInput: arità o tipi errati, variabile legata due volte
    """
    if isinstance(phi, Atom):
        rel = vocabulary.get(phi.relation)
        if rel.arity != len(phi.args):
            raise MalformedInput(f"'{phi.relation}' ha arità {rel.arity}, usata con {len(phi.args)} argomenti")
        for kind, arg in zip(rel.kinds, phi.args):
            if is_set_variable(arg) != (kind is Kind.SET):
                raise MalformedInput(f"Argomento '{arg}' di tipo errato in '{phi.relation}'")
        return
    if isinstance(phi, Quantifier):
        if phi.var in bound:
            raise MalformedInput(f"Variabile '{phi.var}' legata due volte")
        check_formula(phi.body, vocabulary, bound | {phi.var})
        return
    for child in children(phi):
        check_formula(child, vocabulary, bound)


# -- sostituzioni (pullback) --------------------------------------------------------------


def fresh_name(base: str, used: Set[str]) -> str:
    """Nome nuovo con lo stesso tipo (maiuscola/minuscola) di base."""
    stem = base.rstrip("0123456789_") or ("X" if is_set_variable(base) else "x")
    i = 1
    while f"{stem}_{i}" in used:
        i += 1
    name = f"{stem}_{i}"
    used.add(name)
    return name


def rename_free(phi: Formula, mapping: Mapping[str, str]) -> Formula:
    """Rinomina le occorrenze libere; i legami interni oscurano la mappa."""
    if not mapping:
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.relation, tuple(mapping.get(a, a) for a in phi.args))
    if isinstance(phi, Equal):
        return Equal(mapping.get(phi.left, phi.left), mapping.get(phi.right, phi.right))
    if isinstance(phi, Member):
        return Member(mapping.get(phi.element, phi.element), mapping.get(phi.set_var, phi.set_var))
    if isinstance(phi, Divisible):
        return Divisible(phi.modulus, mapping.get(phi.var, phi.var))
    if isinstance(phi, Quantifier):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        return type(phi)(phi.var, rename_free(phi.body, inner))
    return _rebuild(phi, lambda c: rename_free(c, mapping))


def rename_bound(phi: Formula, used: Set[str]) -> Formula:
    """Rinomina ogni variabile legata con un nome nuovo rispetto a used (che viene esteso)."""
    if isinstance(phi, Quantifier):
        new = fresh_name(phi.var, used)
        body = rename_free(phi.body, {phi.var: new})
        return type(phi)(new, rename_bound(body, used))
    return _rebuild(phi, lambda c: rename_bound(c, used))


def replace_atoms(phi: Formula, fn: Callable[[Atom], Formula]) -> Formula:
    if isinstance(phi, Atom):
        return fn(phi)
    return _rebuild(phi, lambda c: replace_atoms(c, fn))


def map_quantifiers(phi: Formula, fn: Callable[[Formula, Formula], Formula]) -> Formula:
    """Ricostruisce dal basso; fn(quantificatore originale, corpo trasformato) -> formula."""
    if isinstance(phi, Quantifier):
        return fn(phi, map_quantifiers(phi.body, fn))
    return _rebuild(phi, lambda c: map_quantifiers(c, fn))


def _rebuild(phi: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    if isinstance(phi, Not):
        return Not(fn(phi.body))
    if isinstance(phi, And):
        return And(tuple(fn(p) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(tuple(fn(p) for p in phi.parts))
    if isinstance(phi, Implies):
        return Implies(fn(phi.left), fn(phi.right))
    if isinstance(phi, Iff):
        return Iff(fn(phi.left), fn(phi.right))
    if isinstance(phi, Quantifier):
        return type(phi)(phi.var, fn(phi.body))
    return phi


# -- valutazione --------------------------------------------------------------------------


def parse_valuation(doc: Optional[Mapping[str, object]]) -> Dict[str, Value]:
    """Valutazione da JSON: {"x": 0, "X": [0, 2]}."""
    out: Dict[str, Value] = {}
    for name, value in (doc or {}).items():
        if is_set_variable(name):
            if not isinstance(value, (list, tuple)):
                raise MalformedInput(f"La variabile insiemistica '{name}' richiede una lista")
            out[name] = frozenset(int(v) for v in value)
        else:
            if isinstance(value, (list, tuple)):
                raise MalformedInput(f"La variabile elemento '{name}' richiede un intero")
            out[name] = int(value)
    return out


class _Evaluator:
    def __init__(self, structure: Structure):
        self.structure = structure
        self.n = structure.universe
        self._subsets: Optional[List[FrozenSet[int]]] = None

    @property
    def subsets(self) -> List[FrozenSet[int]]:
        if self._subsets is None:
            elements = range(self.n)
            self._subsets = [frozenset(c) for k in range(self.n + 1) for c in combinations(elements, k)]
        return self._subsets

    def lookup(self, env: Dict[str, Value], name: str) -> Value:
        try:
            return env[name]
        except KeyError:
            raise UnboundVariable(f"Variabile libera senza valore: '{name}'")

    def run(self, phi: Formula, env: Dict[str, Value]) -> bool:
        if isinstance(phi, Truth):
            return phi.value
        if isinstance(phi, Atom):
            row = []
            for arg in phi.args:
                value = self.lookup(env, arg)
                row.append(tuple(sorted(value)) if isinstance(value, frozenset) else value)
            return tuple(row) in self.structure.tuples(phi.relation)
        if isinstance(phi, Equal):
            return self.lookup(env, phi.left) == self.lookup(env, phi.right)
        if isinstance(phi, Member):
            return self.lookup(env, phi.element) in self.lookup(env, phi.set_var)
        if isinstance(phi, Divisible):
            return len(self.lookup(env, phi.var)) % phi.modulus == 0
        if isinstance(phi, Not):
            return not self.run(phi.body, env)
        if isinstance(phi, And):
            return all(self.run(p, env) for p in phi.parts)
        if isinstance(phi, Or):
            return any(self.run(p, env) for p in phi.parts)
        if isinstance(phi, Implies):
            return not self.run(phi.left, env) or self.run(phi.right, env)
        if isinstance(phi, Iff):
            return self.run(phi.left, env) == self.run(phi.right, env)
        if isinstance(phi, (Exists, ForAll)):
            domain: Iterable[Value] = range(self.n)
        else:
            domain = self.subsets
        want_all = isinstance(phi, (ForAll, ForAllSet))
        saved = env.get(phi.var, None)
        had = phi.var in env
        try:
            for value in domain:
                env[phi.var] = value
                if self.run(phi.body, env) != want_all:
                    return not want_all
            return want_all
        finally:
            if had:
                env[phi.var] = saved
            else:
                env.pop(phi.var, None)


def evaluate(
    phi: Formula,
    structure: Structure,
    valuation: Optional[Mapping[str, Value]] = None,
    budget: Optional[Budget] = None,
) -> bool:
    """
    Semantica tarskiana con enumerazione esplicita dei quantificatori.

    Args:
        phi: Formula (o testo s-expression)
        structure: Struttura su cui valutare
        valuation: Valori delle variabili libere
        budget: set_quantifier limita profondità insiemistica × n

    Raises:
        VocabularyMismatch, MalformedInput: formula mal tipizzata per il vocabolario
        UnboundVariable: variabile libera senza valore
        BudgetExceeded: profondità insiemistica × n oltre il limite
    """
    if isinstance(phi, str):
        phi = parse(phi)
    check_formula(phi, structure.vocabulary)
    budget = budget or default_budget()
    depth = set_depth(phi)
    if depth:
        budget.require("set_quantifier", depth * structure.universe, "profondità insiemistica × n")
    env: Dict[str, Value] = {}
    for name, value in (valuation or {}).items():
        if isinstance(value, (set, frozenset, list, tuple)):
            value = frozenset(value)
            if any(not 0 <= x < structure.universe for x in value):
                raise MalformedInput(f"Valore di '{name}' fuori dall'universo")
        elif not 0 <= value < structure.universe:
            raise MalformedInput(f"Valore di '{name}' fuori dall'universo")
        env[name] = value
    missing = sorted(free_variables(phi) - set(env))
    if missing:
        raise UnboundVariable(f"Variabili libere senza valore: {missing}")
    return _Evaluator(structure).run(phi, env)


class Language:
    """Linguaggio definito da un enunciato: A -> evaluate(phi, A)."""

    def __init__(self, sentence: Union[Formula, str], budget: Optional[Budget] = None):
        self.sentence = parse(sentence) if isinstance(sentence, str) else sentence
        free = free_variables(self.sentence)
        if free:
            raise MalformedInput(f"Un linguaggio richiede un enunciato chiuso, libere: {sorted(free)}")
        self.budget = budget

    def __call__(self, structure: Structure) -> bool:
        return evaluate(self.sentence, structure, None, self.budget)

    def __repr__(self) -> str:
        return f"Language({to_sexp(self.sentence)})"


def language(sentence: Union[Formula, str], budget: Optional[Budget] = None) -> Language:
    return Language(sentence, budget)
