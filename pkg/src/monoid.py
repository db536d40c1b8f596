"""
Monoidi finiti e alberi di fattorizzazione

Un albero di fattorizzazione di una parola rispetto a un omomorfismo
h: Σ* -> M ha per foglie le lettere (etichettate con la loro immagine) e per
nodi interni il prodotto delle etichette dei figli. Un nodo con tre o più
figli deve avere figli tutti con la stessa etichetta idempotente.

L'albero costruito ha altezza minima: per livelli crescenti si calcola, con
matrici booleane sugli intervalli della parola, quali fattori ammettono un
albero di quell'altezza (concatenazione binaria oppure catena di almeno tre
fattori dello stesso idempotente). L'altezza minima è al più 3·|M|.
"""

import json
import logging
import random
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvariantViolation, MalformedInput

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteMonoid:
    """Tabella di moltiplicazione table[a][b] = a·b e unità."""
    table: Tuple[Tuple[int, ...], ...]
    unit: int = 0

    def __post_init__(self):
        table = tuple(tuple(int(x) for x in row) for row in self.table)
        object.__setattr__(self, "table", table)
        m = len(table)
        if m == 0 or any(len(row) != m for row in table):
            raise MalformedInput("La tabella di moltiplicazione deve essere quadrata e non vuota")
        if any(not 0 <= x < m for row in table for x in row):
            raise MalformedInput("Valori della tabella fuori dagli elementi")
        if not 0 <= self.unit < m:
            raise MalformedInput(f"Unità {self.unit} fuori dagli elementi")
        t = np.array(table, dtype=np.int64)
        if any(t[self.unit, a] != a or t[a, self.unit] != a for a in range(m)):
            raise MalformedInput(f"{self.unit} non è un'unità")
        left = t[t]
        right = t[np.arange(m)[:, None, None], t[None, :, :]]
        if not np.array_equal(left, right):
            a, b, c = (int(i[0]) for i in np.nonzero(left != right))
            raise MalformedInput(f"Prodotto non associativo su ({a}, {b}, {c})")

    @property
    def size(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def product(self, elements: Iterable[int]) -> int:
        out = self.unit
        for x in elements:
            out = self.table[out][x]
        return out

    def to_json(self) -> Dict[str, Any]:
        return {"table": [list(row) for row in self.table], "unit": self.unit}

    @classmethod
    def from_json(cls, doc: Any) -> "FiniteMonoid":
        try:
            return cls(tuple(tuple(row) for row in doc["table"]), int(doc.get("unit", 0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"Monoide non valido: {exc}")


def idempotents(M: FiniteMonoid) -> List[int]:
    return [e for e in range(M.size) if M.mul(e, e) == e]


@dataclass(frozen=True)
class Homomorphism:
    """Immagine di ogni lettera 0..k-1 nel monoide."""
    monoid: FiniteMonoid
    images: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if any(not 0 <= x < self.monoid.size for x in self.images):
            raise MalformedInput("Immagine di una lettera fuori dal monoide")

    @property
    def alphabet(self) -> int:
        return len(self.images)

    def values(self, word: Sequence[int]) -> List[int]:
        try:
            return [self.images[a] for a in word]
        except IndexError:
            raise MalformedInput(f"Lettera fuori dall'alfabeto di {self.alphabet} lettere")

    def __call__(self, word: Sequence[int]) -> int:
        return self.monoid.product(self.values(word))

    def to_json(self) -> Dict[str, Any]:
        return {"monoid": self.monoid.to_json(), "letters": list(self.images)}

    @classmethod
    def from_json(cls, doc: Any) -> "Homomorphism":
        try:
            monoid = FiniteMonoid.from_json(doc["monoid"])
            images = doc.get("letters", list(range(monoid.size)))
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"Omomorfismo non valido: {exc}")
        return cls(monoid, tuple(images))

    @classmethod
    def loads(cls, text: str) -> "Homomorphism":
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"JSON non valido: {exc}")


def parse_word(text: str) -> List[int]:
    """'abca' -> [0, 1, 2, 0]; accetta anche '0,1,2,0'."""
    text = text.strip()
    if "," in text or text.isdigit():
        try:
            return [int(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise MalformedInput(f"Parola non valida: '{text}'")
    if not text.isalpha() or not text.islower():
        raise MalformedInput(f"Parola non valida: '{text}'")
    return [ord(ch) - ord("a") for ch in text]


# -- alberi di fattorizzazione -----------------------------------------------------------------


@dataclass(frozen=True)
class FactorizationTree:
    label: int
    children: Tuple["FactorizationTree", ...] = ()
    letter: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def height(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(c.height for c in self.children)

    @property
    def word(self) -> List[int]:
        if self.is_leaf:
            return [self.letter]
        return [a for c in self.children for a in c.word]

    def validate(self, h: Homomorphism) -> Optional[str]:
        """Prima violazione delle regole dei nodi, oppure None."""
        M = h.monoid
        if self.is_leaf:
            if self.letter is None or not 0 <= self.letter < h.alphabet:
                return "Foglia senza lettera valida"
            if h.images[self.letter] != self.label:
                return f"Foglia {self.letter} etichettata {self.label}, attesa {h.images[self.letter]}"
            return None
        if len(self.children) == 1:
            return "Nodo interno con un solo figlio"
        labels = [c.label for c in self.children]
        if M.product(labels) != self.label:
            return f"Etichetta {self.label} diversa dal prodotto dei figli {labels}"
        if len(labels) >= 3:
            if any(x != self.label for x in labels):
                return f"Nodo largo con figli di etichette diverse: {labels}"
            if M.mul(self.label, self.label) != self.label:
                return f"Nodo largo con etichetta {self.label} non idempotente"
        for c in self.children:
            problem = c.validate(h)
            if problem:
                return problem
        return None

    def to_json(self) -> Dict[str, Any]:
        if self.is_leaf:
            return {"label": self.label, "letter": self.letter}
        return {"label": self.label, "children": [c.to_json() for c in self.children]}


def height_bound(M: FiniteMonoid) -> int:
    return 3 * M.size


def _interval_values(M: FiniteMonoid, values: Sequence[int]) -> np.ndarray:
    """val[i, j] = prodotto di values[i:j] (unità sulla diagonale, -1 sotto)."""
    n = len(values)
    table = np.array(M.table, dtype=np.int64)
    val = np.full((n + 1, n + 1), -1, dtype=np.int64)
    np.fill_diagonal(val, M.unit)
    for j in range(1, n + 1):
        val[:j, j] = table[val[:j, j - 1], values[j - 1]]
    return val


def _bool_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0.5


def _closure(edges: np.ndarray) -> np.ndarray:
    """Chiusura riflessiva e transitiva per quadrature ripetute."""
    out = edges | np.eye(edges.shape[0], dtype=bool)
    for _ in range(max(1, edges.shape[0].bit_length())):
        out = _bool_product(out, out)
    return out


def _levels(M: FiniteMonoid, val: np.ndarray) -> np.ndarray:
    """level[i, j] = altezza minima di un albero per il fattore [i, j), -1 se non calcolata."""
    size = val.shape[0]
    n = size - 1
    level = np.full((size, size), -1, dtype=np.int64)
    reach = np.zeros((size, size), dtype=bool)
    reach[np.arange(n), np.arange(1, size)] = True
    level[reach] = 0
    wide = idempotents(M)
    height = 0
    while not reach[0, n]:
        height += 1
        if height > height_bound(M):
            raise InvariantViolation(f"Nessun albero di altezza <= {height_bound(M)}")
        grown = reach | _bool_product(reach, reach)
        for e in wide:
            chain = reach & (val == e)
            if not chain.any():
                continue
            three = _bool_product(_bool_product(_bool_product(chain, chain), chain), _closure(chain))
            grown |= three
        level[grown & ~reach] = height
        reach = grown
        logger.debug("livello %d: %d fattori", height, int(reach.sum()))
    return level


def _chain(level: np.ndarray, val: np.ndarray, i: int, j: int, e: int, below: int) -> List[int]:
    """Punti di taglio i = c0 < ... < cr = j, r >= 3, con fattori di valore e e altezza < below."""
    def usable(a: int, b: int) -> bool:
        return 0 <= level[a, b] < below and val[a, b] == e

    start = (i, 0)
    previous: Dict[Tuple[int, int], Tuple[int, int]] = {start: start}
    queue = deque([start])
    while queue:
        a, steps = queue.popleft()
        for b in range(a + 1, j + 1):
            if not usable(a, b):
                continue
            state = (b, min(steps + 1, 3))
            if state in previous:
                continue
            previous[state] = (a, steps)
            if state == (j, 3):
                cuts = [j]
                while state != start:
                    state = previous[state]
                    cuts.append(state[0])
                return cuts[::-1]
            queue.append(state)
    raise InvariantViolation(f"Catena idempotente mancante per il fattore [{i}, {j})")


def factorization_tree(h: Homomorphism, word: Sequence[int]) -> FactorizationTree:
    """
    Albero di fattorizzazione di altezza minima.

    Raises:
        MalformedInput: parola vuota o lettere fuori dall'alfabeto
    """
    if not word:
        raise MalformedInput("La parola vuota non ha albero di fattorizzazione")
    values = h.values(word)
    M = h.monoid
    val = _interval_values(M, values)
    level = _levels(M, val)

    def build(i: int, j: int) -> FactorizationTree:
        height = int(level[i, j])
        if height == 0:
            return FactorizationTree(values[i], (), int(word[i]))
        for k in range(i + 1, j):
            if 0 <= level[i, k] < height and 0 <= level[k, j] < height:
                return FactorizationTree(int(val[i, j]), (build(i, k), build(k, j)))
        e = int(val[i, j])
        cuts = _chain(level, val, i, j, e, height)
        return FactorizationTree(e, tuple(build(a, b) for a, b in zip(cuts, cuts[1:])))

    tree = build(0, len(word))
    logger.debug("factorization_tree: |w|=%d altezza=%d", len(word), tree.height)
    return tree


# -- costruzione di monoidi -------------------------------------------------------------------------


def monoid_from_generators(generators: Sequence[Sequence[int]]) -> Homomorphism:
    """
    Monoide di trasformazioni generato (composizione da sinistra a destra:
    f·g applica prima f). L'identità è l'elemento 0; la lettera i va nel
    generatore i.
    """
    if not generators:
        raise MalformedInput("Serve almeno un generatore")
    degree = len(generators[0])
    gens = [tuple(int(x) for x in g) for g in generators]
    if any(len(g) != degree or any(not 0 <= x < degree for x in g) for g in gens):
        raise MalformedInput("Generatori di grado diverso o fuori dominio")

    def compose(f: Tuple[int, ...], g: Tuple[int, ...]) -> Tuple[int, ...]:
        return tuple(g[f[x]] for x in range(degree))

    identity = tuple(range(degree))
    elements = [identity]
    index = {identity: 0}
    queue = deque([identity])
    while queue:
        f = queue.popleft()
        for g in gens:
            fg = compose(f, g)
            if fg not in index:
                index[fg] = len(elements)
                elements.append(fg)
                queue.append(fg)
    table = tuple(tuple(index[compose(f, g)] for g in elements) for f in elements)
    return Homomorphism(FiniteMonoid(table, 0), tuple(index[g] for g in gens))


def random_monoid(rng: random.Random, max_size: int = 6, attempts: int = 200) -> Homomorphism:
    """Monoide di trasformazioni casuale con al più max_size elementi."""
    for _ in range(attempts):
        degree = rng.choice((2, 3))
        count = rng.randint(1, 3)
        gens = [[rng.randrange(degree) for _ in range(degree)] for _ in range(count)]
        h = monoid_from_generators(gens)
        if h.monoid.size <= max_size:
            return h
    return monoid_from_generators([[1, 0]])


def random_word(rng: random.Random, h: Homomorphism, max_length: int = 200) -> List[int]:
    return [rng.randrange(h.alphabet) for _ in range(rng.randint(1, max_length))]
