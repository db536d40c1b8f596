"""
Sonda di riconoscibilità

Tabula A -> L(t(A)) su tutti gli alberi della classe di input fino a n
nodi. Se L è dato da un enunciato MSO, confronta la tabella con la
valutazione diretta del pullback dell'enunciato sull'input: una
discrepanza segnala un errore nella semantica delle trasduzioni.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Union

from .classes import corpus
from .config import Budget, default_budget
from .errors import MalformedInput, MSOError
from .logic import Formula, Language, evaluate, parse, to_sexp
from .structures import Structure
from .transduction import Transduction, language_compose, pullback

logger = logging.getLogger(__name__)


@dataclass
class ProbeRow:
    size: int
    structure: Dict[str, Any]
    value: bool
    direct: Optional[bool] = None

    @property
    def agrees(self) -> bool:
        return self.direct is None or self.direct == self.value


@dataclass
class ProbeReport:
    rows: List[ProbeRow] = field(default_factory=list)
    sentence: Optional[str] = None
    pulled_back: Optional[str] = None
    note: Optional[str] = None

    @property
    def disagreements(self) -> List[ProbeRow]:
        return [r for r in self.rows if not r.agrees]

    @property
    def agrees(self) -> bool:
        return not self.disagreements

    def table(self) -> List[bool]:
        return [r.value for r in self.rows]

    def to_json(self) -> Dict[str, Any]:
        return {
            "checked": len(self.rows),
            "accepted": sum(r.value for r in self.rows),
            "agrees": self.agrees,
            "sentence": self.sentence,
            "pullback": self.pulled_back,
            "note": self.note,
            "disagreements": [{"size": r.size, "structure": r.structure, "value": r.value, "direct": r.direct}
                              for r in self.disagreements],
            "table": [{"size": r.size, "value": r.value} for r in self.rows],
        }


def recognizability_probe(
    t: Transduction,
    L: Optional[Callable[[Structure], bool]] = None,
    n: int = 5,
    sentence: Optional[Union[Formula, str]] = None,
    budget: Optional[Budget] = None,
) -> ProbeReport:
    """
    Args:
        t: trasduzione con classe di input fissata (di norma binary-trees)
        L: linguaggio sugli output; se assente si usa sentence
        n: numero massimo di nodi
        sentence: enunciato MSO che definisce L, per il doppio controllo

    Raises:
        MalformedInput: t senza classe di input o nessun linguaggio dato
        BudgetExceeded: corpus o valutazioni oltre i limiti
    """
    if t.source is None:
        raise MalformedInput("La sonda richiede una trasduzione con classe di input")
    budget = budget or default_budget()
    phi = parse(sentence) if isinstance(sentence, str) else sentence
    if L is None:
        if phi is None:
            raise MalformedInput("Serve un linguaggio o un enunciato")
        L = Language(phi, budget)
    composed = language_compose(t, L, budget)

    report = ProbeReport(sentence=to_sexp(phi) if phi is not None else None)
    reduced: Optional[Formula] = None
    if phi is not None:
        try:
            reduced = pullback(t, phi)
            report.pulled_back = to_sexp(reduced)
        except MSOError as exc:
            report.note = f"pullback non disponibile: {exc}"
            logger.info("recognizability_probe: %s", report.note)

    for A in corpus(t.source, n, budget):
        row = ProbeRow(A.universe, A.to_json(), composed(A))
        if reduced is not None:
            row.direct = evaluate(reduced, A, None, budget)
        report.rows.append(row)
    if report.disagreements:
        logger.warning("recognizability_probe: %d discrepanze su %d strutture",
                       len(report.disagreements), len(report.rows))
    return report
