"""
Limiti di calcolo

Tutte le enumerazioni del pacchetto sono esponenziali: ogni limite documentato
vive qui, con il suo default, e può essere sovrascritto dalla variabile
d'ambiente MSO_BUDGET o dalla CLI.
"""

import os
from dataclasses import dataclass, fields, replace
from typing import Dict, Mapping, Optional

from .errors import BudgetExceeded, ConfigError

ENV_VAR = "MSO_BUDGET"


@dataclass(frozen=True)
class Budget:
    """Limiti per le operazioni a forza bruta."""
    # Profondità dei quantificatori insiemistici × dimensione universo
    # (default: n <= 12 con al più 2 quantificatori annidati)
    set_quantifier: int = 24

    # Numero massimo di colorazioni k^n prodotte da un passo Colour
    # (default: n <= 14 per k = 2)
    colour_fanout: int = 16384

    # Universo massimo per enumerazioni di tutti i sottoinsiemi
    subsets: int = 12

    # Lato minore massimo di una bipartizione (righe 2^|U|)
    cut_side: int = 12

    # Foglie massime nella ricerca esaustiva di alberi cubici
    branch_leaves: int = 9

    # Foglie massime dell'albero di individualizzazione (forma canonica)
    canonical_leaves: int = 40320

    def require(self, name: str, value: int, what: str = "") -> None:
        """Solleva BudgetExceeded se value supera il limite name."""
        limit = getattr(self, name)
        if value > limit:
            label = what or name
            raise BudgetExceeded(f"{label}: {value} supera il limite {name}={limit}")

    @classmethod
    def from_mapping(cls, values: Mapping[str, str], base: Optional["Budget"] = None) -> "Budget":
        """Costruisce un Budget da coppie chiave/valore testuali."""
        known = {f.name for f in fields(cls)}
        parsed: Dict[str, int] = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            if key not in known:
                raise ConfigError(f"Chiave di budget sconosciuta: '{key}'. Valori validi: {sorted(known)}")
            try:
                parsed[key] = int(str(raw).strip())
            except ValueError:
                raise ConfigError(f"Valore non intero per '{key}': '{raw}'")
            if parsed[key] < 0:
                raise ConfigError(f"Valore negativo per '{key}': {parsed[key]}")
        return replace(base or cls(), **parsed)

    @classmethod
    def parse(cls, text: str, base: Optional["Budget"] = None) -> "Budget":
        """Interpreta il formato 'chiave=valore,chiave=valore'."""
        pairs: Dict[str, str] = {}
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            if "=" not in chunk:
                raise ConfigError(f"Voce di budget non valida: '{chunk}' (atteso chiave=valore)")
            key, value = chunk.split("=", 1)
            pairs[key] = value
        return cls.from_mapping(pairs, base)

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Budget":
        environ = os.environ if environ is None else environ
        text = environ.get(ENV_VAR, "")
        return cls.parse(text) if text.strip() else cls()


def default_budget() -> Budget:
    """Budget di default, con eventuale override da MSO_BUDGET."""
    return Budget.from_env()
