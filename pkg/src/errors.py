"""
Eccezioni del pacchetto

Ogni errore di dominio deriva da MSOError; la CLI lo traduce in exit code 1.
"""


class MSOError(Exception):
    """Errore di dominio generico."""
    exit_code = 1


class ConfigError(MSOError):
    """Configurazione o budget non validi."""


class MalformedInput(MSOError):
    """Documento JSON, formula o termine non ben formati."""


class VocabularyMismatch(MSOError):
    """Vocabolari incompatibili o relazione sconosciuta."""


class ClassMismatch(MSOError):
    """Classi di strutture incompatibili (es. composizione)."""


class NotInClass(MSOError):
    """La struttura non appartiene alla classe richiesta."""


class BudgetExceeded(MSOError):
    """Enumerazione oltre i limiti configurati."""


class UnboundVariable(MSOError):
    """Variabile libera senza valore nella valutazione."""


class SortMismatch(MSOError):
    """Termine dell'algebra con sort incoerenti."""


class DecodeError(MSOError):
    """Decodifica applicata fuori dall'immagine della codifica."""


class AmbiguityError(MSOError):
    """Più candidati dove la costruzione ne garantisce uno solo."""


class InvariantViolation(MSOError):
    """Un invariante verificato a runtime non vale."""
