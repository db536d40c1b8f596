"""
msowidth

Logica MSO con conteggio, trasduzioni, misure di larghezza e matroidi
rappresentabili su strutture finite di piccola dimensione.
"""

from .config import Budget, default_budget
from .errors import MSOError
from .logic import evaluate, parse
from .structures import Structure, Vocabulary, is_isomorphic

__version__ = "1.0.0"
__all__ = ["Budget", "default_budget", "MSOError", "evaluate", "parse", "Structure", "Vocabulary", "is_isomorphic"]
