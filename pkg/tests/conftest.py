"""Fixture condivise per la suite di test."""

import pytest

from src.classes import GRAPHS_EDGE, make
from src.config import Budget
from src.matroid import RepresentedMatroid


@pytest.fixture
def budget():
    return Budget()


@pytest.fixture
def path3():
    """Cammino a-b-c in rappresentazione per archi."""
    return make(GRAPHS_EDGE, 3, {"edge": [(0, 1), (1, 0), (1, 2), (2, 1)]})


@pytest.fixture
def triangle_graph():
    edges = [(0, 1), (1, 2), (0, 2)]
    return make(GRAPHS_EDGE, 3, {"edge": edges + [(b, a) for a, b in edges]})


@pytest.fixture
def triangle():
    """Matroide ciclico del triangolo su GF(2): e1+e2, e2+e3, e1+e3."""
    return RepresentedMatroid(2, 3, ((1, 1, 0), (0, 1, 1), (1, 0, 1)))
