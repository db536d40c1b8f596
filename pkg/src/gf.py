"""
Algebra lineare su GF(p)

Matrici numpy int64 ridotte modulo un primo p: riduzione a scala, rango,
nucleo, sistemi lineari, intersezione di sottospazi. Per GF(2) c'è anche
una versione su bitset (righe come interi).
"""

from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import MalformedInput


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def require_prime(p: int) -> int:
    if not is_prime(p):
        raise MalformedInput(f"Campo non supportato: {p} non è primo")
    return p


def inverse_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 non è invertibile")
    return pow(a, p - 2, p)


def as_matrix(rows: Sequence[Sequence[int]], p: int, width: Optional[int] = None) -> np.ndarray:
    """Converte una lista di righe in una matrice int64 ridotta modulo p."""
    if len(rows) == 0:
        return np.zeros((0, width or 0), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), -1) % p


def row_reduce(matrix: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """
    Forma a scala ridotta (RREF) modulo p.

    Returns:
        (matrice ridotta, colonne pivot)
    """
    m = np.array(matrix, dtype=np.int64) % p
    rows, cols = m.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nonzero = np.nonzero(m[r:, c])[0]
        if len(nonzero) == 0:
            continue
        pivot = r + int(nonzero[0])
        if pivot != r:
            m[[r, pivot]] = m[[pivot, r]]
        m[r] = (m[r] * inverse_mod(int(m[r, c]), p)) % p
        for other in range(rows):
            if other != r and m[other, c]:
                m[other] = (m[other] - m[other, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(matrix: np.ndarray, p: int) -> int:
    if matrix.size == 0:
        return 0
    return len(row_reduce(matrix, p)[1])


def nullspace(matrix: np.ndarray, p: int) -> np.ndarray:
    """Base (righe) del nucleo destro {x : M x = 0}."""
    m = np.array(matrix, dtype=np.int64) % p
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    reduced, pivots = row_reduce(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, c in enumerate(pivots):
            v[c] = (-reduced[i, f]) % p
        basis.append(v)
    if not basis:
        return np.zeros((0, cols), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


def left_nullspace(matrix: np.ndarray, p: int) -> np.ndarray:
    """Base del nucleo sinistro {y : y M = 0}."""
    return nullspace(np.array(matrix, dtype=np.int64).T, p)


def solve(matrix: np.ndarray, target: np.ndarray, p: int) -> Optional[np.ndarray]:
    """
    Una soluzione di M x = b modulo p, oppure None.
    """
    m = np.array(matrix, dtype=np.int64) % p
    b = np.array(target, dtype=np.int64).reshape(-1, 1) % p
    rows, cols = m.shape
    if rows == 0:
        return np.zeros(cols, dtype=np.int64)
    reduced, pivots = row_reduce(np.hstack([m, b]), p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = reduced[i, cols]
    return x


def span_basis(vectors: np.ndarray, p: int) -> np.ndarray:
    """Base (righe RREF non nulle) dello spazio generato dalle righe."""
    if vectors.shape[0] == 0:
        return vectors.reshape(0, vectors.shape[1] if vectors.ndim == 2 else 0)
    reduced, pivots = row_reduce(vectors, p)
    return reduced[: len(pivots)]


def span_intersection(first: np.ndarray, second: np.ndarray, p: int) -> np.ndarray:
    """
    Base dell'intersezione degli spazi generati dalle righe di first e second.

    Un vettore comune è y·U = z·W, cioè (y, z) nel nucleo sinistro di [U; -W].
    """
    dim = first.shape[1] if first.ndim == 2 else second.shape[1]
    u = span_basis(first.reshape(-1, dim), p)
    w = span_basis(second.reshape(-1, dim), p)
    if u.shape[0] == 0 or w.shape[0] == 0:
        return np.zeros((0, dim), dtype=np.int64)
    stacked = np.vstack([u, (-w) % p])
    combos = left_nullspace(stacked, p)
    if combos.shape[0] == 0:
        return np.zeros((0, dim), dtype=np.int64)
    common = (combos[:, : u.shape[0]] @ u) % p
    return span_basis(common, p)


def coordinates(basis: np.ndarray, vector: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Coefficienti di vector rispetto alle righe di basis (None se fuori dallo span)."""
    return solve(np.array(basis, dtype=np.int64).T, vector, p)


def gf2_rank(rows: Sequence[int]) -> int:
    """Rango su GF(2) di righe rappresentate come bitset interi."""
    pivots: dict = {}
    for row in rows:
        r = row
        while r:
            top = r.bit_length() - 1
            if top in pivots:
                r ^= pivots[top]
            else:
                pivots[top] = r
                break
    return len(pivots)
