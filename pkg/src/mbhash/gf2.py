"""Dense GF(2) linear algebra on uint8/bool matrices.

Sizes here stay in the hundreds (tableau extraction, byproduct maps, test
constructions), so row operations are vectorised but elimination is a
plain Python loop over pivots.
"""

from __future__ import annotations

import numpy as np


def _as_gf2(a: np.ndarray) -> np.ndarray:
    return (np.asarray(a) & 1).astype(np.uint8)


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and the pivot column list."""
    m = _as_gf2(a).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.flatnonzero(m[r:, c]) + r
        if hits.size == 0:
            continue
        p = hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        others = np.flatnonzero(m[:, c])
        others = others[others != r]
        m[others] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray) -> int:
    return len(rref(a)[1])


def nullspace(a: np.ndarray) -> np.ndarray:
    """Basis of ``{v : a @ v = 0}`` as rows of the returned matrix."""
    a = _as_gf2(a)
    cols = a.shape[1]
    m, pivots = rref(a)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, p in enumerate(pivots):
            basis[k, p] = m[i, f]
    return basis


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """One solution ``x`` of ``a @ x = b`` (``b`` may be a vector or a matrix).

    Raises ``ValueError`` when the system is inconsistent.
    """
    a = _as_gf2(a)
    b = _as_gf2(b)
    vector = b.ndim == 1
    if vector:
        b = b[:, None]
    rows, cols = a.shape
    aug, pivots = rref(np.concatenate([a, b], axis=1))
    if any(p >= cols for p in pivots):
        raise ValueError("inconsistent GF(2) system")
    x = np.zeros((cols, b.shape[1]), dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = aug[i, cols:]
    return x[:, 0] if vector else x


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (_as_gf2(a).astype(np.int64) @ _as_gf2(b).astype(np.int64) & 1).astype(np.uint8)
