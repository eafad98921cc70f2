"""Bell-diagonal ensembles in the two-bit label representation.

A pair with label ``(a, b)`` is ``(I ⊗ X^a Z^b)|Φ+>``; ``a`` is the
amplitude bit (flips the ``ZZ`` parity), ``b`` the phase bit (flips ``XX``).
Distributions are indexed by ``2a + b``: ``(λ00, λ01, λ10, λ11)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..noise import ldn_single_qubit_distribution

# label index of the Pauli I, X, Y, Z acting on one particle of a pair
PAULI_TO_LABEL = np.array([0, 2, 3, 1])


def check_distribution(dist) -> np.ndarray:
    dist = np.asarray(dist, dtype=float)
    if dist.shape != (4,):
        raise ValueError("a Bell-diagonal distribution has four entries")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-12:
        raise ValueError(f"not a probability distribution: {dist}")
    return dist


def werner_distribution(F: float) -> np.ndarray:
    if not 0.0 <= F <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {F}")
    e = (1.0 - F) / 3.0
    return np.array([F, e, e, e])


def is_werner(dist, atol: float = 1e-12) -> bool:
    dist = np.asarray(dist, dtype=float)
    return bool(np.ptp(dist[1:]) <= atol)


def bell_entropy(dist) -> float:
    """Shannon entropy (bits) of the label distribution = von Neumann entropy of the state."""
    dist = check_distribution(dist)
    nz = dist[dist > 0]
    return float(-(nz * np.log2(nz)).sum())


def xor_convolve(d1, d2) -> np.ndarray:
    """Label distribution of the XOR of two independent labels."""
    out = np.zeros(4)
    for i in range(4):
        for j in range(4):
            out[i ^ j] += d1[i] * d2[j]
    return out


def two_sided_ldn(p: float) -> np.ndarray:
    """Label flips of a pair whose two particles each go through ``D(p)``."""
    one = np.zeros(4)
    one[PAULI_TO_LABEL] = ldn_single_qubit_distribution(p)
    return xor_convolve(one, one)


@dataclass
class BellDiagonalEnsemble:
    """One Monte Carlo draw: per-pair labels plus the distribution they came from."""

    distribution: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        self.distribution = check_distribution(self.distribution)
        self.a = np.asarray(self.a, dtype=np.uint8)
        self.b = np.asarray(self.b, dtype=np.uint8)
        if self.a.shape != self.b.shape or self.a.ndim != 1:
            raise ValueError("label arrays must be 1-D and of equal length")

    @property
    def N(self) -> int:
        return int(self.a.size)

    @property
    def labels(self) -> np.ndarray:
        return (2 * self.a + self.b).astype(np.uint8)

    @property
    def fidelity(self) -> float:
        return float(self.distribution[0])

    @classmethod
    def planted(cls, a, b, distribution=None) -> BellDiagonalEnsemble:
        return cls(werner_distribution(0.9) if distribution is None else distribution, a, b)


def sample_labels(dist, size, rng: np.random.Generator) -> np.ndarray:
    dist = check_distribution(dist)
    if dist[0] == 1.0:
        return np.zeros(size, dtype=np.uint8)
    u = rng.random(size)
    return np.searchsorted(np.cumsum(dist)[:-1], u, side="right").astype(np.uint8)


def sample_ensemble(distribution, N: int, rng: np.random.Generator) -> BellDiagonalEnsemble:
    """``N`` i.i.d. pairs; label ``(0, 0)`` is |Φ+>."""
    labels = sample_labels(distribution, N, rng)
    return BellDiagonalEnsemble(distribution, labels >> 1, labels & 1)
