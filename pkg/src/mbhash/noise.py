"""Local depolarizing noise (LDN).

``D(p) rho = p rho + (1-p)/4 (rho + X rho X + Y rho Y + Z rho Z)`` on one
qubit.  Monte Carlo code samples the equivalent Pauli mixture; the dense
helpers (density matrices and superoperators) are the oracle used to check
composition and the exchange of noise across a Bell projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli_core import PauliOperator

PAULI_LABELS = ("I", "X", "Y", "Z")
# (x, z) bits of I, X, Y, Z; a Bell pair label (a, b) flips by exactly these bits
PAULI_XZ = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=np.uint8)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SINGLE_PAULIS = (_I2, _X, _Y, _Z)


def _check_unit(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class NoiseParams:
    """LDN reliabilities: ``p`` per resource-state particle, ``q`` per input particle."""

    p: float = 1.0
    q: float = 1.0

    def __post_init__(self) -> None:
        _check_unit("p", self.p)
        _check_unit("q", self.q)

    @property
    def effective(self) -> float:
        """Per-particle parameter of the input pairs once resource noise is moved onto them."""
        return compose_ldn(self.p, self.q)


def ldn_single_qubit_distribution(p: float) -> np.ndarray:
    """Probabilities of I, X, Y, Z in the Pauli unraveling of ``D(p)``."""
    p = _check_unit("p", p)
    err = (1.0 - p) / 4.0
    return np.array([1.0 - 3.0 * err, err, err, err])


def sample_pauli_codes(p: float, size, rng: np.random.Generator) -> np.ndarray:
    """Independent LDN draws as codes 0..3 (I, X, Y, Z)."""
    probs = ldn_single_qubit_distribution(p)
    if probs[0] == 1.0:
        return np.zeros(size, dtype=np.uint8)
    u = rng.random(size)
    return np.searchsorted(np.cumsum(probs)[:-1], u, side="right").astype(np.uint8)


def sample_pair_flips(p: float, size, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Label flips ``(da, db)`` of Bell pairs whose two particles each suffer ``D(p)``."""
    codes = sample_pauli_codes(p, (2,) + (size if isinstance(size, tuple) else (size,)), rng)
    xz = PAULI_XZ[codes]
    flips = xz[0] ^ xz[1]
    return flips[..., 0], flips[..., 1]


def sample_ldn(p: float, qubits, rng: np.random.Generator, n_qubits: int | None = None) -> PauliOperator:
    """Random Pauli error: independent ``D(p)`` draws on ``qubits``, identity elsewhere."""
    qubits = [int(q) for q in qubits]
    n = n_qubits if n_qubits is not None else (max(qubits) + 1 if qubits else 0)
    if any(not 0 <= q < n for q in qubits):
        raise IndexError("qubit index outside the register")
    codes = sample_pauli_codes(p, len(qubits), rng)
    op = PauliOperator.identity(n)
    for q, c in zip(qubits, codes):
        op.x_bits[q] = bool(PAULI_XZ[c, 0])
        op.z_bits[q] = bool(PAULI_XZ[c, 1])
    return op


def compose_ldn(p: float, q: float) -> float:
    """``D(p) D(q) = D(p q)``."""
    return _check_unit("p", p) * _check_unit("q", q)


def fidelity_scaling(p: float, n: int) -> float:
    """Leading-order fidelity ``((3p+1)/4)**n`` of an n-particle state under LDN."""
    _check_unit("p", p)
    if n < 0:
        raise ValueError("n must be non-negative")
    return ((3.0 * p + 1.0) / 4.0) ** n


def werner_fidelity_exact(q: float) -> float:
    """Fidelity of |Φ+> after ``D(q)`` on both particles: ``(3 q**2 + 1)/4``."""
    q = _check_unit("q", q)
    return (3.0 * q * q + 1.0) / 4.0


def werner_fidelity_paper(q: float) -> float:
    """Per-particle product form ``((3q+1)/4)**2`` (reproduces the quoted q_min)."""
    return fidelity_scaling(q, 2)


def q_from_fidelity_exact(F: float) -> float:
    if not 0.25 <= F <= 1.0:
        raise ValueError(f"fidelity must lie in [1/4, 1], got {F}")
    return float(np.sqrt((4.0 * F - 1.0) / 3.0))


def q_from_fidelity_paper(F: float) -> float:
    if not 0.25 <= F <= 1.0:
        raise ValueError(f"fidelity must lie in [1/4, 1], got {F}")
    return float((4.0 * np.sqrt(F) - 1.0) / 3.0)


# -- dense channel oracle ---------------------------------------------------

def embed(op: np.ndarray, qubit: int, n_qubits: int) -> np.ndarray:
    """Single-qubit ``op`` on ``qubit`` (little endian: qubit 0 is the least significant)."""
    out = np.ones((1, 1), dtype=complex)
    for j in reversed(range(n_qubits)):
        out = np.kron(out, op if j == qubit else _I2)
    return out


def apply_ldn_density(rho: np.ndarray, p: float, qubit: int, n_qubits: int) -> np.ndarray:
    p = _check_unit("p", p)
    twirl = sum(embed(P, qubit, n_qubits) @ rho @ embed(P, qubit, n_qubits).conj().T for P in SINGLE_PAULIS)
    return p * rho + (1.0 - p) / 4.0 * twirl


def ldn_superoperator(p: float, qubit: int = 0, n_qubits: int = 1) -> np.ndarray:
    """Matrix ``S`` with ``vec(D_j(p) rho) = S vec(rho)`` (row-major vec)."""
    p = _check_unit("p", p)
    dim = 1 << n_qubits
    total = p * np.eye(dim * dim, dtype=complex)
    for P in SINGLE_PAULIS:
        full = embed(P, qubit, n_qubits)
        total = total + (1.0 - p) / 4.0 * np.kron(full, full.conj())
    return total


def pauli_channel_superoperator(probs, qubit: int = 0, n_qubits: int = 1) -> np.ndarray:
    """Superoperator of ``rho -> sum_k probs[k] P_k rho P_k`` for P in I, X, Y, Z."""
    dim = 1 << n_qubits
    total = np.zeros((dim * dim, dim * dim), dtype=complex)
    for w, P in zip(probs, SINGLE_PAULIS):
        full = embed(P, qubit, n_qubits)
        total = total + w * np.kron(full, full.conj())
    return total


def bell_state(label: int) -> np.ndarray:
    """Bell state ``(I ⊗ X^a Z^b)|Φ+>`` for ``label = 2a + b``, in the 2-qubit basis."""
    a, b = divmod(int(label), 2)
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    op = np.linalg.matrix_power(embed(_X, 1, 2), a) @ np.linalg.matrix_power(embed(_Z, 1, 2), b)
    return op @ phi


def bell_projector(label: int) -> np.ndarray:
    v = bell_state(label)
    return np.outer(v, v.conj())


def check_density(rho: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density operator must be a square matrix")
    if not np.allclose(rho, rho.conj().T, atol=atol):
        raise ValueError("density operator is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol:
        raise ValueError("density operator does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise ValueError("density operator is not positive semidefinite")
    return rho


def verify_noise_exchange(p: float, rho: np.ndarray, bell_label: int, atol: float = 1e-12) -> bool:
    """Whether ``P_B D_1(p) rho P_B = P_B D_2(p) rho P_B`` for a 2-qubit ``rho``."""
    rho = check_density(rho)
    if rho.shape != (4, 4):
        raise ValueError("noise exchange is checked on two-qubit states")
    proj = bell_projector(bell_label)
    left = proj @ apply_ldn_density(rho, p, 0, 2) @ proj
    right = proj @ apply_ldn_density(rho, p, 1, 2) @ proj
    return bool(np.max(np.abs(left - right)) <= atol)


def random_density(n_qubits: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random density matrix (Ginibre construction)."""
    dim = 1 << n_qubits
    k = rank or dim
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
