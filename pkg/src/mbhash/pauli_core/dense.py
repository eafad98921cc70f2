"""Dense state-vector oracle for small registers.

Basis index ``k`` has qubit ``j`` in bit ``j`` (little endian).  Everything
here is O(2^n) and meant for checking the tableau code, not for production.
"""

from __future__ import annotations

import numpy as np

from .circuit import CliffordCircuit, Gate
from .pauli import PauliOperator

MAX_DENSE_QUBITS = 12


class DenseTooLarge(ValueError):
    pass


def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


def _bitmask(bits: np.ndarray) -> int:
    return int(sum(1 << int(j) for j in np.flatnonzero(bits)))


def apply_pauli_vector(op: PauliOperator, vec: np.ndarray) -> np.ndarray:
    """``op @ vec`` without building the matrix."""
    n = op.n_qubits
    k = _indices(n)
    zmask = _bitmask(op.z_bits)
    xmask = _bitmask(op.x_bits)
    signs = 1 - 2 * (np.bitwise_count(k & zmask).astype(np.int64) & 1)
    out = np.empty_like(vec, dtype=complex)
    out[k ^ xmask] = vec * signs
    return out * (1j ** op.xz_exponent())


def pauli_matrix(op: PauliOperator) -> np.ndarray:
    n = op.n_qubits
    dim = 1 << n
    return np.stack([apply_pauli_vector(op, np.eye(dim, dtype=complex)[:, c]) for c in range(dim)], axis=1)


def canonical_phase(vec: np.ndarray) -> np.ndarray:
    """Rescale so the largest-magnitude amplitude (first on ties) is real positive."""
    vec = np.asarray(vec, dtype=complex)
    mags = np.abs(vec)
    k = int(np.flatnonzero(mags > mags.max() - 1e-9)[0])
    return vec * (abs(vec[k]) / vec[k])


def equal_up_to_phase(a: np.ndarray, b: np.ndarray, atol: float = 1e-9) -> bool:
    return bool(abs(abs(np.vdot(a, b)) - 1.0) < atol and abs(np.linalg.norm(a) - 1) < atol)


def dense_oracle(tableau) -> np.ndarray:
    """Unit state vector stabilized by every generator of ``tableau`` (n <= 12)."""
    n = tableau.n_qubits
    if n > MAX_DENSE_QUBITS:
        raise DenseTooLarge(f"dense oracle limited to {MAX_DENSE_QUBITS} qubits, got {n}")
    gens = tableau.stabilizers()
    rng = np.random.default_rng(0x5EED)
    for _ in range(8):
        vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        for g in gens:
            vec = 0.5 * (vec + apply_pauli_vector(g, vec))
        norm = np.linalg.norm(vec)
        if norm > 1e-6:
            return canonical_phase(vec / norm)
    raise RuntimeError("projection onto the stabilizer space vanished")  # pragma: no cover


def basis_state(n: int, index: int = 0) -> np.ndarray:
    vec = np.zeros(1 << n, dtype=complex)
    vec[index] = 1
    return vec


def apply_gate_vector(g: Gate, vec: np.ndarray, n: int) -> np.ndarray:
    k = _indices(n)
    out = vec.astype(complex, copy=True)
    name, qs = g.name, g.qubits
    if name == "H":
        m = 1 << qs[0]
        lo = k[(k & m) == 0]
        a, b = vec[lo], vec[lo | m]
        out[lo] = (a + b) / np.sqrt(2)
        out[lo | m] = (a - b) / np.sqrt(2)
    elif name == "S":
        out[(k >> qs[0]) & 1 == 1] *= 1j
    elif name == "CNOT":
        c, t = 1 << qs[0], 1 << qs[1]
        sel = k[((k & c) != 0) & ((k & t) == 0)]
        out[sel], out[sel | t] = vec[sel | t], vec[sel]
    elif name == "CZ":
        both = ((k >> qs[0]) & 1) & ((k >> qs[1]) & 1)
        out[both == 1] *= -1
    elif name in ("X", "Y", "Z"):
        out = apply_pauli_vector(PauliOperator.single(n, qs[0], name), vec)
    else:
        raise ValueError(f"unsupported gate {name}")
    return out


def project_pauli(vec: np.ndarray, op: PauliOperator, bit: int) -> tuple[np.ndarray, float]:
    """Project onto the ``(-1)**bit`` eigenspace of ``op``; returns (state, probability)."""
    proj = 0.5 * (vec + (1 - 2 * bit) * apply_pauli_vector(op, vec))
    prob = float(np.vdot(proj, proj).real)
    if prob < 1e-12:
        return proj, 0.0
    return proj / np.sqrt(prob), prob


def simulate_circuit(
    circuit: CliffordCircuit,
    state: np.ndarray | None = None,
    outcomes: list[int] | None = None,
) -> tuple[np.ndarray, list[float]]:
    """Run ``circuit`` densely; measurements are projected onto ``outcomes`` (default all 0)."""
    n = circuit.n_qubits
    if n > MAX_DENSE_QUBITS + 4:
        raise DenseTooLarge(f"dense simulation limited to {MAX_DENSE_QUBITS + 4} qubits")
    vec = basis_state(n) if state is None else np.asarray(state, dtype=complex)
    for g in circuit.gates:
        vec = apply_gate_vector(g, vec, n)
    probs = []
    outcomes = outcomes or [0] * len(circuit.measurements)
    for (q, basis), bit in zip(circuit.measurements, outcomes):
        vec, prob = project_pauli(vec, PauliOperator.single(n, q, basis), bit)
        probs.append(prob)
    return vec, probs


def density(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, vec.conj())


def fidelity_with(vec: np.ndarray, rho: np.ndarray) -> float:
    return float(np.vdot(vec, rho @ vec).real)
