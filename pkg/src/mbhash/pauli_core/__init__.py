"""Pauli algebra, bit-packed stabilizer tableaux and a dense oracle."""

from __future__ import annotations

import numpy as np

from .circuit import BASES, GATE_SET, CliffordCircuit, Gate, gate
from .dense import DenseTooLarge, dense_oracle, equal_up_to_phase, simulate_circuit
from .pauli import PauliFrame, PauliOperator
from .tableau import StabilizerTableau, TableauError

__all__ = [
    "BASES",
    "GATE_SET",
    "CliffordCircuit",
    "DenseTooLarge",
    "Gate",
    "PauliFrame",
    "PauliOperator",
    "StabilizerTableau",
    "TableauError",
    "apply_clifford",
    "bell_measure",
    "bell_pairs",
    "dense_oracle",
    "equal_up_to_phase",
    "gate",
    "graph_to_tableau",
    "measure_pauli",
    "simulate_circuit",
]


def graph_to_tableau(adjacency) -> StabilizerTableau:
    """Graph state with stabilizers ``K_j = X_j prod_{k in N(j)} Z_k``.

    Destabilizers are the ``Z_j``.
    """
    adj = np.asarray(adjacency)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise TableauError("adjacency must be a square matrix")
    adj = adj.astype(bool)
    if not np.array_equal(adj, adj.T):
        raise TableauError("adjacency must be symmetric")
    if adj.diagonal().any():
        raise TableauError("graph states do not allow self-loops")
    n = adj.shape[0]
    eye = np.eye(n, dtype=bool)
    xb = np.concatenate([np.zeros((n, n), bool), eye])
    zb = np.concatenate([eye, adj])
    return StabilizerTableau._from_rows(xb, zb, np.zeros(2 * n))


def apply_clifford(tableau: StabilizerTableau, g: Gate | tuple) -> StabilizerTableau:
    """Conjugate every generator by ``g`` (in place); returns the tableau."""
    if not isinstance(g, Gate):
        g = gate(g[0], *g[1:])
    return tableau.apply(g)


def measure_pauli(
    tableau: StabilizerTableau,
    observable: PauliOperator | str,
    rng: np.random.Generator | None = None,
    forced: int | None = None,
) -> tuple[int, StabilizerTableau]:
    """Measure ``observable``; returns (eigenvalue ±1, tableau updated in place)."""
    if isinstance(observable, str):
        observable = PauliOperator.from_string(observable)
    bit, _ = tableau.measure(observable, rng=rng, forced=forced)
    return 1 - 2 * bit, tableau


def bell_measure(
    tableau: StabilizerTableau,
    qubit_a: int,
    qubit_b: int,
    rng: np.random.Generator | None = None,
) -> tuple[tuple[int, int], StabilizerTableau]:
    """Bell measurement: outcome bits of ``X_a X_b`` and ``Z_a Z_b`` (0 means +1).

    Both qubits are flagged as consumed but stay in the tableau.  Measuring
    an already consumed qubit is an error.
    """
    if qubit_a == qubit_b:
        raise TableauError("Bell measurement needs two distinct qubits")
    n = tableau.n_qubits
    for q in (qubit_a, qubit_b):
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")
        if tableau.consumed[q]:
            raise TableauError(f"qubit {q} was already consumed by a Bell measurement")
    xx = PauliOperator.identity(n)
    xx.x_bits[[qubit_a, qubit_b]] = True
    zz = PauliOperator.identity(n)
    zz.z_bits[[qubit_a, qubit_b]] = True
    bx, _ = tableau.measure(xx, rng=rng)
    bz, _ = tableau.measure(zz, rng=rng)
    tableau.consumed[[qubit_a, qubit_b]] = True
    return (bx, bz), tableau


def bell_pairs(n_pairs: int) -> StabilizerTableau:
    """``n_pairs`` copies of |Φ+> on qubits (2i, 2i+1)."""
    gens = []
    n = 2 * n_pairs
    for i in range(n_pairs):
        for kind in "XZ":
            op = PauliOperator.identity(n)
            bits = op.x_bits if kind == "X" else op.z_bits
            bits[[2 * i, 2 * i + 1]] = True
            gens.append(op)
    return StabilizerTableau.from_stabilizers(gens)
