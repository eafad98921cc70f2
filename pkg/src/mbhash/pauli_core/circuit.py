from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

SINGLE_QUBIT_GATES = frozenset({"H", "S", "X", "Y", "Z"})
TWO_QUBIT_GATES = frozenset({"CNOT", "CZ"})
GATE_SET = SINGLE_QUBIT_GATES | TWO_QUBIT_GATES
BASES = frozenset({"X", "Y", "Z"})


class Gate(NamedTuple):
    name: str
    qubits: tuple[int, ...]

    def check(self, n_qubits: int) -> None:
        if self.name not in GATE_SET:
            raise ValueError(f"unsupported gate {self.name!r}; Clifford generators are {sorted(GATE_SET)}")
        arity = 2 if self.name in TWO_QUBIT_GATES else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.name} takes {arity} qubit(s), got {self.qubits}")
        for q in self.qubits:
            if not 0 <= q < n_qubits:
                raise IndexError(f"qubit {q} out of range for {n_qubits} qubits")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.name} needs two distinct qubits, got {self.qubits}")


def gate(name: str, *qubits: int) -> Gate:
    return Gate(name.upper(), tuple(int(q) for q in qubits))


@dataclass
class CliffordCircuit:
    """Clifford gate list followed by single-qubit Pauli measurements.

    Measurements are performed after all gates, in list order.  Every
    measured qubit must be left untouched by later gates, which is the
    case for the hashing circuits (a target pair leaves the protocol after
    its round).
    """

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)
    measurements: list[tuple[int, str]] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.gates = [g if isinstance(g, Gate) else gate(g[0], *g[1:]) for g in self.gates]
        self.measurements = [(int(q), str(b).upper()) for q, b in self.measurements]
        self.validate()

    def validate(self) -> None:
        for g in self.gates:
            g.check(self.n_qubits)
        seen = set()
        for q, basis in self.measurements:
            if basis not in BASES:
                raise ValueError(f"measurement basis must be X, Y or Z; got {basis!r}")
            if not 0 <= q < self.n_qubits:
                raise IndexError(f"measured qubit {q} out of range")
            if q in seen:
                raise ValueError(f"qubit {q} measured twice")
            seen.add(q)

    def append(self, name: str | Gate, *qubits: int) -> None:
        g = name if isinstance(name, Gate) else gate(name, *qubits)
        g.check(self.n_qubits)
        self.gates.append(g)

    def measure(self, qubit: int, basis: str = "Z") -> None:
        self.measurements.append((int(qubit), basis.upper()))
        self.validate()

    @property
    def measured_qubits(self) -> list[int]:
        return [q for q, _ in self.measurements]

    @property
    def surviving_qubits(self) -> list[int]:
        measured = set(self.measured_qubits)
        return [q for q in range(self.n_qubits) if q not in measured]

    def two_qubit_gate_count(self) -> int:
        return sum(1 for g in self.gates if g.name in TWO_QUBIT_GATES)
