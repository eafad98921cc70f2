"""Hashing plans, their Clifford circuits and the compact resource states.

A party's circuit acts on its halves of the ``N`` input pairs.  The resource
state is the Jamiolkowski state of that circuit: ``N`` Bell pairs
``(port_i, c_i)``, the circuit run on the ``c_i`` with every target
measurement postselected on outcome 0, and the measured qubits traced out.
That leaves ``N`` input ports plus ``M`` outputs, i.e. ``N + M`` qubits.

Reading inputs in by Bell measurements teleports them into the circuit with
a Pauli byproduct; pushing that byproduct through the circuit gives (i) which
target outcomes flip relative to the postselected reference and (ii) the
Pauli frame left on the outputs.  Both are linear in the Bell outcome bits
and are stored as one GF(2) matrix, the ``byproduct_map``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .pauli_core import CliffordCircuit, PauliFrame, PauliOperator, StabilizerTableau, TableauError, bell_measure
from .pauli_core.bits import from_hex, to_hex
from .rng import stream

AMPLITUDE = "amplitude"
PHASE = "phase"
PARITY_TYPES = (AMPLITUDE, PHASE)
PARTIES = ("A", "B")


@dataclass(frozen=True)
class Round:
    """One parity round: the parity of ``subset ∪ {target}`` is revealed."""

    subset: tuple[int, ...]
    parity_type: str
    target: int

    @property
    def basis(self) -> str:
        return "Z" if self.parity_type == AMPLITUDE else "X"


@dataclass
class HashingPlan:
    n_pairs: int
    n_output: int
    rounds: list[Round]
    seed: int | None = None

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        N, M = self.n_pairs, self.n_output
        if not 0 < M < N:
            raise ValueError(f"need 0 < M < N, got N={N}, M={M}")
        if len(self.rounds) != N - M:
            raise ValueError(f"plan has {len(self.rounds)} rounds, expected N - M = {N - M}")
        alive = set(range(N))
        for k, rnd in enumerate(self.rounds):
            if rnd.parity_type not in PARITY_TYPES:
                raise ValueError(f"round {k}: unknown parity type {rnd.parity_type!r}")
            if rnd.target not in alive:
                raise ValueError(f"round {k}: target {rnd.target} already consumed")
            if not rnd.subset:
                raise ValueError(f"round {k}: empty subset")
            if rnd.target in rnd.subset or not set(rnd.subset) <= alive:
                raise ValueError(f"round {k}: subset must hold surviving pairs other than the target")
            alive.discard(rnd.target)

    @property
    def survivors(self) -> list[int]:
        consumed = {rnd.target for rnd in self.rounds}
        return [i for i in range(self.n_pairs) if i not in consumed]

    @property
    def n_rounds(self) -> int:
        return len(self.rounds)


def make_hashing_plan(N: int, M: int, seed: int) -> HashingPlan:
    """Random plan: per round a uniformly chosen target, each other survivor
    joins the subset with probability 1/2 (redrawn if empty), and the parity
    type is amplitude or phase with probability 1/2."""
    if not 0 < M < N:
        raise ValueError(f"need 0 < M < N, got N={N}, M={M}")
    rng = stream(seed, "plan", N, M)
    alive = np.arange(N)
    rounds = []
    for _ in range(N - M):
        t = int(alive[rng.integers(alive.size)])
        rest = alive[alive != t]
        while True:
            subset = rest[rng.random(rest.size) < 0.5]
            if subset.size:
                break
        kind = PARITY_TYPES[int(rng.integers(2))]
        rounds.append(Round(tuple(int(c) for c in subset), kind, t))
        alive = rest
    return HashingPlan(N, M, rounds, seed)


def plan_to_circuit(plan: HashingPlan, party: str = "A") -> CliffordCircuit:
    """Per round: CNOTs subset -> target and a Z measurement (amplitude), or
    target -> subset and an X measurement (phase).  Both parties run the same
    circuit on their halves, so their outcomes XOR to the pair parity."""
    if party not in PARTIES:
        raise ValueError(f"party must be 'A' or 'B', got {party!r}")
    circuit = CliffordCircuit(plan.n_pairs)
    for rnd in plan.rounds:
        for c in rnd.subset:
            if rnd.parity_type == AMPLITUDE:
                circuit.append("CNOT", c, rnd.target)
            else:
                circuit.append("CNOT", rnd.target, c)
    circuit.measurements = [(rnd.target, rnd.basis) for rnd in plan.rounds]
    circuit.validate()
    return circuit


def propagate_frames(circuit: CliffordCircuit, fx: np.ndarray, fz: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Push sign-free Pauli frames through ``circuit``.

    ``fx``/``fz`` have shape ``(n_frames, n_qubits)``.  Returns the frames
    after all gates and the measurement flip bits, shape
    ``(n_frames, n_measurements)``.
    """
    fx = np.array(fx, dtype=np.uint8, copy=True)
    fz = np.array(fz, dtype=np.uint8, copy=True)
    for g in circuit.gates:
        q = g.qubits
        if g.name == "H":
            fx[:, q[0]], fz[:, q[0]] = fz[:, q[0]].copy(), fx[:, q[0]].copy()
        elif g.name == "S":
            fz[:, q[0]] ^= fx[:, q[0]]
        elif g.name == "CNOT":
            fx[:, q[1]] ^= fx[:, q[0]]
            fz[:, q[0]] ^= fz[:, q[1]]
        elif g.name == "CZ":
            fz[:, q[0]] ^= fx[:, q[1]]
            fz[:, q[1]] ^= fx[:, q[0]]
    flips = np.zeros((fx.shape[0], len(circuit.measurements)), dtype=np.uint8)
    for k, (q, basis) in enumerate(circuit.measurements):
        if basis == "Z":
            flips[:, k] = fx[:, q]
        elif basis == "X":
            flips[:, k] = fz[:, q]
        else:
            flips[:, k] = fx[:, q] ^ fz[:, q]
    return fx, fz, flips


@dataclass
class ResourceState:
    """Compact resource for one party.

    Qubits ``input_ports`` receive the inputs; ``output_ports`` carry the
    outputs.  ``byproduct_map`` has ``2 * n_in`` columns, ordered
    ``(b_x_0, b_z_0, b_x_1, ...)`` (Bell outcomes of ``X X`` and ``Z Z`` per
    port), and rows ordered: one flip bit per round, then the output frame
    x bits, then the output frame z bits.
    """

    party: str
    tableau: StabilizerTableau
    input_ports: list[int]
    output_ports: list[int]
    byproduct_map: np.ndarray
    seed: int | None = None
    bases: list[str] = field(default_factory=list)

    @property
    def n_in(self) -> int:
        return len(self.input_ports)

    @property
    def n_out(self) -> int:
        return len(self.output_ports)

    @property
    def n_qubits(self) -> int:
        return self.tableau.n_qubits

    @property
    def n_flips(self) -> int:
        return self.byproduct_map.shape[0] - 2 * self.n_out

    def decode(self, bell_bits: np.ndarray) -> tuple[np.ndarray, PauliFrame]:
        """Flip bits per round and output frame for the given Bell outcome bits."""
        bits = np.asarray(bell_bits, dtype=np.uint8).reshape(-1)
        if bits.size != 2 * self.n_in:
            raise ValueError(f"expected {2 * self.n_in} Bell outcome bits, got {bits.size}")
        out = (self.byproduct_map.astype(np.int64) @ bits.astype(np.int64)) & 1
        k, m = self.n_flips, self.n_out
        return out[:k].astype(np.uint8), PauliFrame(out[k : k + m].astype(bool), out[k + m :].astype(bool))

    # -- text format ----------------------------------------------------
    def to_text(self) -> str:
        n = self.n_qubits
        lines = [
            "mbhash-resource 1",
            f"n_in {self.n_in}",
            f"n_out {self.n_out}",
            f"party {self.party}",
            f"seed {'-' if self.seed is None else self.seed}",
            "input_ports " + " ".join(map(str, self.input_ports)),
            "output_ports " + " ".join(map(str, self.output_ports)),
            "bases " + ("".join(self.bases) or "-"),
            f"stabilizers {n}",
        ]
        for s in self.tableau.stabilizers():
            sign = "-" if s.phase == 2 else "+"
            lines.append(f"{sign} {to_hex(s.x_bits) or '0'} {to_hex(s.z_bits) or '0'}")
        rows, cols = self.byproduct_map.shape
        lines.append(f"byproduct_map {rows} {cols}")
        lines.extend(to_hex(row) or "0" for row in self.byproduct_map)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> ResourceState:
        lines = [ln.strip() for ln in text.strip().splitlines()]
        if not lines or lines[0] != "mbhash-resource 1":
            raise ValueError("not an mbhash resource file")
        head: dict[str, str] = {}
        i = 1
        while not lines[i].startswith("stabilizers"):
            key, _, value = lines[i].partition(" ")
            head[key] = value
            i += 1
        n = int(lines[i].split()[1])
        gens = []
        for ln in lines[i + 1 : i + 1 + n]:
            sign, xh, zh = ln.split()
            op = PauliOperator(from_hex(xh, n), from_hex(zh, n))
            op.phase = 0 if sign == "+" else 2
            gens.append(op)
        i += 1 + n
        _, rows, cols = lines[i].split()
        rows, cols = int(rows), int(cols)
        bmap = np.array([from_hex(h, cols) for h in lines[i + 1 : i + 1 + rows]], dtype=np.uint8).reshape(rows, cols)
        ports = [int(v) for v in head["input_ports"].split()]
        outs = [int(v) for v in head.get("output_ports", "").split()]
        if len(ports) != int(head["n_in"]) or len(outs) != int(head["n_out"]):
            raise ValueError("port lists disagree with n_in / n_out")
        seed = None if head.get("seed", "-") == "-" else int(head["seed"])
        bases = [] if head.get("bases", "-") == "-" else list(head["bases"])
        return cls(head["party"], StabilizerTableau.from_stabilizers(gens), ports, outs, bmap, seed, bases)

    def same_as(self, other: ResourceState) -> bool:
        return (
            self.party == other.party
            and self.input_ports == other.input_ports
            and self.output_ports == other.output_ports
            and np.array_equal(self.byproduct_map, other.byproduct_map)
            and self.tableau.same_state(other.tableau)
        )


def jamiolkowski_resource(circuit: CliffordCircuit, party: str = "A", seed: int | None = None) -> ResourceState:
    """Resource state of ``circuit`` (gates, then Pauli measurements) on ``n_in + n_out`` qubits."""
    circuit.validate()
    n = circuit.n_qubits
    gens = []
    for i in range(n):
        for kind in "XZ":
            op = PauliOperator.identity(2 * n)
            bits = op.x_bits if kind == "X" else op.z_bits
            bits[[2 * i, 2 * i + 1]] = True
            gens.append(op)
    tab = StabilizerTableau.from_stabilizers(gens)  # (port_i, c_i) = (2i, 2i+1)
    for g in circuit.gates:
        mapped = type(g)(g.name, tuple(2 * q + 1 for q in g.qubits))
        tab.apply(mapped)
    for q, basis in circuit.measurements:
        observable = PauliOperator.single(2 * n, 2 * q + 1, basis)
        try:
            tab.measure(observable, forced=0)
        except TableauError as exc:
            raise TableauError(f"reference outcome 0 impossible for measurement of qubit {q}") from exc
    measured = [2 * q + 1 for q in circuit.measured_qubits]
    tab = tab.remove_qubits(measured)
    # remaining qubit order: ports and surviving circuit qubits interleaved
    remaining = [k for k in range(2 * n) if k not in set(measured)]
    order = [remaining.index(2 * i) for i in range(n)]
    order += [remaining.index(2 * s + 1) for s in circuit.surviving_qubits]
    tab = permute_qubits(tab, order)

    # byproduct of Bell outcome (b_x, b_z) on port i is X^{b_z} Z^{b_x} on c_i
    fx = np.zeros((2 * n, n), dtype=np.uint8)
    fz = np.zeros((2 * n, n), dtype=np.uint8)
    for i in range(n):
        fz[2 * i, i] = 1
        fx[2 * i + 1, i] = 1
    fx, fz, flips = propagate_frames(circuit, fx, fz)
    survivors = circuit.surviving_qubits
    bmap = np.concatenate([flips.T, fx[:, survivors].T, fz[:, survivors].T]).astype(np.uint8)
    return ResourceState(
        party=party,
        tableau=tab,
        input_ports=list(range(n)),
        output_ports=list(range(n, n + len(survivors))),
        byproduct_map=bmap,
        seed=seed,
        bases=[b for _, b in circuit.measurements],
    )


def hashing_resource(plan: HashingPlan, party: str = "A") -> ResourceState:
    return jamiolkowski_resource(plan_to_circuit(plan, party), party, plan.seed)


def permute_qubits(tab: StabilizerTableau, order: list[int]) -> StabilizerTableau:
    """New tableau whose qubit ``k`` is old qubit ``order[k]``."""
    if sorted(order) != list(range(tab.n_qubits)):
        raise ValueError("order must be a permutation of the qubits")
    gens = []
    for s in tab.stabilizers():
        gens.append(PauliOperator(s.x_bits[order], s.z_bits[order], s.phase))
    new = StabilizerTableau.from_stabilizers(gens)
    new.consumed = tab.consumed[order].copy()
    return new


@dataclass
class ReadInResult:
    tableau: StabilizerTableau
    output_qubits: list[int]
    flips: np.ndarray
    frame: PauliFrame
    bell_bits: np.ndarray


def read_in(
    resource: ResourceState,
    input_tableau: StabilizerTableau,
    rng: np.random.Generator,
    input_qubits: list[int] | None = None,
) -> ReadInResult:
    """Couple ``input_qubits`` of ``input_tableau`` to the resource by Bell measurements.

    The resource is appended after the input register.  Returns the joint
    post-measurement tableau, the output qubit indices in it, this party's
    flip bits (its virtual target outcomes) and the output Pauli frame.
    """
    if input_qubits is None:
        input_qubits = list(range(input_tableau.n_qubits))
    if len(input_qubits) != resource.n_in:
        raise ValueError(f"resource has {resource.n_in} input ports, got {len(input_qubits)} input qubits")
    joint = input_tableau.tensor(resource.tableau)
    offset = input_tableau.n_qubits
    bits = np.zeros(2 * resource.n_in, dtype=np.uint8)
    for i, (q, port) in enumerate(zip(input_qubits, resource.input_ports)):
        (bx, bz), _ = bell_measure(joint, q, offset + port, rng)
        bits[2 * i], bits[2 * i + 1] = bx, bz
    flips, frame = resource.decode(bits)
    return ReadInResult(joint, [offset + o for o in resource.output_ports], flips, frame, bits)


def apply_frame(tab: StabilizerTableau, qubits: list[int], frame: PauliFrame) -> StabilizerTableau:
    """Apply the Pauli ``X^x Z^z`` of ``frame`` to ``qubits`` (a correction undoes a byproduct)."""
    for q, xb, zb in zip(qubits, frame.x_bits, frame.z_bits):
        if xb and zb:
            tab.pauli(q, "Y")
        elif xb:
            tab.pauli(q, "X")
        elif zb:
            tab.pauli(q, "Z")
    return tab


__all__ = [
    "AMPLITUDE",
    "PHASE",
    "HashingPlan",
    "ReadInResult",
    "ResourceState",
    "Round",
    "apply_frame",
    "hashing_resource",
    "jamiolkowski_resource",
    "make_hashing_plan",
    "permute_qubits",
    "plan_to_circuit",
    "propagate_frames",
    "read_in",
]
