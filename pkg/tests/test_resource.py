from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mbhash.engine import ParityModel, propagate_labels, run_tableau_protocol
from mbhash.pauli_core import CliffordCircuit, PauliOperator, StabilizerTableau, bell_pairs
from mbhash.pauli_core.dense import dense_oracle, equal_up_to_phase
from mbhash.resource import (
    AMPLITUDE,
    PHASE,
    HashingPlan,
    ResourceState,
    Round,
    apply_frame,
    hashing_resource,
    jamiolkowski_resource,
    make_hashing_plan,
    plan_to_circuit,
    read_in,
)

PHI = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def test_plan_minimal():
    plan = make_hashing_plan(2, 1, seed=3)
    assert plan.n_rounds == 1
    rnd = plan.rounds[0]
    assert set(rnd.subset) | {rnd.target} <= {0, 1}
    assert rnd.target not in rnd.subset


def test_plan_reproducible():
    a = make_hashing_plan(16, 4, seed=99)
    b = make_hashing_plan(16, 4, seed=99)
    assert a.n_rounds == 12 and a.rounds == b.rounds
    assert make_hashing_plan(16, 4, seed=100).rounds != a.rounds
    assert len(a.survivors) == 4


def test_plan_mean_subset_size():
    # each of the other survivors joins with probability 1/2, conditioned on a non-empty subset
    ratios = []
    for seed in range(400):
        plan = make_hashing_plan(20, 4, seed)
        alive = 20
        for rnd in plan.rounds:
            m = alive - 1
            expected = (m / 2) / (1 - 0.5**m)
            ratios.append(len(rnd.subset) / expected)
            alive -= 1
    assert np.mean(ratios) == pytest.approx(1.0, abs=0.02)


def test_plan_parity_types_balanced():
    kinds = [r.parity_type for s in range(200) for r in make_hashing_plan(12, 2, s).rounds]
    frac = kinds.count(AMPLITUDE) / len(kinds)
    assert abs(frac - 0.5) <= 5 * np.sqrt(0.25 / len(kinds))


@pytest.mark.parametrize(
    "N, M, rounds",
    [
        (2, 2, []),
        (3, 1, [Round((1,), AMPLITUDE, 0)]),
        (3, 1, [Round((1,), AMPLITUDE, 0), Round((0,), PHASE, 2)]),
        (3, 1, [Round((), AMPLITUDE, 0), Round((1,), PHASE, 2)]),
        (3, 1, [Round((1,), "bogus", 0), Round((1,), PHASE, 2)]),
    ],
)
def test_plan_validation(N, M, rounds):
    with pytest.raises(ValueError):
        HashingPlan(N, M, rounds)


def test_plan_to_circuit_minimal():
    plan = HashingPlan(2, 1, [Round((0,), AMPLITUDE, 1)])
    circ = plan_to_circuit(plan, "A")
    assert [(g.name, g.qubits) for g in circ.gates] == [("CNOT", (0, 1))]
    assert circ.measurements == [(1, "Z")]
    phase = plan_to_circuit(HashingPlan(2, 1, [Round((0,), PHASE, 1)]), "B")
    assert [(g.name, g.qubits) for g in phase.gates] == [("CNOT", (1, 0))]
    assert phase.measurements == [(1, "X")]
    with pytest.raises(ValueError):
        plan_to_circuit(plan, "C")


def test_plan_to_circuit_gate_count():
    plan = make_hashing_plan(16, 4, seed=5)
    circ = plan_to_circuit(plan)
    assert circ.two_qubit_gate_count() == sum(len(r.subset) for r in plan.rounds)


def test_identity_resource_is_phi_plus():
    res = jamiolkowski_resource(CliffordCircuit(1))
    assert res.n_qubits == 2 and res.input_ports == [0] and res.output_ports == [1]
    assert equal_up_to_phase(dense_oracle(res.tableau), PHI)


def test_single_h_resource_matches_dense():
    circ = CliffordCircuit(1)
    circ.append("H", 0)
    res = jamiolkowski_resource(circ)
    hadamard = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    expected = np.kron(np.eye(2), hadamard) @ PHI  # H on qubit 0
    assert equal_up_to_phase(dense_oracle(res.tableau), expected)


@pytest.mark.parametrize("seed", range(5))
def test_hashing_resource_size(seed):
    plan = make_hashing_plan(4, 2, seed)
    for party in "AB":
        res = hashing_resource(plan, party)
        assert res.n_qubits == 6
        assert res.n_in == 4 and res.n_out == 2
        assert res.byproduct_map.shape == (2 + 4, 8)


@pytest.mark.parametrize("N, M", [(3, 1), (6, 2), (8, 5)])
def test_resource_has_n_plus_m_qubits(N, M):
    assert hashing_resource(make_hashing_plan(N, M, 11)).n_qubits == N + M


def test_resource_text_roundtrip():
    res = hashing_resource(make_hashing_plan(6, 2, 4), "B")
    back = ResourceState.from_text(res.to_text())
    assert back.same_as(res)
    assert back.seed == res.seed and back.bases == res.bases
    assert back.to_text() == res.to_text()
    with pytest.raises(ValueError):
        ResourceState.from_text("garbage\n")


@given(st.integers(0, 2**20), st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
def test_byproduct_map_linear(seed, m1, m2):
    res = hashing_resource(make_hashing_plan(8, 3, seed % 50))
    b1 = np.array([(m1 >> i) & 1 for i in range(16)], dtype=np.uint8)
    b2 = np.array([(m2 >> i) & 1 for i in range(16)], dtype=np.uint8)
    f1, fr1 = res.decode(b1)
    f2, fr2 = res.decode(b2)
    f12, fr12 = res.decode(b1 ^ b2)
    assert np.array_equal(f12, f1 ^ f2)
    assert fr12 == fr1.compose(fr2)


def test_decode_rejects_wrong_length():
    res = hashing_resource(make_hashing_plan(4, 2, 0))
    with pytest.raises(ValueError):
        res.decode(np.zeros(3, np.uint8))


@pytest.mark.parametrize("state", ["Z", "-Z", "X", "-X", "Y", "-Y"])
def test_identity_resource_teleports(state):
    res = jamiolkowski_resource(CliffordCircuit(1))
    for seed in range(16):
        rng = np.random.default_rng(seed)
        inp = StabilizerTableau.from_stabilizers([state])
        out = read_in(res, inp, rng)
        apply_frame(out.tableau, out.output_qubits, out.frame)
        sign = -1 if state.startswith("-") else 1
        obs = PauliOperator.single(3, out.output_qubits[0], state[-1])
        assert out.tableau.expectation(obs) == sign


def test_read_in_rejects_wrong_input_count():
    res = hashing_resource(make_hashing_plan(4, 2, 0))
    with pytest.raises(ValueError):
        read_in(res, bell_pairs(1), np.random.default_rng(0))


def test_noiseless_ensemble_gives_zero_parities():
    plan = make_hashing_plan(5, 2, 8)
    run = run_tableau_protocol(plan, np.zeros(5, np.uint8), np.zeros(5, np.uint8), np.random.default_rng(1))
    assert not run.transcript.any()
    assert not run.out_a.any() and not run.out_b.any()


@pytest.mark.parametrize("seed", range(20))
def test_planted_string_matches_gate_based(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.integers(2, 7))
    M = int(rng.integers(1, N))
    plan = make_hashing_plan(N, M, seed)
    a = rng.integers(0, 2, N).astype(np.uint8)
    b = rng.integers(0, 2, N).astype(np.uint8)
    run = run_tableau_protocol(plan, a, b, rng)
    transcript, fa, fb = propagate_labels(plan, a, b)
    assert np.array_equal(run.transcript, transcript)
    assert np.array_equal(run.transcript, ParityModel(plan).transcript(a, b))
    assert np.array_equal(run.out_a, fa[plan.survivors])
    assert np.array_equal(run.out_b, fb[plan.survivors])
