"""Reduced-size invariant suites for every module, run by ``mbhash selftest``.

Each suite returns a list of failure messages; an empty list is a pass.
Suites draw randomness only from ``stream(seed, suite)`` so a given seed
always gives the same pass/fail pattern.
"""

from __future__ import annotations

import io
import json
import sys
import tempfile
import time
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from . import analytics, gf2, noise
from .engine import (
    ParityModel,
    decode_ml,
    propagate_labels,
    run_tableau_protocol,
    safe_output_count,
    sample_ensemble,
    werner_distribution,
)
from .engine.classical import gate_noise_error_rate
from .pauli_core import CliffordCircuit, PauliOperator, StabilizerTableau, bell_measure, gate, graph_to_tableau
from .pauli_core.dense import basis_state, dense_oracle, equal_up_to_phase, simulate_circuit
from .resource import (
    ResourceState,
    apply_frame,
    hashing_resource,
    jamiolkowski_resource,
    make_hashing_plan,
    read_in,
)
from .rng import stream

Suite = Callable[[int], list[str]]
ONE_QUBIT = ("H", "S", "X", "Y", "Z")
TWO_QUBIT = ("CNOT", "CZ")


def random_circuit(n: int, depth: int, rng: np.random.Generator) -> CliffordCircuit:
    circ = CliffordCircuit(n)
    for _ in range(depth):
        if n > 1 and rng.random() < 0.4:
            a, b = rng.choice(n, size=2, replace=False)
            circ.append(gate(str(rng.choice(TWO_QUBIT)), int(a), int(b)))
        else:
            circ.append(gate(str(rng.choice(ONE_QUBIT)), int(rng.integers(n))))
    return circ


def _run_gates(circ: CliffordCircuit) -> StabilizerTableau:
    tab = StabilizerTableau(circ.n_qubits)
    for g in circ.gates:
        tab.apply(g)
    return tab


def suite_pauli_core(seed: int) -> list[str]:
    fails: list[str] = []
    rng = stream(seed, "pauli_core")
    for k in range(25):
        n = int(rng.integers(1, 7))
        circ = random_circuit(n, 30, rng)
        tab = _run_gates(circ)
        if not tab.is_valid():
            fails.append(f"tableau invariants broken by circuit {k}")
        vec, _ = simulate_circuit(circ, basis_state(n))
        if not equal_up_to_phase(dense_oracle(tab), vec):
            fails.append(f"dense oracle disagrees with dense simulation on circuit {k}")
    # graph state of a line
    adj = np.zeros((4, 4), dtype=np.uint8)
    for i in range(3):
        adj[i, i + 1] = adj[i + 1, i] = 1
    line = CliffordCircuit(4, [gate("H", i) for i in range(4)] + [gate("CZ", i, i + 1) for i in range(3)])
    vec, _ = simulate_circuit(line, basis_state(4))
    if not equal_up_to_phase(dense_oracle(graph_to_tableau(adj)), vec):
        fails.append("graph_to_tableau disagrees with CZ construction")
    # Born statistics: X on |0> is a fair coin
    ones = sum(StabilizerTableau(1).measure(PauliOperator.from_string("X"), rng)[0] for _ in range(2000))
    if abs(ones - 1000) > 5 * np.sqrt(500):
        fails.append(f"X measurement on |0> gave {ones}/2000 ones")
    # teleportation for every single-qubit stabilizer state
    for label in ("Z", "-Z", "X", "-X", "Y", "-Y"):
        for _ in range(4):
            tab = StabilizerTableau.from_stabilizers([label + "II", "IXX", "IZZ"])
            (bx, bz), tab = bell_measure(tab, 0, 1, rng)
            if bz:
                tab.pauli(2, "X")
            if bx:
                tab.pauli(2, "Z")
            want = PauliOperator.from_string(label.replace(label.lstrip("-"), "II" + label.lstrip("-")))
            if tab.expectation(want) != 1:
                fails.append(f"teleportation of {label} failed for outcome {(bx, bz)}")
    return fails


def suite_noise(seed: int) -> list[str]:
    fails: list[str] = []
    rng = stream(seed, "noise")
    for p in (0.0, 0.3, 0.8, 0.97, 1.0):
        probs = noise.ldn_single_qubit_distribution(p)
        if abs(probs.sum() - 1.0) > 1e-15:
            fails.append(f"LDN distribution at p={p} does not sum to 1")
        # the sampled Pauli mixture must realize the channel as defined
        diff = np.abs(noise.pauli_channel_superoperator(probs) - noise.ldn_superoperator(p)).max()
        if diff > 1e-12:
            fails.append(f"LDN Pauli probabilities at p={p} do not reproduce the channel (err {diff:.2e})")
    for _ in range(20):
        p, q = rng.random(2)
        lhs = noise.ldn_superoperator(p) @ noise.ldn_superoperator(q)
        if np.abs(lhs - noise.ldn_superoperator(noise.compose_ldn(p, q))).max() > 1e-12:
            fails.append(f"composition D({p:.3f})D({q:.3f}) != D(pq)")
    for _ in range(10):
        rho = noise.random_density(2, rng)
        p = float(rng.random())
        for label in range(4):
            if not noise.verify_noise_exchange(p, rho, label):
                fails.append(f"noise exchange fails for Bell label {label}")
    codes = noise.sample_pauli_codes(0.0, 20000, rng)
    freq = np.bincount(codes, minlength=4) / codes.size
    if np.abs(freq - 0.25).max() > 5 * np.sqrt(0.1875 / codes.size):
        fails.append(f"p=0 sampling is not uniform: {freq}")
    da, db = noise.sample_pair_flips(0.9, 40000, rng)
    fid = float(np.mean((da | db) == 0))
    want = noise.werner_fidelity_exact(0.9)
    if abs(fid - want) > 5 * np.sqrt(want * (1 - want) / da.size):
        fails.append(f"two-sided LDN fidelity {fid:.4f} != {want:.4f}")
    return fails


def suite_resource(seed: int) -> list[str]:
    fails: list[str] = []
    rng = stream(seed, "resource")
    for N, M in ((2, 1), (4, 2), (6, 3), (8, 5)):
        plan = make_hashing_plan(N, M, seed)
        for party in ("A", "B"):
            res = hashing_resource(plan, party)
            if res.n_qubits != N + M:
                fails.append(f"resource for N={N}, M={M} has {res.n_qubits} qubits")
        res = hashing_resource(plan, "A")
        if not ResourceState.from_text(res.to_text()).same_as(res):
            fails.append(f"text round trip failed for N={N}, M={M}")
        u, v = rng.integers(0, 2, (2, 2 * N))
        f1, fr1 = res.decode(u)
        f2, fr2 = res.decode(v)
        f3, fr3 = res.decode(u ^ v)
        if not (np.array_equal(f1 ^ f2, f3) and (fr1 ^ fr2) == fr3):
            fails.append(f"byproduct map not linear for N={N}, M={M}")
    # identity circuit: teleportation through the resource
    ident = jamiolkowski_resource(CliffordCircuit(1), "A")
    for label in ("Z", "X", "-Y"):
        inp = StabilizerTableau.from_stabilizers([label])
        r = read_in(ident, inp, rng)
        apply_frame(r.tableau, r.output_qubits, r.frame)
        want = PauliOperator.single(r.tableau.n_qubits, r.output_qubits[0], label.lstrip("-"), 2 if label[0] == "-" else 0)
        if r.tableau.expectation(want) != 1:
            fails.append(f"identity resource does not teleport {label}")
    # transcripts: gate-based, parity model and explicit two-party tableau
    for k in range(12):
        N = int(rng.integers(2, 7))
        M = int(rng.integers(1, N))
        plan = make_hashing_plan(N, M, seed + k)
        a, b = rng.integers(0, 2, (2, N)).astype(np.uint8)
        tr, fa, fb = propagate_labels(plan, a, b)
        model = ParityModel(plan)
        run = run_tableau_protocol(plan, a, b, rng)
        oa, ob = model.outputs(a, b)
        if not (np.array_equal(tr, model.transcript(a, b)) and np.array_equal(tr, run.transcript)):
            fails.append(f"transcripts disagree (N={N}, M={M}, plan seed {seed + k})")
        if not (np.array_equal(oa, run.out_a) and np.array_equal(ob, run.out_b)):
            fails.append(f"output labels disagree (N={N}, M={M}, plan seed {seed + k})")
    return fails


def ambiguous_instance(plan, model: ParityModel) -> tuple[np.ndarray, np.ndarray] | None:
    """A string with the zero transcript whose output labels differ from the zero string's."""
    H = model.parity_matrix()
    L = model.output_matrix()
    for v in gf2.nullspace(H):
        if (gf2.matmul(L, v[:, None]) != 0).any():
            return v[: plan.n_pairs], v[plan.n_pairs :]
    return None


def brute_force_ml(transcript, model: ParityModel, dist) -> tuple[np.ndarray, np.ndarray] | None:
    """Most probable output class by full enumeration (``None`` on a tie)."""
    N = model.N
    labels = np.array(np.meshgrid(*[np.arange(4)] * N, indexing="ij")).reshape(N, -1).T
    a, b = (labels >> 1).astype(np.uint8), (labels & 1).astype(np.uint8)
    s = np.concatenate([a, b], axis=1)
    ok = ((s @ model.parity_matrix().T) % 2 == transcript).all(axis=1)
    prior = np.prod(np.asarray(dist)[labels], axis=1) * ok
    out = (s @ model.output_matrix().T) % 2
    keys = out @ (1 << np.arange(out.shape[1]))
    mass = np.bincount(keys, weights=prior)
    order = np.argsort(mass)[::-1]
    if mass.size > 1 and mass[order[1]] >= mass[order[0]] * (1 - 1e-9):
        return None
    bits = (order[0] >> np.arange(out.shape[1])) & 1
    return bits[: model.M].astype(np.uint8), bits[model.M :].astype(np.uint8)


def suite_engine(seed: int) -> list[str]:
    fails: list[str] = []
    rng = stream(seed, "engine")
    ens = sample_ensemble(werner_distribution(0.9), 50000, rng)
    freq = np.bincount(ens.labels, minlength=4) / ens.N
    want = werner_distribution(0.9)
    if (np.abs(freq - want) > 5 * np.sqrt(want * (1 - want) / ens.N)).any():
        fails.append(f"Werner label frequencies off: {freq}")
    # exhaustive decoder against brute-force ML over all 4^8 strings
    plan = make_hashing_plan(8, 3, seed)
    model = ParityModel(plan)
    dist = werner_distribution(0.93)
    for _ in range(6):
        ens = sample_ensemble(dist, 8, rng)
        tr = model.transcript(ens.a, ens.b)
        res = decode_ml(tr, plan, dist, cutoff=1e-12, model=model)
        want = brute_force_ml(tr, model, dist)
        got = None if not res.ok else model.outputs(*res.estimate)
        if (want is None) != (got is None) or (got is not None and not all(np.array_equal(x, y) for x, y in zip(got, want))):
            fails.append("exhaustive decoder disagrees with brute-force ML")
    zero = decode_ml(np.zeros(plan.n_rounds, np.uint8), plan, dist, model=model)
    if not zero.ok or zero.estimate[0].any() or zero.estimate[1].any():
        fails.append("zero transcript does not decode to the zero string")
    # degenerate case: a null-space string with different outputs, uniform prior
    plan = make_hashing_plan(6, 2, seed)
    model = ParityModel(plan)
    if ambiguous_instance(plan, model) is None:
        fails.append("no ambiguous null-space direction found")
    res = decode_ml(np.zeros(plan.n_rounds, np.uint8), plan, werner_distribution(0.25), model=model)
    if res.status != "ambiguous":
        fails.append(f"uniform prior decoded as {res.status}")
    if safe_output_count(1024, 0.95, 0.1) != 547:
        fails.append("safe_output_count(1024, 0.95) != 547")
    # exact gate-noise error rate against Monte Carlo
    plan = make_hashing_plan(8, 3, seed)
    exact = gate_noise_error_rate(plan, 0.9).mean()
    z = np.zeros(8, np.uint8)
    T = 3000
    bad = 0
    for _ in range(T):
        _, fa, fb = propagate_labels(plan, z, z, 0.9, rng)
        bad += int(((fa | fb)[plan.survivors]).sum())
    mc = bad / (T * plan.n_output)
    if abs(mc - exact) > 5 * np.sqrt(exact * (1 - exact) / T):
        fails.append(f"gate-noise error {mc:.4f} vs exact {exact:.4f}")
    return fails


def suite_analytics(seed: int) -> list[str]:
    fails: list[str] = []
    if abs(analytics.f_min_hashing() - 0.8107) > 2e-4:
        fails.append("F_min off")
    checks = [
        ("bell", analytics.PAPER_PRODUCT, 0.8672, 5e-4, 6.9),
        ("cluster1d", analytics.PAPER_PRODUCT, 0.9204, 1e-3, 4.1),
        ("cluster2d", analytics.PAPER_PRODUCT, 0.9515, 1e-3, 2.5),
    ]
    for target, conv, q, tol, pct in checks:
        rep = analytics.threshold_report(target, conv)
        if abs(rep.q_min - q) > tol:
            fails.append(f"{target} q_min {rep.q_min:.5f} != {q}")
        if round(100 * rep.tolerable_noise, 1) != pct:
            fails.append(f"{target} tolerable noise {100 * rep.tolerable_noise:.2f}% != {pct}%")
    grid = np.linspace(0.8, 1.0, 401)
    for dim, fn in (("1D", analytics.a1_1d), ("2D", analytics.a1_2d)):
        vals = np.array([fn(q) for q in grid])
        if not (np.diff(vals) < 0).all() or vals[-1] != 0.0:
            fails.append(f"a1 ({dim}) not decreasing to 0")
        qmin = analytics.q_min_cluster(dim)
        ys = np.array([analytics.cluster_yield_raw(q, dim) for q in np.linspace(qmin, 1.0, 200)])
        if not (np.diff(ys) > 0).all():
            fails.append(f"cluster yield ({dim}) not increasing above q_min")
    q_min = analytics.q_min_bell(analytics.PAPER_PRODUCT)
    p_min = np.sqrt(q_min)
    qs = np.linspace(0.0, 1.0, 10_000)
    for p, expect in ((p_min + 1e-3, True), (p_min - 1e-3, False)):
        found = any(analytics.feasibility(p, q, q_min) for q in qs)
        if found != expect:
            fails.append(f"feasibility boundary wrong at p={p:.4f}")
    return fails


def suite_cli(seed: int) -> list[str]:
    from .cli import main

    fails: list[str] = []
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "t.json"
        if main(["thresholds", "--output", str(out)]) != 0:
            fails.append("thresholds failed")
        else:
            data = json.loads(out.read_text())
            bell = [r for r in data["thresholds"] if r["target"] == "bell" and r["convention"] == "paper_product"][0]
            if round(bell["tolerable_noise"], 4) != 0.0688:
                fails.append("bell tolerable noise not 0.0688")
        bad = Path(tmp) / "bad.json"
        saved = sys.stderr
        sys.stderr = io.StringIO()
        try:
            code = main(["thresholds", "--target", "torus", "--output", str(bad)])
        finally:
            sys.stderr = saved
        if code != 2 or bad.exists():
            fails.append("malformed target not rejected with exit 2")
        csv = Path(tmp) / "y.csv"
        main(["yield-curve", "--q-from", "0.8", "--q-to", "1", "--steps", "11", "--output", str(csv)])
        raw = csv.read_bytes()
        if not raw.startswith(b"q,raw_yield,clamped_yield\n") or b"\r" in raw:
            fails.append("yield-curve CSV header or line endings wrong")
        reports = []
        for _ in range(2):
            path = Path(tmp) / f"s{len(reports)}.json"
            main(["simulate", "--N", "16", "--trials", "5", "--seed", str(seed), "--F", "0.95", "--output", str(path)])
            reports.append(path.read_bytes())
        if reports[0] != reports[1]:
            fails.append("simulate is not byte-reproducible")
    return fails


SUITES: dict[str, Suite] = {
    "pauli_core": suite_pauli_core,
    "noise": suite_noise,
    "resource": suite_resource,
    "engine": suite_engine,
    "analytics": suite_analytics,
    "cli": suite_cli,
}


def run_selftest(seed: int = 2024, stream: TextIO | None = None) -> tuple[bool, dict[str, list[str]]]:
    out = stream if stream is not None else sys.stdout
    results: dict[str, list[str]] = {}
    start = time.perf_counter()
    for name, suite in SUITES.items():
        t0 = time.perf_counter()
        try:
            fails = suite(seed)
        except Exception as exc:  # a crashing suite is a failing suite
            fails = [f"{type(exc).__name__}: {exc}"]
        results[name] = fails
        status = "PASS" if not fails else "FAIL"
        print(f"{name:<12} {status}  {time.perf_counter() - t0:6.2f}s", file=out)
        for msg in fails:
            print(f"    - {msg}", file=out)
    ok = all(not f for f in results.values())
    print(f"selftest {'PASS' if ok else 'FAIL'} in {time.perf_counter() - start:.2f}s", file=out)
    return ok, results
