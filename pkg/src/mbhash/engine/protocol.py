"""Protocol runners: gate-based, measurement-based and the explicit tableau path."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..noise import sample_ldn, sample_pair_flips
from ..pauli_core import PauliOperator, StabilizerTableau, bell_pairs
from ..resource import HashingPlan, ResourceState, apply_frame, hashing_resource, read_in
from .classical import ParityModel, propagate_labels
from .decoder import DecodeResult, decode_ml
from .ensemble import BellDiagonalEnsemble, bell_entropy, check_distribution, two_sided_ldn, werner_distribution, xor_convolve


class InfeasibleError(ValueError):
    """No distillable output at the requested parameters."""


@dataclass
class PurificationOutcome:
    """Result of one protocol run.

    ``output_ok[j]`` says whether output pair ``j`` is |Φ+> after the
    decoder's correction; ``ideal_ok`` uses the correction computed from the
    true input string instead, which isolates damage done by noisy
    operations from decoding failures.
    """

    decoded: bool
    status: str
    transcript: np.ndarray
    output_ok: np.ndarray
    ideal_ok: np.ndarray

    @property
    def surviving_outputs(self) -> int:
        return int(self.output_ok.size)

    @property
    def fidelity(self) -> float:
        return float(self.output_ok.mean()) if self.output_ok.size else 1.0

    @property
    def error_rate(self) -> float:
        return 1.0 - float(self.ideal_ok.mean()) if self.ideal_ok.size else 0.0


def _correction(result: DecodeResult, model: ParityModel) -> tuple[np.ndarray, np.ndarray]:
    if not result.ok:
        return np.zeros(model.M, np.uint8), np.zeros(model.M, np.uint8)
    return model.outputs(*result.estimate)


def _same_class(result: DecodeResult, model: ParityModel, a, b) -> bool:
    if not result.ok:
        return False
    ea, eb = model.outputs(*result.estimate)
    ta, tb = model.outputs(a, b)
    return bool(np.array_equal(ea, ta) and np.array_equal(eb, tb))


def run_gate_based(
    plan: HashingPlan,
    ensemble: BellDiagonalEnsemble,
    gate_noise: float,
    rng: np.random.Generator,
    *,
    model: ParityModel | None = None,
    cutoff: float = 1e-6,
    n_impostors: int = 10_000,
) -> PurificationOutcome:
    """Execute the plan gate by gate on the labels, noisy gates included."""
    model = model if model is not None else ParityModel(plan)
    transcript, fa, fb = propagate_labels(plan, ensemble.a, ensemble.b, gate_noise, rng)
    surv = plan.survivors
    oa, ob = fa[surv], fb[surv]
    result = decode_ml(
        transcript, plan, ensemble.distribution, cutoff,
        model=model, truth=(ensemble.a, ensemble.b), n_impostors=n_impostors, rng=rng,
    )
    ca, cb = _correction(result, model)
    ia, ib = model.outputs(ensemble.a, ensemble.b)
    return PurificationOutcome(
        decoded=_same_class(result, model, ensemble.a, ensemble.b),
        status=result.status,
        transcript=transcript,
        output_ok=((oa ^ ca) | (ob ^ cb)) == 0,
        ideal_ok=((oa ^ ia) | (ob ^ ib)) == 0,
    )


def run_measurement_based(
    plan: HashingPlan,
    ensemble: BellDiagonalEnsemble,
    p: float,
    rng: np.random.Generator,
    *,
    model: ParityModel | None = None,
    cutoff: float = 1e-6,
    n_impostors: int = 10_000,
) -> PurificationOutcome:
    """Measurement-based run with resource noise ``D(p)`` moved onto inputs and outputs.

    ``ensemble`` holds the input pairs (their own noise included).  The
    resource noise on each input port acts like ``D(p)`` on the incoming
    particle, so each pair picks up two-sided ``D(p)`` flips; the noiseless
    plan then runs on the classical representation and the decoder uses the
    composed prior.  Noise on the output qubits is applied last.
    """
    model = model if model is not None else ParityModel(plan)
    da, db = sample_pair_flips(p, ensemble.N, rng)
    a, b = ensemble.a ^ da, ensemble.b ^ db
    prior = xor_convolve(ensemble.distribution, two_sided_ldn(p))
    transcript = model.transcript(a, b)
    result = decode_ml(transcript, plan, prior, cutoff, model=model, truth=(a, b), n_impostors=n_impostors, rng=rng)
    oa, ob = model.outputs(a, b)
    ca, cb = _correction(result, model)
    na, nb = sample_pair_flips(p, model.M, rng)
    return PurificationOutcome(
        decoded=_same_class(result, model, a, b),
        status=result.status,
        transcript=transcript,
        output_ok=((oa ^ ca ^ na) | (ob ^ cb ^ nb)) == 0,
        ideal_ok=(na | nb) == 0,
    )


# -- explicit two-party tableau execution -------------------------------------

@dataclass
class TableauRun:
    transcript: np.ndarray
    flips_a: np.ndarray
    flips_b: np.ndarray
    out_a: np.ndarray
    out_b: np.ndarray


def planted_inputs(a, b) -> StabilizerTableau:
    """``N`` Bell pairs on ``(2i, 2i+1)`` with ``X^a_i Z^b_i`` on B's qubit ``2i+1``."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    tab = bell_pairs(a.size)
    for i in range(a.size):
        if a[i]:
            tab.pauli(2 * i + 1, "X")
        if b[i]:
            tab.pauli(2 * i + 1, "Z")
    return tab


def noisy_resource(resource: ResourceState, p: float, rng: np.random.Generator) -> ResourceState:
    """Copy of ``resource`` with an independent ``D(p)`` Pauli draw on every qubit."""
    tab = resource.tableau.copy()
    if p < 1.0:
        tab.apply_pauli(sample_ldn(p, range(tab.n_qubits), rng, tab.n_qubits))
    return ResourceState(
        resource.party, tab, list(resource.input_ports), list(resource.output_ports),
        resource.byproduct_map, resource.seed, list(resource.bases),
    )


def run_tableau_protocol(
    plan: HashingPlan,
    a,
    b,
    rng: np.random.Generator,
    resources: tuple[ResourceState, ResourceState] | None = None,
) -> TableauRun:
    """Both parties read planted input pairs into their resources; outputs are frame-corrected.

    Output labels are read off as the ``ZZ`` and ``XX`` values of each output pair.
    """
    res_a, res_b = resources if resources is not None else (hashing_resource(plan, "A"), hashing_resource(plan, "B"))
    N = plan.n_pairs
    inputs = planted_inputs(a, b)
    ra = read_in(res_a, inputs, rng, [2 * i for i in range(N)])
    rb = read_in(res_b, ra.tableau, rng, [2 * i + 1 for i in range(N)])
    joint = rb.tableau
    apply_frame(joint, ra.output_qubits, ra.frame)
    apply_frame(joint, rb.output_qubits, rb.frame)
    n = joint.n_qubits
    out_a = np.zeros(plan.n_output, dtype=np.uint8)
    out_b = np.zeros(plan.n_output, dtype=np.uint8)
    for j, (qa, qb) in enumerate(zip(ra.output_qubits, rb.output_qubits)):
        for kind, store in (("Z", out_a), ("X", out_b)):
            obs = PauliOperator.single(n, qa, kind) * PauliOperator.single(n, qb, kind)
            value = joint.expectation(obs)
            if value == 0:
                raise RuntimeError("output pair is not in a Bell state")
            store[j] = value < 0
    return TableauRun(ra.flips ^ rb.flips, ra.flips, rb.flips, out_a, out_b)


# -- output counts --------------------------------------------------------------

def _as_distribution(F_or_dist) -> np.ndarray:
    if np.ndim(F_or_dist) == 0:
        return werner_distribution(float(F_or_dist))
    return check_distribution(F_or_dist)


def safe_output_count(N: int, F_or_dist, delta: float = 0.1) -> int:
    """``M = floor(N (1 - S - delta))``, at least 1 and at most ``N - 1``."""
    if N < 2:
        raise ValueError("need at least two pairs")
    S = bell_entropy(_as_distribution(F_or_dist))
    if S >= 1.0 - delta:
        raise InfeasibleError("below hashing threshold")
    return int(min(N - 1, max(1, math.floor(N * (1.0 - S - delta)))))


def finite_size_output_count(N: int, F_or_dist, failure: float = 1e-3) -> int:
    """Largest ``M`` whose round count clears the impostor bound for typical error weights.

    The error weight is taken at its ``1 - failure`` binomial quantile and
    the ``N - M`` rounds are assumed to split evenly between amplitude and
    phase checks; ``log2(1/failure)`` extra rounds absorb the split's spread.
    """
    from scipy.stats import binom

    from .decoder import impostor_bound_ok

    dist = _as_distribution(F_or_dist)
    w = int(binom.ppf(1.0 - failure, N, 1.0 - dist[0]))
    # worst case over how the w errors split into amplitude and phase bits
    n_amp = n_phase = math.ceil(2 * w / 3)
    slack = math.ceil(math.log2(1.0 / failure))
    for R in range(1, N):
        ra, rb = (R - slack) // 2, (R - slack) - (R - slack) // 2
        if ra >= 0 and impostor_bound_ok(N, w, n_amp, n_phase, ra, rb):
            return N - R
    raise InfeasibleError("below hashing threshold")
