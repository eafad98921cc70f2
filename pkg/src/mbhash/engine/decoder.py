"""Maximum-likelihood parity decoding.

Error strings are ``(a_0..a_{N-1}, b_0..b_{N-1})``.  Two strings that give
the same output labels are equivalent for the purpose of correction, so the
decoder works with output classes: the estimate is the most probable class
among the strings consistent with the transcript.

* ``N <= max_exhaustive_pairs``: every string whose prior is at least
  ``cutoff`` times the mode's prior is enumerated, filtered by the
  transcript, and probabilities are summed per output class.  A tie between
  the two best classes is reported as ambiguous.
* larger ``N`` (Werner priors): genie-aided scoring.  The true string must
  be consistent, no sampled impostor that is at least as likely and lies in
  another class may be consistent, and the expected number of consistent
  at-least-as-likely impostors under the plan's ranks must be below one.
  Sampling impostors from the prior almost never hits a consistent one at
  ``N`` in the hundreds, so the counting bound is what gives the criterion
  teeth.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..resource import HashingPlan
from .classical import ParityModel
from .ensemble import check_distribution, is_werner, sample_labels

UNIQUE = "unique"
AMBIGUOUS = "ambiguous"
NO_CANDIDATE = "no_candidate"
GENIE_ACCEPT = "genie_accept"
GENIE_REJECT = "genie_reject"

MAX_EXHAUSTIVE_PAIRS = 20
MAX_CANDIDATES = 5_000_000


class DecoderError(ValueError):
    pass


@dataclass
class DecodeResult:
    status: str
    estimate: tuple[np.ndarray, np.ndarray] | None
    method: str
    n_candidates: int = 0

    @property
    def ok(self) -> bool:
        return self.status in (UNIQUE, GENIE_ACCEPT)


def _bits_to_int(bits: np.ndarray) -> int:
    return int(sum(1 << i for i, v in enumerate(bits) if v))


def _int_to_bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> i) & 1 for i in range(n)], dtype=np.uint8)


def _row_ints(model: ParityModel) -> tuple[np.ndarray, np.ndarray]:
    """Parity rows and output rows as int64 masks over the 2N-bit string."""
    N = model.N
    rows = model.rows[:, 0].astype(np.int64) if model.n_rounds else np.zeros(0, np.int64)
    rows = np.where(model.is_amp, rows, rows << N)
    outs = np.concatenate([model.out_a[:, 0].astype(np.int64), model.out_b[:, 0].astype(np.int64) << N])
    return rows, outs


def _evaluate(strings: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """Bit ``k`` of the result is the parity of ``strings & masks[k]``."""
    out = np.zeros(strings.shape, dtype=np.int64)
    for k, m in enumerate(masks):
        out |= (np.bitwise_count(strings & m).astype(np.int64) & 1) << k
    return out


def enumerate_candidates(N: int, distribution, cutoff: float, max_candidates: int = MAX_CANDIDATES):
    """All strings with prior >= ``cutoff`` x the mode's prior.

    Returns ``(strings, log_prior_relative)``; strings are int64 with the
    amplitude bits at positions ``0..N-1`` and phase bits at ``N..2N-1``.
    """
    dist = check_distribution(distribution)
    if N > 31:
        raise DecoderError("exhaustive enumeration supports at most 31 pairs")
    mode = int(np.argmax(dist))
    with np.errstate(divide="ignore"):
        rel = np.log(dist) - np.log(dist[mode])
    alts = [lab for lab in range(4) if lab != mode and dist[lab] > 0]
    log_cut = math.log(cutoff) - 1e-12
    best_alt = max((rel[lab] for lab in alts), default=-np.inf)
    if best_alt >= 0:
        kmax = N
    elif best_alt == -np.inf:
        kmax = 0
    else:
        kmax = min(N, int(math.floor(log_cut / best_alt)))
    total = sum(math.comb(N, k) * len(alts) ** k for k in range(kmax + 1))
    if total > max_candidates:
        raise DecoderError(f"enumeration would visit {total} strings (limit {max_candidates})")

    def label_bits(lab: int, pos: int) -> int:
        return ((lab >> 1) << pos) | ((lab & 1) << (pos + N))

    base = sum(label_bits(mode, i) for i in range(N))
    # flipping pair i from the mode label to ``lab`` XORs this delta into the string
    delta = np.array([[label_bits(mode, i) ^ label_bits(lab, i) for lab in alts] for i in range(N)], dtype=np.int64)
    alt_rel = np.array([rel[lab] for lab in alts])
    strings = [np.array([base], dtype=np.int64)]
    logs = [np.zeros(1)]
    for k in range(1, kmax + 1):
        pos = np.array(list(itertools.combinations(range(N), k)), dtype=np.int64)
        choice = np.array(list(itertools.product(range(len(alts)), repeat=k)), dtype=np.int64)
        lp = alt_rel[choice].sum(axis=1)
        keep = lp >= log_cut
        if not keep.any():
            continue
        choice, lp = choice[keep], lp[keep]
        d = delta[pos[:, None, :], choice[None, :, :]]  # (n_pos, n_choice, k)
        s = base ^ np.bitwise_xor.reduce(d, axis=2)
        strings.append(s.ravel())
        logs.append(np.broadcast_to(lp, s.shape).ravel())
    return np.concatenate(strings), np.concatenate(logs)


def _decode_exhaustive(transcript, model, distribution, cutoff, max_candidates) -> DecodeResult:
    N = model.N
    strings, logs = enumerate_candidates(N, distribution, cutoff, max_candidates)
    rows, outs = _row_ints(model)
    target = _bits_to_int(transcript)
    consistent = _evaluate(strings, rows) == target
    strings, logs = strings[consistent], logs[consistent]
    if strings.size == 0:
        return DecodeResult(NO_CANDIDATE, None, "exhaustive", 0)
    classes = _evaluate(strings, outs)
    uniq, inverse = np.unique(classes, return_inverse=True)
    weights = np.exp(logs - logs.max())
    mass = np.bincount(inverse, weights=weights, minlength=uniq.size)
    order = np.argsort(mass)[::-1]
    if uniq.size > 1 and mass[order[1]] >= mass[order[0]] * (1.0 - 1e-9):
        return DecodeResult(AMBIGUOUS, None, "exhaustive", int(strings.size))
    in_best = inverse == order[0]
    pick = strings[in_best][np.argmax(logs[in_best])]
    bits = _int_to_bits(int(pick), 2 * N)
    return DecodeResult(UNIQUE, (bits[:N], bits[N:]), "exhaustive", int(strings.size))


def _sum_comb(n: int, kmax: int, base: int = 1) -> int:
    return sum(math.comb(n, k) * base**k for k in range(0, min(n, kmax) + 1)) if kmax >= 0 else 0


def impostor_bound_ok(N: int, weight: int, n_amp: int, n_phase: int, rank_a: int, rank_b: int) -> bool:
    """Whether the expected number of consistent, at-least-as-likely impostors is below 1.

    Impostors equal to the truth in the amplitude part survive only the
    phase checks (probability ``2^-rank_b``), those equal in the phase part
    only the amplitude checks, and all others both.  Exact integer test.
    """
    total = _sum_comb(N, weight, 3)
    same_a = _sum_comb(N - n_amp, weight - n_amp)
    same_b = _sum_comb(N - n_phase, weight - n_phase)
    rest = total - same_a - same_b + 1
    lhs = (same_a - 1) * (1 << rank_a) + (same_b - 1) * (1 << rank_b) + rest
    return lhs < (1 << (rank_a + rank_b))


def _decode_genie(transcript, model, distribution, truth, n_impostors, rng) -> DecodeResult:
    if truth is None:
        raise DecoderError("genie-aided scoring needs the true string")
    if not is_werner(distribution):
        raise DecoderError("genie-aided scoring is implemented for Werner priors only")
    a, b = (np.asarray(v, dtype=np.uint8) for v in truth)
    if not np.array_equal(model.transcript(a, b), transcript):
        return DecodeResult(GENIE_REJECT, None, "genie", 0)
    N = model.N
    nonid = a | b
    weight = int(nonid.sum())
    ra, rb = model.ranks()
    if not impostor_bound_ok(N, weight, int(a.sum()), int(b.sum()), ra, rb):
        return DecodeResult(GENIE_REJECT, None, "genie", 0)
    if n_impostors > 0:
        if rng is None:
            raise DecoderError("impostor sampling needs an rng")
        labels = sample_labels(distribution, (n_impostors, N), rng)
        ia, ib = labels >> 1, labels & 1
        if distribution[0] >= max(distribution[1:]):
            # under a Werner prior, likelihood order is weight order
            keep = (labels != 0).sum(axis=1) <= weight
        else:
            keep = (labels != 0).sum(axis=1) >= weight
        keep &= ~((ia == a).all(axis=1) & (ib == b).all(axis=1))
        ia, ib = ia[keep], ib[keep]
        hit = model.consistent(ia, ib, transcript)
        if hit.any():
            oa, ob = model.outputs(ia[hit], ib[hit])
            ta, tb = model.outputs(a, b)
            differs = ~((oa == ta).all(axis=1) & (ob == tb).all(axis=1))
            if differs.any():
                return DecodeResult(GENIE_REJECT, None, "genie", int(hit.sum()))
    return DecodeResult(GENIE_ACCEPT, (a.copy(), b.copy()), "genie", 1)


def decode_ml(
    transcript,
    plan: HashingPlan,
    distribution,
    cutoff: float = 1e-6,
    *,
    model: ParityModel | None = None,
    truth: tuple[np.ndarray, np.ndarray] | None = None,
    n_impostors: int = 10_000,
    rng: np.random.Generator | None = None,
    max_exhaustive_pairs: int = MAX_EXHAUSTIVE_PAIRS,
    max_candidates: int = MAX_CANDIDATES,
) -> DecodeResult:
    """Decode a parity transcript to an error-string estimate (or a failure status)."""
    transcript = np.asarray(transcript, dtype=np.uint8)
    if transcript.shape != (plan.n_rounds,):
        raise DecoderError(f"transcript has length {transcript.size}, plan has {plan.n_rounds} rounds")
    if not 0.0 < cutoff <= 1.0:
        raise DecoderError("cutoff must lie in (0, 1]")
    distribution = check_distribution(distribution)
    model = model if model is not None else ParityModel(plan)
    if plan.n_pairs <= max_exhaustive_pairs:
        return _decode_exhaustive(transcript, model, distribution, cutoff, max_candidates)
    return _decode_genie(transcript, model, distribution, truth, n_impostors, rng)
