"""Classical bit-pair execution of hashing plans.

Bilateral CNOT ``c -> t`` on Bell-diagonal pairs maps labels as
``a_t ^= a_c`` and ``b_c ^= b_t``; bilateral ``Z``/``X`` measurement of the
target reveals ``a_t``/``b_t``.  Amplitude bits only ever mix with amplitude
bits (and phase with phase), so every revealed parity is a linear functional
of the *original* amplitude string or of the original phase string.

Two independent routes are provided:

* :func:`propagate_labels` steps through the plan gate by gate (optionally
  with noisy gates) and is the gate-based execution;
* :class:`ParityModel` tracks each pair's bits as functionals of the
  original string and evaluates transcripts as matrix products; it is the
  noiseless measurement-based execution and the decoder's model.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .. import gf2
from ..noise import sample_pair_flips
from ..pauli_core.bits import n_words, pack, parity, unpack
from ..resource import AMPLITUDE, HashingPlan


def _prefix_exclusive(e: np.ndarray) -> np.ndarray:
    out = np.zeros_like(e)
    if e.size > 1:
        out[1:] = np.bitwise_xor.accumulate(e[:-1])
    return out


def _xor_sum(v: np.ndarray) -> int:
    return int(np.bitwise_xor.reduce(v)) if v.size else 0


def propagate_labels(
    plan: HashingPlan,
    a: np.ndarray,
    b: np.ndarray,
    gate_noise: float = 1.0,
    rng: np.random.Generator | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gate-by-gate execution; returns ``(transcript, a_final, b_final)``.

    With ``gate_noise < 1`` both particles of both pairs touched by a
    bilateral CNOT suffer ``D(gate_noise)`` right after that gate.
    """
    a = np.array(a, dtype=np.uint8, copy=True)
    b = np.array(b, dtype=np.uint8, copy=True)
    noisy = gate_noise < 1.0
    if noisy and rng is None:
        raise ValueError("noisy gates need an rng")
    transcript = np.zeros(plan.n_rounds, dtype=np.uint8)
    for k, rnd in enumerate(plan.rounds):
        S = np.asarray(rnd.subset, dtype=np.int64)
        t = rnd.target
        if noisy:
            eac, ebc = sample_pair_flips(gate_noise, S.size, rng)
            eat, ebt = sample_pair_flips(gate_noise, S.size, rng)
        if rnd.parity_type == AMPLITUDE:
            # control k sees the target phase bit as it was before gate k
            bt_seen = b[t] ^ (_prefix_exclusive(ebt) if noisy else 0)
            a_t = a[t] ^ _xor_sum(a[S])
            b[S] ^= np.asarray(bt_seen, dtype=np.uint8)
            if noisy:
                a_t ^= _xor_sum(eat)
                b[t] ^= _xor_sum(ebt)
            a[t] = a_t
            transcript[k] = a[t]
        else:
            at_seen = a[t] ^ (_prefix_exclusive(eat) if noisy else 0)
            b_t = b[t] ^ _xor_sum(b[S])
            a[S] ^= np.asarray(at_seen, dtype=np.uint8)
            if noisy:
                b_t ^= _xor_sum(ebt)
                a[t] ^= _xor_sum(eat)
            b[t] = b_t
            transcript[k] = b[t]
        if noisy:
            a[S] ^= eac
            b[S] ^= ebc
    return transcript, a, b


class ParityModel:
    """Transcript and output labels as GF(2) functionals of the input labels.

    ``rows[k]`` is round ``k``'s revealed parity as a packed functional of
    the original amplitude string (``is_amp[k]``) or phase string.
    ``out_a[j]``/``out_b[j]`` give output ``j``'s final labels.
    """

    def __init__(self, plan: HashingPlan) -> None:
        N = plan.n_pairs
        self.plan = plan
        self.N = N
        self.M = plan.n_output
        ident = pack(np.eye(N, dtype=bool))
        ma, mb = ident.copy(), ident.copy()
        rows = np.zeros((plan.n_rounds, n_words(N)), dtype=np.uint64)
        is_amp = np.zeros(plan.n_rounds, dtype=bool)
        for k, rnd in enumerate(plan.rounds):
            S = np.asarray(rnd.subset, dtype=np.int64)
            t = rnd.target
            if rnd.parity_type == AMPLITUDE:
                row = ma[t] ^ np.bitwise_xor.reduce(ma[S], axis=0)
                ma[t] = row
                mb[S] ^= mb[t]
                is_amp[k] = True
            else:
                row = mb[t] ^ np.bitwise_xor.reduce(mb[S], axis=0)
                mb[t] = row
                ma[S] ^= ma[t]
            rows[k] = row
        self.rows = rows
        self.is_amp = is_amp
        survivors = plan.survivors
        self.out_a = ma[survivors]
        self.out_b = mb[survivors]
        self._ranks: tuple[int, int] | None = None

    @property
    def n_rounds(self) -> int:
        return self.rows.shape[0]

    def transcript(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Parity bits for label arrays of shape ``(N,)`` or ``(T, N)``."""
        pa, pb = pack(np.asarray(a, bool)), pack(np.asarray(b, bool))
        single = pa.ndim == 1
        pa, pb = np.atleast_2d(pa), np.atleast_2d(pb)
        out = np.empty((pa.shape[0], self.n_rounds), dtype=np.uint8)
        amp = self.is_amp
        out[:, amp] = parity(pa[:, None, :] & self.rows[amp][None])
        out[:, ~amp] = parity(pb[:, None, :] & self.rows[~amp][None])
        return out[0] if single else out

    def consistent(self, a: np.ndarray, b: np.ndarray, transcript: np.ndarray, stage: int = 32) -> np.ndarray:
        """Mask of the rows of ``(T, N)`` label arrays that reproduce ``transcript``.

        Rounds are checked in blocks of ``stage`` and rejected rows are
        dropped early, which is much cheaper than full transcripts when
        almost nothing is consistent.
        """
        pa, pb = pack(np.asarray(a, bool)), pack(np.asarray(b, bool))
        alive = np.arange(pa.shape[0])
        for start in range(0, self.n_rounds, stage):
            if alive.size == 0:
                break
            sl = slice(start, start + stage)
            rows, amp, want = self.rows[sl], self.is_amp[sl], transcript[sl]
            got = np.empty((alive.size, rows.shape[0]), dtype=np.uint8)
            got[:, amp] = parity(pa[alive][:, None, :] & rows[amp][None])
            got[:, ~amp] = parity(pb[alive][:, None, :] & rows[~amp][None])
            alive = alive[(got == want).all(axis=1)]
        mask = np.zeros(pa.shape[0], dtype=bool)
        mask[alive] = True
        return mask

    def outputs(self, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pa, pb = pack(np.asarray(a, bool)), pack(np.asarray(b, bool))
        if pa.ndim == 1:
            return parity(pa[None] & self.out_a), parity(pb[None] & self.out_b)
        return parity(pa[:, None, :] & self.out_a[None]), parity(pb[:, None, :] & self.out_b[None])

    def ranks(self) -> tuple[int, int]:
        """GF(2) ranks of the amplitude-row and phase-row blocks."""
        if self._ranks is None:
            dense = unpack(self.rows, self.N).astype(np.uint8)
            ra = gf2.rank(dense[self.is_amp]) if self.is_amp.any() else 0
            rb = gf2.rank(dense[~self.is_amp]) if (~self.is_amp).any() else 0
            self._ranks = (ra, rb)
        return self._ranks

    def parity_matrix(self) -> np.ndarray:
        """Dense ``(rounds, 2N)`` matrix over the string ``(a_0..a_{N-1}, b_0..b_{N-1})``."""
        dense = unpack(self.rows, self.N).astype(np.uint8)
        full = np.zeros((self.n_rounds, 2 * self.N), dtype=np.uint8)
        full[self.is_amp, : self.N] = dense[self.is_amp]
        full[~self.is_amp, self.N :] = dense[~self.is_amp]
        return full

    def output_matrix(self) -> np.ndarray:
        """Dense ``(2M, 2N)`` matrix: output amplitude bits, then output phase bits."""
        N = self.N
        oa = unpack(self.out_a, N).astype(np.uint8)
        ob = unpack(self.out_b, N).astype(np.uint8)
        full = np.zeros((2 * self.M, 2 * N), dtype=np.uint8)
        full[: self.M, :N] = oa
        full[self.M :, N:] = ob
        return full


def gate_noise_touches(plan: HashingPlan) -> np.ndarray:
    """Particle-level noise draws touching each nonzero output character, shape ``(3, M)``.

    The characters are pulled back through the plan from the end, and
    every gate whose noise lands on a pair the pulled-back character
    touches adds two draws (one per particle).
    """
    N, M = plan.n_pairs, plan.n_output
    surv = np.asarray(plan.survivors)
    # rows: characters (u, v) = (1,0), (0,1), (1,1) for every output
    alpha = np.zeros((3 * M, N), dtype=np.uint8)
    beta = np.zeros((3 * M, N), dtype=np.uint8)
    for c, (u, v) in enumerate(((1, 0), (0, 1), (1, 1))):
        alpha[c * M + np.arange(M), surv] = u
        beta[c * M + np.arange(M), surv] = v
    touches = np.zeros(3 * M, dtype=np.int64)
    for rnd in reversed(plan.rounds):
        S = np.asarray(rnd.subset, dtype=np.int64)
        t = rnd.target
        # amplitude: controls keep their own (a, b) weight, target b is pulled back
        # through later controls; phase rounds swap the roles of a and b
        own, other = (alpha, beta) if rnd.parity_type == AMPLITUDE else (beta, alpha)
        ctrl_hit = (alpha[:, S] | beta[:, S]).astype(np.int64).sum(axis=1)
        suffix = np.zeros((3 * M, S.size), dtype=np.uint8)
        if S.size > 1:
            rev = np.bitwise_xor.accumulate(other[:, S][:, ::-1], axis=1)[:, ::-1]
            suffix[:, :-1] = rev[:, 1:]
        other_t = other[:, [t]] ^ suffix
        tgt_hit = (own[:, [t]] | other_t).astype(np.int64).sum(axis=1)
        touches += 2 * (ctrl_hit + tgt_hit)
        own[:, S] ^= own[:, [t]]
        other[:, t] ^= np.bitwise_xor.reduce(other[:, S], axis=1)
    return touches.reshape(3, M)


def gate_noise_error_rate(plan: HashingPlan, gate_noise: float) -> np.ndarray:
    """Exact probability, per output, that noisy gates leave a residual label error.

    The residual after the ideal correction is a linear function of the
    gate-noise flips alone.  For a nonzero character ``u a_j + v b_j`` of
    output ``j``, each particle-level ``D(p)`` draw contributes a factor
    ``p`` if the character, pulled back to just after that gate, touches
    the pair, so ``P(residual = 0) = (1 + sum_chi p^{n_chi}) / 4``.
    """
    with np.errstate(under="ignore"):
        powers = np.power(float(gate_noise), gate_noise_touches(plan))
    return 1.0 - (1.0 + powers.sum(axis=0)) / 4.0


def gate_noise_log_excess(plan: HashingPlan, gate_noise: float) -> float:
    """``log(3/4 - mean error rate)``, finite even where the error rate rounds to 3/4."""
    if not 0.0 < gate_noise <= 1.0:
        raise ValueError("gate_noise must lie in (0, 1]")
    logs = gate_noise_touches(plan).ravel() * math.log(gate_noise)
    return float(logsumexp(logs) - math.log(4.0 * plan.n_output))
