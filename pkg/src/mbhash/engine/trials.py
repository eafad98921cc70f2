"""Monte Carlo trial orchestration with reproducible per-trial streams."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ..noise import werner_fidelity_exact
from ..resource import make_hashing_plan
from ..rng import stream
from .classical import ParityModel
from .ensemble import bell_entropy, sample_ensemble, werner_distribution
from .protocol import InfeasibleError, run_gate_based, run_measurement_based, safe_output_count

WORKERS_ENV = "MBHASH_WORKERS"
MODES = ("measurement", "gate")


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of a Monte Carlo run.

    The input pairs are Werner states of fidelity ``F``; if ``F`` is not
    given it follows from ``q`` via two-sided LDN.  ``M`` defaults to
    :func:`safe_output_count` with margin ``delta`` at the fidelity the
    decoder actually faces.
    """

    N: int
    seed: int
    trials: int = 100
    mode: str = "measurement"
    F: float | None = None
    q: float = 1.0
    p: float = 1.0
    gate_noise: float = 1.0
    M: int | None = None
    delta: float = 0.1
    cutoff: float = 1e-6
    n_impostors: int = 10_000

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.N < 2 or self.trials < 1:
            raise ValueError("need N >= 2 and at least one trial")
        for name in ("q", "p", "gate_noise"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")

    @property
    def input_fidelity(self) -> float:
        return werner_fidelity_exact(self.q) if self.F is None else float(self.F)

    @property
    def decoder_fidelity(self) -> float:
        """Fidelity of the pairs entering the decoder (resource noise moved onto the inputs)."""
        if self.mode == "gate":
            return self.input_fidelity
        # D(p) on both particles turns W(F) into W(F') with 4F' - 1 = p^2 (4F - 1)
        return (self.p**2 * (4.0 * self.input_fidelity - 1.0) + 1.0) / 4.0

    def output_count(self) -> int:
        if self.M is not None:
            if not 0 < self.M < self.N:
                raise ValueError("need 0 < M < N")
            return int(self.M)
        return safe_output_count(self.N, self.decoder_fidelity, self.delta)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    decoded: bool
    n_ok: int
    n_ideal_ok: int
    n_outputs: int


def _run_chunk(config: SimulationConfig, M: int, trial_ids: list[int]) -> list[TrialResult]:
    plan = make_hashing_plan(config.N, M, config.seed)
    model = ParityModel(plan)
    dist = werner_distribution(config.input_fidelity)
    out = []
    for t in trial_ids:
        rng = stream(config.seed, t)
        ens = sample_ensemble(dist, config.N, rng)
        kw = dict(model=model, cutoff=config.cutoff, n_impostors=config.n_impostors)
        if config.mode == "gate":
            res = run_gate_based(plan, ens, config.gate_noise, rng, **kw)
        else:
            res = run_measurement_based(plan, ens, config.p, rng, **kw)
        out.append(TrialResult(t, res.decoded, int(res.output_ok.sum()), int(res.ideal_ok.sum()), M))
    return out


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def run_trials(config: SimulationConfig, workers: int | None = None) -> tuple[int, list[TrialResult]]:
    """Run all trials; results come back ordered by trial id whatever the worker count."""
    M = config.output_count()
    workers = default_workers() if workers is None else max(1, workers)
    ids = list(range(config.trials))
    if workers == 1 or config.trials < 2 * workers:
        return M, _run_chunk(config, M, ids)
    chunks = [ids[k::workers] for k in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [config] * workers, [M] * workers, chunks)
        results = [r for part in parts for r in part]
    return M, sorted(results, key=lambda r: r.trial)


def _stderr(values: np.ndarray) -> float:
    return float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0


def simulate(config: SimulationConfig, workers: int | None = None) -> dict:
    """Monte Carlo report; byte-identical for identical configs."""
    M, results = run_trials(config, workers)
    decoded = np.array([r.decoded for r in results], dtype=float)
    fid = np.array([r.n_ok / r.n_outputs for r in results])
    ideal = np.array([r.n_ideal_ok / r.n_outputs for r in results])
    S = bell_entropy(werner_distribution(config.decoder_fidelity))
    if config.mode == "measurement":
        predicted = werner_fidelity_exact(config.p)
    else:
        predicted = None
    return {
        "config": {k: v for k, v in asdict(config).items()},
        "M": M,
        "trials": config.trials,
        "decode_success_rate": float(decoded.mean()),
        "mean_output_fidelity": float(fid.mean()),
        "output_fidelity_stderr": _stderr(fid),
        "ideal_output_fidelity": float(ideal.mean()),
        "output_error_rate": float(1.0 - ideal.mean()),
        "predicted_output_fidelity": predicted,
        "yield_empirical": float(decoded.mean() * M / config.N),
        "yield_asymptotic": 1.0 - S,
    }


def decodable_fraction(
    N: int,
    F: float,
    trials: int,
    seed: int,
    success: float = 0.95,
    lo: int | None = None,
    hi: int | None = None,
    workers: int | None = None,
) -> tuple[int, dict[int, float]]:
    """Largest ``M`` (by bisection) whose decode success rate is at least ``success``.

    Returns ``(M, {M: rate})`` for every ``M`` probed.
    """
    S = bell_entropy(werner_distribution(F))
    lo = 1 if lo is None else lo
    hi = min(N - 1, int(N * (1.0 - S))) if hi is None else hi
    probed: dict[int, float] = {}

    def rate(M: int) -> float:
        if M not in probed:
            cfg = SimulationConfig(N=N, seed=seed, trials=trials, F=F, M=M)
            _, res = run_trials(cfg, workers)
            probed[M] = float(np.mean([r.decoded for r in res]))
        return probed[M]

    if rate(lo) < success:
        raise InfeasibleError("no output count reaches the requested decode success")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if rate(mid) >= success:
            lo = mid
        else:
            hi = mid
    if hi != lo and rate(hi) >= success:
        lo = hi
    return lo, probed
