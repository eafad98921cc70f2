"""Hashing purification on Monte Carlo Bell-diagonal ensembles."""

from .classical import ParityModel, gate_noise_error_rate, gate_noise_log_excess, gate_noise_touches, propagate_labels
from .decoder import DecodeResult, DecoderError, decode_ml, enumerate_candidates, impostor_bound_ok
from .ensemble import (
    BellDiagonalEnsemble,
    bell_entropy,
    is_werner,
    sample_ensemble,
    two_sided_ldn,
    werner_distribution,
    xor_convolve,
)
from .protocol import (
    InfeasibleError,
    PurificationOutcome,
    TableauRun,
    finite_size_output_count,
    noisy_resource,
    planted_inputs,
    run_gate_based,
    run_measurement_based,
    run_tableau_protocol,
    safe_output_count,
)
from .trials import SimulationConfig, TrialResult, decodable_fraction, run_trials, simulate

__all__ = [
    "BellDiagonalEnsemble",
    "DecodeResult",
    "DecoderError",
    "InfeasibleError",
    "ParityModel",
    "PurificationOutcome",
    "TableauRun",
    "bell_entropy",
    "decode_ml",
    "enumerate_candidates",
    "gate_noise_error_rate",
    "gate_noise_log_excess",
    "gate_noise_touches",
    "finite_size_output_count",
    "impostor_bound_ok",
    "is_werner",
    "noisy_resource",
    "planted_inputs",
    "propagate_labels",
    "run_gate_based",
    "run_measurement_based",
    "run_tableau_protocol",
    "safe_output_count",
    "SimulationConfig",
    "TrialResult",
    "decodable_fraction",
    "run_trials",
    "simulate",
    "sample_ensemble",
    "two_sided_ldn",
    "werner_distribution",
    "xor_convolve",
]
