"""Exact dynamical-decoupling simulations of a central spin in a spin bath."""

from ._ddlab import (
    KHZ_TO_RAD_PER_US,
    ConfigError,
    ContractError,
    ErrorModel,
    PulseEvent,
    ResourceError,
    SpinBathModel,
    SurvivalTrace,
    Timeline,
    average_hamiltonian,
    bath_correlation,
    cdd_pulse_count,
    claim_ids,
    compile,
    decay_time,
    default_model,
    estimate_tau_b,
    fit_order_relation,
    pi_pulse_duration_us,
    propagate,
    random_model,
    run_cli,
    verify_claim,
)

__all__ = [
    "KHZ_TO_RAD_PER_US",
    "ConfigError",
    "ContractError",
    "ErrorModel",
    "PulseEvent",
    "ResourceError",
    "SpinBathModel",
    "SurvivalTrace",
    "Timeline",
    "average_hamiltonian",
    "bath_correlation",
    "cdd_pulse_count",
    "claim_ids",
    "compile",
    "decay_time",
    "default_model",
    "estimate_tau_b",
    "fit_order_relation",
    "pi_pulse_duration_us",
    "propagate",
    "random_model",
    "run_cli",
    "verify_claim",
]
