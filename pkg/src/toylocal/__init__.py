"""A local toy theory of four-valued particles: measurements, cloning, teleportation."""

from toylocal.core import (
    N_MAX,
    Bijection,
    ImpossibleOutcome,
    InvalidMeasurement,
    InvalidOutcomeSet,
    Measurement,
    Mixture,
    OnticRegister,
    OutcomeSet,
    ParticleState,
    StateSpaceTooLarge,
    SystemState,
    ValidityReport,
    apply_local_map,
    find_outcome,
    measure,
    posterior_mixture,
    retrodict,
    rotation,
    validate_measurement,
    validate_outcome_set,
)
from toylocal.enumeration import enumerate_valid_measurements
from toylocal.kernels import BACKEND
from toylocal.rng import Stream

__all__ = [
    "BACKEND",
    "N_MAX",
    "Bijection",
    "ImpossibleOutcome",
    "InvalidMeasurement",
    "InvalidOutcomeSet",
    "Measurement",
    "Mixture",
    "OnticRegister",
    "OutcomeSet",
    "ParticleState",
    "StateSpaceTooLarge",
    "Stream",
    "SystemState",
    "ValidityReport",
    "apply_local_map",
    "enumerate_valid_measurements",
    "find_outcome",
    "measure",
    "posterior_mixture",
    "retrodict",
    "rotation",
    "validate_measurement",
    "validate_outcome_set",
]
