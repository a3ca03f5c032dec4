"""Constitutive library: eight tension-compression split models."""

from .api import driving_force, evaluate
from .common import (
    ConstitutiveOutput,
    ModelKind,
    PhasePoint,
    VARIATIONAL_MODELS,
    degradation,
    regularization_factor,
    regularize,
    shear_degradation,
    shear_degradation_deriv,
    sk_degradation,
    sk_degradation_deriv,
)
from .kernels import ModelResponse, proposed_energy_parts, respond

__all__ = [
    "ConstitutiveOutput",
    "ModelKind",
    "ModelResponse",
    "PhasePoint",
    "VARIATIONAL_MODELS",
    "degradation",
    "driving_force",
    "evaluate",
    "proposed_energy_parts",
    "regularization_factor",
    "regularize",
    "respond",
    "shear_degradation",
    "shear_degradation_deriv",
    "sk_degradation",
    "sk_degradation_deriv",
]
