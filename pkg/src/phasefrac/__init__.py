"""phasefrac: phase-field brittle fracture toolkit.

A constitutive library of tension-compression split models (including a
micromechanics-informed, crack-orientation-dependent one), a plane-strain
finite-element solver with staggered energy minimization, benchmark
scenario builders, and a CLI for runs and degradation-curve sweeps.
"""

from .constitutive import (
    ConstitutiveOutput,
    ModelKind,
    PhasePoint,
    degradation,
    driving_force,
    evaluate,
    regularize,
    shear_degradation,
)
from .errors import (
    InvalidInputError,
    MeshError,
    OutOfRangeError,
    PhasefracError,
    ScenarioError,
    SolverError,
    UnsupportedModelError,
)
from .materials import MaterialParams
from .tables import calibrate_phase, calibration_table, shear_fit_table
from .tensor import EigenSystem, InvariantSet, SymTensor3, eig_decompose, invariants, macaulay

__version__ = "0.1.0"

__all__ = [
    "ConstitutiveOutput",
    "EigenSystem",
    "InvariantSet",
    "InvalidInputError",
    "MaterialParams",
    "MeshError",
    "ModelKind",
    "OutOfRangeError",
    "PhasefracError",
    "PhasePoint",
    "ScenarioError",
    "SolverError",
    "SymTensor3",
    "UnsupportedModelError",
    "calibrate_phase",
    "calibration_table",
    "degradation",
    "driving_force",
    "eig_decompose",
    "evaluate",
    "invariants",
    "macaulay",
    "regularize",
    "shear_degradation",
    "shear_fit_table",
]
