"""Exception hierarchy for the phasefrac package."""


class PhasefracError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(PhasefracError, ValueError):
    """Raised for non-finite or otherwise malformed numeric input."""


class OutOfRangeError(PhasefracError, ValueError):
    """Raised when a lookup argument falls outside tabulated bounds."""


class UnsupportedModelError(PhasefracError, ValueError):
    """Raised when an operation is undefined for the requested model.

    The SS1/SS2 splits are nonvariational: they define a stress but no
    energy, so asking for a phase-field driving force is a usage error.
    """


class MeshError(PhasefracError, ValueError):
    """Raised for invalid meshes (inverted elements, bad tags, parse errors)."""


class ScenarioError(PhasefracError, ValueError):
    """Raised for scenario files/specs that fail validation.

    When parsing a file, the message carries the 1-based line number.
    """


class SolverError(PhasefracError, RuntimeError):
    """Raised when a linear or staggered solve cannot proceed."""
