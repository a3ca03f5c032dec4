"""Shared constitutive types and scalar degradation functions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError
from ..tables import ShearFitTable, shear_fit_table
from ..tensor import SymTensor3

#: Below this gradient norm the crack direction is undefined; a dummy
#: normal e2 is substituted (the regularization factor is ~0 there anyway).
GRAD_TINY = 1e-14

_E2 = np.array([0.0, 1.0, 0.0])


class ModelKind(enum.Enum):
    """The eight tension-compression split models."""

    ISOTROPIC = "isotropic"
    VOL_DEV = "vol-dev"
    SPECTRAL = "spectral"
    WU = "wu"
    SS1 = "ss1"
    SS2 = "ss2"
    SK = "sk"
    PROPOSED = "proposed"

    @classmethod
    def from_name(cls, name: str) -> "ModelKind":
        key = name.strip().lower().replace("_", "-")
        aliases = {"voldev": "vol-dev", "v-d": "vol-dev", "vd": "vol-dev"}
        key = aliases.get(key, key)
        for kind in cls:
            if kind.value == key:
                return kind
        raise InvalidInputError(
            f"unknown model {name!r}; expected one of "
            f"{[k.value for k in cls]}"
        )


#: Models whose stress derives from an energy (SS1/SS2 are stress-only).
VARIATIONAL_MODELS = frozenset(
    {
        ModelKind.ISOTROPIC,
        ModelKind.VOL_DEV,
        ModelKind.SPECTRAL,
        ModelKind.WU,
        ModelKind.SK,
        ModelKind.PROPOSED,
    }
)


@dataclass(frozen=True)
class PhasePoint:
    """Phase-field value and spatial gradient at a material point."""

    d: float
    grad_d: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        g = np.asarray(self.grad_d, dtype=float).reshape(3)
        object.__setattr__(self, "grad_d", g)
        if not (np.isfinite(self.d) and np.all(np.isfinite(g))):
            raise InvalidInputError("PhasePoint: non-finite input")
        if not 0.0 <= self.d <= 1.0:
            raise InvalidInputError(f"PhasePoint: d={self.d} outside [0, 1]")

    @property
    def normal(self) -> np.ndarray:
        """Crack normal grad_d / |grad_d| (dummy e2 when the norm vanishes)."""
        r = float(np.linalg.norm(self.grad_d))
        if r < GRAD_TINY:
            return _E2.copy()
        return self.grad_d / r


@dataclass(frozen=True)
class ConstitutiveOutput:
    """Energy, stress, tangent and phase-field driving data at one point.

    ``psi``/``dpsi_dd`` are None for the nonvariational SS models.
    ``dpsi_dgradd`` is a zero vector for every model except the
    crack-orientation-dependent proposed one.
    """

    psi: float | None
    sigma: SymTensor3
    tangent: np.ndarray
    dpsi_dd: float | None
    dpsi_dgradd: np.ndarray | None


def degradation(d, k):
    """Quadratic degradation ``(1 - d)^2 + k``.

    Raises
    ------
    InvalidInputError
        If any ``d`` lies outside [0, 1].
    """
    d = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(d)) or np.any(d < 0.0) or np.any(d > 1.0):
        raise InvalidInputError("degradation: d outside [0, 1]")
    out = (1.0 - d) ** 2 + k
    return out if out.ndim else float(out)


def shear_fit_polynomial(d, a: float, b: float):
    """The fitted factor ``a (1-d)^2 + b (1-d) + 1`` (positive on [0, 1])."""
    s = 1.0 - np.asarray(d, dtype=float)
    return a * s * s + b * s + 1.0


def shear_degradation(d, nu: float, table: ShearFitTable | None = None):
    """Shear degradation ``g_s(d; nu) = 1 + [g(d) - 1] (a (1-d)^2 + b (1-d) + 1)``.

    The bracketed ``g(d) - 1`` uses the residual-free ``g`` so that
    ``g_s(1; nu) = 0`` exactly (a broken crack carries no in-plane shear).

    Raises
    ------
    OutOfRangeError
        If ``nu`` is outside the fitted table range.
    """
    table = table if table is not None else shear_fit_table()
    a, b = table.coefficients(nu)
    d = np.asarray(d, dtype=float)
    g0 = (1.0 - d) ** 2
    out = 1.0 + (g0 - 1.0) * shear_fit_polynomial(d, a, b)
    return out if out.ndim else float(out)


def shear_degradation_deriv(d, a: float, b: float):
    """d g_s / d d with fitted coefficients (a, b).

    With s = 1 - d, ``g_s = a s^4 + b s^3 + (1-a) s^2 - b s``.
    """
    s = 1.0 - np.asarray(d, dtype=float)
    out = -(4.0 * a * s**3 + 3.0 * b * s**2 + 2.0 * (1.0 - a) * s - b)
    return out if out.ndim else float(out)


def sk_degradation(d, b: float):
    """Exponential degradation of the crack-coordinate (SK) split.

    ``g(d; b) = [exp(b d) - (b (d - 1) + 1) exp(b)] / [(b - 1) exp(b) + 1]``
    with ``g(0; b) = 1`` and ``g(1; b) = 0``.
    """
    d = np.asarray(d, dtype=float)
    den = (b - 1.0) * np.exp(b) + 1.0
    out = (np.exp(b * d) - (b * (d - 1.0) + 1.0) * np.exp(b)) / den
    return out if out.ndim else float(out)


def sk_degradation_deriv(d, b: float):
    d = np.asarray(d, dtype=float)
    den = (b - 1.0) * np.exp(b) + 1.0
    out = b * (np.exp(b * d) - np.exp(b)) / den
    return out if out.ndim else float(out)


def sk_degradation_deriv2(d, b: float):
    d = np.asarray(d, dtype=float)
    den = (b - 1.0) * np.exp(b) + 1.0
    out = b * b * np.exp(b * d) / den
    return out if out.ndim else float(out)


def regularization_factor(grad_d, ell: float, alpha: float):
    """The ``tanh(alpha * ell^2 |grad d|^2)`` crack-direction switch."""
    g = np.asarray(grad_d, dtype=float)
    r2 = np.einsum("...i,...i->...", g, g)
    out = np.tanh(alpha * ell * ell * r2)
    return out if out.ndim else float(out)


def regularize(i4, i5, grad_d, ell: float, alpha: float):
    """Scale the pseudo-invariants by the gradient regularization factor.

    Returns ``(i4_hat, i5_hat) = tanh(alpha ell^2 |grad d|^2) * (i4, i5)``,
    which vanish where the crack normal is undefined (``grad d -> 0``).
    """
    if alpha <= 0.0:
        raise InvalidInputError("regularize: alpha must be positive")
    fac = regularization_factor(grad_d, ell, alpha)
    return fac * i4, fac * i5
