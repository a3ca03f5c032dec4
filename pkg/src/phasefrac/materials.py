"""Material parameter container.

Units are the consistent (mm, MPa, mJ, N) system: stresses and moduli in
MPa (= mJ/mm^3 = N/mm^2), the fracture energy release rate in mJ/mm^2, and
lengths in mm.  Scenario builders convert the paper-style GPa table values
on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import InvalidInputError


@dataclass(frozen=True)
class MaterialParams:
    """Isotropic elasticity plus phase-field fracture parameters.

    Attributes
    ----------
    lam, mu : float
        Lame constants (MPa); admissibility requires ``mu > 0`` and
        ``lam + 2 mu > 0``.
    gc : float
        Critical energy release rate (mJ/mm^2).
    ell : float
        Phase-field regularization length (mm).
    k_residual : float
        Residual stiffness in the degradation function ``(1-d)^2 + k``.
        Kept strictly below 1; zero is allowed for closed-form checks.
    alpha_reg : float
        Coefficient of the ``tanh(alpha * ell^2 |grad d|^2)`` factor that
        switches the crack-orientation terms off where ``grad d ~ 0``.
    sk_b : float
        Extra exponent parameter of the crack-coordinate (SK) degradation
        function; must be positive.
    """

    lam: float
    mu: float
    gc: float = 1.0
    ell: float = 1.0
    k_residual: float = 1.0e-6
    alpha_reg: float = 5.66e-4
    sk_b: float = 2.0

    def __post_init__(self):
        if not (self.mu > 0.0 and self.lam + 2.0 * self.mu > 0.0):
            raise InvalidInputError(
                f"inadmissible Lame constants: mu={self.mu}, lam+2mu={self.lam + 2 * self.mu}"
            )
        if self.gc <= 0.0 or self.ell <= 0.0:
            raise InvalidInputError("gc and ell must be positive")
        if not 0.0 <= self.k_residual < 1.0:
            raise InvalidInputError("k_residual must lie in [0, 1)")
        if self.alpha_reg <= 0.0:
            raise InvalidInputError("alpha_reg must be positive")
        if self.sk_b <= 0.0:
            raise InvalidInputError("sk_b must be positive")

    @property
    def bulk(self) -> float:
        """Bulk modulus K = lam + 2 mu / 3."""
        return self.lam + 2.0 * self.mu / 3.0

    @property
    def nu(self) -> float:
        """Poisson ratio lam / (2 (lam + mu))."""
        return self.lam / (2.0 * (self.lam + self.mu))

    @property
    def young(self) -> float:
        return self.mu * (3.0 * self.lam + 2.0 * self.mu) / (self.lam + self.mu)

    def with_(self, **kwargs) -> "MaterialParams":
        """Return a copy with selected fields replaced."""
        return replace(self, **kwargs)

    @classmethod
    def from_gpa(cls, lam_gpa: float, mu_gpa: float, **kwargs) -> "MaterialParams":
        """Build from GPa moduli (converted to MPa), other fields unchanged."""
        return cls(lam=1e3 * lam_gpa, mu=1e3 * mu_gpa, **kwargs)
