"""Lookup tables shipped with the package.

Two plain-text CSV files live in ``phasefrac/data`` and are read once on
first use:

* ``shear_fit_table.csv`` -- Poisson-ratio-dependent coefficients ``a(nu)``,
  ``b(nu)`` of the fitted shear-stiffness polynomial
  ``mu * [a (1-d)^2 + b (1-d) + 1]``.
* ``phase_calibration.csv`` -- phase-field value equivalent to a micro-crack
  of length ratio ``r_a`` for the three calibrated crack shapes.

Both lookups interpolate linearly between tabulated rows and refuse to
extrapolate.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from .errors import OutOfRangeError

CRACK_SHAPES = ("plane_strain", "penny", "square")


def _read_csv(name: str) -> list[list[float]]:
    path = resources.files("phasefrac.data").joinpath(name)
    with path.open("r", encoding="ascii") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        return [[float(x) for x in row] for row in reader if row]


@dataclass(frozen=True)
class ShearFitTable:
    """Rows of ``(nu, a, b)``; linear interpolation in nu, no extrapolation."""

    nu: np.ndarray
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def from_rows(cls, rows: list[list[float]]) -> "ShearFitTable":
        arr = np.asarray(rows, dtype=float)
        order = np.argsort(arr[:, 0])
        arr = arr[order]
        return cls(nu=arr[:, 0], a=arr[:, 1], b=arr[:, 2])

    def coefficients(self, nu: float) -> tuple[float, float]:
        """Interpolated ``(a, b)`` at Poisson ratio ``nu``.

        Raises
        ------
        OutOfRangeError
            If ``nu`` lies outside the tabulated hull [0.2, 0.45].
        """
        lo, hi = self.nu[0], self.nu[-1]
        if not lo <= nu <= hi:
            raise OutOfRangeError(
                f"nu={nu} outside the fitted range [{lo}, {hi}]; no extrapolation"
            )
        a = float(np.interp(nu, self.nu, self.a))
        b = float(np.interp(nu, self.nu, self.b))
        return a, b


@dataclass(frozen=True)
class CalibrationTable:
    """Phase field equivalent to a crack length ratio, per crack shape."""

    r_a: np.ndarray
    d: dict  # shape name -> ndarray of d values

    @classmethod
    def from_rows(cls, rows: list[list[float]]) -> "CalibrationTable":
        arr = np.asarray(rows, dtype=float)
        order = np.argsort(arr[:, 0])
        arr = arr[order]
        d = {name: arr[:, 1 + k] for k, name in enumerate(CRACK_SHAPES)}
        return cls(r_a=arr[:, 0], d=d)

    def phase_value(self, r_a: float, shape: str) -> float:
        """Interpolated phase field for crack length ratio ``r_a``.

        Raises
        ------
        OutOfRangeError
            If ``r_a`` is outside [0, 0.8] or ``shape`` is unknown.
        """
        if shape not in self.d:
            raise OutOfRangeError(
                f"unknown crack shape {shape!r}; expected one of {CRACK_SHAPES}"
            )
        lo, hi = self.r_a[0], self.r_a[-1]
        if not lo <= r_a <= hi:
            raise OutOfRangeError(f"r_a={r_a} outside the calibrated range [{lo}, {hi}]")
        return float(np.interp(r_a, self.r_a, self.d[shape]))


@lru_cache(maxsize=1)
def shear_fit_table() -> ShearFitTable:
    return ShearFitTable.from_rows(_read_csv("shear_fit_table.csv"))


@lru_cache(maxsize=1)
def calibration_table() -> CalibrationTable:
    return CalibrationTable.from_rows(_read_csv("phase_calibration.csv"))


def calibrate_phase(r_a: float, shape: str, table: CalibrationTable | None = None) -> float:
    """Phase field equivalent to a micro-crack length ratio (table lookup)."""
    table = table if table is not None else calibration_table()
    return table.phase_value(r_a, shape)
