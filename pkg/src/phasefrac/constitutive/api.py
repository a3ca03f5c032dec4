"""Single-point constitutive API on top of the batched kernels."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError, UnsupportedModelError
from ..materials import MaterialParams
from ..tensor import SymTensor3, as_sym_matrix, sym_from_voigt
from .common import ConstitutiveOutput, ModelKind, PhasePoint, VARIATIONAL_MODELS
from .kernels import respond


def evaluate(
    model: ModelKind,
    eps,
    phase: PhasePoint,
    mat: MaterialParams,
    sk_normal=None,
) -> ConstitutiveOutput:
    """Evaluate one split model at a single material point.

    Parameters
    ----------
    model : ModelKind
    eps : SymTensor3 or (3, 3) array
        Small-strain tensor (plane strain states carry explicit zeros).
    phase : PhasePoint
        Phase value and gradient; the gradient feeds the crack normal of
        the SS and proposed models.
    mat : MaterialParams
    sk_normal : optional 3-vector
        Freezes the SK crack frame instead of the default
        maximum-principal-stress direction; ignored by other models.

    Returns
    -------
    ConstitutiveOutput
        Energy density, stress, 6x6 tangent (engineering-strain columns),
        and driving-force data.  ``psi``/``dpsi_dd`` are None for SS1/SS2.
    """
    m = as_sym_matrix(eps)
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("evaluate: non-finite strain")
    batch = respond(
        model,
        m[None],
        np.array([phase.d]),
        phase.grad_d[None],
        mat,
        sk_normal=sk_normal,
    )
    return ConstitutiveOutput(
        psi=None if batch.psi is None else float(batch.psi[0]),
        sigma=SymTensor3.from_matrix(sym_from_voigt(batch.sigma[0])),
        tangent=batch.tangent[0],
        dpsi_dd=None if batch.dpsi_dd is None else float(batch.dpsi_dd[0]),
        dpsi_dgradd=None if batch.dpsi_dgradd is None else batch.dpsi_dgradd[0].copy(),
    )


def driving_force(
    model: ModelKind,
    eps,
    phase: PhasePoint,
    mat: MaterialParams,
) -> tuple[float, np.ndarray]:
    """Return ``(dPsi/dd, dPsi/d(grad d))`` for a variational model.

    Raises
    ------
    UnsupportedModelError
        For SS1/SS2, which prescribe a stress but no energy.
    """
    if model not in VARIATIONAL_MODELS:
        raise UnsupportedModelError(
            f"{model.value} is nonvariational: no energy, no driving force"
        )
    out = evaluate(model, eps, phase, mat)
    return out.dpsi_dd, out.dpsi_dgradd
