"""Symmetric second-order tensor algebra in 2D/3D.

Conventions
-----------
Voigt order is ``(11, 22, 33, 23, 13, 12)`` for both stress and strain.
Voigt vectors store the plain tensor components (``v[3] = t_23``, no factor
of 2 on strain shears); the factors of 2 appear only when contracting a
tangent with a strain, via :data:`VOIGT_WEIGHTS`.  A 6x6 tangent ``C``
therefore maps *engineering* strain columns: ``dsigma = C @ (VOIGT_WEIGHTS *
deps_voigt)``.

Most functions are batched: tensors have shape ``(..., 3, 3)``, Voigt
vectors ``(..., 6)``, and scalar results drop the trailing axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

#: (row, col) index pairs of the Voigt components, in order.
VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))

#: Contraction weights turning a plain strain Voigt vector into engineering form.
VOIGT_WEIGHTS = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])

#: Voigt vector of the identity tensor.
VOIGT_IDENTITY = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])

_EIG_RECONSTRUCT_TOL = 1e-12
_UNIT_NORM_TOL = 1e-8


def sym_from_voigt(v: np.ndarray) -> np.ndarray:
    """Expand Voigt vectors ``(..., 6)`` into symmetric matrices ``(..., 3, 3)``."""
    v = np.asarray(v, dtype=float)
    t = np.empty(v.shape[:-1] + (3, 3))
    for k, (i, j) in enumerate(VOIGT_PAIRS):
        t[..., i, j] = v[..., k]
        t[..., j, i] = v[..., k]
    return t


def voigt_from_sym(t: np.ndarray) -> np.ndarray:
    """Collapse symmetric matrices ``(..., 3, 3)`` into Voigt vectors ``(..., 6)``."""
    t = np.asarray(t, dtype=float)
    v = np.empty(t.shape[:-2] + (6,))
    for k, (i, j) in enumerate(VOIGT_PAIRS):
        v[..., k] = t[..., i, j]
    return v


def trace(t: np.ndarray) -> np.ndarray:
    return t[..., 0, 0] + t[..., 1, 1] + t[..., 2, 2]


def dev(t: np.ndarray) -> np.ndarray:
    """Deviatoric part ``t - tr(t)/3 * 1``."""
    t = np.asarray(t, dtype=float)
    out = t.copy()
    third = trace(t)[..., None] / 3.0
    for i in range(3):
        out[..., i, i] -= third[..., 0]
    return out


def macaulay(x, sign: str = "plus"):
    """Macaulay bracket ``<x>+ = (x + |x|)/2`` or ``<x>- = (x - |x|)/2``."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("macaulay: non-finite input")
    if sign == "plus":
        return np.maximum(x, 0.0)
    if sign == "minus":
        return np.minimum(x, 0.0)
    raise InvalidInputError(f"macaulay: sign must be 'plus' or 'minus', got {sign!r}")


def rotate_sym(t: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Rotate symmetric tensors: ``Q t Q^T`` (batched over leading axes)."""
    return np.einsum("...ip,...pq,...jq->...ij", q, t, q)


@dataclass(frozen=True)
class SymTensor3:
    """Symmetric 3x3 tensor stored by its six independent components.

    Component order matches :data:`VOIGT_PAIRS`.  Used for the single-point
    constitutive API; the FEM works on batched raw arrays instead.
    """

    t11: float
    t22: float
    t33: float
    t23: float = 0.0
    t13: float = 0.0
    t12: float = 0.0

    @classmethod
    def from_matrix(cls, m) -> "SymTensor3":
        m = np.asarray(m, dtype=float)
        if m.shape != (3, 3):
            raise InvalidInputError(f"expected a 3x3 matrix, got shape {m.shape}")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(m).max())):
            raise InvalidInputError("matrix is not symmetric")
        return cls(m[0, 0], m[1, 1], m[2, 2], m[1, 2], m[0, 2], m[0, 1])

    @classmethod
    def from_voigt(cls, v) -> "SymTensor3":
        v = np.asarray(v, dtype=float)
        if v.shape != (6,):
            raise InvalidInputError(f"expected a 6-vector, got shape {v.shape}")
        return cls(*v)

    @classmethod
    def plane_strain(cls, e11: float, e22: float, e12: float) -> "SymTensor3":
        """Embed a plane-strain state (all out-of-plane components zero)."""
        return cls(e11, e22, 0.0, 0.0, 0.0, e12)

    def as_matrix(self) -> np.ndarray:
        return sym_from_voigt(self.to_voigt())

    def to_voigt(self) -> np.ndarray:
        return np.array([self.t11, self.t22, self.t33, self.t23, self.t13, self.t12])

    def __add__(self, other: "SymTensor3") -> "SymTensor3":
        return SymTensor3.from_voigt(self.to_voigt() + other.to_voigt())

    def __sub__(self, other: "SymTensor3") -> "SymTensor3":
        return SymTensor3.from_voigt(self.to_voigt() - other.to_voigt())

    def __mul__(self, a: float) -> "SymTensor3":
        return SymTensor3.from_voigt(self.to_voigt() * a)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_matrix()))


def as_sym_matrix(t) -> np.ndarray:
    """Coerce SymTensor3 / (3,3) array / 6-vector into a (3,3) ndarray."""
    if isinstance(t, SymTensor3):
        return t.as_matrix()
    a = np.asarray(t, dtype=float)
    if a.shape == (3, 3):
        return SymTensor3.from_matrix(a).as_matrix()
    if a.shape == (6,):
        return sym_from_voigt(a)
    raise InvalidInputError(f"cannot interpret shape {a.shape} as a symmetric tensor")


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and matching orthonormal eigenvectors.

    ``vectors[:, a]`` is the unit eigenvector for ``values[a]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def eig_sym3(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batched symmetric eigendecomposition with descending eigenvalues.

    Parameters
    ----------
    t : ndarray, shape (..., 3, 3)

    Returns
    -------
    values : ndarray, shape (..., 3), descending
    vectors : ndarray, shape (..., 3, 3), ``vectors[..., :, a]`` unit columns
    """
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise InvalidInputError("eigendecomposition: non-finite input")
    vals, vecs = np.linalg.eigh(t)
    return vals[..., ::-1], vecs[..., :, ::-1]


def eig_decompose(t) -> EigenSystem:
    """Single-point eigendecomposition returning an :class:`EigenSystem`."""
    m = as_sym_matrix(t)
    vals, vecs = eig_sym3(m)
    return EigenSystem(values=vals, vectors=vecs)


@dataclass(frozen=True)
class InvariantSet:
    """Strain invariants and crack-normal pseudo-invariants.

    ``i4 = n . eps n`` and ``i5 = n . eps^2 n``; the ``_hat`` values carry
    the gradient regularization factor (equal to the raw values until
    :func:`phasefrac.constitutive.regularize` is applied).
    """

    i1: float
    i2: float
    i4: float
    i5: float
    i4_hat: float
    i5_hat: float


def invariants_raw(eps: np.ndarray, n: np.ndarray):
    """Batched invariants: returns ``(i1, i2, i4, i5)`` arrays.

    ``eps``: (..., 3, 3); ``n``: (..., 3) unit vectors (not checked here).
    """
    i1 = trace(eps)
    tr_sq = np.einsum("...ij,...ji->...", eps, eps)
    i2 = 0.5 * (i1 * i1 - tr_sq)
    en = np.einsum("...ij,...j->...i", eps, n)
    i4 = np.einsum("...i,...i->...", n, en)
    i5 = np.einsum("...i,...i->...", en, en)
    return i1, i2, i4, i5


def invariants(eps, n) -> InvariantSet:
    """Invariants of a single strain tensor with respect to a unit normal.

    Raises
    ------
    InvalidInputError
        If ``n`` is not unit length to 1e-8 or inputs are non-finite.
    """
    m = as_sym_matrix(eps)
    n = np.asarray(n, dtype=float).reshape(3)
    if not (np.all(np.isfinite(m)) and np.all(np.isfinite(n))):
        raise InvalidInputError("invariants: non-finite input")
    if abs(np.linalg.norm(n) - 1.0) > _UNIT_NORM_TOL:
        raise InvalidInputError("invariants: n must be a unit vector")
    i1, i2, i4, i5 = invariants_raw(m, n)
    return InvariantSet(float(i1), float(i2), float(i4), float(i5), float(i4), float(i5))


def check_eigen_system(t, es: EigenSystem) -> float:
    """Return the relative reconstruction error of an eigendecomposition."""
    m = as_sym_matrix(t)
    scale = max(float(np.abs(m).max()), 1e-300)
    return float(np.abs(es.reconstruct() - m).max() / scale)


def spectral_tangent(vals, vecs, coeff_matrix, pair_values, scale=None):
    """Voigt tangent of an isotropic tensor function ``G = sum_a g_a E_a (x) E_a``.

    Parameters
    ----------
    vals : (..., 3) eigenvalues (descending).
    vecs : (..., 3, 3) eigenvector columns.
    coeff_matrix : (..., 3, 3) array, ``coeff_matrix[a, b] = d g_a / d eps_b``.
    pair_values : (..., 3) function values ``g_a`` used in the divided
        differences ``(g_a - g_b)/(eps_a - eps_b)``; evaluated on eigenvalues
        perturbed by ``a * 1e-10 * scale`` so coalescent pairs stay finite.
        The caller must supply values computed at the *perturbed* eigenvalues.
    scale : optional (...,) magnitude used for the perturbation; defaults to
        ``max(|vals|)``.

    Returns
    -------
    C : (..., 6, 6) tangent in engineering-strain Voigt columns.
    """
    vals = np.asarray(vals, dtype=float)
    if scale is None:
        scale = np.abs(vals).max(axis=-1)
    lam_pert = perturbed_eigenvalues(vals, scale)

    # w_a = voigt(E_a (x) E_a); w_ab = voigt(sym(E_a (x) E_b))
    proj = np.einsum("...ia,...ja->...aij", vecs, vecs)          # (..., 3, 3, 3)
    w = voigt_from_sym(proj)                                      # (..., 3, 6)
    c = np.einsum("...ab,...ai,...bj->...ij", coeff_matrix, w, w)
    for a in range(3):
        for b in range(a + 1, 3):
            sab = 0.5 * (
                np.einsum("...i,...j->...ij", vecs[..., :, a], vecs[..., :, b])
                + np.einsum("...i,...j->...ij", vecs[..., :, b], vecs[..., :, a])
            )
            wab = voigt_from_sym(sab)
            theta = (pair_values[..., a] - pair_values[..., b]) / (
                lam_pert[..., a] - lam_pert[..., b]
            )
            c += 2.0 * theta[..., None, None] * np.einsum(
                "...i,...j->...ij", wab, wab
            )
    return c


def perturbed_eigenvalues(vals: np.ndarray, scale=None) -> np.ndarray:
    """Shift eigenvalue triples apart by ``a * 1e-10 * scale``, a = 1, 2, 3.

    Removes coalescence before forming spectral divided differences; the
    shift only ever enters tangents, never stresses.
    """
    vals = np.asarray(vals, dtype=float)
    if scale is None:
        scale = np.abs(vals).max(axis=-1)
    scale = np.maximum(np.asarray(scale, dtype=float), 1e-290)
    shifts = np.array([1.0, 2.0, 3.0]) * 1e-10
    return vals + shifts * scale[..., None]


def sym_product_map(n_sym: np.ndarray) -> np.ndarray:
    """Voigt matrix of ``eps -> N eps + eps N`` for a symmetric ``N``.

    Columns follow engineering strain; batched over leading axes of
    ``n_sym`` with shape (..., 3, 3). This is also the matrix multiplying
    ``dPsi/dI5`` in the invariant-form tangent (with ``N = n (x) n``).
    """
    n = np.asarray(n_sym, dtype=float)
    n11, n22, n33 = n[..., 0, 0], n[..., 1, 1], n[..., 2, 2]
    n23, n13, n12 = n[..., 1, 2], n[..., 0, 2], n[..., 0, 1]
    z = np.zeros_like(n11)
    rows = [
        [2 * n11, z, z, z, n13, n12],
        [z, 2 * n22, z, n23, z, n12],
        [z, z, 2 * n33, n23, n13, z],
        [z, n23, n23, 0.5 * (n22 + n33), 0.5 * n12, 0.5 * n13],
        [n13, z, n13, 0.5 * n12, 0.5 * (n11 + n33), 0.5 * n23],
        [n12, n12, z, 0.5 * n13, 0.5 * n23, 0.5 * (n11 + n22)],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def isotropic_stiffness(lam: float, mu: float) -> np.ndarray:
    """6x6 isotropic stiffness in engineering-strain Voigt columns."""
    c = np.zeros((6, 6))
    c[:3, :3] = lam
    c[0, 0] = c[1, 1] = c[2, 2] = lam + 2.0 * mu
    c[3, 3] = c[4, 4] = c[5, 5] = mu
    return c


#: dPsi/dI2 multiplier matrix of the invariant-form tangent.
I2_TANGENT_MAP = np.array(
    [
        [0.0, 1.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        [1.0, 1.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -0.5, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, -0.5, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, -0.5],
    ]
)

#: Identity map on engineering strain (2 mu * this = isotropic shear stiffness).
ENG_IDENTITY = np.diag([1.0, 1.0, 1.0, 0.5, 0.5, 0.5])
