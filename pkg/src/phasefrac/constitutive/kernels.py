"""Batched constitutive kernels for the eight split models.

Every kernel evaluates a whole batch of material points at once: strains
have shape ``(n, 3, 3)``, phase values ``(n,)``, gradients ``(n, 3)``.
Outputs are collected in :class:`ModelResponse`.  The FEM assembly calls
these directly; the single-point API in :mod:`phasefrac.constitutive.api`
wraps a batch of one.

Stress Voigt order is ``(11, 22, 33, 23, 13, 12)`` and tangents act on
engineering strain columns (see :mod:`phasefrac.tensor`).

The linearized phase-field driving data (``drive_lin``, ``drive_const``)
approximate ``dPsi/dd`` affinely around the supplied ``d`` so the phase
subproblem stays linear: exactly for the quadratic degradation models, by a
Newton step for the exponential SK degradation, and by a convexity-
preserving surrogate for the quartic shear degradation of the proposed
model (the surrogate majorizes the true increment for ``a(nu) >= 0``, so
alternation still descends the energy).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidInputError
from ..materials import MaterialParams
from ..tables import shear_fit_table
from ..tensor import (
    ENG_IDENTITY,
    I2_TANGENT_MAP,
    VOIGT_IDENTITY,
    eig_sym3,
    invariants_raw,
    isotropic_stiffness,
    perturbed_eigenvalues,
    spectral_tangent,
    sym_product_map,
    trace,
    voigt_from_sym,
)
from .common import (
    GRAD_TINY,
    ModelKind,
    degradation,
    regularization_factor,
    shear_degradation_deriv,
    shear_fit_polynomial,
    sk_degradation,
    sk_degradation_deriv,
    sk_degradation_deriv2,
)

_E2 = np.array([0.0, 1.0, 0.0])


@dataclass
class ModelResponse:
    """Batched constitutive outputs.

    ``psi``, ``dpsi_dd``, ``dpsi_dgradd`` and the drive fields are None for
    the nonvariational SS models; ``tangent`` is None when not requested.
    """

    psi: np.ndarray | None
    sigma: np.ndarray
    tangent: np.ndarray | None
    dpsi_dd: np.ndarray | None
    dpsi_dgradd: np.ndarray | None
    drive_lin: np.ndarray | None
    drive_const: np.ndarray | None
    flux: np.ndarray | None


def _psi0(eps, lam, mu):
    i1 = trace(eps)
    return 0.5 * lam * i1 * i1 + mu * np.einsum("...ij,...ij->...", eps, eps)


def _outer(u, v):
    return np.einsum("...i,...j->...ij", u, v)


def _normals(grad_d):
    """Unit normals with a dummy e2 where the gradient vanishes."""
    r = np.linalg.norm(grad_d, axis=-1)
    safe = np.maximum(r, GRAD_TINY)
    n = grad_d / safe[..., None]
    n = np.where((r < GRAD_TINY)[..., None], _E2, n)
    return n, r


# ---------------------------------------------------------------------------
# Models without crack-orientation dependence
# ---------------------------------------------------------------------------


def isotropic_response(eps, d, mat: MaterialParams, need_tangent=True) -> ModelResponse:
    lam, mu = mat.lam, mat.mu
    g = degradation(d, mat.k_residual)
    psi0 = _psi0(eps, lam, mu)
    i1 = trace(eps)
    ev = voigt_from_sym(eps)
    sig = g[..., None] * (lam * i1[..., None] * VOIGT_IDENTITY + 2.0 * mu * ev)
    tang = None
    if need_tangent:
        tang = g[..., None, None] * isotropic_stiffness(lam, mu)
    gp = -2.0 * (1.0 - d)
    return ModelResponse(
        psi=g * psi0,
        sigma=sig,
        tangent=tang,
        dpsi_dd=gp * psi0,
        dpsi_dgradd=np.zeros(eps.shape[:-2] + (3,)),
        drive_lin=2.0 * psi0,
        drive_const=-2.0 * psi0,
        flux=np.zeros(eps.shape[:-2] + (3,)),
    )


def voldev_response(eps, d, mat: MaterialParams, need_tangent=True) -> ModelResponse:
    lam, mu = mat.lam, mat.mu
    kb = mat.bulk
    g = degradation(d, mat.k_residual)
    i1 = trace(eps)
    ev = voigt_from_sym(eps)
    devv = ev - (i1[..., None] / 3.0) * VOIGT_IDENTITY
    dev_sq = np.sum(devv[..., :3] ** 2, axis=-1) + 2.0 * np.sum(devv[..., 3:] ** 2, axis=-1)
    trp = np.maximum(i1, 0.0)
    trm = np.minimum(i1, 0.0)
    psip = 0.5 * kb * trp * trp + mu * dev_sq
    psim = 0.5 * kb * trm * trm
    sig = (
        g[..., None] * (kb * trp[..., None] * VOIGT_IDENTITY + 2.0 * mu * devv)
        + kb * trm[..., None] * VOIGT_IDENTITY
    )
    tang = None
    if need_tangent:
        hp = (i1 > 0.0).astype(float)
        vv = np.outer(VOIGT_IDENTITY, VOIGT_IDENTITY)
        dev6 = ENG_IDENTITY - vv / 3.0
        tang = (
            g[..., None, None] * (kb * hp[..., None, None] * vv + 2.0 * mu * dev6)
            + kb * (1.0 - hp)[..., None, None] * vv
        )
    gp = -2.0 * (1.0 - d)
    return ModelResponse(
        psi=g * psip + psim,
        sigma=sig,
        tangent=tang,
        dpsi_dd=gp * psip,
        dpsi_dgradd=np.zeros(eps.shape[:-2] + (3,)),
        drive_lin=2.0 * psip,
        drive_const=-2.0 * psip,
        flux=np.zeros(eps.shape[:-2] + (3,)),
    )


def spectral_response(eps, d, mat: MaterialParams, need_tangent=True) -> ModelResponse:
    lam, mu = mat.lam, mat.mu
    g = degradation(d, mat.k_residual)
    vals, vecs = eig_sym3(eps)
    i1 = trace(eps)
    trp, trm = np.maximum(i1, 0.0), np.minimum(i1, 0.0)
    vp, vm = np.maximum(vals, 0.0), np.minimum(vals, 0.0)
    psip = 0.5 * lam * trp * trp + mu * np.sum(vp * vp, axis=-1)
    psim = 0.5 * lam * trm * trm + mu * np.sum(vm * vm, axis=-1)
    y = 2.0 * mu * (g[..., None] * vp + vm)
    sig_spec = np.einsum("...a,...ia,...ja->...ij", y, vecs, vecs)
    sig = (
        lam * (g * trp + trm)[..., None] * VOIGT_IDENTITY
        + voigt_from_sym(sig_spec)
    )
    tang = None
    if need_tangent:
        hp = (i1 > 0.0).astype(float)
        vv = np.outer(VOIGT_IDENTITY, VOIGT_IDENTITY)
        coeff = 2.0 * mu * (
            g[..., None] * (vals > 0.0) + (vals <= 0.0)
        )
        coeff_mat = np.zeros(vals.shape + (3,))
        idx = np.arange(3)
        coeff_mat[..., idx, idx] = coeff
        scale = np.maximum(np.abs(vals).max(axis=-1), 1e-290)
        vals_pert = perturbed_eigenvalues(vals, scale)
        y_pert = 2.0 * mu * (
            g[..., None] * np.maximum(vals_pert, 0.0) + np.minimum(vals_pert, 0.0)
        )
        tang = lam * (g * hp + (1.0 - hp))[..., None, None] * vv + spectral_tangent(
            vals, vecs, coeff_mat, y_pert, scale
        )
    gp = -2.0 * (1.0 - d)
    return ModelResponse(
        psi=g * psip + psim,
        sigma=sig,
        tangent=tang,
        dpsi_dd=gp * psip,
        dpsi_dgradd=np.zeros(eps.shape[:-2] + (3,)),
        drive_lin=2.0 * psip,
        drive_const=-2.0 * psip,
        flux=np.zeros(eps.shape[:-2] + (3,)),
    )


# ---------------------------------------------------------------------------
# Effective-stress projection (Wu)
# ---------------------------------------------------------------------------


def _wu_positive_parts(sb, nu, nut):
    """Positive principal effective stresses per the three projection rules.

    ``sb``: (..., 3) effective principal stresses, descending.
    Returns (s_plus (..., 3), drule (..., 3, 3)) where ``drule[a, c] =
    d s_plus_a / d sb_c`` for the locally active rule.
    """
    s1, s2, s3 = sb[..., 0], sb[..., 1], sb[..., 2]
    shp = s1.shape

    s1p = np.maximum(s1, 0.0)
    d1 = np.zeros(shp + (3,))
    d1[..., 0] = s1 > 0.0

    cand2 = np.maximum(s2, nut * s1)
    use_nut2 = nut * s1 > s2
    s2p = np.maximum(cand2, 0.0)
    d2 = np.zeros(shp + (3,))
    pos2 = cand2 > 0.0
    d2[..., 0] = np.where(use_nut2, nut, 0.0) * pos2
    d2[..., 1] = np.where(use_nut2, 0.0, 1.0) * pos2

    inner = np.maximum(s3, nu * (s1 + s2))
    use_mix = nu * (s1 + s2) > s3
    cand3 = np.maximum(inner, nut * s1)
    use_nut3 = nut * s1 > inner
    s3p = np.maximum(cand3, 0.0)
    pos3 = cand3 > 0.0
    d3 = np.zeros(shp + (3,))
    d3[..., 0] = np.where(use_nut3, nut, np.where(use_mix, nu, 0.0)) * pos3
    d3[..., 1] = np.where(use_nut3, 0.0, np.where(use_mix, nu, 0.0)) * pos3
    d3[..., 2] = np.where(use_nut3, 0.0, np.where(use_mix, 0.0, 1.0)) * pos3

    s_plus = np.stack([s1p, s2p, s3p], axis=-1)
    drule = np.stack([d1, d2, d3], axis=-2)
    return s_plus, drule


def wu_response(eps, d, mat: MaterialParams, need_tangent=True) -> ModelResponse:
    lam, mu = mat.lam, mat.mu
    nu = mat.nu
    nut = nu / (1.0 - nu)
    g = degradation(d, mat.k_residual)
    vals, vecs = eig_sym3(eps)
    i1 = trace(eps)
    sb = lam * i1[..., None] + 2.0 * mu * vals  # descending with vals
    s_plus, _ = _wu_positive_parts(sb, nu, nut)
    sig_plus = np.einsum("...a,...ia,...ja->...ij", s_plus, vecs, vecs)
    vplus = voigt_from_sym(sig_plus)
    ev = voigt_from_sym(eps)
    vbar = lam * i1[..., None] * VOIGT_IDENTITY + 2.0 * mu * ev
    sig = vbar - (1.0 - g)[..., None] * vplus

    psi_plus = 0.5 * np.sum(s_plus * vals, axis=-1)
    psi0 = _psi0(eps, lam, mu)
    psi = psi0 - (1.0 - g) * psi_plus

    tang = None
    if need_tangent:
        scale = np.maximum(np.abs(vals).max(axis=-1), 1e-290)
        vals_pert = perturbed_eigenvalues(vals, scale)
        sb_pert = lam * np.sum(vals_pert, axis=-1)[..., None] + 2.0 * mu * vals_pert
        s_plus_pert, drule = _wu_positive_parts(sb_pert, nu, nut)
        # A+_ab = sum_c drule[a,c] * dsb_c/deps_b = lam * sum_c drule[a,c] + 2mu drule[a,b]
        a_plus = lam * drule.sum(axis=-1)[..., None] + 2.0 * mu * drule
        d_plus = spectral_tangent(vals, vecs, a_plus, s_plus_pert, scale)
        tang = isotropic_stiffness(lam, mu) - (1.0 - g)[..., None, None] * d_plus

    gp = -2.0 * (1.0 - d)
    return ModelResponse(
        psi=psi,
        sigma=sig,
        tangent=tang,
        dpsi_dd=gp * psi_plus,
        dpsi_dgradd=np.zeros(eps.shape[:-2] + (3,)),
        drive_lin=2.0 * psi_plus,
        drive_const=-2.0 * psi_plus,
        flux=np.zeros(eps.shape[:-2] + (3,)),
    )


# ---------------------------------------------------------------------------
# Crack-orientation models of Strobl/Seelig type (stress-only)
# ---------------------------------------------------------------------------


def _ss_frame(eps, grad_d):
    """Return (N matrix, eps:N, active mask); N = 0 and active where grad ~ 0."""
    n, r = _normals(grad_d)
    nn = _outer(n, n)
    nn = np.where((r < GRAD_TINY)[..., None, None], 0.0, nn)
    eps_nn = np.einsum("...ij,...ij->...", eps, nn)
    active = eps_nn >= 0.0
    return nn, eps_nn, active


def ss1_response(eps, d, grad_d, mat: MaterialParams, need_tangent=True) -> ModelResponse:
    lam, mu = mat.lam, mat.mu
    g = degradation(d, mat.k_residual)
    nn, eps_nn, active = _ss_frame(eps, grad_d)
    i1 = trace(eps)
    ev = voigt_from_sym(eps)
    vn = voigt_from_sym(nn)
    act = active.astype(float)

    sig_iso = lam * i1[..., None] * VOIGT_IDENTITY + 2.0 * mu * ev
    extra = ((1.0 - g) * (lam + 2.0 * mu) * eps_nn)[..., None] * vn
    sig = g[..., None] * sig_iso + (1.0 - act)[..., None] * extra

    tang = None
    if need_tangent:
        c0 = isotropic_stiffness(lam, mu)
        tang = g[..., None, None] * c0 + (
            ((1.0 - act) * (1.0 - g) * (lam + 2.0 * mu))[..., None, None]
            * _outer(vn, vn)
        )
    return ModelResponse(
        psi=None, sigma=sig, tangent=tang, dpsi_dd=None, dpsi_dgradd=None,
        drive_lin=None, drive_const=None, flux=None,
    )


def ss2_response(eps, d, grad_d, mat: MaterialParams, need_tangent=True) -> ModelResponse:
    # The crack-plane shear term carries 2 mu (g - 1) sym(N.eps + eps.N); the
    # factor 2 keeps the passive normal response undamaged and reduces the
    # through-crack shear to g(d) * 2 mu eps_12 as in the published
    # degradation-curve catalogue.
    lam, mu = mat.lam, mat.mu
    lt = lam * lam / (lam + 2.0 * mu)
    g = degradation(d, mat.k_residual)
    nn, eps_nn, active = _ss_frame(eps, grad_d)
    i1 = trace(eps)
    ev = voigt_from_sym(eps)
    vn = voigt_from_sym(nn)
    act = active.astype(float)

    n_eps = np.einsum("...ik,...kj->...ij", nn, eps)
    sym_ne = voigt_from_sym(n_eps + np.swapaxes(n_eps, -1, -2))

    sig_act = (
        ((lam + (g - 1.0) * lt) * i1)[..., None] * VOIGT_IDENTITY
        + 2.0 * mu * ev
        + ((g - 1.0) * (lam + lt))[..., None]
        * (i1[..., None] * vn + eps_nn[..., None] * VOIGT_IDENTITY)
        + (4.0 * (1.0 - g) * (lam + 2.0 * mu - lt) * eps_nn)[..., None] * vn
        + (2.0 * mu * (g - 1.0))[..., None] * sym_ne
    )
    sig_pas = (
        (lam * i1)[..., None] * VOIGT_IDENTITY
        + 2.0 * mu * ev
        + (4.0 * mu * (1.0 - g) * eps_nn)[..., None] * vn
        + (2.0 * mu * (g - 1.0))[..., None] * sym_ne
    )
    sig = act[..., None] * sig_act + (1.0 - act)[..., None] * sig_pas

    tang = None
    if need_tangent:
        vv = np.outer(VOIGT_IDENTITY, VOIGT_IDENTITY)
        sym_map = sym_product_map(nn)
        cross = _outer(np.broadcast_to(VOIGT_IDENTITY, vn.shape), vn) + _outer(
            vn, np.broadcast_to(VOIGT_IDENTITY, vn.shape)
        )
        c0_shear = 2.0 * mu * ENG_IDENTITY
        t_act = (
            (lam + (g - 1.0) * lt)[..., None, None] * vv
            + c0_shear
            + ((g - 1.0) * (lam + lt))[..., None, None] * cross
            + (4.0 * (1.0 - g) * (lam + 2.0 * mu - lt))[..., None, None] * _outer(vn, vn)
            + (2.0 * mu * (g - 1.0))[..., None, None] * sym_map
        )
        t_pas = (
            lam * vv
            + c0_shear
            + (4.0 * mu * (1.0 - g))[..., None, None] * _outer(vn, vn)
            + (2.0 * mu * (g - 1.0))[..., None, None] * sym_map
        )
        tang = act[..., None, None] * t_act + (1.0 - act)[..., None, None] * t_pas
    return ModelResponse(
        psi=None, sigma=sig, tangent=tang, dpsi_dd=None, dpsi_dgradd=None,
        drive_lin=None, drive_const=None, flux=None,
    )


# ---------------------------------------------------------------------------
# Crack-coordinate split (SK)
# ---------------------------------------------------------------------------


def _complement_frame(n):
    """Two unit vectors completing ``n`` to an orthonormal triad (batched)."""
    n = np.asarray(n, dtype=float)
    axes = np.eye(3)
    dots = np.abs(np.einsum("...i,ai->...a", n, axes))
    pick = np.argmin(dots, axis=-1)
    e = axes[pick]
    s = e - np.einsum("...i,...i->...", e, n)[..., None] * n
    s = s / np.linalg.norm(s, axis=-1)[..., None]
    t = np.cross(n, s)
    return s, t


def sk_response(eps, d, mat: MaterialParams, normal=None, need_tangent=True) -> ModelResponse:
    """Crack-coordinate stress split with exponential degradation.

    ``normal=None`` takes the crack normal from the maximum-principal
    direction of the undamaged stress (coaxial with the strain), which makes
    the response an isotropic tensor function; the tangent then carries the
    eigenvector-rotation terms.  A fixed ``normal`` freezes the crack frame
    (used by the degradation-curve sweeps).
    """
    lam, mu = mat.lam, mat.mu
    b = mat.sk_b
    lr = lam / (lam + 2.0 * mu)
    gsk = sk_degradation(d, b)
    gskp = sk_degradation_deriv(d, b)
    gskpp = sk_degradation_deriv2(d, b)
    i1 = trace(eps)

    if normal is None:
        vals, vecs = eig_sym3(eps)
        beta = lam * i1 + 2.0 * mu * vals[..., 0]
        ht = (beta > 0.0).astype(float)
        grow = gsk * ht + (1.0 - ht)
        ga = ((gsk - 1.0) * ht * lr)[..., None]
        row_n = grow[..., None] * np.array([lam + 2.0 * mu, lam, lam])
        base = np.array([lam + 2.0 * mu, lam, lam])
        row_s = ga * base + np.array([lam, lam + 2.0 * mu, lam])
        row_t = ga * base + np.array([lam, lam, lam + 2.0 * mu])
        amat = np.stack([row_n, row_s, row_t], axis=-2)
        sig_prin = np.einsum("...ab,...b->...a", amat, vals)
        sig = voigt_from_sym(
            np.einsum("...a,...ia,...ja->...ij", sig_prin, vecs, vecs)
        )
        psi = 0.5 * np.sum(sig_prin * vals, axis=-1)
        splus_eps = ht * beta * (vals[..., 0] + lr * (vals[..., 1] + vals[..., 2]))
        tang = None
        if need_tangent:
            scale = np.maximum(np.abs(vals).max(axis=-1), 1e-290)
            vals_pert = perturbed_eigenvalues(vals, scale)
            sig_pert = np.einsum("...ab,...b->...a", amat, vals_pert)
            tang = spectral_tangent(vals, vecs, amat, sig_pert, scale)
    else:
        n = np.broadcast_to(np.asarray(normal, dtype=float), eps.shape[:-2] + (3,))
        n = n / np.linalg.norm(n, axis=-1)[..., None]
        s, t = _complement_frame(n)
        en = np.einsum("...ij,...j->...i", eps, n)
        es = np.einsum("...ij,...j->...i", eps, s)
        et = np.einsum("...ij,...j->...i", eps, t)
        e_nn = np.einsum("...i,...i->...", n, en)
        e_ss = np.einsum("...i,...i->...", s, es)
        e_tt = np.einsum("...i,...i->...", t, et)
        e_ns = np.einsum("...i,...i->...", n, es)
        e_nt = np.einsum("...i,...i->...", n, et)
        e_st = np.einsum("...i,...i->...", s, et)
        beta = lam * i1 + 2.0 * mu * e_nn
        ht = (beta > 0.0).astype(float)
        vn, vs, vt = (voigt_from_sym(_outer(u, u)) for u in (n, s, t))
        wns = voigt_from_sym(0.5 * (_outer(n, s) + _outer(s, n)))
        wnt = voigt_from_sym(0.5 * (_outer(n, t) + _outer(t, n)))
        wst = voigt_from_sym(0.5 * (_outer(s, t) + _outer(t, s)))
        sig_plus = (
            (ht * beta)[..., None] * (vn + lr * (vs + vt))
            + (4.0 * mu * e_ns)[..., None] * wns
            + (4.0 * mu * e_nt)[..., None] * wnt
        )
        sig_minus = (
            ((1.0 - ht) * beta)[..., None] * vn
            - (ht * lr * beta)[..., None] * (vs + vt)
            + (lam * i1 + 2.0 * mu * e_ss)[..., None] * vs
            + (lam * i1 + 2.0 * mu * e_tt)[..., None] * vt
            + (4.0 * mu * e_st)[..., None] * wst
        )
        sig = gsk[..., None] * sig_plus + sig_minus
        ev = voigt_from_sym(eps)
        wts = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])
        psi = 0.5 * np.einsum("...i,...i->...", sig, wts * ev)
        splus_eps = np.einsum("...i,...i->...", sig_plus, wts * ev)
        tang = None
        if need_tangent:
            vbeta = lam * VOIGT_IDENTITY + 2.0 * mu * vn
            c_plus = (
                ht[..., None, None] * _outer(vn + lr * (vs + vt), vbeta)
                + 4.0 * mu * (_outer(wns, wns) + _outer(wnt, wnt))
            )
            c_minus = (
                _outer((1.0 - ht)[..., None] * vn - (ht * lr)[..., None] * (vs + vt), vbeta)
                + _outer(vs, lam * VOIGT_IDENTITY + 2.0 * mu * vs)
                + _outer(vt, lam * VOIGT_IDENTITY + 2.0 * mu * vt)
                + 4.0 * mu * _outer(wst, wst)
            )
            tang = gsk[..., None, None] * c_plus + c_minus

    psi_plus = 0.5 * splus_eps
    return ModelResponse(
        psi=psi,
        sigma=sig,
        tangent=tang,
        dpsi_dd=gskp * psi_plus,
        dpsi_dgradd=np.zeros(eps.shape[:-2] + (3,)),
        drive_lin=gskpp * psi_plus,
        drive_const=(gskp - gskpp * np.asarray(d)) * psi_plus,
        flux=np.zeros(eps.shape[:-2] + (3,)),
    )


# ---------------------------------------------------------------------------
# Micromechanics-informed model (invariant form)
# ---------------------------------------------------------------------------


def proposed_response(eps, d, grad_d, mat: MaterialParams, need_tangent=True) -> ModelResponse:
    """Direction-dependent split in invariant form.

    The tension/compression switch is the undamaged crack-normal stress
    ``beta = lam I1 + 2 mu I4_hat`` (compression branch at beta = 0, which
    is the stiffer choice; there the degraded perfect-square term vanishes
    so the energy is continuous).  Pseudo-invariants enter through the
    ``tanh`` gradient regularization.
    """
    lam, mu = mat.lam, mat.mu
    a, b = shear_fit_table().coefficients(mat.nu)
    g = degradation(d, mat.k_residual)
    d = np.asarray(d, dtype=float)
    s = 1.0 - d
    g_bare = s * s
    poly = shear_fit_polynomial(d, a, b)
    gs = 1.0 + (g_bare - 1.0) * poly

    n, r = _normals(grad_d)
    tau = regularization_factor(grad_d, mat.ell, mat.alpha_reg)
    i1, i2, i4, i5 = invariants_raw(eps, n)
    i4h, i5h = tau * i4, tau * i5

    ct = 0.5 / (lam + 2.0 * mu)
    beta = lam * i1 + 2.0 * mu * i4h
    ht = (beta > 0.0).astype(float)
    hc = 1.0 - ht

    psi_t = ct * (
        g * beta * beta
        + 4.0 * mu * (lam + mu) * (i1 * i1 + i4h * i4h - 2.0 * i2 - 2.0 * i5h)
        + 4.0 * lam * mu * (i2 - i1 * i4h + i5h)
    )
    psi_c = 0.5 * lam * i1 * i1 + mu * (i1 * i1 + 2.0 * i4h * i4h - 2.0 * i2 - 2.0 * i5h)
    psi_s = 2.0 * mu * gs * (i5h - i4h * i4h)
    psi = ht * psi_t + hc * psi_c + psi_s

    dpsi_di1 = (
        ht * ct * (2.0 * g * lam * beta + 8.0 * mu * (lam + mu) * i1 - 4.0 * lam * mu * i4h)
        + hc * (lam + 2.0 * mu) * i1
    )
    dpsi_di2 = -2.0 * mu  # branch-independent
    dpsi_di4h = (
        ht * ct * (4.0 * mu * g * beta + 8.0 * mu * (lam + mu) * i4h - 4.0 * lam * mu * i1)
        + hc * 4.0 * mu * i4h
        - 4.0 * mu * gs * i4h
    )
    dpsi_di5h = 2.0 * mu * (gs - 1.0)

    ev = voigt_from_sym(eps)
    v2 = i1[..., None] * VOIGT_IDENTITY - ev
    v4 = voigt_from_sym(_outer(n, n))
    en = np.einsum("...ij,...j->...i", eps, n)
    v5 = voigt_from_sym(_outer(en, n) + _outer(n, en))
    sig = (
        dpsi_di1[..., None] * VOIGT_IDENTITY
        + dpsi_di2 * v2
        + (tau * dpsi_di4h)[..., None] * v4
        + (tau * dpsi_di5h)[..., None] * v5
    )

    tang = None
    if need_tangent:
        p11 = ht * ct * (2.0 * g * lam * lam + 8.0 * mu * (lam + mu)) + hc * (lam + 2.0 * mu)
        p44 = tau * tau * (
            ht * ct * (8.0 * mu * mu * g + 8.0 * mu * (lam + mu))
            + hc * 4.0 * mu
            - 4.0 * mu * gs
        )
        p14 = tau * ht * ct * 4.0 * lam * mu * (g - 1.0)
        vv = np.outer(VOIGT_IDENTITY, VOIGT_IDENTITY)
        tang = (
            p11[..., None, None] * vv
            + p44[..., None, None] * _outer(v4, v4)
            + p14[..., None, None]
            * (_outer(np.broadcast_to(VOIGT_IDENTITY, v4.shape), v4)
               + _outer(v4, np.broadcast_to(VOIGT_IDENTITY, v4.shape)))
            + dpsi_di2 * I2_TANGENT_MAP
            + (tau * dpsi_di5h)[..., None, None] * sym_product_map(_outer(n, n))
        )

    gp = -2.0 * s
    gsp = shear_degradation_deriv(d, a, b)
    shear_drive = 2.0 * mu * (i5h - i4h * i4h)
    dpsi_dd = ht * ct * gp * beta * beta + gsp * shear_drive

    # Exact gradient of Psi in grad_d: chain through both tau and n.
    dtau = ((1.0 - tau * tau) * mat.alpha_reg * mat.ell**2 * 2.0)[..., None] * grad_d
    safe_r = np.maximum(r, GRAD_TINY)
    dn_dg = (np.eye(3) - _outer(n, n)) / safe_r[..., None, None]
    e2n = np.einsum("...ij,...j->...i", eps, en)
    di4_dg = np.einsum("...ij,...j->...i", dn_dg, 2.0 * en)
    di5_dg = np.einsum("...ij,...j->...i", dn_dg, 2.0 * e2n)
    flux = (
        dpsi_di4h[..., None] * (i4[..., None] * dtau + tau[..., None] * di4_dg)
        + dpsi_di5h[..., None] * (i5[..., None] * dtau + tau[..., None] * di5_dg)
    )
    flux = np.where((r < GRAD_TINY)[..., None], 0.0, flux)

    # Convexity-preserving affine surrogate of dPsi/dd around the input d.
    a_tension = ht * ct * beta * beta
    ppoly = -(2.0 * a * s + b)  # dP/dd
    drive_lin = 2.0 * (a_tension + poly * shear_drive)
    drive_const = -drive_lin + (g_bare - 1.0) * ppoly * shear_drive

    return ModelResponse(
        psi=psi,
        sigma=sig,
        tangent=tang,
        dpsi_dd=dpsi_dd,
        dpsi_dgradd=flux,
        drive_lin=drive_lin,
        drive_const=drive_const,
        flux=flux,
    )


def proposed_energy_parts(eps, d, grad_d, mat: MaterialParams):
    """Return (psi_t, psi_c, psi_s, beta) of the proposed split.

    Exposed for branch-continuity checks; the dispatch combines them as
    ``H(beta) psi_t + (1 - H(beta)) psi_c + psi_s``.
    """
    lam, mu = mat.lam, mat.mu
    a, b = shear_fit_table().coefficients(mat.nu)
    g = degradation(d, mat.k_residual)
    gs = 1.0 + ((1.0 - np.asarray(d)) ** 2 - 1.0) * shear_fit_polynomial(d, a, b)
    n, _ = _normals(grad_d)
    tau = regularization_factor(grad_d, mat.ell, mat.alpha_reg)
    i1, i2, i4, i5 = invariants_raw(eps, n)
    i4h, i5h = tau * i4, tau * i5
    ct = 0.5 / (lam + 2.0 * mu)
    beta = lam * i1 + 2.0 * mu * i4h
    psi_t = ct * (
        g * beta * beta
        + 4.0 * mu * (lam + mu) * (i1 * i1 + i4h * i4h - 2.0 * i2 - 2.0 * i5h)
        + 4.0 * lam * mu * (i2 - i1 * i4h + i5h)
    )
    psi_c = 0.5 * lam * i1 * i1 + mu * (i1 * i1 + 2.0 * i4h * i4h - 2.0 * i2 - 2.0 * i5h)
    psi_s = 2.0 * mu * gs * (i5h - i4h * i4h)
    return psi_t, psi_c, psi_s, beta


# ---------------------------------------------------------------------------
# Energy profiles: psi(d) = const + sum_k coeff_k * fn_k(d)
# ---------------------------------------------------------------------------


def energy_profile(model: ModelKind, eps, grad_d, mat: MaterialParams):
    """Decompose the energy density into d-independent and degraded parts.

    Returns ``(const, parts)`` with ``const`` shaped like the batch and
    ``parts`` a list of ``(kind, coeff)`` where ``kind`` names a scalar
    degradation function ("g", "gs", or "gsk") so that

        psi(eps, d, grad_d) = const + sum coeff * fn_kind(d).

    Lets the FEM integrate the d-dependence with its own quadrature
    (exactly what the phase subproblem minimizes).  SS models have no
    energy and raise :class:`InvalidInputError` via the dispatcher.
    """
    eps = np.asarray(eps, dtype=float)
    lam, mu = mat.lam, mat.mu
    if model is ModelKind.ISOTROPIC:
        psi0 = _psi0(eps, lam, mu)
        return np.zeros_like(psi0), [("g", psi0)]
    if model is ModelKind.VOL_DEV:
        kb = mat.bulk
        i1 = trace(eps)
        ev = voigt_from_sym(eps)
        devv = ev - (i1[..., None] / 3.0) * VOIGT_IDENTITY
        dev_sq = np.sum(devv[..., :3] ** 2, axis=-1) + 2.0 * np.sum(
            devv[..., 3:] ** 2, axis=-1
        )
        psip = 0.5 * kb * np.maximum(i1, 0.0) ** 2 + mu * dev_sq
        psim = 0.5 * kb * np.minimum(i1, 0.0) ** 2
        return psim, [("g", psip)]
    if model is ModelKind.SPECTRAL:
        vals, _ = eig_sym3(eps)
        i1 = trace(eps)
        psip = 0.5 * lam * np.maximum(i1, 0.0) ** 2 + mu * np.sum(
            np.maximum(vals, 0.0) ** 2, axis=-1
        )
        psim = 0.5 * lam * np.minimum(i1, 0.0) ** 2 + mu * np.sum(
            np.minimum(vals, 0.0) ** 2, axis=-1
        )
        return psim, [("g", psip)]
    if model is ModelKind.WU:
        nu = mat.nu
        vals, _ = eig_sym3(eps)
        sb = lam * trace(eps)[..., None] + 2.0 * mu * vals
        s_plus, _ = _wu_positive_parts(sb, nu, nu / (1.0 - nu))
        psip = 0.5 * np.sum(s_plus * vals, axis=-1)
        return _psi0(eps, lam, mu) - psip, [("g", psip)]
    if model is ModelKind.SK:
        lr = lam / (lam + 2.0 * mu)
        vals, _ = eig_sym3(eps)
        i1 = trace(eps)
        beta = lam * i1 + 2.0 * mu * vals[..., 0]
        ht = (beta > 0.0).astype(float)
        psi_plus = 0.5 * ht * beta * (vals[..., 0] + lr * (vals[..., 1] + vals[..., 2]))
        # g(1; b) = 0, so evaluating at d = 1 isolates the persistent part
        broken = sk_response(eps, np.ones(eps.shape[:-2]), mat, need_tangent=False)
        return broken.psi, [("gsk", psi_plus)]
    if model is ModelKind.PROPOSED:
        n, _ = _normals(np.asarray(grad_d, dtype=float))
        tau = regularization_factor(grad_d, mat.ell, mat.alpha_reg)
        i1, i2, i4, i5 = invariants_raw(eps, n)
        i4h, i5h = tau * i4, tau * i5
        ct = 0.5 / (lam + 2.0 * mu)
        beta = lam * i1 + 2.0 * mu * i4h
        ht = (beta > 0.0).astype(float)
        rest_t = ct * (
            4.0 * mu * (lam + mu) * (i1 * i1 + i4h * i4h - 2.0 * i2 - 2.0 * i5h)
            + 4.0 * lam * mu * (i2 - i1 * i4h + i5h)
        )
        psi_c = 0.5 * lam * i1 * i1 + mu * (
            i1 * i1 + 2.0 * i4h * i4h - 2.0 * i2 - 2.0 * i5h
        )
        const = ht * rest_t + (1.0 - ht) * psi_c
        return const, [
            ("g", ht * ct * beta * beta),
            ("gs", 2.0 * mu * (i5h - i4h * i4h)),
        ]
    raise InvalidInputError(f"no energy profile for model {model!r}")


def degradation_of_kind(kind: str, d, mat: MaterialParams):
    """Evaluate the named scalar degradation function (see energy_profile)."""
    if kind == "g":
        return degradation(d, mat.k_residual)
    if kind == "gs":
        a, b = shear_fit_table().coefficients(mat.nu)
        g_bare = (1.0 - np.asarray(d)) ** 2
        return 1.0 + (g_bare - 1.0) * shear_fit_polynomial(d, a, b)
    if kind == "gsk":
        return sk_degradation(d, mat.sk_b)
    raise InvalidInputError(f"unknown degradation kind {kind!r}")


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def respond(
    model: ModelKind,
    eps: np.ndarray,
    d: np.ndarray,
    grad_d: np.ndarray,
    mat: MaterialParams,
    sk_normal=None,
    need_tangent: bool = True,
) -> ModelResponse:
    """Evaluate one model on a batch of points.

    ``eps``: (n, 3, 3); ``d``: (n,); ``grad_d``: (n, 3).  ``sk_normal``
    optionally overrides the SK crack frame (ignored by other models).
    """
    eps = np.asarray(eps, dtype=float)
    d = np.asarray(d, dtype=float)
    grad_d = np.asarray(grad_d, dtype=float)
    if model is ModelKind.ISOTROPIC:
        return isotropic_response(eps, d, mat, need_tangent)
    if model is ModelKind.VOL_DEV:
        return voldev_response(eps, d, mat, need_tangent)
    if model is ModelKind.SPECTRAL:
        return spectral_response(eps, d, mat, need_tangent)
    if model is ModelKind.WU:
        return wu_response(eps, d, mat, need_tangent)
    if model is ModelKind.SS1:
        return ss1_response(eps, d, grad_d, mat, need_tangent)
    if model is ModelKind.SS2:
        return ss2_response(eps, d, grad_d, mat, need_tangent)
    if model is ModelKind.SK:
        return sk_response(eps, d, mat, normal=sk_normal, need_tangent=need_tangent)
    if model is ModelKind.PROPOSED:
        return proposed_response(eps, d, grad_d, mat, need_tangent)
    raise InvalidInputError(f"unknown model {model!r}")
