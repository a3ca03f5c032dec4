"""Throwaway FD smoke check of all kernels (deleted before finishing)."""
import numpy as np
from phasefrac import MaterialParams
from phasefrac.constitutive import ModelKind, respond
from phasefrac.tensor import VOIGT_PAIRS, VOIGT_WEIGHTS, sym_from_voigt, voigt_from_sym

rng = np.random.default_rng(0)
mat = MaterialParams(lam=121.15, mu=80.77, k_residual=1e-6)

def fd_check(model, n=40, seed=1, sk_normal=None):
    rng = np.random.default_rng(seed)
    worst_s, worst_c, worst_psi = 0.0, 0.0, 0.0
    tried = 0
    for _ in range(n):
        v = rng.normal(size=6)
        eps = sym_from_voigt(v)
        d = rng.uniform(0.02, 0.98)
        gd = rng.normal(size=3) * rng.uniform(0.1, 3.0)
        out = respond(model, eps[None], np.array([d]), gd[None], mat, sk_normal=sk_normal)
        sig = out.sigma[0]
        tan = out.tangent[0]
        h = 1e-7 * max(np.abs(v).max(), 1.0)
        # FD of psi -> sigma (variational models only)
        if out.psi is not None:
            fd_sig = np.zeros(6)
            for k in range(6):
                dv = np.zeros(6); dv[k] = h / VOIGT_WEIGHTS[k]
                ep = sym_from_voigt(v + dv); em = sym_from_voigt(v - dv)
                pp = respond(model, ep[None], np.array([d]), gd[None], mat, sk_normal=sk_normal).psi[0]
                pm = respond(model, em[None], np.array([d]), gd[None], mat, sk_normal=sk_normal).psi[0]
                fd_sig[k] = (pp - pm) / (2 * h) / VOIGT_WEIGHTS[k] * VOIGT_WEIGHTS[k]
            # interpretation: dPsi/d(eng strain component k) = sigma_k
            scale = max(np.abs(sig).max(), 1e-12)
            worst_s = max(worst_s, np.abs(fd_sig - sig).max() / scale)
        # FD of sigma -> tangent
        fd_tan = np.zeros((6, 6))
        for k in range(6):
            dv = np.zeros(6); dv[k] = h / VOIGT_WEIGHTS[k]
            ep = sym_from_voigt(v + dv); em = sym_from_voigt(v - dv)
            sp = respond(model, ep[None], np.array([d]), gd[None], mat, sk_normal=sk_normal).sigma[0]
            sm = respond(model, em[None], np.array([d]), gd[None], mat, sk_normal=sk_normal).sigma[0]
            fd_tan[:, k] = (sp - sm) / (2 * h)
        scale = max(np.abs(tan).max(), 1e-12)
        err_c = np.abs(fd_tan - tan).max() / scale
        worst_c = max(worst_c, err_c)
        tried += 1
    return worst_s, worst_c

for model in ModelKind:
    ws, wc = fd_check(model)
    print(f"{model.value:10s}  dPsi/deps vs sigma: {ws:.3e}   dsig/deps vs C: {wc:.3e}")

# proposed: FD of psi wrt grad_d vs flux
def fd_gradd(n=40, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        v = rng.normal(size=6); eps = sym_from_voigt(v)
        d = rng.uniform(0.02, 0.98)
        gd = rng.normal(size=3) * rng.uniform(0.2, 3.0)
        out = respond(ModelKind.PROPOSED, eps[None], np.array([d]), gd[None], mat)
        flux = out.dpsi_dgradd[0]
        h = 1e-7 * max(np.linalg.norm(gd), 1.0)
        fd = np.zeros(3)
        for k in range(3):
            dgp = gd.copy(); dgp[k] += h
            dgm = gd.copy(); dgm[k] -= h
            pp = respond(ModelKind.PROPOSED, eps[None], np.array([d]), dgp[None], mat).psi[0]
            pm = respond(ModelKind.PROPOSED, eps[None], np.array([d]), dgm[None], mat).psi[0]
            fd[k] = (pp - pm) / (2 * h)
        scale = max(np.abs(flux).max(), 1e-10)
        worst = max(worst, np.abs(fd - flux).max() / scale)
    return worst

print("proposed flux vs FD(grad d):", f"{fd_gradd():.3e}")

# dpsi_dd FD
def fd_dd(model, n=40, seed=5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        v = rng.normal(size=6); eps = sym_from_voigt(v)
        d = rng.uniform(0.05, 0.95)
        gd = rng.normal(size=3)
        out = respond(model, eps[None], np.array([d]), gd[None], mat)
        h = 1e-7
        pp = respond(model, eps[None], np.array([d + h]), gd[None], mat).psi[0]
        pm = respond(model, eps[None], np.array([d - h]), gd[None], mat).psi[0]
        fd = (pp - pm) / (2 * h)
        scale = max(abs(out.dpsi_dd[0]), 1e-10)
        worst = max(worst, abs(fd - out.dpsi_dd[0]) / scale)
    return worst

for model in [ModelKind.ISOTROPIC, ModelKind.VOL_DEV, ModelKind.SPECTRAL, ModelKind.WU, ModelKind.SK, ModelKind.PROPOSED]:
    print(f"dpsi_dd FD {model.value:10s}: {fd_dd(model):.3e}")
