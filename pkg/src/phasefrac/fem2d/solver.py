"""Plane-strain phase-field solver on linear triangles.

Displacement and phase subproblems are assembled sparsely and solved by
direct factorization; a staggered loop alternates them until the phase
field stabilizes.  The displacement half-step is a Newton loop with an
energy backtracking line search (the split models are only piecewise
linear in strain), the phase half-step is a single linearized solve under
box constraints ``d_prev <= d <= 1`` handled by an active-set method, so
each alternation is a monotone energy update for the quadratic-degradation
models.

Quadrature: one-point for anything built on the element-constant strain,
consistent (3-point) mass for the phase reaction terms.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph
from scipy.sparse.linalg import splu


def _factorize(a_csc):
    return splu(a_csc, permc_spec="MMD_AT_PLUS_A", options=dict(SymmetricMode=True))

from ..constitutive.common import ModelKind, VARIATIONAL_MODELS
from ..constitutive.kernels import degradation_of_kind, energy_profile, respond
from ..errors import SolverError, UnsupportedModelError
from ..materials import MaterialParams
from .mesh import Mesh

log = logging.getLogger("phasefrac.fem2d")

_IN_PLANE = [0, 1, 5]  # Voigt rows 11, 22, 12
_MASS3 = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


@dataclass
class SolverControls:
    """Iteration control for the staggered scheme."""

    tol_stagger: float = 1e-5
    max_stagger: int = 200
    newton_rtol: float = 1e-10
    max_newton: int = 30
    max_line_search: int = 8
    irreversible: bool = True
    track_energy: bool = True


@dataclass
class DofSystem:
    """Free/constrained partition of scalar dofs with prescribed values."""

    constrained: np.ndarray  # bool mask over dofs
    values: np.ndarray       # prescribed values (full-length, zeros on free)

    @property
    def free(self) -> np.ndarray:
        return ~self.constrained


def displacement_bcs(mesh: Mesh, dirichlet: dict) -> DofSystem:
    """Build the displacement dof partition from ``tag -> (ux, uy)``.

    Vector components set to None stay free.
    """
    n_dof = 2 * mesh.n_nodes
    constrained = np.zeros(n_dof, dtype=bool)
    values = np.zeros(n_dof)
    for tag, (ux, uy) in dirichlet.items():
        nodes = mesh.node_sets[tag]
        for comp, val in ((0, ux), (1, uy)):
            if val is None:
                continue
            dofs = 2 * nodes + comp
            constrained[dofs] = True
            values[dofs] = val
    return DofSystem(constrained=constrained, values=values)


@dataclass
class SolutionState:
    """Nodal displacement and phase fields plus the irreversibility base."""

    u: np.ndarray
    d: np.ndarray
    d_prev: np.ndarray

    @classmethod
    def zeros(cls, mesh: Mesh) -> "SolutionState":
        return cls(
            u=np.zeros(2 * mesh.n_nodes),
            d=np.zeros(mesh.n_nodes),
            d_prev=np.zeros(mesh.n_nodes),
        )


@dataclass
class StepReport:
    """Convergence record of one staggered step."""

    iterations: int
    converged: bool
    max_delta_d: float
    energy_trace: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


class PlaneStrainSolver:
    """Assembly and staggered solution driver for one mesh/model/material."""

    def __init__(self, mesh: Mesh, model: ModelKind, mat: MaterialParams,
                 controls: SolverControls | None = None):
        mesh.validate()
        self.mesh = mesh
        self.model = model
        self.mat = mat
        self.controls = controls or SolverControls()
        self._precompute()

    # ------------------------------------------------------------------
    # Geometry precomputation
    # ------------------------------------------------------------------
    def _precompute(self):
        mesh = self.mesh
        tris = mesh.tris
        p = mesh.nodes[tris]  # (M, 3, 2)
        b = np.stack(
            [p[:, 1, 1] - p[:, 2, 1], p[:, 2, 1] - p[:, 0, 1], p[:, 0, 1] - p[:, 1, 1]],
            axis=1,
        )
        c = np.stack(
            [p[:, 2, 0] - p[:, 1, 0], p[:, 0, 0] - p[:, 2, 0], p[:, 1, 0] - p[:, 0, 0]],
            axis=1,
        )
        area = mesh.areas()
        self.area = area
        m = len(tris)
        bm = np.zeros((m, 3, 6))
        bm[:, 0, 0::2] = b
        bm[:, 1, 1::2] = c
        bm[:, 2, 0::2] = c
        bm[:, 2, 1::2] = b
        bm /= 2.0 * area[:, None, None]
        self.bmat = bm
        self.grad = np.stack([b, c], axis=1) / (2.0 * area[:, None, None])  # (M, 2, 3)

        self.dof_ix = np.empty((m, 6), dtype=np.int64)
        self.dof_ix[:, 0::2] = 2 * tris
        self.dof_ix[:, 1::2] = 2 * tris + 1
        self._rows_u = np.repeat(self.dof_ix, 6, axis=1).ravel()
        self._cols_u = np.tile(self.dof_ix, (1, 6)).ravel()
        self._rows_d = np.repeat(tris, 3, axis=1).ravel()
        self._cols_d = np.tile(tris, (1, 3)).ravel()
        self.n_dof_u = 2 * mesh.n_nodes
        # gradient stiffness of the phase problem (constant)
        self._kd_grad = np.einsum("eki,ekj,e->eij", self.grad, self.grad, area)

    # ------------------------------------------------------------------
    # Field evaluations on elements
    # ------------------------------------------------------------------
    def strains(self, u: np.ndarray) -> np.ndarray:
        """Element strain tensors (M, 3, 3) under plane strain."""
        ue = u[self.dof_ix]
        eps2 = np.einsum("eij,ej->ei", self.bmat, ue)  # (exx, eyy, gamma_xy)
        m = len(eps2)
        eps = np.zeros((m, 3, 3))
        eps[:, 0, 0] = eps2[:, 0]
        eps[:, 1, 1] = eps2[:, 1]
        eps[:, 0, 1] = eps[:, 1, 0] = 0.5 * eps2[:, 2]
        return eps

    def grad_d(self, d: np.ndarray) -> np.ndarray:
        """Element phase gradients embedded in 3D (M, 3)."""
        g2 = np.einsum("ekj,ej->ek", self.grad, d[self.mesh.tris])
        return np.concatenate([g2, np.zeros((len(g2), 1))], axis=1)

    def d_centroid(self, d: np.ndarray) -> np.ndarray:
        return d[self.mesh.tris].mean(axis=1)

    def respond(self, u, d, need_tangent=True):
        return respond(
            self.model,
            self.strains(u),
            self.d_centroid(d),
            self.grad_d(d),
            self.mat,
            need_tangent=need_tangent,
        )

    # ------------------------------------------------------------------
    # Displacement subproblem
    # ------------------------------------------------------------------
    def internal_force(self, u, d, response=None) -> np.ndarray:
        resp = response if response is not None else self.respond(u, d, need_tangent=False)
        sig2 = resp.sigma[:, _IN_PLANE]
        fe = np.einsum("eji,ej,e->ei", self.bmat, sig2, self.area)
        f = np.zeros(self.n_dof_u)
        np.add.at(f, self.dof_ix.ravel(), fe.ravel())
        return f

    def assemble_displacement(self, u, d):
        """Tangent stiffness and internal force at the current state."""
        resp = self.respond(u, d, need_tangent=True)
        c2 = resp.tangent[:, _IN_PLANE][:, :, _IN_PLANE]
        ke = np.einsum("eji,ejk,ekl,e->eil", self.bmat, c2, self.bmat, self.area)
        k = sp.coo_matrix(
            (ke.ravel(), (self._rows_u, self._cols_u)),
            shape=(self.n_dof_u, self.n_dof_u),
        ).tocsr()
        return k, self.internal_force(u, d, response=resp)

    def _check_floating(self, free_mask_nodes: np.ndarray):
        """Describe element-connected components made only of free nodes."""
        mesh = self.mesh
        rows, cols = [], []
        for a, bcol in ((0, 1), (1, 2), (2, 0)):
            rows.append(mesh.tris[:, a])
            cols.append(mesh.tris[:, bcol])
        g = sp.coo_matrix(
            (np.ones(3 * mesh.n_elements), (np.concatenate(rows), np.concatenate(cols))),
            shape=(mesh.n_nodes, mesh.n_nodes),
        )
        n_comp, labels = csgraph.connected_components(g, directed=False)
        floating = []
        for comp in range(n_comp):
            nodes = np.where(labels == comp)[0]
            if np.all(free_mask_nodes[nodes]):
                box = (mesh.nodes[nodes].min(axis=0), mesh.nodes[nodes].max(axis=0))
                floating.append((len(nodes), box))
        return floating

    def solve_displacement(self, u, d, dofs: DofSystem):
        """Newton iteration with energy backtracking; returns (u, info)."""
        ctl = self.controls
        u = u.copy()
        u[dofs.constrained] = dofs.values[dofs.constrained]
        free = dofs.free
        has_energy = self.model in VARIATIONAL_MODELS
        ref = None
        prev_norm = np.inf
        warnings = []
        for it in range(ctl.max_newton):
            resp = self.respond(u, d, need_tangent=True)
            f_int = self.internal_force(u, d, response=resp)
            r = f_int[free]
            r_norm = float(np.abs(r).sum())
            # Reference scale: initial imbalance or total reaction magnitude,
            # whichever is larger, so already-equilibrated states pass.
            f_scale = float(np.abs(f_int[dofs.constrained]).sum())
            if ref is None:
                ref = max(r_norm, f_scale, 1e-30)
            tol = ctl.newton_rtol * max(ref, f_scale)
            if r_norm <= tol:
                return u, {"newton_iterations": it, "residual": r_norm, "warnings": warnings}
            if it >= 2 and r_norm >= 0.99 * prev_norm:
                # stagnation at the round-off floor
                if r_norm > 1e-6 * max(ref, f_scale):
                    warnings.append(
                        f"newton stagnated at residual {r_norm:.3e} (scale {ref:.3e})"
                    )
                return u, {"newton_iterations": it, "residual": r_norm, "warnings": warnings}
            prev_norm = r_norm
            c2 = resp.tangent[:, _IN_PLANE][:, :, _IN_PLANE]
            ke = np.einsum("eji,ejk,ekl,e->eil", self.bmat, c2, self.bmat, self.area)
            k = sp.coo_matrix(
                (ke.ravel(), (self._rows_u, self._cols_u)),
                shape=(self.n_dof_u, self.n_dof_u),
            ).tocsr()
            kff = k[free][:, free]
            try:
                lu = _factorize(kff.tocsc())
            except RuntimeError as exc:
                floating = self._check_floating(self._free_nodes_mask(dofs))
                detail = "; ".join(
                    f"{n} nodes in [{lo[0]:g},{hi[0]:g}]x[{lo[1]:g},{hi[1]:g}]"
                    for n, (lo, hi) in floating
                ) or "none detected"
                raise SolverError(
                    "singular displacement system after constraint elimination; "
                    f"floating subdomains: {detail}"
                ) from exc
            du = -lu.solve(r)
            if not np.all(np.isfinite(du)):
                raise SolverError("displacement solve produced non-finite values")
            eta = 1.0
            if has_energy and ctl.max_line_search > 0 and r_norm > 1e-3 * max(ref, f_scale):
                e0 = self._elastic_energy(u, d)
                slope = float(r @ du)
                for _ in range(ctl.max_line_search):
                    u_try = u.copy()
                    u_try[free] += eta * du
                    if self._elastic_energy(u_try, d) <= e0 + 1e-4 * eta * slope + 1e-12 * abs(e0):
                        break
                    eta *= 0.5
                else:
                    eta = 1.0
                    warnings.append(f"newton line search failed at iteration {it}")
            u[free] += eta * du
        warnings.append(f"newton did not converge in {ctl.max_newton} iterations")
        return u, {"newton_iterations": ctl.max_newton, "residual": r_norm, "warnings": warnings}

    def _free_nodes_mask(self, dofs: DofSystem) -> np.ndarray:
        cons = dofs.constrained.reshape(-1, 2)
        return ~(cons[:, 0] | cons[:, 1])

    # ------------------------------------------------------------------
    # Phase-field subproblem
    # ------------------------------------------------------------------
    def assemble_phase_field(self, u, d0):
        """Linearized phase system ``A d = b`` about the iterate ``d0``.

        Weak form: for all test functions q,
        ``int (drive_const + drive_lin d) q + gc (d q / ell + ell grad d . grad q)
        + flux . grad q = 0``
        with the driving data linearized by the constitutive layer and the
        orientation flux treated explicitly.
        """
        if self.model not in VARIATIONAL_MODELS:
            raise UnsupportedModelError(
                f"{self.model.value} is nonvariational: no phase-field evolution equation"
            )
        mat = self.mat
        resp = respond(
            self.model,
            self.strains(u),
            self.d_centroid(d0),
            self.grad_d(d0),
            mat,
            need_tangent=False,
        )
        area = self.area
        # Driving term with one-point quadrature (element-centroid d), the
        # same rule the stress assembly and the energy use, so both halves
        # of the staggered loop descend one discrete functional.  The gc
        # reaction mass stays consistent (3-point) for full rank.
        ones9 = np.full((3, 3), 1.0 / 9.0)
        ae = (
            resp.drive_lin[:, None, None] * ones9 * area[:, None, None]
            + (mat.gc / mat.ell) * _MASS3 * area[:, None, None]
            + mat.gc * mat.ell * self._kd_grad
        )
        a = sp.coo_matrix(
            (ae.ravel(), (self._rows_d, self._cols_d)),
            shape=(self.mesh.n_nodes, self.mesh.n_nodes),
        ).tocsr()
        b = np.zeros(self.mesh.n_nodes)
        be = -(resp.drive_const * area / 3.0)[:, None] * np.ones(3)
        be -= np.einsum("ek,eki,e->ei", resp.flux[:, :2], self.grad, area)
        np.add.at(b, self.mesh.tris.ravel(), be.ravel())
        return a, b

    def solve_phase_field(self, u, d0, lower, dirichlet_nodes, dirichlet_value=1.0):
        """Box-constrained solve of the linearized phase system.

        ``lower`` is the nodal lower bound (irreversibility clamp), the
        upper bound is 1.  An active-set loop turns bound violations into
        temporary Dirichlet constraints until the KKT signs check out.
        """
        a, b = self.assemble_phase_field(u, d0)
        n = self.mesh.n_nodes
        fixed = np.zeros(n, dtype=bool)
        fixed_vals = np.zeros(n)
        if len(dirichlet_nodes):
            fixed[dirichlet_nodes] = True
            fixed_vals[dirichlet_nodes] = dirichlet_value
        lo_active = np.zeros(n, dtype=bool)
        hi_active = np.zeros(n, dtype=bool)
        scale = max(float(np.abs(b).max()), 1e-30)
        warnings = []
        d = d0.copy()
        for sweep in range(50):
            cons = fixed | lo_active | hi_active
            vals = np.where(fixed, fixed_vals, np.where(lo_active, lower, 1.0))
            free = ~cons
            rhs = b[free] - a[free][:, cons] @ vals[cons]
            try:
                sol = _factorize(a[free][:, free].tocsc()).solve(rhs)
            except RuntimeError as exc:
                raise SolverError("singular phase-field system") from exc
            d = np.where(cons, vals, 0.0)
            d[free] = sol
            viol_lo = free & (d < lower - 1e-12)
            viol_hi = free & (d > 1.0 + 1e-12)
            if viol_lo.any() or viol_hi.any():
                lo_active |= viol_lo
                hi_active |= viol_hi
                continue
            # KKT: multipliers must push back into the feasible box
            resid = a @ d - b
            release_lo = lo_active & (resid < -1e-10 * scale)
            release_hi = hi_active & (resid > 1e-10 * scale)
            if release_lo.any() or release_hi.any():
                lo_active &= ~release_lo
                hi_active &= ~release_hi
                continue
            break
        else:
            warnings.append("phase active-set did not settle in 50 sweeps")
        d = np.clip(d, np.minimum(lower, 1.0), 1.0)
        return d, warnings

    # ------------------------------------------------------------------
    # Energy
    # ------------------------------------------------------------------
    def _elastic_energy(self, u, d) -> float:
        return float(self._element_energies(u, d).sum())

    def _element_energies(self, u, d) -> np.ndarray:
        """Per-element strain energy (one-point quadrature, centroid d)."""
        const, parts = energy_profile(self.model, self.strains(u), self.grad_d(d), self.mat)
        dc = self.d_centroid(d)
        total = const.copy()
        for kind, coeff in parts:
            total = total + coeff * degradation_of_kind(kind, dc, self.mat)
        return total * self.area

    def regularization_energy(self, d) -> float:
        mat = self.mat
        de = d[self.mesh.tris]
        d_sq = np.einsum("ei,ij,ej->e", de, _MASS3, de) * self.area
        g2 = self.grad_d(d)
        grad_sq = np.einsum("ek,ek->e", g2, g2) * self.area
        return float(0.5 * mat.gc * (d_sq.sum() / mat.ell + mat.ell * grad_sq.sum()))

    def total_energy(self, u, d) -> float:
        """Regularized functional: strain energy plus crack surface energy."""
        return self._elastic_energy(u, d) + self.regularization_energy(d)

    # ------------------------------------------------------------------
    # Reactions
    # ------------------------------------------------------------------
    def reactions(self, u, d, tag: str) -> np.ndarray:
        f = self.internal_force(u, d)
        nodes = self.mesh.node_sets[tag]
        return np.array([f[2 * nodes].sum(), f[2 * nodes + 1].sum()])

    # ------------------------------------------------------------------
    # Staggered step
    # ------------------------------------------------------------------
    def staggered_step(self, state: SolutionState, dofs: DofSystem,
                       phase_dirichlet=()) -> tuple[SolutionState, StepReport]:
        """Alternate minimization at fixed load until the phase stabilizes."""
        ctl = self.controls
        u = state.u.copy()
        d = state.d.copy()
        d_prev = state.d.copy()
        lower = d_prev if ctl.irreversible else np.zeros_like(d_prev)
        phase_dirichlet = np.asarray(phase_dirichlet, dtype=np.int64)
        trace = []
        warnings = []
        it = 0
        converged = False
        delta = np.inf
        variational = self.model in VARIATIONAL_MODELS
        for it in range(1, ctl.max_stagger + 1):
            u, info = self.solve_displacement(u, d, dofs)
            warnings.extend(info["warnings"])
            if ctl.track_energy and variational:
                trace.append(self.total_energy(u, d))
            d_new, pwarn = self.solve_phase_field(u, d, lower, phase_dirichlet)
            warnings.extend(pwarn)
            delta = float(np.abs(d_new - d).max())
            d = d_new
            if ctl.track_energy and variational:
                trace.append(self.total_energy(u, d))
            if delta < ctl.tol_stagger:
                converged = True
                break
        if not converged:
            warnings.append(
                f"staggered iteration cap {ctl.max_stagger} reached (|dd|={delta:.3e})"
            )
            log.warning("staggered cap reached: |dd|=%.3e", delta)
        # re-equilibrate so reported reactions balance at machine precision
        u, info = self.solve_displacement(u, d, dofs)
        warnings.extend(info["warnings"])
        new_state = SolutionState(u=u, d=d, d_prev=d_prev)
        report = StepReport(
            iterations=it,
            converged=converged,
            max_delta_d=delta,
            energy_trace=trace,
            warnings=warnings,
        )
        return new_state, report
