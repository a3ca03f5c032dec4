"""Load-program execution: stepping, history records, field snapshots."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SolverError
from .mesh import Mesh
from .solver import PlaneStrainSolver, SolutionState, displacement_bcs

#: 3-tuple alias: per-tag Dirichlet values; None leaves the component free.


@dataclass(frozen=True)
class LoadStep:
    """One load level: a scalar label and per-tag Dirichlet vectors."""

    value: float
    dirichlet: dict  # tag -> (ux | None, uy | None)


@dataclass
class StepRecord:
    step: int
    value: float
    reaction: np.ndarray  # (2,) on the reaction tag
    max_d: float
    iterations: int
    converged: bool
    warnings: list
    energy_trace: list


@dataclass
class RunResult:
    """Full history of a load program."""

    steps: list = field(default_factory=list)      # list[StepRecord]
    d_fields: list = field(default_factory=list)   # nodal d per recorded step
    u_fields: list = field(default_factory=list)   # nodal u per recorded step
    d_initial: np.ndarray | None = None            # relaxed zero-load phase field
    state: SolutionState | None = None

    def max_growth(self) -> float:
        """Largest nodal phase increase over the relaxed initial field."""
        if self.d_initial is None or not self.d_fields:
            return 0.0
        return float(max((d - self.d_initial).max() for d in self.d_fields))

    def reactions(self) -> np.ndarray:
        return np.array([rec.reaction for rec in self.steps])

    def values(self) -> np.ndarray:
        return np.array([rec.value for rec in self.steps])


def run_load_program(
    solver: PlaneStrainSolver,
    program: list,
    reaction_tag: str,
    phase_dirichlet=(),
    keep_fields: bool = True,
    step_callback=None,
) -> RunResult:
    """Execute a list of :class:`LoadStep` with a zero-load relaxation first.

    Step 0 solves at zero boundary displacement so an initial phase-
    Dirichlet crack relaxes to its equilibrium profile; growth metrics are
    measured against that state.  ``step_callback(step_index, solver,
    state, record)`` runs after every step (snapshot hooks).  Solver errors
    are re-raised with the step index attached.
    """
    mesh: Mesh = solver.mesh
    state = SolutionState.zeros(mesh)
    phase_dirichlet = np.asarray(phase_dirichlet, dtype=np.int64)
    if len(phase_dirichlet):
        state.d[phase_dirichlet] = 1.0  # seed so step 0 relaxes the crack profile
        state.d_prev[phase_dirichlet] = 1.0
    result = RunResult()

    zero = {tag: tuple(0.0 if v is not None else None for v in vec)
            for tag, vec in (program[0].dirichlet.items() if program else ())}
    steps = [LoadStep(value=0.0, dirichlet=zero)] + list(program)

    for k, step in enumerate(steps):
        dofs = displacement_bcs(mesh, step.dirichlet)
        try:
            state, report = solver.staggered_step(state, dofs, phase_dirichlet)
        except SolverError as exc:
            raise SolverError(f"step {k} (load {step.value:g}): {exc}") from exc
        reaction = solver.reactions(state.u, state.d, reaction_tag)
        record = StepRecord(
            step=k,
            value=step.value,
            reaction=reaction,
            max_d=float(state.d.max()) if len(state.d) else 0.0,
            iterations=report.iterations,
            converged=report.converged,
            warnings=report.warnings,
            energy_trace=report.energy_trace,
        )
        result.steps.append(record)
        if keep_fields:
            result.d_fields.append(state.d.copy())
            result.u_fields.append(state.u.copy())
        if k == 0:
            result.d_initial = state.d.copy()
        if step_callback is not None:
            step_callback(k, solver, state, record)
    result.state = state
    return result


def expand_segments(segments) -> list[float]:
    """Turn ``[(end, increment), ...]`` into the ordered load values.

    Segments are contiguous: each starts where the previous one ended
    (the first at 0) and marches by its increment up to its end value.
    """
    values = []
    current = 0.0
    for end, du in segments:
        if du <= 0.0:
            raise ValueError("load increments must be positive")
        while current < end - 1e-12:
            current = min(current + du, end)
            values.append(current)
    return values
