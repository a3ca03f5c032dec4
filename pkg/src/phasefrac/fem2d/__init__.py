"""Plane-strain finite-element engine for the phase-field problem."""

from .mesh import Mesh, cut_slit, nodes_on_segment, read_mesh, structured_rectangle, tag_nodes, write_mesh
from .program import LoadStep, RunResult, StepRecord, expand_segments, run_load_program
from .solver import (
    DofSystem,
    PlaneStrainSolver,
    SolutionState,
    SolverControls,
    StepReport,
    displacement_bcs,
)
from .vtk import read_vtk, write_vtk

__all__ = [
    "DofSystem",
    "LoadStep",
    "Mesh",
    "PlaneStrainSolver",
    "RunResult",
    "SolutionState",
    "SolverControls",
    "StepRecord",
    "StepReport",
    "cut_slit",
    "displacement_bcs",
    "expand_segments",
    "nodes_on_segment",
    "read_mesh",
    "read_vtk",
    "run_load_program",
    "structured_rectangle",
    "tag_nodes",
    "write_mesh",
    "write_vtk",
]
