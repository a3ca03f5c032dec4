"""Legacy VTK ASCII output (and a reader for the files we write)."""

from __future__ import annotations

import numpy as np

from ..errors import MeshError
from .mesh import Mesh


def write_vtk(path, mesh: Mesh, point_scalars=None, point_vectors=None) -> None:
    """Write an unstructured-grid legacy VTK file.

    ``point_scalars``/``point_vectors`` map field names to arrays of shape
    (n,) and (n, 2 or 3); 2D vectors are padded with a zero z-component.
    """
    point_scalars = point_scalars or {}
    point_vectors = point_vectors or {}
    n, m = mesh.n_nodes, mesh.n_elements
    out = [
        "# vtk DataFile Version 3.0",
        "phasefrac fields",
        "ASCII",
        "DATASET UNSTRUCTURED_GRID",
        f"POINTS {n} double",
    ]
    for x, y in mesh.nodes:
        out.append(f"{x:.17g} {y:.17g} 0")
    out.append(f"CELLS {m} {4 * m}")
    for a, b, c in mesh.tris:
        out.append(f"3 {a} {b} {c}")
    out.append(f"CELL_TYPES {m}")
    out.extend(["5"] * m)
    if point_scalars or point_vectors:
        out.append(f"POINT_DATA {n}")
        for name, vals in point_scalars.items():
            out.append(f"SCALARS {name} double 1")
            out.append("LOOKUP_TABLE default")
            out.extend(f"{v:.17g}" for v in np.asarray(vals, dtype=float))
        for name, vec in point_vectors.items():
            vec = np.asarray(vec, dtype=float)
            if vec.shape[1] == 2:
                vec = np.column_stack([vec, np.zeros(len(vec))])
            out.append(f"VECTORS {name} double")
            out.extend(f"{v[0]:.17g} {v[1]:.17g} {v[2]:.17g}" for v in vec)
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(out) + "\n")


def read_vtk(path):
    """Read back a file produced by :func:`write_vtk`.

    Returns ``(mesh, scalars, vectors)``; only the subset of the legacy
    format that the writer emits is understood.
    """
    with open(path, "r", encoding="ascii") as fh:
        tokens = fh.read().split("\n")
    i = 0

    def next_line():
        nonlocal i
        while i < len(tokens) and not tokens[i].strip():
            i += 1
        if i >= len(tokens):
            raise MeshError(f"{path}: truncated VTK file")
        i += 1
        return tokens[i - 1].strip()

    for _ in range(4):
        next_line()
    header = next_line().split()
    if header[0] != "POINTS":
        raise MeshError(f"{path}: expected POINTS, got {header[0]}")
    n = int(header[1])
    nodes = np.array([[float(x) for x in next_line().split()[:2]] for _ in range(n)])
    header = next_line().split()
    if header[0] != "CELLS":
        raise MeshError(f"{path}: expected CELLS, got {header[0]}")
    m = int(header[1])
    tris = np.array([[int(x) for x in next_line().split()[1:]] for _ in range(m)])
    header = next_line().split()
    if header[0] != "CELL_TYPES":
        raise MeshError(f"{path}: expected CELL_TYPES, got {header[0]}")
    for _ in range(m):
        next_line()
    scalars, vectors = {}, {}
    try:
        header = next_line().split()
    except MeshError:
        header = None
    if header and header[0] == "POINT_DATA":
        while True:
            try:
                header = next_line().split()
            except MeshError:
                break
            if header[0] == "SCALARS":
                name = header[1]
                next_line()  # LOOKUP_TABLE
                scalars[name] = np.array([float(next_line()) for _ in range(n)])
            elif header[0] == "VECTORS":
                name = header[1]
                vectors[name] = np.array(
                    [[float(x) for x in next_line().split()] for _ in range(n)]
                )
            else:
                break
    return Mesh(nodes=nodes, tris=tris), scalars, vectors
