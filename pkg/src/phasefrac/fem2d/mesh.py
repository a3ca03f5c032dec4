"""Triangle meshes: structured generators, slit surgery, plain-text I/O.

Node ids are 0-based.  Structured meshes split each grid cell into two
triangles with alternating diagonals (checkerboard) to avoid a preferred
crack direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import MeshError


@dataclass
class Mesh:
    """Plane triangulation with named node and edge sets.

    Attributes
    ----------
    nodes : (n, 2) float array of coordinates (mm).
    tris : (m, 3) int array of connectivity, positively oriented.
    node_sets : name -> 1D int array.
    edge_sets : name -> (k, 2) int array of boundary edges.
    """

    nodes: np.ndarray
    tris: np.ndarray
    node_sets: dict = field(default_factory=dict)
    edge_sets: dict = field(default_factory=dict)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_elements(self) -> int:
        return len(self.tris)

    def areas(self) -> np.ndarray:
        p = self.nodes[self.tris]
        return 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 2, 0] - p[:, 0, 0]) * (p[:, 1, 1] - p[:, 0, 1])
        )

    def validate(self) -> None:
        """Raise :class:`MeshError` on inverted elements or dangling tags."""
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 2:
            raise MeshError("nodes must be an (n, 2) array")
        if self.tris.ndim != 2 or self.tris.shape[1] != 3:
            raise MeshError("tris must be an (m, 3) array")
        if self.tris.min(initial=0) < 0 or self.tris.max(initial=-1) >= self.n_nodes:
            raise MeshError("element connectivity references invalid node ids")
        areas = self.areas()
        if np.any(areas <= 0.0):
            bad = int(np.argmax(areas <= 0.0))
            raise MeshError(f"element {bad} is not positively oriented (area {areas[bad]:g})")
        for name, ids in self.node_sets.items():
            ids = np.asarray(ids)
            if ids.size and (ids.min() < 0 or ids.max() >= self.n_nodes):
                raise MeshError(f"node set {name!r} references invalid node ids")
        for name, edges in self.edge_sets.items():
            edges = np.asarray(edges)
            if edges.size and (edges.min() < 0 or edges.max() >= self.n_nodes):
                raise MeshError(f"edge set {name!r} references invalid node ids")


def _grid_coords(length: float, divisions: int) -> np.ndarray:
    return np.linspace(0.0, length, divisions + 1)


def structured_rectangle(
    width: float,
    height: float,
    nx: int,
    ny: int,
    x_coords=None,
    y_coords=None,
) -> Mesh:
    """Structured triangulation of ``[0, width] x [0, height]``.

    ``x_coords``/``y_coords`` override the uniform grid lines (must start
    at 0 and end at the side length).  Boundary node sets are tagged
    ``left``, ``right``, ``bottom``, ``top``; matching edge sets carry the
    same names.
    """
    xs = np.asarray(x_coords, dtype=float) if x_coords is not None else _grid_coords(width, nx)
    ys = np.asarray(y_coords, dtype=float) if y_coords is not None else _grid_coords(height, ny)
    nx, ny = len(xs) - 1, len(ys) - 1
    xx, yy = np.meshgrid(xs, ys)
    nodes = np.column_stack([xx.ravel(), yy.ravel()])

    def nid(i, j):
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b = nid(i, j), nid(i + 1, j)
            c, d = nid(i + 1, j + 1), nid(i, j + 1)
            if (i + j) % 2 == 0:
                tris.append((a, b, c))
                tris.append((a, c, d))
            else:
                tris.append((a, b, d))
                tris.append((b, c, d))
    tris = np.asarray(tris, dtype=np.int64)

    iy = np.arange(ny + 1)
    ix = np.arange(nx + 1)
    node_sets = {
        "bottom": np.array([nid(i, 0) for i in ix]),
        "top": np.array([nid(i, ny) for i in ix]),
        "left": np.array([nid(0, j) for j in iy]),
        "right": np.array([nid(nx, j) for j in iy]),
    }
    edge_sets = {
        "bottom": np.array([[nid(i, 0), nid(i + 1, 0)] for i in range(nx)]),
        "top": np.array([[nid(i, ny), nid(i + 1, ny)] for i in range(nx)]),
        "left": np.array([[nid(0, j), nid(0, j + 1)] for j in range(ny)]),
        "right": np.array([[nid(nx, j), nid(nx, j + 1)] for j in range(ny)]),
    }
    mesh = Mesh(nodes=nodes, tris=tris, node_sets=node_sets, edge_sets=edge_sets)
    mesh.validate()
    return mesh


def nodes_on_segment(mesh: Mesh, p0, p1, tol: float = 1e-9) -> np.ndarray:
    """Ids of nodes lying on the segment from ``p0`` to ``p1``."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    d = p1 - p0
    length = np.linalg.norm(d)
    if length == 0.0:
        return np.where(np.linalg.norm(mesh.nodes - p0, axis=1) <= tol)[0]
    t = (mesh.nodes - p0) @ d / length**2
    proj = p0 + np.clip(t, 0.0, 1.0)[:, None] * d
    dist = np.linalg.norm(mesh.nodes - proj, axis=1)
    return np.where(dist <= tol)[0]


def tag_nodes(mesh: Mesh, name: str, ids: np.ndarray) -> None:
    mesh.node_sets[name] = np.asarray(sorted(set(int(i) for i in ids)), dtype=np.int64)


def cut_slit(mesh: Mesh, p0, p1, tol: float = 1e-9) -> Mesh:
    """Open a zero-width slit along the segment ``p0 -> p1``.

    Nodes strictly inside the segment (the endpoint at ``p1`` is kept as
    the shared crack tip; ``p0`` is duplicated, so a slit reaching the
    boundary opens there) are duplicated.  Elements on the positive side of
    the segment normal are remapped to the duplicates.  Node sets that
    contained a duplicated node also receive the duplicate.
    """
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    axis = p1 - p0
    length = np.linalg.norm(axis)
    if length == 0.0:
        raise MeshError("slit endpoints coincide")
    axis = axis / length
    normal = np.array([-axis[1], axis[0]])

    on_line = nodes_on_segment(mesh, p0, p1, tol)
    t = (mesh.nodes[on_line] - p0) @ axis
    to_split = on_line[t < length - tol]  # exclude the tip at p1
    if len(to_split) == 0:
        raise MeshError("slit does not pass through any mesh nodes")

    n_old = mesh.n_nodes
    new_ids = {int(nid): n_old + k for k, nid in enumerate(to_split)}
    nodes = np.vstack([mesh.nodes, mesh.nodes[to_split]])

    centroids = mesh.nodes[mesh.tris].mean(axis=1)
    side = (centroids - p0) @ normal
    tris = mesh.tris.copy()
    remap_rows = np.where(side > 0.0)[0]
    for r in remap_rows:
        for c in range(3):
            nid = int(tris[r, c])
            if nid in new_ids:
                tris[r, c] = new_ids[nid]

    node_sets = {}
    for name, ids in mesh.node_sets.items():
        ids = list(int(i) for i in ids)
        ids += [new_ids[i] for i in ids if i in new_ids]
        node_sets[name] = np.asarray(sorted(set(ids)), dtype=np.int64)
    edge_sets = {name: e.copy() for name, e in mesh.edge_sets.items()}

    out = Mesh(nodes=nodes, tris=tris, node_sets=node_sets, edge_sets=edge_sets)
    out.validate()
    return out


# ---------------------------------------------------------------------------
# Plain-text mesh format
# ---------------------------------------------------------------------------


def write_mesh(mesh: Mesh, path) -> None:
    """Write the plain-text node/element format (0-based ids)."""
    lines = [f"nodes {mesh.n_nodes}"]
    for i, (x, y) in enumerate(mesh.nodes):
        lines.append(f"{i} {x!r} {y!r}")
    lines.append(f"elements {mesh.n_elements}")
    for i, (a, b, c) in enumerate(mesh.tris):
        lines.append(f"{i} {a} {b} {c}")
    for name, ids in mesh.node_sets.items():
        lines.append(f"nodeset {name} {len(ids)}")
        lines.append(" ".join(str(int(i)) for i in ids))
    for name, edges in mesh.edge_sets.items():
        lines.append(f"edgeset {name} {len(edges)}")
        for a, b in edges:
            lines.append(f"{a} {b}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path) -> Mesh:
    """Parse the plain-text format written by :func:`write_mesh`."""
    with open(path, "r", encoding="ascii") as fh:
        raw = [ln.strip() for ln in fh]
    lines = [(k + 1, ln) for k, ln in enumerate(raw) if ln and not ln.startswith("#")]
    pos = 0

    def fail(lineno, msg):
        raise MeshError(f"{path}:{lineno}: {msg}")

    def expect(keyword):
        nonlocal pos
        if pos >= len(lines):
            raise MeshError(f"{path}: unexpected end of file, expected {keyword!r}")
        lineno, ln = lines[pos]
        parts = ln.split()
        if parts[0] != keyword:
            fail(lineno, f"expected {keyword!r}, got {parts[0]!r}")
        pos += 1
        return lineno, parts[1:]

    _, args = expect("nodes")
    n_nodes = int(args[0])
    nodes = np.zeros((n_nodes, 2))
    for _ in range(n_nodes):
        lineno, ln = lines[pos]
        pos += 1
        parts = ln.split()
        if len(parts) != 3:
            fail(lineno, "node lines are 'id x y'")
        nodes[int(parts[0])] = (float(parts[1]), float(parts[2]))

    _, args = expect("elements")
    n_el = int(args[0])
    tris = np.zeros((n_el, 3), dtype=np.int64)
    for _ in range(n_el):
        lineno, ln = lines[pos]
        pos += 1
        parts = ln.split()
        if len(parts) != 4:
            fail(lineno, "element lines are 'id n1 n2 n3'")
        tris[int(parts[0])] = [int(parts[1]), int(parts[2]), int(parts[3])]

    node_sets, edge_sets = {}, {}
    while pos < len(lines):
        lineno, ln = lines[pos]
        parts = ln.split()
        if parts[0] == "nodeset":
            pos += 1
            count = int(parts[2])
            _, ids_line = lines[pos]
            pos += 1
            ids = np.array([int(x) for x in ids_line.split()], dtype=np.int64)
            if len(ids) != count:
                fail(lineno, f"nodeset {parts[1]!r} declares {count} ids, found {len(ids)}")
            node_sets[parts[1]] = ids
        elif parts[0] == "edgeset":
            pos += 1
            count = int(parts[2])
            edges = np.zeros((count, 2), dtype=np.int64)
            for k in range(count):
                _, e_line = lines[pos]
                pos += 1
                a, b = e_line.split()
                edges[k] = (int(a), int(b))
            edge_sets[parts[1]] = edges
        else:
            fail(lineno, f"unknown section {parts[0]!r}")

    mesh = Mesh(nodes=nodes, tris=tris, node_sets=node_sets, edge_sets=edge_sets)
    mesh.validate()
    return mesh
