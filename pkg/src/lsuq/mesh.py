"""Triangulations of the reference unit disk and their pushforward.

Construction: fan of 6 triangles on the inscribed regular hexagon, then
uniform red refinements (each triangle splits into 4 by edge midpoints) with
radial projection of boundary vertices back to the unit circle.  Topology is
fixed per level, so every parameter sample shares the same connectivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import ResourceError

LEVEL_CAP = 8


@dataclass(frozen=True)
class TriangleMesh:
    vertices: np.ndarray  # (nv, 2)
    triangles: np.ndarray  # (nt, 3) vertex indices, counterclockwise
    boundary_vertices: np.ndarray  # sorted indices
    level: int

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    @property
    def triangle_count(self) -> int:
        return self.triangles.shape[0]

    def corners(self) -> np.ndarray:
        """(nt, 3, 2) corner coordinates."""
        return self.vertices[self.triangles]

    def signed_areas(self) -> np.ndarray:
        c = self.corners()
        return 0.5 * (
            (c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
            - (c[:, 2, 0] - c[:, 0, 0]) * (c[:, 1, 1] - c[:, 0, 1])
        )

    def diameters(self) -> np.ndarray:
        c = self.corners()
        e = np.stack(
            [c[:, 1] - c[:, 0], c[:, 2] - c[:, 1], c[:, 0] - c[:, 2]], axis=1
        )
        return np.sqrt((e**2).sum(axis=2)).max(axis=1)

    def centroids(self) -> np.ndarray:
        return self.corners().mean(axis=1)

    def edge_counts(self) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for a, b, c in self.triangles:
            for u, v in ((a, b), (b, c), (c, a)):
                key = (min(u, v), max(u, v))
                counts[key] = counts.get(key, 0) + 1
        return counts


def _boundary_vertices(triangles: np.ndarray) -> np.ndarray:
    counts: dict[tuple[int, int], int] = {}
    for a, b, c in triangles:
        for u, v in ((a, b), (b, c), (c, a)):
            key = (min(u, v), max(u, v))
            counts[key] = counts.get(key, 0) + 1
    on_boundary = sorted({v for edge, n in counts.items() if n == 1 for v in edge})
    return np.array(on_boundary, dtype=int)


def _refine(vertices: np.ndarray, triangles: np.ndarray):
    verts = list(map(tuple, vertices))
    midpoint: dict[tuple[int, int], int] = {}

    def mid(u: int, v: int) -> int:
        key = (min(u, v), max(u, v))
        idx = midpoint.get(key)
        if idx is None:
            idx = len(verts)
            p = 0.5 * (vertices[u] + vertices[v])
            verts.append((p[0], p[1]))
            midpoint[key] = idx
        return idx

    new_tris = []
    for a, b, c in triangles:
        mab, mbc, mca = mid(a, b), mid(b, c), mid(c, a)
        new_tris.extend([(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)])
    return np.array(verts, dtype=float), np.array(new_tris, dtype=int)


def unit_disk_mesh(level: int) -> TriangleMesh:
    """Quasi-uniform mesh of the unit disk with 6 * 4^level triangles."""
    if level < 0 or level != int(level):
        raise ValueError("level must be a nonnegative integer")
    if level > LEVEL_CAP:
        raise ResourceError(f"refinement level {level} above the cap {LEVEL_CAP}")
    angles = np.arange(6) * (np.pi / 3.0)
    vertices = np.vstack([[0.0, 0.0], np.column_stack([np.cos(angles), np.sin(angles)])])
    triangles = np.array([(0, 1 + k, 1 + (k + 1) % 6) for k in range(6)], dtype=int)
    for _ in range(int(level)):
        vertices, triangles = _refine(vertices, triangles)
        boundary = _boundary_vertices(triangles)
        norms = np.linalg.norm(vertices[boundary], axis=1)
        vertices[boundary] /= norms[:, None]
    boundary = _boundary_vertices(triangles)
    return TriangleMesh(
        vertices=vertices, triangles=triangles, boundary_vertices=boundary, level=int(level)
    )


def mesh_size(mesh: TriangleMesh) -> float:
    """Maximum triangle diameter h."""
    return float(mesh.diameters().max())


def pushforward(
    mesh: TriangleMesh, model: geometry.RadiusModel, y: np.ndarray
) -> TriangleMesh:
    """Apply the domain map vertex-wise; topology and ordering unchanged."""
    geometry.validate_shape(model, y)
    return TriangleMesh(
        vertices=geometry.transform(model, y, mesh.vertices),
        triangles=mesh.triangles,
        boundary_vertices=mesh.boundary_vertices,
        level=mesh.level,
    )


def dump(mesh: TriangleMesh) -> str:
    """Plain-text dump: header, vertex lines `x y`, triangle lines `i j k`."""
    lines = [f"vertices {mesh.vertex_count} triangles {mesh.triangle_count}"]
    lines.extend(f"{x!r} {y!r}" for x, y in mesh.vertices)
    lines.extend(f"{i} {j} {k}" for i, j, k in mesh.triangles)
    return "\n".join(lines) + "\n"


def triangle_adjacency(mesh: TriangleMesh) -> np.ndarray:
    """(nt, 3) neighbor triangle index per edge, -1 on the boundary.

    Entry [t, e] is the triangle sharing the edge opposite to local vertex e.
    """
    owner: dict[tuple[int, int], tuple[int, int]] = {}
    adj = np.full((mesh.triangle_count, 3), -1, dtype=int)
    for t, (a, b, c) in enumerate(mesh.triangles):
        for e, (u, v) in enumerate(((b, c), (c, a), (a, b))):
            key = (min(u, v), max(u, v))
            if key in owner:
                t2, e2 = owner[key]
                adj[t, e] = t2
                adj[t2, e2] = t
            else:
                owner[key] = (t, e)
    return adj
