"""Structured P1 triangulations and piecewise-constant conductivities.

Squares and rectangles get a uniform grid of right triangles; disks get a
mapped polar grid with a fan around the center.  Conductivity is assigned
per triangle by centroid membership in the inclusion, so the interface is
resolved to O(h) without conforming meshing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import geometry
from .errors import BudgetError, PositivityError

SIGMA_FLOOR = 1e-6   # conductivities must stay above this


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangulation with cached P1 gradient data.

    vertices (nv, 2); triangles (nt, 3) counterclockwise vertex indices;
    boundary_nodes sorted indices of vertices on the outer boundary;
    h_max the longest edge length actually present.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_nodes: np.ndarray
    h_max: float

    def __post_init__(self):
        if np.any(self.areas <= 0.0):
            raise ValueError("all triangles must be counterclockwise with positive area")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def tri_coords(self) -> np.ndarray:
        return self.vertices[self.triangles]          # (nt, 3, 2)

    @cached_property
    def areas(self) -> np.ndarray:
        c = self.tri_coords
        d1 = c[:, 1] - c[:, 0]
        d2 = c[:, 2] - c[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    @cached_property
    def centroids(self) -> np.ndarray:
        return self.tri_coords.mean(axis=1)

    @cached_property
    def grad_phi(self) -> np.ndarray:
        """(nt, 3, 2) gradients of the three nodal hat functions per triangle."""
        c = self.tri_coords
        out = np.empty((len(self.triangles), 3, 2))
        for k in range(3):
            opp1 = c[:, (k + 1) % 3]
            opp2 = c[:, (k + 2) % 3]
            out[:, k, 0] = opp1[:, 1] - opp2[:, 1]
            out[:, k, 1] = opp2[:, 0] - opp1[:, 0]
        out /= (2.0 * self.areas)[:, None, None]
        return out

    @cached_property
    def interior_nodes(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary_nodes] = False
        return np.nonzero(mask)[0]

    def dump_csv(self, vertex_path, triangle_path) -> None:
        with open(vertex_path, "w", newline="") as fh:
            fh.write("x,y\n")
            for x, y in self.vertices:
                fh.write(f"{float(x)!r},{float(y)!r}\n")
        with open(triangle_path, "w", newline="") as fh:
            fh.write("v0,v1,v2\n")
            for t in self.triangles:
                fh.write(f"{t[0]},{t[1]},{t[2]}\n")


def _boundary_nodes_from_edges(triangles: np.ndarray) -> np.ndarray:
    edges = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    edges = np.sort(edges, axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    return np.unique(uniq[counts == 1])


def generate_mesh(omega, target_h: float, max_vertices: int | None = None) -> Mesh:
    """Triangulate a rectangle/square or a disk with cells of size <= target_h.

    target_h bounds the grid spacing; the longest edge present (the cell
    diagonal) is reported as Mesh.h_max and is what resolution rules such
    as tau * h_max <= 0.2 are checked against.
    """
    if target_h <= 0.0:
        raise ValueError("target_h must be positive")
    if isinstance(omega, geometry.Disk):
        return _disk_mesh(omega, target_h, max_vertices)
    if isinstance(omega, geometry.ConvexPolygon) and _axis_rectangle(omega) is not None:
        x0, x1, y0, y1 = _axis_rectangle(omega)
        return _rect_mesh(x0, x1, y0, y1, target_h, max_vertices)
    raise ValueError("mesh generation supports axis-aligned rectangles and disks")


def _axis_rectangle(poly: geometry.ConvexPolygon):
    v = poly.vertices
    if len(v) != 4:
        return None
    e = np.roll(v, -1, axis=0) - v
    axis_aligned = np.all((np.abs(e[:, 0]) < 1e-14) | (np.abs(e[:, 1]) < 1e-14))
    if not axis_aligned:
        return None
    return float(v[:, 0].min()), float(v[:, 0].max()), float(v[:, 1].min()), float(v[:, 1].max())


def _rect_mesh(x0, x1, y0, y1, target_h, max_vertices) -> Mesh:
    nx = max(1, int(math.ceil((x1 - x0) / target_h - 1e-12)))
    ny = max(1, int(math.ceil((y1 - y0) / target_h - 1e-12)))
    nv = (nx + 1) * (ny + 1)
    if max_vertices is not None and nv > max_vertices:
        raise BudgetError(f"rectangle mesh needs {nv} vertices, budget is {max_vertices}")
    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    vertices = np.column_stack((X.ravel(), Y.ravel()))

    def vid(i, j):
        return i * (ny + 1) + j

    I, J = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    I = I.ravel()
    J = J.ravel()
    v00 = vid(I, J)
    v10 = vid(I + 1, J)
    v01 = vid(I, J + 1)
    v11 = vid(I + 1, J + 1)
    tri = np.concatenate(
        [np.column_stack((v00, v10, v11)), np.column_stack((v00, v11, v01))]
    )
    hx = (x1 - x0) / nx
    hy = (y1 - y0) / ny
    return Mesh(
        vertices=vertices,
        triangles=tri,
        boundary_nodes=_boundary_nodes_from_edges(tri),
        h_max=math.hypot(hx, hy),
    )


def _disk_mesh(disk: geometry.Disk, target_h, max_vertices) -> Mesh:
    r = disk.radius
    cx, cy = disk.center
    n_r = max(2, int(math.ceil(r / target_h)))
    n_t = max(8, int(math.ceil(2.0 * math.pi * r / target_h)))
    nv = 1 + n_r * n_t
    if max_vertices is not None and nv > max_vertices:
        raise BudgetError(f"disk mesh needs {nv} vertices, budget is {max_vertices}")
    verts = [np.array([[cx, cy]])]
    thetas = 2.0 * math.pi * np.arange(n_t) / n_t
    for i in range(1, n_r + 1):
        ri = r * i / n_r
        verts.append(np.column_stack((cx + ri * np.cos(thetas), cy + ri * np.sin(thetas))))
    vertices = np.concatenate(verts)

    def ring(i, j):
        return 1 + (i - 1) * n_t + (j % n_t)

    tris = []
    for j in range(n_t):
        tris.append((0, ring(1, j), ring(1, j + 1)))
    for i in range(1, n_r):
        for j in range(n_t):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            tris.append((a, c, d))
            tris.append((a, d, b))
    tri = np.array(tris, dtype=int)
    edges = np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]])
    lengths = np.linalg.norm(vertices[edges[:, 0]] - vertices[edges[:, 1]], axis=1)
    return Mesh(
        vertices=vertices,
        triangles=tri,
        boundary_nodes=_boundary_nodes_from_edges(tri),
        h_max=float(lengths.max()),
    )


@dataclass(frozen=True, eq=False)
class ConductivityField:
    """Per-triangle conductivity sigma = background + contrast on the inclusion."""

    values: np.ndarray
    background: float = 1.0
    contrast: float = 0.0

    def __post_init__(self):
        if np.any(self.values < SIGMA_FLOOR):
            raise PositivityError(
                f"conductivity must stay above {SIGMA_FLOOR}; min is {self.values.min()}"
            )


def background_field(mesh: Mesh) -> ConductivityField:
    return ConductivityField(values=np.ones(len(mesh.triangles)))


def assign_conductivity(mesh: Mesh, inclusion, sigma_d: float) -> ConductivityField:
    """Tag triangles whose centroid lies in the inclusion with 1 + sigma_d.

    inclusion may be None (no inclusion; the background field is returned).
    Raises PositivityError when 1 + sigma_d falls below the positivity
    floor (contrasts below -1 are never admissible).
    """
    if inclusion is None:
        return background_field(mesh)
    if 1.0 + sigma_d <= SIGMA_FLOOR:
        raise PositivityError(
            f"contrast {sigma_d} drives the conductivity below the floor {SIGMA_FLOOR}"
        )
    inside = geometry.contains(inclusion, mesh.centroids)
    values = np.where(inside, 1.0 + sigma_d, 1.0)
    return ConductivityField(values=values, background=1.0, contrast=sigma_d)


def p1_gradient(mesh: Mesh, field: np.ndarray) -> np.ndarray:
    """Constant per-triangle gradient of a nodal P1 field, shape (nt, 2)."""
    field = np.asarray(field, dtype=float)
    if field.shape != (mesh.n_vertices,):
        raise ValueError("field must hold one value per mesh vertex")
    return np.einsum("tkd,tk->td", mesh.grad_phi, field[mesh.triangles])


def interpolate(mesh: Mesh, fn) -> np.ndarray:
    """Nodal values of a function of position (vectorized over points)."""
    return np.asarray(fn(mesh.vertices), dtype=float)
