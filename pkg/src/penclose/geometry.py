"""Exact test shapes, support functions, and convex-hull assembly.

Shapes are restricted to disks, strictly convex counterclockwise polygons,
and disjoint unions of those, so every support value used as a test oracle
is exact and reconstruction error can be pinned on the PDE pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyIntersectionError, ResolutionError, UnboundedRegionError

_ANGLE_MERGE_TOL = 1e-9   # nearly parallel supporting lines are merged
_FEAS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Disk:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        if self.radius <= 0.0:
            raise ValueError("disk radius must be positive")


@dataclass(frozen=True, eq=False)
class ConvexPolygon:
    """Strictly convex polygon, vertices counterclockwise."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("polygon needs at least 3 planar vertices")
        object.__setattr__(self, "vertices", v)
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        scale = np.abs(e).max()
        if np.any(cross <= 1e-12 * scale * scale):
            raise ValueError("vertices must be strictly convex and counterclockwise")


@dataclass(frozen=True, eq=False)
class ShapeUnion:
    members: tuple

    def __post_init__(self):
        if len(self.members) < 1:
            raise ValueError("union needs at least one member")
        for i in range(len(self.members)):
            for j in range(i + 1, len(self.members)):
                if not _separated(self.members[i], self.members[j]):
                    raise ValueError(f"union members {i} and {j} are not disjoint")


Shape = Disk | ConvexPolygon | ShapeUnion


def square(center=(0.0, 0.0), side: float = 1.0) -> ConvexPolygon:
    """Axis-aligned square as a convex polygon."""
    cx, cy = center
    s = 0.5 * side
    return ConvexPolygon(np.array([
        [cx - s, cy - s], [cx + s, cy - s], [cx + s, cy + s], [cx - s, cy + s],
    ]))


def _poly_point_distance(poly: ConvexPolygon, pt) -> float:
    """Distance from a point to the (filled) polygon; 0 inside."""
    if bool(contains(poly, pt)) or _on_boundary(poly, pt):
        return 0.0
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    return float(min(_point_segment_distance(pt, v[i], w[i]) for i in range(len(v))))


def _on_boundary(poly: ConvexPolygon, pt, tol=1e-12) -> bool:
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    return any(_point_segment_distance(pt, v[i], w[i]) <= tol for i in range(len(v)))


def _point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(z, dtype=float) for z in (p, a, b))
    d = b - a
    t = float(np.dot(p - a, d) / np.dot(d, d))
    t = min(1.0, max(0.0, t))
    return float(np.hypot(*(p - (a + t * d))))


def _separated(s1, s2) -> bool:
    """Pairwise separation test (positive gap) between two shapes."""
    if isinstance(s1, ShapeUnion):
        return all(_separated(m, s2) for m in s1.members)
    if isinstance(s2, ShapeUnion):
        return all(_separated(s1, m) for m in s2.members)
    if isinstance(s1, Disk) and isinstance(s2, Disk):
        gap = math.hypot(s1.center[0] - s2.center[0], s1.center[1] - s2.center[1])
        return gap > s1.radius + s2.radius
    if isinstance(s1, Disk) and isinstance(s2, ConvexPolygon):
        return _poly_point_distance(s2, s1.center) > s1.radius
    if isinstance(s1, ConvexPolygon) and isinstance(s2, Disk):
        return _separated(s2, s1)
    # polygon vs polygon: separating axis over both edge-normal sets
    for poly in (s1, s2):
        v = poly.vertices
        e = np.roll(v, -1, axis=0) - v
        for nrm in np.column_stack((e[:, 1], -e[:, 0])):
            if (s2.vertices @ nrm).min() > (s1.vertices @ nrm).max():
                return True
            if (s1.vertices @ nrm).min() > (s2.vertices @ nrm).max():
                return True
    return False


def _check_unit(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if abs(float(np.hypot(rho[0], rho[1])) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    return rho


def support_function(shape: Shape, rho) -> float:
    """Exact supremum of x . rho over the shape."""
    rho = _check_unit(rho)
    if isinstance(shape, Disk):
        return float(np.dot(shape.center, rho) + shape.radius)
    if isinstance(shape, ConvexPolygon):
        return float((shape.vertices @ rho).max())
    return max(support_function(m, rho) for m in shape.members)


def contains(shape: Shape, x):
    """Membership in the open shape; x may be one point or an (N, 2) batch."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if isinstance(shape, Disk):
        d2 = (pts[:, 0] - shape.center[0]) ** 2 + (pts[:, 1] - shape.center[1]) ** 2
        res = d2 < shape.radius ** 2
    elif isinstance(shape, ConvexPolygon):
        v = shape.vertices
        e = np.roll(v, -1, axis=0) - v
        # (x - v_i) x e_i > 0 for all edges of a ccw polygon
        cross = e[None, :, 0] * (pts[:, None, 1] - v[None, :, 1]) - e[None, :, 1] * (
            pts[:, None, 0] - v[None, :, 0]
        )
        res = np.all(cross > 0.0, axis=1)
    else:
        res = np.zeros(len(pts), dtype=bool)
        for m in shape.members:
            res |= contains(m, pts)
    return bool(res[0]) if single else res


def bounding_box(shape: Shape) -> tuple[float, float, float, float]:
    if isinstance(shape, Disk):
        cx, cy = shape.center
        r = shape.radius
        return cx - r, cx + r, cy - r, cy + r
    if isinstance(shape, ConvexPolygon):
        v = shape.vertices
        return float(v[:, 0].min()), float(v[:, 0].max()), float(v[:, 1].min()), float(v[:, 1].max())
    boxes = [bounding_box(m) for m in shape.members]
    return (
        min(b[0] for b in boxes),
        max(b[1] for b in boxes),
        min(b[2] for b in boxes),
        max(b[3] for b in boxes),
    )


def area(shape: Shape) -> float:
    if isinstance(shape, Disk):
        return math.pi * shape.radius ** 2
    if isinstance(shape, ConvexPolygon):
        v = shape.vertices
        w = np.roll(v, -1, axis=0)
        return 0.5 * float(np.sum(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]))
    return sum(area(m) for m in shape.members)


def penetration_integral(D: Shape, rho, tau: float, p: float, cell: float) -> float:
    """Midpoint-rule integral of exp(-p tau (h_D(rho) - x . rho)) over D.

    The weight equals 1 on the supporting line x . rho = h_D(rho) and decays
    into the shape with e-folding width 1/(p tau); the cell size must
    resolve that width (p * tau * cell <= 0.2).
    """
    rho = _check_unit(rho)
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    if p * tau * cell > 0.2 * (1.0 + 1e-9):
        raise ResolutionError(
            f"cell {cell} does not resolve the e-folding width 1/(p tau) = {1.0 / (p * tau):.3g}"
        )
    x0, x1, y0, y1 = bounding_box(D)
    nx = max(1, int(math.ceil((x1 - x0) / cell)))
    ny = max(1, int(math.ceil((y1 - y0) / cell)))
    hx = (x1 - x0) / nx
    hy = (y1 - y0) / ny
    xs = x0 + hx * (np.arange(nx) + 0.5)
    ys = y0 + hy * (np.arange(ny) + 0.5)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack((X.ravel(), Y.ravel()))
    mask = contains(D, pts)
    h_d = support_function(D, rho)
    vals = np.exp(-p * tau * (h_d - pts[mask] @ rho))
    return float(vals.sum() * hx * hy)


@dataclass(frozen=True)
class SupportEstimate:
    """Estimated support value in one direction, with the fit residual."""

    rho: tuple[float, float]
    h_hat: float
    slope_fit_residual: float

    def __post_init__(self):
        if self.slope_fit_residual < 0.0:
            raise ValueError("fit residual cannot be negative")


@dataclass(frozen=True, eq=False)
class HullResult:
    """Convex polygon recovered from half-space data."""

    vertices: np.ndarray
    directions_used: np.ndarray


def halfspace_intersection(estimates) -> HullResult:
    """Vertices of the intersection of half-planes {x . rho <= h_hat}.

    Candidate vertices are the pairwise intersections of supporting lines;
    the ones satisfying every half-plane constraint are exactly the corner
    set of the feasible region, which is returned in counterclockwise
    order.  Nearly parallel line pairs (angular gap < 1e-9 rad) are not
    intersected against each other.
    """
    rhos = np.array([_check_unit(e.rho) for e in estimates], dtype=float)
    hs = np.array([float(e.h_hat) for e in estimates])
    if len(rhos) < 3:
        raise UnboundedRegionError("need at least 3 directions to bound a region")

    angles = np.arctan2(rhos[:, 1], rhos[:, 0])
    order = np.argsort(angles)
    sorted_angles = angles[order]
    gaps = np.diff(np.concatenate((sorted_angles, [sorted_angles[0] + 2.0 * math.pi])))
    if gaps.max() >= math.pi - 1e-12:
        raise UnboundedRegionError("directions do not positively span the plane")

    feas_tol = _FEAS_TOL * max(1.0, float(np.abs(hs).max()))
    candidates = []
    m = len(rhos)
    for i in range(m):
        for j in range(i + 1, m):
            cross = rhos[i, 0] * rhos[j, 1] - rhos[i, 1] * rhos[j, 0]
            if abs(cross) < _ANGLE_MERGE_TOL:
                continue
            x = (hs[i] * rhos[j, 1] - hs[j] * rhos[i, 1]) / cross
            y = (rhos[i, 0] * hs[j] - rhos[j, 0] * hs[i]) / cross
            if np.all(rhos @ np.array([x, y]) <= hs + feas_tol):
                candidates.append((x, y))
    if not candidates:
        raise EmptyIntersectionError("half-plane constraints are inconsistent")

    pts = np.array(candidates)
    verts = _convex_hull_ccw(pts)
    if len(verts) < 3:
        raise EmptyIntersectionError("feasible region has no interior")
    return HullResult(vertices=verts, directions_used=rhos)


def _convex_hull_ccw(pts: np.ndarray) -> np.ndarray:
    """Monotone-chain hull, counterclockwise, duplicates removed."""
    scale = max(1.0, float(np.abs(pts).max()))
    keyed = {}
    for q in pts:
        keyed[(round(q[0] / scale, 11), round(q[1] / scale, 11))] = (q[0], q[1])
    pp = sorted(keyed.values())
    if len(pp) <= 2:
        return np.array(pp)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    eps = 1e-12 * scale * scale
    lower = []
    for q in pp:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= eps:
            lower.pop()
        lower.append(q)
    upper = []
    for q in reversed(pp):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= eps:
            upper.pop()
        upper.append(q)
    return np.array(lower[:-1] + upper[:-1])


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two filled convex polygons.

    Accepts ConvexPolygon, HullResult, or plain (N, 2) vertex arrays.  The
    supremum over a convex set of the distance to another convex set is
    attained at a vertex, so vertex-to-body distances both ways suffice.
    """
    va = _as_vertices(a)
    vb = _as_vertices(b)
    return max(_directed_hausdorff(va, vb), _directed_hausdorff(vb, va))


def _as_vertices(obj) -> np.ndarray:
    if isinstance(obj, ConvexPolygon):
        return obj.vertices
    if isinstance(obj, HullResult):
        return obj.vertices
    v = np.asarray(obj, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
        raise ValueError("expected a convex polygon with at least 3 vertices")
    return v


def _directed_hausdorff(va: np.ndarray, vb: np.ndarray) -> float:
    poly_b = ConvexPolygon(vb) if _is_strictly_convex(vb) else None
    worst = 0.0
    wb = np.roll(vb, -1, axis=0)
    for v in va:
        if poly_b is not None and bool(contains(poly_b, v)):
            continue
        d = min(_point_segment_distance(v, vb[i], wb[i]) for i in range(len(vb)))
        worst = max(worst, d)
    return worst


def _is_strictly_convex(v: np.ndarray) -> bool:
    e = np.roll(v, -1, axis=0) - v
    cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
    scale = np.abs(e).max()
    return bool(np.all(cross > 1e-12 * scale * scale))
