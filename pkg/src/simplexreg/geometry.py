"""Design meshes, Voronoi partitions of the 2-simplex, and uniform sampling.

The fixed design used throughout the simulation study is a triangular mesh of
``n = k(k+1)/2`` points strictly inside ``S_2``.  Each design point gets the
convex polygonal cell obtained by intersecting its Voronoi region with the
simplex triangle; the cells partition the simplex up to boundary sets of
measure zero.  Partition construction is single-threaded; the resulting
objects are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSiteError, DomainError
from .kernel import last_coordinate, validate_points

CLIP_TOL = 1e-12
DEDUP_TOL = 1e-10

SIMPLEX_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class ConvexCell:
    """Convex polygon (counterclockwise vertices) around one design site."""

    vertices: np.ndarray  # (m, 2)
    site: np.ndarray  # (2,)

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 3 or v.shape[1] != 2:
            raise DomainError(f"cell needs >= 3 planar vertices, got {v.shape}")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "site", np.asarray(self.site, dtype=float))
        cross = _edge_crosses(v)
        if np.any(cross < -1e-12 * max(1.0, np.abs(cross).max())):
            raise DomainError("cell vertices are not in convex ccw order")
        if not _point_strictly_inside(self.site, v):
            raise DomainError("site does not lie strictly inside its cell")

    @property
    def area(self) -> float:
        return cell_area(self)

    @property
    def diameter(self) -> float:
        return cell_diameter(self)


@dataclass(frozen=True)
class SimplexPartition:
    """Voronoi partition of ``S_2``: one convex cell per design site."""

    cells: tuple[ConvexCell, ...]
    dimension: int = 2

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def sites(self) -> np.ndarray:
        return np.array([c.site for c in self.cells])

    def total_area(self) -> float:
        return float(sum(c.area for c in self.cells))

    def locate(self, point) -> int:
        """Index of the cell containing ``point`` (nearest site)."""
        p = np.asarray(point, dtype=float)
        d2 = np.sum((self.sites - p) ** 2, axis=1)
        return int(np.argmin(d2))

    def to_json_dict(self) -> dict:
        """JSON-ready description (sites and vertex lists) for plotting."""
        return {
            "dimension": self.dimension,
            "cells": [
                {
                    "site": [float(v) for v in c.site],
                    "vertices": [[float(a) for a in row] for row in c.vertices],
                }
                for c in self.cells
            ],
        }


def _edge_crosses(vertices: np.ndarray) -> np.ndarray:
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    c = np.roll(vertices, -2, axis=0)
    return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
        c[:, 0] - a[:, 0]
    )


def _point_strictly_inside(p, vertices: np.ndarray, tol: float = 1e-12) -> bool:
    a = vertices
    b = np.roll(vertices, -1, axis=0)
    cross = (b[:, 0] - a[:, 0]) * (p[1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (
        p[0] - a[:, 0]
    )
    return bool(np.all(cross > tol * np.linalg.norm(b - a, axis=1)))


def mesh_design_points(k: int) -> np.ndarray:
    """Triangular mesh of ``n = k(k+1)/2`` design points inside ``S_2``.

    The points are ``((w(i-1) + 1/2), (w(k-j) + 1/2)) / (k+1)`` over pairs
    ``1 <= i <= j <= k`` with inset factor ``w = (k - 1/sqrt(2)) / (k - 1)``,
    which keeps every point strictly interior with spacing of order ``1/k``.
    """
    if k < 2:
        raise ValueError(f"mesh needs k >= 2, got {k}")
    w = (k - 1.0 / np.sqrt(2.0)) / (k - 1.0)
    pts = [
        ((w * (i - 1) + 0.5) / (k + 1), (w * (k - j) + 0.5) / (k + 1))
        for j in range(1, k + 1)
        for i in range(1, j + 1)
    ]
    return np.array(pts)


def _clip_halfplane(vertices: np.ndarray, normal, offset: float) -> np.ndarray:
    """Sutherland-Hodgman clip of a convex polygon against n . x <= offset."""
    if vertices.shape[0] == 0:
        return vertices
    values = vertices @ normal - offset
    scale = max(1.0, float(np.abs(values).max()))
    inside = values <= CLIP_TOL * scale
    if np.all(inside):
        return vertices
    out: list[np.ndarray] = []
    m = vertices.shape[0]
    for i in range(m):
        j = (i + 1) % m
        vi, vj = vertices[i], vertices[j]
        fi, fj = values[i], values[j]
        if inside[i]:
            out.append(vi)
        if inside[i] != inside[j]:
            t = fi / (fi - fj)
            out.append(vi + t * (vj - vi))
    return np.array(out) if out else np.empty((0, 2))


def _dedup_ring(vertices: np.ndarray, tol: float = DEDUP_TOL) -> np.ndarray:
    if vertices.shape[0] == 0:
        return vertices
    keep = [vertices[0]]
    for v in vertices[1:]:
        if np.linalg.norm(v - keep[-1]) > tol:
            keep.append(v)
    if len(keep) > 1 and np.linalg.norm(keep[0] - keep[-1]) <= tol:
        keep.pop()
    return np.array(keep)


def voronoi_cell(site, other_sites, domain: np.ndarray = SIMPLEX_TRIANGLE) -> np.ndarray:
    """Vertices of the Voronoi region of ``site`` clipped to ``domain``.

    Iterated half-plane clipping against the perpendicular bisector of the
    site and every other site; O(n) per cell, O(n^2) for the full partition,
    which is plenty for the few hundred sites used anywhere in this package.
    """
    poly = np.asarray(domain, dtype=float)
    s = np.asarray(site, dtype=float)
    for t in np.atleast_2d(np.asarray(other_sites, dtype=float)):
        diff = t - s
        dist = np.linalg.norm(diff)
        if dist <= 1e-12:
            raise DegenerateSiteError(f"coincident sites at {s}")
        # points closer to s than t: (t - s) . x <= (|t|^2 - |s|^2) / 2
        poly = _clip_halfplane(poly, diff, 0.5 * (t @ t - s @ s))
        if poly.shape[0] < 3:
            break
    return _dedup_ring(poly)


def voronoi_partition(sites) -> SimplexPartition:
    """Voronoi partition of the simplex triangle for distinct interior sites."""
    pts = validate_points(sites, dim=2)
    n = pts.shape[0]
    cells = []
    for i in range(n):
        others = np.delete(pts, i, axis=0)
        verts = voronoi_cell(pts[i], others) if n > 1 else SIMPLEX_TRIANGLE.copy()
        if verts.shape[0] < 3:
            raise DegenerateSiteError(f"site {i} produced an empty cell")
        cells.append(ConvexCell(vertices=verts, site=pts[i]))
    return SimplexPartition(cells=tuple(cells))


def cell_area(cell: ConvexCell | np.ndarray) -> float:
    """Polygon area by the shoelace formula."""
    v = cell.vertices if isinstance(cell, ConvexCell) else np.asarray(cell, float)
    x, y = v[:, 0], v[:, 1]
    return float(0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def cell_diameter(cell: ConvexCell | np.ndarray) -> float:
    """Largest distance between two points of a convex polygon.

    For convex polygons the maximum is attained at a vertex pair, so the
    brute-force pairwise maximum suffices.
    """
    v = cell.vertices if isinstance(cell, ConvexCell) else np.asarray(cell, float)
    diff = v[:, None, :] - v[None, :, :]
    return float(np.sqrt((diff**2).sum(axis=2)).max())


def uniform_simplex_sample(count: int, seed, dim: int = 2) -> np.ndarray:
    """Independent uniform draws on ``S_d``, deterministic given ``seed``.

    Uses normalized exponential gaps (equivalently the spacings of sorted
    uniforms): with ``E_1..E_{d+1}`` iid exponential, the first d coordinates
    of ``E / sum(E)`` are uniform on the simplex.  ``seed`` is anything
    ``numpy.random.default_rng`` accepts (an integer or a SeedSequence).
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    gaps = rng.exponential(size=(count, dim + 1))
    return gaps[:, :dim] / gaps.sum(axis=1, keepdims=True)


__all__ = [
    "ConvexCell",
    "SimplexPartition",
    "SIMPLEX_TRIANGLE",
    "mesh_design_points",
    "voronoi_cell",
    "voronoi_partition",
    "cell_area",
    "cell_diameter",
    "uniform_simplex_sample",
    "last_coordinate",
]
