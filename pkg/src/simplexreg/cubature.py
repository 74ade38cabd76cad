"""Error-controlled integration over convex polygons and the 2-simplex.

The integrator fan-triangulates a polygon from its centroid and adaptively
bisects triangles along their longest edge.  Each triangle carries an embedded
pair of symmetric quadrature rules (degree 5 with 7 points, degree 7 with 13
points; they share the centroid, so 19 evaluations per triangle); the
difference between the two rules is the local error estimate and the degree-7
value is the one committed.

Integrands may be vector valued: the engine refines until every component
meets ``max(relative_tolerance * |value|, absolute_floor)``, sharing all
function evaluations across components.  That is what makes computing the
Gasser-Muller weights for a thousand evaluation points at once affordable.

Running out of subdivision depth is reported through the ``converged`` flag
of the result, never silently and never as an exception: batch evaluation
near simplex corners must degrade gracefully where the kernel is extremely
peaked and the weights are astronomically small.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import SIMPLEX_TRIANGLE, ConvexCell

# Hard safety valve against pathological integrands; generous enough that a
# smooth integrand at the default tolerances never gets close.
_MAX_TRIANGLES = 262144


def _orbit3(a: float) -> list[tuple[float, float, float]]:
    c = 1.0 - 2.0 * a
    return [(c, a, a), (a, c, a), (a, a, c)]


def _orbit6(a: float, b: float) -> list[tuple[float, float, float]]:
    c = 1.0 - a - b
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


# Degree-5 rule (7 points) and degree-7 rule (13 points), barycentric
# coordinates with weights normalized to sum to one.
_BARY = np.array(
    [(1 / 3, 1 / 3, 1 / 3)]
    + _orbit3(0.470142064105115)
    + _orbit3(0.101286507323456)
    + _orbit3(0.260345966079038)
    + _orbit3(0.065130102902216)
    + _orbit6(0.638444188569809, 0.312865496004875)
)
_W5 = np.concatenate(
    [
        [0.225],
        np.full(3, 0.132394152788506),
        np.full(3, 0.125939180544827),
        np.zeros(12),
    ]
)
_W7 = np.concatenate(
    [
        [-0.149570044467670],
        np.zeros(6),
        np.full(3, 0.175615257433204),
        np.full(3, 0.053347235608839),
        np.full(6, 0.077113760890257),
    ]
)
_NQ = _BARY.shape[0]  # 19 shared evaluation points per triangle


@dataclass(frozen=True)
class CubatureConfig:
    """Tolerances for the adaptive integrator."""

    relative_tolerance: float = 1e-3
    absolute_floor: float = 1e-14
    max_subdivisions: int = 20

    def __post_init__(self):
        if not 0.0 < self.relative_tolerance <= 0.1:
            raise ValueError(
                f"relative_tolerance must be in (0, 0.1], got {self.relative_tolerance}"
            )
        if self.absolute_floor <= 0.0:
            raise ValueError("absolute_floor must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class CubatureResult:
    """Integral value with its error estimate and a convergence flag."""

    value: float
    error_estimate: float
    converged: bool
    triangles: int

    def __float__(self) -> float:
        return self.value


def _tri_areas(coords: np.ndarray) -> np.ndarray:
    a, b, c = coords[:, 0], coords[:, 1], coords[:, 2]
    return 0.5 * np.abs(
        (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
        - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])
    )


_W57 = np.column_stack([_W7, _W7 - _W5])  # fine value and rule difference


def _eval_rules(f_batch, coords: np.ndarray, cols: np.ndarray):
    """Apply the embedded rule pair to a batch of triangles.

    ``f_batch(points, cols)`` returns integrand values for the requested
    component columns only.  Returns per-triangle fine values ``(T, a)`` and
    error estimates ``(T, a)`` for ``a = len(cols)``.
    """
    T = coords.shape[0]
    pts = np.einsum("qb,tbv->tqv", _BARY, coords).reshape(T * _NQ, 2)
    vals = np.asarray(f_batch(pts, cols), dtype=float).reshape(T, _NQ, cols.size)
    areas = _tri_areas(coords)
    both = np.tensordot(vals, _W57, axes=([1], [0]))  # (T, a, 2)
    fine = both[:, :, 0] * areas[:, None]
    err = np.abs(both[:, :, 1]) * areas[:, None]
    return fine, err


def _split_longest_edge(coords: np.ndarray) -> np.ndarray:
    """Bisect each triangle of ``coords`` (T, 3, 2) into two children."""
    edge_len = np.stack(
        [
            ((coords[:, 1] - coords[:, 0]) ** 2).sum(axis=1),
            ((coords[:, 2] - coords[:, 1]) ** 2).sum(axis=1),
            ((coords[:, 0] - coords[:, 2]) ** 2).sum(axis=1),
        ],
        axis=1,
    )
    longest = np.argmax(edge_len, axis=1)
    T = coords.shape[0]
    out = np.empty((2 * T, 3, 2))
    idx = np.arange(T)
    i = longest
    j = (longest + 1) % 3
    k = (longest + 2) % 3
    mid = 0.5 * (coords[idx, i] + coords[idx, j])
    out[0::2, 0] = coords[idx, i]
    out[0::2, 1] = mid
    out[0::2, 2] = coords[idx, k]
    out[1::2, 0] = mid
    out[1::2, 1] = coords[idx, j]
    out[1::2, 2] = coords[idx, k]
    return out


def _adaptive(f_batch, roots: np.ndarray, cfg: CubatureConfig, m: int):
    """Shared adaptive refinement over an initial triangulation.

    Components that meet their tolerance are frozen at their current value
    and drop out of the active set, so late refinement rounds only pay for
    the components that still need them.  Each round splits every splittable
    triangle whose error is within a factor four of the worst splittable
    error on some active component; all children of a round are evaluated in
    one batched call.
    """
    coords = roots
    active = np.arange(m)
    vals, errs = _eval_rules(f_batch, coords, active)
    depth = np.zeros(coords.shape[0], dtype=int)
    out_val = np.empty(m)
    out_err = np.empty(m)
    out_conv = np.ones(m, dtype=bool)
    max_tris = coords.shape[0]
    while True:
        total = vals.sum(axis=0)
        tot_err = errs.sum(axis=0)
        tol = np.maximum(cfg.relative_tolerance * np.abs(total), cfg.absolute_floor)
        passed = tot_err <= tol
        splittable = depth < cfg.max_subdivisions
        can_improve = bool(np.any(splittable)) and coords.shape[0] <= _MAX_TRIANGLES
        if np.all(passed) or not can_improve:
            done = passed if np.all(passed) else np.ones_like(passed)
            out_val[active[done]] = total[done]
            out_err[active[done]] = tot_err[done]
            out_conv[active[done]] = passed[done]
            break
        if np.any(passed):
            out_val[active[passed]] = total[passed]
            out_err[active[passed]] = tot_err[passed]
            keep_cols = ~passed
            active = active[keep_cols]
            vals = vals[:, keep_cols]
            errs = errs[:, keep_cols]
        col_max = np.where(splittable[:, None], errs, 0.0).max(axis=0)
        if np.all(col_max <= 0.0):
            out_val[active] = vals.sum(axis=0)
            out_err[active] = errs.sum(axis=0)
            out_conv[active] = False
            break
        mark = splittable & np.any(errs >= 0.25 * col_max[None, :], axis=1)
        if not np.any(mark):
            out_val[active] = vals.sum(axis=0)
            out_err[active] = errs.sum(axis=0)
            out_conv[active] = False
            break
        children = _split_longest_edge(coords[mark])
        child_vals, child_errs = _eval_rules(f_batch, children, active)
        child_depth = np.repeat(depth[mark] + 1, 2)
        keep = ~mark
        coords = np.concatenate([coords[keep], children])
        vals = np.concatenate([vals[keep], child_vals])
        errs = np.concatenate([errs[keep], child_errs])
        depth = np.concatenate([depth[keep], child_depth])
        max_tris = max(max_tris, coords.shape[0])
    return out_val, out_err, bool(out_conv.all()), max_tris


def fan_triangulation(vertices: np.ndarray) -> np.ndarray:
    """Triangulate a convex polygon from its centroid: (m, 3, 2) array."""
    v = np.asarray(vertices, dtype=float)
    centroid = v.mean(axis=0)
    nxt = np.roll(v, -1, axis=0)
    tris = np.stack([np.broadcast_to(centroid, v.shape), v, nxt], axis=1)
    return tris


def _split_at_line(polys: list[np.ndarray], normal: np.ndarray, offset: float):
    """Split each convex piece along the line ``normal . x = offset``."""
    from .geometry import _clip_halfplane, _dedup_ring

    out: list[np.ndarray] = []
    for poly in polys:
        lo = _dedup_ring(_clip_halfplane(poly, normal, offset))
        hi = _dedup_ring(_clip_halfplane(poly, -normal, -offset))
        pieces = [p for p in (lo, hi) if p.shape[0] >= 3 and _tri_areas(
            fan_triangulation(p)
        ).sum() > 1e-16]
        out.extend(pieces if pieces else [poly])
    return out


def graded_simplex_roots(vertices, scale: float, max_levels: int = 12) -> np.ndarray:
    """Root triangles for a cell, geometrically graded toward simplex edges.

    The smoothing kernel for centers near a simplex edge concentrates in a
    layer of thickness of order the bandwidth along that edge, far below the
    resolution the error estimator can detect from a coarse fan.  Splitting
    the polygon into bands at distances ``scale * 4^k`` from each of the
    three simplex edges puts quadrature points inside any such layer from
    the start, so the adaptive stage only has to polish.
    """
    polys = [np.asarray(vertices, dtype=float)]
    if scale > 0.0:
        for normal in (np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([-1.0, -1.0])):
            # offset value of the simplex edge along this normal
            base = -1.0 if normal[0] < 0 else 0.0
            for k in range(max_levels):
                level = base + scale * 4.0**k
                # layers thicker than ~0.2 are visible to the error
                # estimator without help
                if level - base > 0.2:
                    break
                polys = _split_at_line(polys, normal, level)
    return np.concatenate([fan_triangulation(p) for p in polys])


def _as_batch_callable(f):
    """Accept either a vectorized f((q, 2)) -> (q,) or a scalar f(point)."""

    def call(pts: np.ndarray, _cols) -> np.ndarray:
        try:
            out = np.asarray(f(pts), dtype=float)
            if out.shape == (pts.shape[0],):
                return out[:, None]
        except Exception:
            pass
        return np.array([float(f(p)) for p in pts])[:, None]

    return call


def integrate_polygon(f, cell, cfg: CubatureConfig | None = None) -> CubatureResult:
    """Integrate ``f`` over a convex polygonal cell.

    Parameters
    ----------
    f : callable
        Real-valued integrand on simplex points; called with an ``(q, 2)``
        array of points (a scalar-only callable also works, at a cost).
    cell : ConvexCell or (m, 2) array
        The integration region.
    cfg : CubatureConfig, optional
        Tolerances; defaults match the package-wide defaults.

    Returns
    -------
    CubatureResult
        Value, summed error estimate, convergence flag and triangle count.
        ``converged`` is False when the subdivision depth was exhausted; the
        best available estimate is still returned.
    """
    cfg = cfg or CubatureConfig()
    verts = cell.vertices if isinstance(cell, ConvexCell) else np.asarray(cell, float)
    roots = fan_triangulation(verts)
    value, err, converged, ntri = _adaptive(_as_batch_callable(f), roots, cfg, 1)
    return CubatureResult(float(value[0]), float(err[0]), converged, ntri)


def integrate_polygon_batch(
    f_batch,
    cell,
    n_components: int,
    cfg: CubatureConfig | None = None,
    column_aware: bool = False,
    boundary_layer_scale: float = 0.0,
):
    """Integrate a vector-valued integrand over a convex polygonal cell.

    ``f_batch`` maps an ``(q, 2)`` array of points to ``(q, n_components)``
    values; all components share evaluations, each is refined until it meets
    its own tolerance, and converged components freeze while the rest keep
    refining.  With ``column_aware=True`` the callable is invoked as
    ``f_batch(points, cols)`` and must return values for the requested
    component columns only, which avoids evaluating frozen components.  A
    positive ``boundary_layer_scale`` grades the initial triangulation
    toward the simplex edges at that scale (see
    :func:`graded_simplex_roots`).

    Returns ``(values, error_estimates, converged, triangles)`` with the
    first two of shape ``(n_components,)``.
    """
    cfg = cfg or CubatureConfig()
    verts = cell.vertices if isinstance(cell, ConvexCell) else np.asarray(cell, float)
    roots = (
        graded_simplex_roots(verts, boundary_layer_scale)
        if boundary_layer_scale > 0.0
        else fan_triangulation(verts)
    )
    fb = f_batch if column_aware else (lambda pts, cols: f_batch(pts)[:, cols])
    return _adaptive(fb, roots, cfg, n_components)


def shrunken_simplex_triangle(eps: float = 1e-4) -> np.ndarray:
    """Vertices of ``{s : s_1 >= eps, s_2 >= eps, s_3 >= eps}`` in ``S_2``."""
    return np.array([[eps, eps], [1.0 - 2.0 * eps, eps], [eps, 1.0 - 2.0 * eps]])


def integrate_simplex(
    f,
    cfg: CubatureConfig | None = None,
    boundary_singular: bool = False,
    eps: float = 1e-4,
) -> CubatureResult:
    """Integrate ``f`` over the whole 2-simplex.

    With ``boundary_singular=True`` the domain shrinks to
    ``{s : s_i >= eps, s_{d+1} >= eps}``; inverse-square-root boundary
    singularities (the variance constant has one) are integrable, so the
    truncation error is of order ``sqrt(eps)``.
    """
    domain = shrunken_simplex_triangle(eps) if boundary_singular else SIMPLEX_TRIANGLE
    return integrate_polygon(f, domain, cfg)


__all__ = [
    "CubatureConfig",
    "CubatureResult",
    "fan_triangulation",
    "integrate_polygon",
    "integrate_polygon_batch",
    "integrate_simplex",
    "shrunken_simplex_triangle",
]
