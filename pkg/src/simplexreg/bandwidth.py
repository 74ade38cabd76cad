"""Bandwidth selection by cross-validation with a grid + golden-section search.

Two criteria are provided: a Monte Carlo least-squares criterion against a
known target (the simulation-study selector) and leave-one-out
cross-validation for the local linear smoother on real data.  Both can be
multimodal, so the minimizer evaluates a log-spaced grid first and only then
refines the best bracket by golden section; the full evaluation trace is
returned for plotting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cubature import CubatureConfig
from .errors import AllInfiniteError, InsufficientDataError
from .estimators import GM, Design, batch_estimate
from .geometry import SimplexPartition
from .kernel import log_kappa_matrix, validate_points

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def default_grid(num: int = 40, lo: float = 1e-3, hi: float = 1.0) -> np.ndarray:
    """Log-spaced bandwidth grid; above ``hi`` the kernel over-smooths to a
    near-global average, below ``lo`` it concentrates under mesh resolution."""
    return np.geomspace(lo, hi, num)


@dataclass(frozen=True)
class BandwidthSearch:
    """Grid plus optional golden-section refinement of the best bracket."""

    grid: np.ndarray = field(default_factory=default_grid)
    refine: bool = True
    refine_tol: float = 1e-4

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or g.size < 1:
            raise ValueError("grid must be a nonempty 1-d array")
        if np.any(g <= 0.0) or np.any(np.diff(g) <= 0.0):
            raise ValueError("grid must be strictly increasing and positive")
        object.__setattr__(self, "grid", g)


@dataclass(frozen=True)
class BandwidthResult:
    """Selected bandwidth with its objective value and evaluation trace."""

    b_hat: float
    objective_value: float
    trace: tuple[tuple[float, float], ...]
    boundary_minimum: bool = False


def minimize_bandwidth(objective, search: BandwidthSearch | None = None) -> BandwidthResult:
    """Minimize a bandwidth objective over the search grid.

    Non-finite objective values are allowed (flagged points are skipped);
    when every grid point is non-finite :class:`AllInfiniteError` is raised.
    The returned bandwidth always attains the minimum of the whole trace.
    """
    search = search or BandwidthSearch()
    grid = search.grid
    trace: list[tuple[float, float]] = []
    cache: dict[float, float] = {}

    def ev(b: float) -> float:
        b = float(b)
        if b not in cache:
            v = float(objective(b))
            if not np.isfinite(v):
                v = np.inf
            cache[b] = v
            trace.append((b, v))
        return cache[b]

    values = np.array([ev(b) for b in grid])
    if not np.any(np.isfinite(values)):
        raise AllInfiniteError("objective is non-finite on the whole grid")
    i = int(np.argmin(values))
    boundary = i == 0 or i == grid.size - 1

    if search.refine and not boundary and grid.size >= 3:
        lo, hi = grid[i - 1], grid[i + 1]
        a, b = lo, hi
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        while b - a > search.refine_tol:
            if ev(c) <= ev(d):
                b, d = d, c
                c = b - _GOLDEN * (b - a)
            else:
                a, c = c, d
                d = a + _GOLDEN * (b - a)

    b_best, v_best = min(trace, key=lambda t: (t[1], t[0]))
    return BandwidthResult(
        b_hat=float(b_best),
        objective_value=float(v_best),
        trace=tuple(trace),
        boundary_minimum=boundary,
    )


def lscv(
    method: str,
    design: Design,
    m_true,
    eval_sample,
    b: float,
    partition: SimplexPartition | None = None,
    cfg: CubatureConfig | None = None,
) -> float:
    """Monte Carlo least-squares criterion against a known target.

    ``(1 / (N d!)) * sum_i |mhat_b(U_i) - m(U_i)|^2`` over a uniform sample
    ``U_1..U_N`` on the simplex; the ``d!`` factor is the uniform density, so
    this is an unbiased Monte Carlo estimate of the mean integrated squared
    error.  Reuse the same ``eval_sample`` across bandwidths within a search
    (common random numbers) to keep the criterion curve smooth.

    Points where estimation fails are excluded and the count renormalized;
    if every point fails the criterion is ``inf``.
    """
    U = validate_points(eval_sample, dim=design.dim)
    est = batch_estimate(method, design, b, U, partition=partition, cfg=cfg)
    truth = np.asarray(m_true(U), dtype=float)
    sq = (est - truth) ** 2
    ok = np.isfinite(sq)
    if not np.any(ok):
        return float("inf")
    d_fact = float(math.factorial(design.dim))
    return float(sq[ok].sum() / (ok.sum() * d_fact))


def _loo_ll_predictions(design: Design, b: float, rcond: float = 1e-10) -> np.ndarray:
    """Leave-one-out local linear fits evaluated at their held-out points.

    Each left-out system is assembled exactly (the held-out row never enters
    the normal equations, and the log-weight rescaling ignores it too), in
    chunks to bound memory; singular systems fall back to the leave-one-out
    kernel average, and NaN marks points with no support at all.
    """
    X, Y = design.points, design.responses
    n, d = X.shape
    if n < d + 2:
        raise InsufficientDataError(
            f"leave-one-out local linear needs n >= {d + 2}, got {n}"
        )
    logw = log_kappa_matrix(X, b, X)
    np.fill_diagonal(logw, -np.inf)
    out = np.empty(n)
    chunk = max(1, min(n, 16_000_000 // (8 * max(n, 1) * (d + 1))))
    for start in range(0, n, chunk):
        rows = slice(start, min(start + chunk, n))
        lw = logw[rows]
        top = lw.max(axis=1)
        dead = np.isneginf(top)
        top = np.where(dead, 0.0, top)
        w = np.exp(lw - top[:, None])
        diff = X[None, :, :] - X[rows][:, None, :]
        z = np.concatenate([np.ones((w.shape[0], n, 1)), diff], axis=2)
        wz = w[:, :, None] * z
        A = np.einsum("mnj,mnk->mjk", wz, z)
        rhs = np.einsum("mnj,n->mj", wz, Y)
        svals = np.linalg.svd(A, compute_uv=False)
        singular = (svals[:, -1] <= rcond * svals[:, 0]) | ~np.isfinite(svals).all(
            axis=1
        )
        vals = np.full(w.shape[0], np.nan)
        good = ~singular & ~dead
        if np.any(good):
            vals[good] = np.linalg.solve(A[good], rhs[good][:, :, None])[:, 0, 0]
        fb = singular & ~dead
        if np.any(fb):
            vals[fb] = (w[fb] @ Y) / w[fb].sum(axis=1)
        out[rows] = vals
    return out


def loocv_ll(design: Design, b: float) -> float:
    """Leave-one-out cross-validation for the local linear smoother:
    ``(1/n) sum_i (y_i - mhat_(-i)(x_i))^2``; ``inf`` if any held-out
    prediction is undefined (a flagged, skippable bandwidth)."""
    preds = _loo_ll_predictions(design, b)
    if np.any(np.isnan(preds)):
        return float("inf")
    return float(np.mean((design.responses - preds) ** 2))


def select_lscv(
    method: str,
    design: Design,
    m_true,
    eval_sample,
    search: BandwidthSearch | None = None,
    partition: SimplexPartition | None = None,
    cfg: CubatureConfig | None = None,
) -> BandwidthResult:
    """Minimize the LSCV criterion over a bandwidth search."""
    if method == GM and partition is None:
        raise ValueError("GM selection requires a partition")
    return minimize_bandwidth(
        lambda b: lscv(method, design, m_true, eval_sample, b, partition, cfg),
        search,
    )


def select_loocv_ll(design: Design, search: BandwidthSearch | None = None) -> BandwidthResult:
    """Minimize the leave-one-out criterion for the local linear smoother."""
    return minimize_bandwidth(lambda b: loocv_ll(design, b), search)


__all__ = [
    "BandwidthSearch",
    "BandwidthResult",
    "default_grid",
    "minimize_bandwidth",
    "lscv",
    "loocv_ll",
    "select_lscv",
    "select_loocv_ll",
]
