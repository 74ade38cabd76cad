"""The three regression estimators over a common fixed design.

Given design points ``x_1..x_n`` on the simplex with responses ``Y_1..Y_n``:

* ``gm``: weighted response sum where weight i is the integral of the
  smoothing kernel over design point i's partition cell;
* ``nw``: kernel-weighted average of the responses (weights normalized);
* ``ll``: intercept of the kernel-weighted least-squares affine fit centered
  at the evaluation point.

Kernel weights span hundreds of orders of magnitude for small bandwidths, so
``nw``/``ll`` work from log-kernel values with per-row max subtraction, and
``ll`` falls back to ``nw`` (with a flag) where the normal equations are
numerically singular.  Everything is pure given immutable inputs; batch
evaluation over many points shares one kernel matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .cubature import CubatureConfig, integrate_polygon_batch
from .errors import (
    AllWeightsVanishedError,
    InsufficientDataError,
    MismatchError,
)
from .geometry import SimplexPartition
from .kernel import last_coordinate, log_kappa_matrix, validate_points

LL_RCOND = 1e-10

GM = "GM"
NW = "NW"
LL = "LL"
METHODS = (GM, NW, LL)


@dataclass(frozen=True)
class Design:
    """Paired design points (n, d) and responses (n,)."""

    points: np.ndarray
    responses: np.ndarray

    def __post_init__(self):
        pts = validate_points(self.points)
        y = np.atleast_1d(np.asarray(self.responses, dtype=float))
        if pts.shape[0] != y.size:
            raise MismatchError(
                f"{pts.shape[0]} points but {y.size} responses"
            )
        if pts.shape[0] < 1:
            raise InsufficientDataError("design needs at least one observation")
        if not np.all(np.isfinite(y)):
            raise MismatchError("responses must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "responses", y)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class GmWeights:
    """Cell weights of the Gasser-Muller estimator at one evaluation point."""

    weights: np.ndarray
    tolerance_used: float
    flagged_cells: tuple[int, ...] = field(default_factory=tuple)

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def _check_partition(design: Design, partition: SimplexPartition) -> None:
    if len(partition) != design.n:
        raise MismatchError(
            f"partition has {len(partition)} cells for {design.n} design points"
        )
    if not np.allclose(partition.sites, design.points, atol=1e-9):
        raise MismatchError("partition sites do not match the design points")


def gm_weight_matrix(
    partition: SimplexPartition,
    b: float,
    eval_points,
    cfg: CubatureConfig | None = None,
):
    """Kernel cell integrals for a batch of evaluation points.

    Returns ``(weights, cell_converged)`` where ``weights[i, j]`` is the
    integral of the kernel centered at evaluation point i over cell j, and
    ``cell_converged[j]`` reports whether cell j's cubature met tolerance for
    every evaluation point.  The kernel integral is nonnegative, so signed
    quadrature noise at the absolute floor is clamped away.
    """
    cfg = cfg or CubatureConfig()
    S = validate_points(eval_points, dim=2)
    m = S.shape[0]
    f_batch = _kernel_center_batch(S, b)
    weights = np.empty((m, len(partition)))
    converged = np.empty(len(partition), dtype=bool)
    for j, cell in enumerate(partition.cells):
        vals, _, ok, _ = integrate_polygon_batch(
            f_batch, cell, m, cfg, column_aware=True, boundary_layer_scale=b
        )
        weights[:, j] = np.maximum(vals, 0.0)
        converged[j] = ok
    return weights, converged


def _kernel_center_batch(S: np.ndarray, b: float):
    """Integrand ``x -> [kappa_{s_i,b}(x)]_i`` vectorized over points x.

    Column-aware closure for the adaptive integrator: normalization constants
    are precomputed once per (centers, bandwidth), and only the requested
    component columns are evaluated.  Quadrature points come from inside the
    simplex, so only rounding-level clipping is needed.
    """
    S_full = np.column_stack([S, last_coordinate(S)])
    d = S.shape[1]
    norm = gammaln(1.0 / b + d + 1.0) - gammaln(S_full / b + 1.0).sum(axis=1)
    exponents = (S_full / b).T  # (d+1, m)

    def f_batch(pts: np.ndarray, cols: np.ndarray) -> np.ndarray:
        rest = 1.0 - pts.sum(axis=1)
        full = np.column_stack([pts, rest])
        np.clip(full, 0.0, 1.0, out=full)
        with np.errstate(divide="ignore"):
            logx = np.log(full)
        np.maximum(logx, -1e300, out=logx)
        out = logx @ exponents[:, cols]
        out += norm[cols]
        return np.exp(out, out=out)

    return f_batch


def gm_weights(
    partition: SimplexPartition,
    b: float,
    s,
    cfg: CubatureConfig | None = None,
) -> GmWeights:
    """Gasser-Muller weights at a single evaluation point."""
    cfg = cfg or CubatureConfig()
    W, conv = gm_weight_matrix(partition, b, np.atleast_2d(np.asarray(s, float)), cfg)
    flagged = tuple(int(j) for j in np.nonzero(~conv)[0])
    return GmWeights(W[0], cfg.relative_tolerance, flagged)


def gm_estimate(
    design: Design,
    partition: SimplexPartition,
    b: float,
    s,
    cfg: CubatureConfig | None = None,
    diagnostics: list | None = None,
) -> float:
    """Gasser-Muller estimate at ``s``.

    Non-converged cell cubatures are appended to ``diagnostics`` (as cell
    indices) when a list is supplied; the estimate is still returned.
    """
    _check_partition(design, partition)
    w = gm_weights(partition, b, s, cfg)
    if diagnostics is not None:
        diagnostics.extend(w.flagged_cells)
    return float(w.weights @ design.responses)


class KernelWeights:
    """Kernel structures shared by NW/LL evaluation at a fixed bandwidth.

    Precomputes, for one (design points, evaluation points, bandwidth)
    triple, everything that does not depend on the responses: the stabilized
    kernel weight rows and, on demand, the local linear normal equations.
    The study harness reuses one instance across many response vectors.
    """

    def __init__(self, x_points, eval_points, b: float):
        self.X = validate_points(x_points)
        self.S = validate_points(eval_points, dim=self.X.shape[1])
        logw = log_kappa_matrix(self.S, b, self.X)
        top = logw.max(axis=1)
        self.dead = np.isneginf(top)
        self.w = np.exp(logw - np.where(self.dead, 0.0, top)[:, None])
        self.den = self.w.sum(axis=1)
        self._wz: np.ndarray | None = None
        self._A: np.ndarray | None = None
        self._singular: np.ndarray | None = None
        self._rcond: float | None = None

    def nw(self, responses: np.ndarray) -> np.ndarray:
        """Kernel-weighted averages; NaN where all weights vanished."""
        out = (self.w @ responses) / np.where(self.dead, 1.0, self.den)
        out[self.dead] = np.nan
        return out

    def _build_ll(self, rcond: float) -> None:
        m, n = self.w.shape
        diff = self.X[None, :, :] - self.S[:, None, :]
        z = np.concatenate([np.ones((m, n, 1)), diff], axis=2)
        self._wz = self.w[:, :, None] * z
        A = np.einsum("mnj,mnk->mjk", self._wz, z)
        svals = np.linalg.svd(A, compute_uv=False)
        self._singular = (svals[:, -1] <= rcond * svals[:, 0]) | ~np.isfinite(
            svals
        ).all(axis=1)
        self._A = A
        self._rcond = rcond

    def ll(self, responses: np.ndarray, rcond: float = LL_RCOND):
        """Intercepts of the weighted affine fits, with NW fallback flags."""
        n, d = self.X.shape
        if n < d + 1:
            raise InsufficientDataError(
                f"local linear fit needs n >= {d + 1}, got {n}"
            )
        if self._A is None or self._rcond != rcond:
            self._build_ll(rcond)
        rhs = np.einsum("mnj,n->mj", self._wz, responses)
        est = np.full(self.S.shape[0], np.nan)
        good = ~self._singular & ~self.dead
        if np.any(good):
            est[good] = np.linalg.solve(self._A[good], rhs[good][:, :, None])[:, 0, 0]
        fell_back = self._singular & ~self.dead
        if np.any(fell_back):
            est[fell_back] = (self.w[fell_back] @ responses) / self.den[fell_back]
        return est, fell_back


def nw_batch(design: Design, b: float, eval_points) -> np.ndarray:
    """Nadaraya-Watson estimates at many points; NaN where all weights vanish."""
    return KernelWeights(design.points, eval_points, b).nw(design.responses)


def nw_estimate(design: Design, b: float, s) -> float:
    """Nadaraya-Watson estimate at one point (log-sum-exp path)."""
    out = nw_batch(design, b, np.atleast_2d(np.asarray(s, float)))
    if np.isnan(out[0]):
        raise AllWeightsVanishedError(
            "all kernel weights vanished; no design point supports this estimate"
        )
    return float(out[0])


def ll_batch(
    design: Design,
    b: float,
    eval_points,
    rcond: float = LL_RCOND,
):
    """Local linear estimates at many points.

    Returns ``(estimates, fell_back)``; a True flag marks points where the
    weighted normal equations were singular within ``rcond`` and the
    Nadaraya-Watson value was substituted.  NaN marks points where even that
    was impossible (all weights vanished).
    """
    return KernelWeights(design.points, eval_points, b).ll(design.responses, rcond)


def ll_estimate(
    design: Design,
    b: float,
    s,
    rcond: float = LL_RCOND,
    diagnostics: list | None = None,
) -> float:
    """Local linear estimate at one point, with flagged NW fallback."""
    est, fell_back = ll_batch(design, b, np.atleast_2d(np.asarray(s, float)), rcond)
    if np.isnan(est[0]):
        raise AllWeightsVanishedError(
            "all kernel weights vanished; no design point supports this estimate"
        )
    if diagnostics is not None and fell_back[0]:
        diagnostics.append("ll-singular-fallback")
    return float(est[0])


def batch_estimate(
    method: str,
    design: Design,
    b: float,
    eval_points,
    partition: SimplexPartition | None = None,
    cfg: CubatureConfig | None = None,
    diagnostics: list | None = None,
) -> np.ndarray:
    """Evaluate one estimator at many points.

    Results are identical to looping the single-point calls; per-point
    failures become NaN entries and are appended to ``diagnostics`` (as
    ``(index, message)`` pairs) rather than aborting the batch.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    S = validate_points(eval_points, dim=design.dim)
    if method == GM:
        if partition is None:
            raise MismatchError("the GM estimator requires a partition")
        _check_partition(design, partition)
        W, conv = gm_weight_matrix(partition, b, S, cfg)
        if diagnostics is not None and not conv.all():
            for j in np.nonzero(~conv)[0]:
                diagnostics.append((int(j), "cubature tolerance not reached"))
        return W @ design.responses
    if method == NW:
        out = nw_batch(design, b, S)
    else:
        out, fell_back = ll_batch(design, b, S)
        if diagnostics is not None:
            for i in np.nonzero(fell_back)[0]:
                diagnostics.append((int(i), "ll singular; nw fallback"))
    if diagnostics is not None:
        for i in np.nonzero(np.isnan(out))[0]:
            diagnostics.append((int(i), "all kernel weights vanished"))
    return out


__all__ = [
    "Design",
    "GmWeights",
    "KernelWeights",
    "GM",
    "NW",
    "LL",
    "METHODS",
    "gm_weights",
    "gm_weight_matrix",
    "gm_estimate",
    "nw_estimate",
    "nw_batch",
    "ll_estimate",
    "ll_batch",
    "batch_estimate",
]
