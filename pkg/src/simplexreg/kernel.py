"""Dirichlet density and the location-adaptive smoothing kernel on the simplex.

The simplex ``S_d`` is the set of d nonnegative coordinates with sum at most
one; the implicit last coordinate is ``x_{d+1} = 1 - sum(x)``.  The smoothing
kernel centered at a point ``s`` with bandwidth ``b`` is the Dirichlet density
with parameters ``alpha = s/b + 1`` and ``beta = s_{d+1}/b + 1``; its mode sits
at ``s`` and it concentrates around ``s`` as ``b`` shrinks.

Everything is evaluated in log space (log-gamma based), because the Dirichlet
parameters reach the thousands for small bandwidths and direct gamma
evaluation overflows.  All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, PoleError

POINT_TOL = 1e-12


def validate_point(x, dim: int | None = None, tol: float = POINT_TOL) -> np.ndarray:
    """Validate barycentric coordinates and clamp float noise.

    Coordinates within ``tol`` of the valid range are clamped; anything
    farther out raises :class:`DomainError` (user error, not rounding).

    Parameters
    ----------
    x : array_like, shape (d,)
        First d barycentric coordinates of a point in ``S_d``.
    dim : int, optional
        Required dimension; mismatch raises :class:`DomainError`.

    Returns
    -------
    ndarray
        The clamped coordinates as float64.
    """
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1:
        raise DomainError(f"expected a single point, got shape {p.shape}")
    if dim is not None and p.size != dim:
        raise DomainError(f"expected dimension {dim}, got {p.size}")
    if not np.all(np.isfinite(p)):
        raise DomainError("point has non-finite coordinates")
    if np.any(p < -tol):
        raise DomainError(f"negative coordinate beyond tolerance: {p}")
    total = p.sum()
    if total > 1.0 + tol:
        raise DomainError(f"coordinate sum {total} exceeds 1 beyond tolerance")
    p = np.clip(p, 0.0, 1.0)
    if p.sum() > 1.0:
        p *= 1.0 / p.sum()
    return p


def validate_points(points, dim: int | None = None, tol: float = POINT_TOL) -> np.ndarray:
    """Vectorized :func:`validate_point` for an (n, d) array of points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if dim is not None and pts.shape[1] != dim:
        raise DomainError(f"expected dimension {dim}, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise DomainError("points contain non-finite coordinates")
    if np.any(pts < -tol):
        raise DomainError("negative coordinate beyond tolerance")
    sums = pts.sum(axis=1)
    if np.any(sums > 1.0 + tol):
        raise DomainError("coordinate sum exceeds 1 beyond tolerance")
    pts = np.clip(pts, 0.0, 1.0)
    over = sums > 1.0
    if np.any(over):
        pts[over] /= sums[over, None]
    return pts


def last_coordinate(x) -> np.ndarray | float:
    """Implicit coordinate ``x_{d+1} = 1 - sum(x)``, clamped to [0, 1]."""
    x = np.asarray(x, dtype=float)
    rest = 1.0 - x.sum(axis=-1)
    return np.clip(rest, 0.0, 1.0)


def _xlogy(c, x):
    """Elementwise c*log(x) with the boundary conventions.

    ``0 * log 0 == 0``; ``c * log 0 == -inf`` for c > 0; c < 0 at x == 0 is a
    pole and raises.
    """
    c = np.asarray(c, dtype=float)
    x = np.asarray(x, dtype=float)
    zero = x == 0.0
    if np.any(zero & (c < 0.0)):
        raise PoleError("negative exponent at a zero coordinate")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = c * np.log(x)
    out = np.where(zero & (c == 0.0), 0.0, out)
    out = np.where(zero & (c > 0.0), -np.inf, out)
    return out


def log_dirichlet_density(alpha, beta: float, x) -> float | np.ndarray:
    """Log of the Dirichlet(alpha, beta) density at points of ``S_d``.

    Parameters
    ----------
    alpha : array_like, shape (d,)
        Positive shape parameters for the explicit coordinates.
    beta : float
        Positive shape parameter for the implicit last coordinate.
    x : array_like, shape (d,) or (n, d)
        Evaluation point(s) inside the simplex.

    Returns
    -------
    float or ndarray
        ``log K_{alpha,beta}(x)``; ``-inf`` where the density vanishes on the
        boundary.

    Raises
    ------
    DomainError
        If ``x`` lies outside the simplex beyond tolerance or the parameter
        vectors are invalid.
    PoleError
        If an exponent below zero meets a zero coordinate.
    """
    a = np.atleast_1d(np.asarray(alpha, dtype=float))
    if np.any(a <= 0.0) or beta <= 0.0:
        raise DomainError("Dirichlet parameters must be positive")
    single = np.asarray(x).ndim == 1
    pts = validate_points(x, dim=a.size)
    rest = last_coordinate(pts)
    norm = gammaln(a.sum() + beta) - gammaln(beta) - gammaln(a).sum()
    terms = _xlogy(a - 1.0, pts).sum(axis=1) + _xlogy(beta - 1.0, rest)
    out = norm + terms
    return float(out[0]) if single else out


def kernel_params(s, b: float) -> tuple[np.ndarray, float]:
    """Dirichlet parameters ``(s/b + 1, s_{d+1}/b + 1)`` of the kernel at s."""
    if not (b > 0.0 and np.isfinite(b)):
        raise DomainError(f"bandwidth must be positive and finite, got {b}")
    s = validate_point(s)
    return s / b + 1.0, float(last_coordinate(s)) / b + 1.0


def log_kappa(s, b: float, x) -> float | np.ndarray:
    """Log of the smoothing kernel ``kappa_{s,b}`` at ``x`` (vectorized in x)."""
    alpha, beta = kernel_params(s, b)
    return log_dirichlet_density(alpha, beta, x)


def kappa(s, b: float, x) -> float | np.ndarray:
    """Smoothing kernel ``kappa_{s,b}(x)``; finite and nonnegative on ``S_d``.

    All exponents ``s_i/b`` are nonnegative, so no pole can occur and the
    value is zero (not infinite) on boundary faces the center is away from.
    """
    return np.exp(log_kappa(s, b, x))


def log_kappa_matrix(eval_points, b: float, x_points) -> np.ndarray:
    """Log kernel values for many centers against many evaluation points.

    Entry ``[i, j]`` is ``log kappa_{s_i, b}(x_j)`` for centers ``s_i`` in
    ``eval_points`` and points ``x_j`` in ``x_points``.  The inner loop is a
    single matrix product, which is what makes batched Nadaraya-Watson, local
    linear and cross-validation evaluation cheap.

    Points ``x_j`` on the simplex boundary get ``-inf`` where a positive
    exponent meets the zero coordinate, consistent with :func:`log_kappa`.
    """
    if not (b > 0.0 and np.isfinite(b)):
        raise DomainError(f"bandwidth must be positive and finite, got {b}")
    S = validate_points(eval_points)
    X = validate_points(x_points, dim=S.shape[1])
    S_full = np.column_stack([S, last_coordinate(S)])
    X_full = np.column_stack([X, last_coordinate(X)])
    d = S.shape[1]
    # log kappa = logGamma(1/b + d + 1) - sum_j logGamma(s_j/b + 1)
    #             + (1/b) * sum_j s_j * log x_j      (exponents are s_j/b)
    norm = gammaln(1.0 / b + d + 1.0) - gammaln(S_full / b + 1.0).sum(axis=1)
    with np.errstate(divide="ignore"):
        logX = np.log(X_full)
    # Clamping log 0 to a huge finite negative keeps the matrix product
    # correct under the 0*log 0 = 0 convention (0 * finite is 0, while
    # 0 * -inf would poison the product with NaN).
    np.maximum(logX, -1e300, out=logX)
    out = norm[:, None] + (S_full @ logX.T) / b
    zero_x = X_full == 0.0
    if zero_x.any():
        # A positive exponent meeting a zero coordinate is exactly -inf.
        hits = zero_x.astype(float) @ (S_full > 0.0).T.astype(float)
        out[(hits > 0.0).T] = -np.inf
    return out


def global_bound(d: int, b: float) -> float:
    """Uniform upper bound ``prod_{k=1..d} (1/b + k)`` on the kernel over
    all center/evaluation pairs in ``S_d``."""
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    if not (b > 0.0 and np.isfinite(b)):
        raise DomainError(f"bandwidth must be positive and finite, got {b}")
    return float(np.prod(1.0 / b + np.arange(1, d + 1)))


def kappa_gradient_coordinate(s, b: float, x, k: int) -> float:
    """Analytic partial derivative of ``x -> kappa_{s,b}(x)`` in coordinate k.

    Differentiating the density (with the implicit last coordinate moving
    opposite to ``x_k``) gives a difference of two neighboring Dirichlet
    densities sharing the common factor ``1/b + d``:

        (1/b + d) * [K_{s/b + 1 - e_k, s_{d+1}/b + 1}(x)
                     - K_{s/b + 1, s_{d+1}/b}(x)]

    Parameters
    ----------
    s, x : array_like, shape (d,)
        Kernel center and evaluation point; the shifted parameters
        ``s_k/b`` and ``s_{d+1}/b`` must stay positive, so ``s`` must not
        lie on the corresponding boundary faces.
    k : int
        Zero-based coordinate index.
    """
    s = validate_point(s)
    d = s.size
    if not 0 <= k < d:
        raise DomainError(f"coordinate index {k} out of range for d={d}")
    alpha, beta = kernel_params(s, b)
    if alpha[k] - 1.0 <= 0.0 or beta - 1.0 <= 0.0:
        raise DomainError(
            "shifted Dirichlet parameters are nonpositive; "
            "the center must be interior in coordinates k and d+1"
        )
    alpha_minus = alpha.copy()
    alpha_minus[k] -= 1.0
    term_k = np.exp(log_dirichlet_density(alpha_minus, beta, x))
    term_last = np.exp(log_dirichlet_density(alpha, beta - 1.0, x))
    return float((1.0 / b + d) * (term_k - term_last))
