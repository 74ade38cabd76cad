"""Error-controlled integration over polygons and the simplex.

The integrator fan-triangulates a polygon, applies an embedded pair of
symmetric triangle rules (degree 5 and degree 7), and bisects the triangles
carrying the largest error estimates until every requested component meets
max(rtol * |value|, floor).  Peaked kernels near simplex corners are the
stress test; the error estimate is always reported alongside the value.
"""

import numpy as np

from simplexreg import CubatureConfig, integrate_polygon, integrate_simplex, kappa
from simplexreg.geometry import SIMPLEX_TRIANGLE

print("polynomial sanity (exact values are 1/2 and 1/24):")
res = integrate_polygon(lambda p: np.ones(p.shape[0]), SIMPLEX_TRIANGLE)
print(f"  integral of 1    = {res.value:.15f}  (error {res.error_estimate:.1e})")
res = integrate_polygon(lambda p: p[:, 0] * p[:, 1], SIMPLEX_TRIANGLE)
print(f"  integral of x1*x2 = {res.value:.15f}  (error {res.error_estimate:.1e})")

print("\na sharply peaked kernel needs adaptive refinement:")
for b in (0.2, 0.02, 0.002):
    res = integrate_simplex(lambda p: kappa([0.3, 0.42], b, p))
    print(
        f"  b={b:5g}: integral {res.value:.6f}, {res.triangles:4d} triangles, "
        f"converged={res.converged}"
    )

print("\ntightening the tolerance tightens the reported error estimate:")
f = lambda p: kappa([0.25, 0.3], 0.05, p)
for rtol in (1e-2, 1e-3, 1e-4, 1e-5):
    res = integrate_simplex(f, CubatureConfig(relative_tolerance=rtol))
    print(f"  rtol={rtol:7g}: value {res.value:.8f}  error {res.error_estimate:.2e}")

print("\nexhausted subdivision depth flags the result instead of raising:")
res = integrate_simplex(
    lambda p: kappa([0.31, 0.22], 0.004, p),
    CubatureConfig(relative_tolerance=1e-3, max_subdivisions=2),
)
print(f"  value {res.value:.6f}, converged={res.converged}")
