"""Closed-form asymptotics: bias coefficient, variance constant, optima.

At an interior point the estimator's leading bias is b*g(s) and its leading
variance is psi(s) sigma^2(s) / (f(s) n b^{d/2}); balancing the two gives an
optimal bandwidth of order n^{-2/(d+4)}.  Near the boundary the variance
constant switches regime, growing by b^{-1/2} per shrinking coordinate.
An empirical normality check standardizes Monte Carlo replicates of the
estimator by the limiting scale.
"""

import numpy as np

from simplexreg import (
    bias_g,
    clt_study,
    mise_opt_bandwidth,
    mse_opt_bandwidth,
    psi_J,
    target_function,
    uniform_profile,
    variance_leading,
)

m = target_function("m5")
profile = uniform_profile(sigma2=0.25)

print("bias coefficient g and variance constant psi at a few points:")
for s in ([1 / 3, 1 / 3], [0.1, 0.1], [0.05, 0.8]):
    print(f"  s={s}: g={bias_g(m, s):8.4f}  psi={psi_J(s):8.4f}")

print("\nboundary regime: psi_J with the first coordinate shrinking like b")
s = [0.1, 0.4]
print(f"  interior psi = {psi_J(s):.4f}, edge-regime psi_J = {psi_J(s, J=(0,)):.4f}")
print(
    "  leading variance (n=105, b=0.1):"
    f" interior {variance_leading(s, (), [2, 2], profile, 105, 0.1):.5f},"
    f" edge {variance_leading(s, (0,), [2, 2], profile, 105, 0.1):.5f}"
)

print("\noptimal bandwidths shrink like n^(-1/3) in d=2:")
for n in (28, 105, 1000, 10000):
    b_opt, mse = mse_opt_bandwidth([1 / 3, 1 / 3], m, profile, n)
    print(f"  n={n:6d}: b_opt={b_opt:.4f}  optimal MSE={mse:.5f}")

b_opt, mise = mise_opt_bandwidth(m, profile, n=105)
print(f"\nintegrated version at n=105: b_opt={b_opt:.4f}, optimal MISE={mise:.5f}")

print("\nempirical normality of standardized replicates (n=105, b=0.2, R=300):")
result = clt_study(m, [1 / 3, 1 / 3], 105, 0.2, 300, seed=5, sigma=0.5)
z = result.standardized
print(f"  mean {z.mean():+.3f}  sd {z.std(ddof=1):.3f}  KS statistic {result.ks_statistic:.4f}")
hist, edges = np.histogram(z, bins=11, range=(-3.3, 3.3))
for count, lo in zip(hist, edges):
    print(f"  {lo:+5.1f} | " + "*" * count)
