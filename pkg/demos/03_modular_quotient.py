"""The flow on the unit tangent bundle of the modular surface.

Points fold into the standard fundamental domain by exact arithmetic.  The
Klein j-invariant of the circle centre survives every modular change of
starting point, and nearby orbits separate at a rate that shrinks as the
curvature ratio C grows.
"""

import numpy as np

from sl2geo import (
    MetricParams,
    MomentumABC,
    klein_j,
    lyapunov_estimate,
    lyapunov_momentum_for_level,
    reduce_point,
)

z = complex(7.3, 0.002)
r = reduce_point(z)
print(f"reduce {z}: -> {r.z_reduced.z:.6f} by {r.gamma} (gamma applied exactly: {r.gamma.act(z):.6f})")

print(f"\nj(i) = {klein_j(1j).real:.6f},  j(exp(2 pi i/3)) = {abs(klein_j(np.exp(2j * np.pi / 3))):.1e}")
for w in (0.3 + 1.1j, 2.3 + 0.05j):
    print(f"j({w}) = {klein_j(w):.6g}   j at the translate by 1: {klein_j(w + 1):.6g}   "
          f"j at -1/z: {klein_j(-1 / w):.6g}")

metric = MetricParams.from_k(2.0)
print("\nLyapunov exponents over T = 50:")
for C in (0.0, 0.25, 0.5, 0.75):
    est = lyapunov_estimate(lyapunov_momentum_for_level(C), metric, T=50.0)
    print(f"  C = {C:4.2f}: lambda = {est.lam:.4f}   (target sqrt(1-C) = {np.sqrt(1 - C):.4f})")
est = lyapunov_estimate(MomentumABC(1.0, -2.0, 1.0), metric, T=50.0)
print(f"  C = 1.80: lambda = {est.lam:.4f}   (closed circles: no exponential separation)")
