"""Projections to the upper half-plane: circles, lines and the curvature law.

Each geodesic projects to a curve of constant geodesic curvature.  The sign
of Delta picks the kind of curve; kappa times the speed is b - c.
"""

import numpy as np

from sl2geo import (
    MetricParams,
    MomentumABC,
    classify_curve,
    closed_form_arrays,
    curvature_ratio,
    fd_curvature_and_speed,
    geodesic_curvature,
    project_arrays,
    projected_curve_params,
)
from sl2geo.lie_core import velocity_matrix

metric = MetricParams.from_k(2.0)
h = 1e-3
ts = np.arange(-500, 501) * h

print(f"{'momentum':>22} {'C':>8} {'class':>17} {'kappa':>9} {'kappa_fd':>9}  curve")
for abc in ((1, 0, 0), (1, 0.25, -0.25), (0, 0, 1), (1, -2, 1), (0.5, 1, 0)):
    M = MomentumABC(*map(float, abc), metric.alpha)
    g, _ = closed_form_arrays(np.eye(2), velocity_matrix(M.matrix, metric), metric, ts)
    z, _ = project_arrays(g)
    kap, V = geodesic_curvature(M)
    kf, _ = fd_curvature_and_speed(z, h)
    C = curvature_ratio(M).value
    print(f"{str(abc):>22} {C:8.4f} {classify_curve(M).value:>17} {kap:9.5f} {np.median(kf):9.5f}  "
          f"{projected_curve_params(M)}")

M = MomentumABC(1.0, -2.0, 1.0, metric.alpha)
circ = projected_curve_params(M)
g, _ = closed_form_arrays(np.eye(2), velocity_matrix(M.matrix, metric), metric, np.linspace(0, 2 * np.pi, 400))
z, _ = project_arrays(g)
print(f"\n(1,-2,1): every sample sits on |z - {circ.center}| = {circ.radius:.6f}; "
      f"worst miss {np.max(np.abs(np.abs(z - circ.center) - circ.radius)):.1e}")
