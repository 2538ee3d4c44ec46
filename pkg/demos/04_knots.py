"""Modular knots and trefoil cables.

A hyperbolic element of the modular group closes up a geodesic of the
quotient, and its conjugacy class is recorded by a cyclic word in R and L.
Periodic orbits with Delta < 0 close on tori around the trefoil fibre.
"""

import math

from sl2geo import (
    MetricParams,
    ModularElement,
    MomentumABC,
    axis_and_length,
    cable_from_ratio,
    frequencies,
    detect_rational_ratio,
    gamma2_volume,
    lr_decompose,
    modular_volume,
    momentum_for_ratio,
    quadratic_form_of,
    rademacher,
    volume_torus_knot_complement,
)

for entries in ((2, 1, 1, 1), (5, 2, 2, 1), (3, 5, 1, 2), (-7, -3, -2, -1)):
    g = ModularElement(*entries)
    w = lr_decompose(g)
    (x1, x2), length = axis_and_length(g)
    print(f"{entries}: word {w}, Rademacher {rademacher(w)}, form {quadratic_form_of(g).as_list()}, "
          f"axis ({x1:.4f}, {x2:.4f}), length {length:.4f}")

metric = MetricParams.from_k(2.0)
M = MomentumABC(1.0, -2.0, 1.0)
pq = detect_rational_ratio(frequencies(M, metric))
print(f"\n(1,-2,1) at k=2: frequency ratio {pq[0]}/{pq[1]}, cable {cable_from_ratio(*pq).to_json_dict()}")

for p, q in ((3, 1), (5, 2), (2, 3)):
    try:
        Mpq = momentum_for_ratio(p, q, metric)
        f = frequencies(Mpq, metric)
        print(f"ratio {p}/{q}: momentum ({Mpq.a:.4f}, {Mpq.b:.4f}, {Mpq.c:.4f}), "
              f"omega1/omega2 = {f.omega1 / f.omega2:.12f}")
    except ValueError as exc:
        print(f"ratio {p}/{q}: {exc}")

print(f"\nvolume of the (2,3) knot complement at k=2: {volume_torus_knot_complement(2, 3, 2.0):.12f}"
      f"  (2 pi^2/3 = {2 * math.pi ** 2 / 3:.12f})")
print(f"Gamma(2) cover over the modular quotient: {gamma2_volume(2.0) / modular_volume(2.0):.15f}")
