"""Acceptance suite: one test and one printed PASS/FAIL line per criterion."""

import math
import time

import numpy as np
import pytest

from sl2geo import (
    AlgebraVelocity,
    CurveClass,
    DomainError,
    GeodesicState,
    GroupElement,
    MetricParams,
    ModularElement,
    MomentumABC,
    area_pq,
    cable_knot_params,
    check_conservation,
    classify_curve,
    closed_form_arrays,
    closed_geodesic_of,
    curvature_ratio,
    detect_rational_ratio,
    exp_traceless,
    fd_curvature_and_speed,
    frequencies,
    gamma2_volume,
    geodesic_curvature,
    group_residual_at,
    integrate_oracle,
    klein_j,
    lr_decompose,
    lyapunov_estimate,
    lyapunov_momentum_for_level,
    magnetic_residual,
    mobius,
    modular_volume,
    momentum_for_ratio,
    project_arrays,
    projected_curve_params,
    quadratic_form_of,
    reduce_point,
    third_integral,
    volume_coefficient,
    volume_torus_knot_complement,
)
from sl2geo.fuchsian import GAMMA2_VOLUME_COEFFICIENT, RHO
from sl2geo.geodesic_flow import Trajectory
from sl2geo.lie_core import velocity_matrix

from oracles import word_product

K_VALUES = (1.5, 2.0, 3.0)
GENS = [ModularElement.T(1), ModularElement.T(-1), ModularElement.S()]


@pytest.fixture
def report(capsys):
    def _report(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
    return _report


def _seeded_initial(seed):
    rng = np.random.default_rng(seed)
    abc = rng.uniform(-2, 2, 3)
    u, v, w = rng.uniform(-0.5, 0.5, 3)
    return abc, exp_traceless(np.array([[u, v], [w, -u]]))


def _random_modular(rng, max_len=10):
    g = ModularElement.identity()
    for _ in range(rng.integers(1, max_len + 1)):
        g = g @ GENS[rng.integers(len(GENS))]
    return g


@pytest.fixture(scope="module")
def flow_suite():
    """Closed form and RK4 oracle on 100 seeds for each k, t in [0, 10], dt = 1e-3."""
    t0 = time.perf_counter()
    out = {}
    for k in K_VALUES:
        metric = MetricParams.from_k(k)
        init = [_seeded_initial(s) for s in range(100)]
        g0 = np.array([g for _, g in init])
        om0 = velocity_matrix(np.array([MomentumABC(*abc, metric.alpha).matrix for abc, _ in init]), metric)
        orc = integrate_oracle(g0, om0, metric, 10.0, 1e-3, sample_every=10)
        g, om = closed_form_arrays(g0, om0, metric, orc.t)
        out[k] = (metric, orc, Trajectory(orc.t, g, om))
    return out, time.perf_counter() - t0


def test_criterion_01_closed_form_vs_oracle(flow_suite, report):
    suite, elapsed = flow_suite
    worst, worst_abs = 0.0, 0.0
    for metric, orc, cf in suite.values():
        diff = np.max(np.abs(cf.g - orc.g), axis=(-1, -2))
        # entries grow like exp(sqrt(Delta) t); compare at the scale of the matrix
        scale = np.maximum(1.0, np.max(np.abs(cf.g), axis=(-1, -2)))
        worst = max(worst, float(np.max(diff / scale)))
        worst_abs = max(worst_abs, float(np.max(np.where(scale == 1.0, diff, 0.0))))
    ok = worst <= 1e-6 and elapsed < 30.0
    report(1, ok, f"max scaled deviation {worst:.2e} (<= 1e-6); on O(1) entries {worst_abs:.2e}; "
                  f"runtime {elapsed:.1f} s (< 30 s); 300 trajectories")
    assert ok


def test_criterion_02_conservation(flow_suite, report):
    suite, _ = flow_suite
    cf_drift = max(check_conservation(cf, m).max for m, _, cf in suite.values())
    or_drift = max(check_conservation(orc, m).max for m, orc, _ in suite.values())
    ok = cf_drift <= 1e-9 and or_drift <= 1e-6
    report(2, ok, f"closed form drift {cf_drift:.2e} (<= 1e-9); oracle drift {or_drift:.2e} (<= 1e-6)")
    assert ok


def test_criterion_03_circle_law(report):
    rng = np.random.default_rng(3)
    metric = MetricParams.from_k(2.0)
    ts = np.linspace(0, 10, 501)
    worst_circle, n = 0.0, 0
    while n < 100:
        abc = rng.uniform(-2, 2, 3)
        M = MomentumABC(*abc)
        if not (M.delta < 0 and M.c != 0):
            continue
        n += 1
        g, _ = closed_form_arrays(np.eye(2), velocity_matrix(M.matrix, metric), metric, ts)
        z, _ = project_arrays(g)
        circ = projected_curve_params(M)
        worst_circle = max(worst_circle, float(np.max(np.abs(np.abs(z - circ.center) - circ.radius))))
    worst_line = 0.0
    ts_line = np.linspace(-1, 1, 201)
    for i in range(20):
        a, b = rng.uniform(-2, 2, 2)
        if i == 0:
            b = 0.0
        M = MomentumABC(a, b, 0.0)
        g, _ = closed_form_arrays(np.eye(2), velocity_matrix(M.matrix, metric), metric, ts_line)
        z, _ = project_arrays(g)
        line = projected_curve_params(M)
        if math.isinf(line.slope):
            dist = np.abs(z.real)
        else:
            dist = np.abs(z.imag - line.slope * z.real - line.intercept) / math.hypot(1, line.slope)
        worst_line = max(worst_line, float(np.max(dist / np.maximum(1.0, np.abs(z)))))
    ok = worst_circle <= 1e-8 and worst_line <= 1e-8
    report(3, ok, f"circle residual {worst_circle:.2e} over 100 momenta (<= 1e-8); "
                  f"line branch residual {worst_line:.2e} over 20 momenta")
    assert ok


def test_criterion_04_curvature_law(report):
    rng = np.random.default_rng(4)
    metric = MetricParams.from_k(2.0)
    h = 1e-3
    ts = np.arange(-1000, 1001) * h
    wk = wv = wres = 0.0
    for i in range(50):
        M = MomentumABC(1.0, -2.0, 1.0) if i == 0 else MomentumABC(*rng.uniform(-2, 2, 3))
        g, _ = closed_form_arrays(np.eye(2), velocity_matrix(M.matrix, metric), metric, ts)
        z, _ = project_arrays(g)
        kap, V = geodesic_curvature(M)
        kf, vf = fd_curvature_and_speed(z, h)
        wk = max(wk, float(np.max(np.abs(kf - kap))))
        wv = max(wv, float(np.max(np.abs(vf - V))))
        wres = max(wres, magnetic_residual(z, kap, V, h))
    wid = 0.0
    for _ in range(1000):
        M = MomentumABC(*rng.uniform(-2, 2, 3))
        kap, V = geodesic_curvature(M)
        wid = max(wid, abs(kap * V - (M.b - M.c)))
    ok = wk <= 1e-4 and wv <= 1e-4 and wres <= 1e-5 and wid <= 1e-10
    report(4, ok, f"|kappa_fd - kappa| {wk:.2e}, |V_fd - V| {wv:.2e} (<= 1e-4); "
                  f"magnetic residual {wres:.2e} at h=1e-3 (<= 1e-5); |kappa V - (b-c)| {wid:.2e} (<= 1e-10)")
    assert ok


def test_criterion_05_algebraic_split(report):
    rng = np.random.default_rng(5)
    mismatches, checked = 0, 0
    while checked < 1000:
        M = MomentumABC(*rng.uniform(-3, 3, 3))
        if abs(M.delta) <= 1e-12:
            continue
        checked += 1
        C = curvature_ratio(M).value
        mismatches += np.sign(C - 1) != -np.sign(M.delta)
        cls = classify_curve(M)
        expected = (CurveClass.HYPERBOLIC_CIRCLE if M.delta < 0 else CurveClass.HYPERCYCLE)
        mismatches += cls is not expected
    cases = {
        (1.0, 0.0, 0.0): CurveClass.GEODESIC,
        (1.0, 0.25, -0.25): CurveClass.HYPERCYCLE,
        (0.0, 0.0, 1.0): CurveClass.HOROCYCLE,
        (1.0, -2.0, 1.0): CurveClass.HYPERBOLIC_CIRCLE,
        (0.0, -1.0, 1.0): CurveClass.FIBER,
    }
    tax = sum(classify_curve(MomentumABC(*abc)) is not cls for abc, cls in cases.items())
    ok = mismatches == 0 and tax == 0
    report(5, ok, f"sign(C-1) = -sign(Delta) and class mismatches {mismatches}/1000; taxonomy mismatches {tax}/5")
    assert ok


def test_criterion_06_third_integral(report):
    ji = abs(klein_j(1j) - 1728)
    jr = abs(klein_j(RHO))
    rng = np.random.default_rng(6)
    ts = np.linspace(0, 20, 101)
    drift = inv = 0.0
    for i in range(10):
        metric = MetricParams.from_k(K_VALUES[i % 3])
        while True:
            M = MomentumABC(*rng.uniform(-2, 2, 3), metric.alpha)
            if M.delta < -0.05:
                break
        u, v, w = rng.uniform(-0.5, 0.5, 3)
        g0 = exp_traceless(np.array([[u, v], [w, -u]]))
        om0 = velocity_matrix(M.matrix, metric)
        g, om = closed_form_arrays(g0, om0, metric, ts)
        F = np.array([third_integral(GeodesicState(GroupElement(g[j]), AlgebraVelocity.from_matrix(om[j])), metric)
                      for j in range(len(ts))])
        scale = max(1.0, abs(F[0]))
        drift = max(drift, float(np.max(np.abs(F - F[0]))) / scale)
        for _ in range(10):
            gam = _random_modular(rng).matrix
            Fg = third_integral(GeodesicState(GroupElement(gam @ g0), AlgebraVelocity.from_matrix(om0)), metric)
            inv = max(inv, abs(Fg - F[0]) / scale)
    ok = ji <= 1e-6 and jr <= 1e-6 and drift <= 1e-6 and inv <= 1e-8
    report(6, ok, f"|j(i)-1728| {ji:.1e}, |j(rho)| {jr:.1e} (<= 1e-6); F drift {drift:.2e} (<= 1e-6); "
                  f"invariance under 100 modular elements {inv:.2e} (<= 1e-8)")
    assert ok


def test_criterion_07_lyapunov(report):
    metric = MetricParams.from_k(2.0)
    runs = {}
    for label, M in (("C=0", lyapunov_momentum_for_level(0.0)),
                     ("C=0.75", lyapunov_momentum_for_level(0.75)),
                     ("C=1.8", MomentumABC(1.0, -2.0, 1.0))):
        t0 = time.perf_counter()
        est = lyapunov_estimate(M, metric, T=50.0)
        runs[label] = (est.lam, time.perf_counter() - t0)
    ok = (0.8 <= runs["C=0"][0] <= 1.2 and 0.4 <= runs["C=0.75"][0] <= 0.6
          and runs["C=1.8"][0] <= 0.05 and all(dt < 60 for _, dt in runs.values()))
    report(7, ok, "; ".join(f"{k}: lambda {lam:.4f} ({dt:.2f} s)" for k, (lam, dt) in runs.items())
           + "; bands [0.8,1.2], [0.4,0.6], <= 0.05")
    assert ok


def test_criterion_08_periodicity_and_cables(report):
    metric = MetricParams.from_k(2.0)
    M = MomentumABC(1.0, -2.0, 1.0)
    pq = detect_rational_ratio(frequencies(M, metric))
    res = group_residual_at(np.eye(2), M, metric, 2 * math.pi)
    with pytest.warns(UserWarning):
        cable = cable_knot_params(M, metric)
    part_a = pq == (3, 1) and res <= 1e-9 and cable.linking == 18
    try:
        M23 = momentum_for_ratio(2, 3, metric)
        with pytest.warns(UserWarning):
            c23 = cable_knot_params(M23, metric)
        part_b = (c23.p, c23.q, c23.linking) == (2, 3, 12)
        detail_b = f"ratio 2/3 gave {(c23.p, c23.q, c23.linking)}"
    except DomainError as exc:
        part_b = False
        detail_b = f"ratio 2/3 not constructible: {exc}"
    ok = part_a and part_b
    report(8, ok, f"(p,q)={pq}, residual at 2pi {res:.1e} (<= 1e-9), linking {cable.linking}; {detail_b}")
    assert ok


def test_criterion_09_volumes(report):
    v = volume_torus_knot_complement(2, 3, 2.0)
    dv = abs(v - 2 * math.pi ** 2 / 3)
    exact6 = GAMMA2_VOLUME_COEFFICIENT == 6 * volume_coefficient(2, 3)
    fl6 = all(gamma2_volume(k) == pytest.approx(6 * modular_volume(k), rel=1e-15) for k in (1.5, 2.0, 3.0, 7.0))
    da = abs(area_pq(2, 3) - math.pi / 3)
    ok = dv <= 1e-12 and exact6 and fl6 and da <= 1e-15
    report(9, ok, f"|vol(2,3,k=2) - 2pi^2/3| {dv:.1e} (<= 1e-12); Gamma2/modular coefficient "
                  f"{GAMMA2_VOLUME_COEFFICIENT / volume_coefficient(2, 3)} exactly; |area(2,3) - pi/3| {da:.1e}")
    assert ok


def test_criterion_10_modular_knots(report):
    rng = np.random.default_rng(10)
    bad_rt = bad_conj = bad_form = 0
    for _ in range(100):
        while True:
            letters = "".join("RL"[i] for i in rng.integers(0, 2, rng.integers(2, 13)))
            if "R" in letters and "L" in letters:
                break
        m = word_product(letters)
        g = ModularElement(m[0][0], m[0][1], m[1][0], m[1][1])
        w = lr_decompose(g)
        bad_rt += w.reconstruct() != g
        gam = _random_modular(rng)
        h = gam @ g @ gam.inverse()
        wh = lr_decompose(h)
        bad_conj += wh.reconstruct() != h or wh.blocks != w.blocks
        for elem in (g, h):
            Q = quadratic_form_of(elem)
            a, b, c, d = elem.entries
            for x, y in rng.integers(-100, 101, (3, 2)):
                x, y = int(x), int(y)
                bad_form += Q(a * x + b * y, c * x + d * y) != Q(x, y)
    worst = 0.0
    n = 0
    while n < 100:
        g = _random_modular(rng, 12)
        if not 2 < abs(g.trace) <= 100:
            continue
        n += 1
        cg = closed_geodesic_of(g)
        lhs = cg.g0 @ exp_traceless(cg.X, cg.T)
        worst = max(worst, min(float(np.max(np.abs(lhs - g.matrix @ cg.g0))),
                               float(np.max(np.abs(lhs + g.matrix @ cg.g0)))))
    ok = bad_rt == 0 and bad_conj == 0 and bad_form == 0 and worst <= 1e-9
    report(10, ok, f"round-trip failures {bad_rt}/100, conjugate failures {bad_conj}/100, "
                   f"form invariance failures {bad_form}/1200; closed geodesic residual {worst:.1e} (<= 1e-9)")
    assert ok


def test_criterion_11_reduction(report):
    rng = np.random.default_rng(11)
    outside = 0
    worst_exact = worst_float = 0.0
    cap_hits = 0
    for _ in range(10_000):
        z = complex(rng.uniform(-10, 10), 10 ** rng.uniform(-6, 3))
        try:
            r = reduce_point(z)
        except Exception:
            cap_hits += 1
            continue
        w = r.z_reduced.z
        outside += not (abs(w.real) <= 0.5 + 1e-12 and abs(w) >= 1 - 1e-12)
        # gamma applied to the input in exact arithmetic, rounded once
        worst_exact = max(worst_exact, abs(r.gamma.act(z) - w))
        worst_float = max(worst_float, abs(mobius(r.gamma.matrix, z) - w))
    ok = outside == 0 and worst_exact <= 1e-12 and cap_hits == 0
    report(11, ok, f"outside domain {outside}/10000; gamma consistency {worst_exact:.1e} (<= 1e-12; "
                   f"plain float evaluation {worst_float:.1e}); iteration-cap hits {cap_hits}")
    assert ok
