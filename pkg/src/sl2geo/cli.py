"""Command-line front end: ``sl2geo {simulate,invariants,check,lyapunov,knot,volume}``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError, NumericalError
from .fuchsian import (
    ModularElement,
    gamma2_volume,
    lyapunov_estimate,
    lyapunov_momentum_for_level,
    reduce_point,
    volume_torus_knot_complement,
)
from .geodesic_flow import (
    GeodesicState,
    check_conservation,
    curvature_ratio,
    integrate_oracle,
    invariants,
    sample_closed_form,
)
from .hyperbolic_plane import Circle, classify_curve, project_arrays, projected_curve_params, write_projection_csv
from .knots import axis_and_length, cable_knot_params, lr_decompose, quadratic_form_of, rademacher
from .lie_core import (
    GroupElement,
    MetricParams,
    MomentumABC,
    exact_det,
    uvw_to_abc,
    velocity_matrix,
    velocity_of,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


# ---------------------------------------------------------------- output helpers

def _clean(x):
    """Make a report JSON-safe: non-finite floats become strings, numpy scalars plain."""
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    return x


def dumps(report):
    # repr floats are the shortest strings that round-trip, so never more than 17 digits
    return json.dumps(_clean(report), indent=2, sort_keys=False)


def _atomic_write(path, writer):
    """Write via a temporary file in the target directory, then rename."""
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(report, out=None):
    text = dumps(report) + "\n"
    if out:
        _atomic_write(out, lambda fh: fh.write(text))
    sys.stdout.write(text)


# ---------------------------------------------------------------- SVG

def _fd_boundary_paths(xmin, xmax):
    """Polylines of the modular fundamental domain and its translates across the view."""
    paths = []
    th = np.linspace(0.0, math.pi, 181)
    for n in range(math.floor(xmin) - 1, math.ceil(xmax) + 2):
        paths.append(np.exp(1j * th) + n)
    return paths


def render_svg(z, *, modular=False, circle=None, width=640, height=480):
    """SVG 1.1 of a curve in the upper half-plane; view fits the curve with a 10% margin."""
    z = np.asarray(z, dtype=complex)
    z = z[np.isfinite(z)]
    if z.size == 0:
        raise NumericalError("nothing finite to plot")
    x0, x1 = float(z.real.min()), float(z.real.max())
    y0, y1 = float(z.imag.min()), float(z.imag.max())
    span = max(x1 - x0, y1 - y0, 1e-6)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    half = 0.5 * span * 1.2
    vx0, vx1, vy0, vy1 = cx - half, cx + half, cy - half, cy + half
    s = min(width, height) / (vx1 - vx0)

    def pt(w):
        return f"{(w.real - vx0) * s:.3f},{(vy1 - w.imag) * s:.3f}"

    def poly(ws, style):
        return f'<polyline fill="none" {style} points="{" ".join(pt(w) for w in ws)}"/>'

    W, H = (vx1 - vx0) * s, (vy1 - vy0) * s
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W:.0f}" height="{H:.0f}" '
        f'viewBox="0 0 {W:.3f} {H:.3f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if vy0 <= 0 <= vy1:
        parts.append(poly([complex(vx0, 0), complex(vx1, 0)], 'stroke="#999" stroke-width="1"'))
    if modular:
        for arc in _fd_boundary_paths(vx0, vx1):
            parts.append(poly(arc, 'stroke="#48c" stroke-width="1"'))
        for xv in (-0.5, 0.5):
            parts.append(poly([complex(xv, math.sqrt(3) / 2), complex(xv, max(vy1, 1.0))],
                              'stroke="#48c" stroke-width="1.5"'))
    if circle is not None:
        c = circle.center
        px, py = (c.real - vx0) * s, (vy1 - c.imag) * s
        parts.append(f'<circle cx="{px:.3f}" cy="{py:.3f}" r="2" fill="red"/>')
        parts.append(f'<text x="{px + 4:.3f}" y="{py - 4:.3f}" font-size="12" fill="red">'
                     f'{c.real:.6g}{c.imag:+.6g}i</text>')
    parts.append(poly(z, 'stroke="black" stroke-width="1.5"'))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------- parsing

def _floats(text, n, name):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise DomainError(f"--{name} expects {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n or not all(math.isfinite(v) for v in vals):
        raise DomainError(f"--{name} expects {n} finite comma-separated numbers, got {text!r}")
    return vals


def _metric(args):
    if getattr(args, "alpha", None) is not None or getattr(args, "beta", None) is not None:
        if args.alpha is None or args.beta is None:
            raise DomainError("--alpha and --beta must be given together")
        return MetricParams(args.alpha, args.beta)
    return MetricParams.from_k(args.k)


def _momentum(args, metric):
    if args.abc is not None and args.uvw is not None:
        raise DomainError("give only one of --abc and --uvw")
    if args.uvw is not None:
        u, v, w = _floats(args.uvw, 3, "uvw")
        a, b, c = uvw_to_abc(u, v, w, metric.k)
        return MomentumABC(a, b, c, metric.alpha)
    a, b, c = _floats(args.abc or "1,-2,1", 3, "abc")
    return MomentumABC(a, b, c, metric.alpha)


def _g0(args):
    if args.g0 is None:
        return np.eye(2)
    g = np.array(_floats(args.g0, 4, "g0")).reshape(2, 2)
    if abs(exact_det(g) - 1.0) > 1e-12:
        raise DomainError(f"--g0 must have determinant 1, got {exact_det(g):.17g}")
    return g


def _add_metric(p):
    p.add_argument("--k", type=float, default=2.0, help="metric parameter k > 1 (alpha = 2)")
    p.add_argument("--alpha", type=float, help="raw metric weight on the symmetric part")
    p.add_argument("--beta", type=float, help="raw metric weight on the skew part")


def _add_initial(p):
    p.add_argument("--abc", help="normalised momentum a,b,c (default 1,-2,1)")
    p.add_argument("--uvw", help="velocity u,v,w in the alpha = 2 presentation")
    p.add_argument("--g0", help="initial group element m11,m12,m21,m22 (default identity)")


# ---------------------------------------------------------------- commands

def _report_invariants(M, metric, g0):
    state = GeodesicState(GroupElement(g0), velocity_of(M, metric))
    inv = invariants(state, metric)
    ratio = curvature_ratio(M)
    cls = classify_curve(ratio).value if ratio.is_defined else None
    return {
        "k": metric.k, "alpha": metric.alpha, "beta": metric.beta,
        "abc": [M.a, M.b, M.c],
        "H": inv.H, "Delta": inv.Delta, "C": inv.C.value, "kappa": inv.kappa, "V": inv.V,
        "class": cls,
        "m": [inv.m.u, inv.m.v, inv.m.w],
    }


def cmd_simulate(args):
    metric = _metric(args)
    M = _momentum(args, metric)
    g0 = _g0(args)
    if args.dt <= 0 or args.t_end < 0:
        raise DomainError("need dt > 0 and t_end >= 0")
    if M.a == 0 and M.b == 0 and M.c == 0:
        print("warning: zero momentum, the trajectory is a constant point", file=sys.stderr)
    n = max(1, int(round(args.t_end / args.dt)))
    ts = np.linspace(0.0, args.t_end, n + 1)
    om0 = velocity_matrix(M.matrix, metric)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        traj = sample_closed_form(g0, om0, metric, ts)
        if not np.all(np.isfinite(traj.g)):
            raise NumericalError("closed form overflowed; shorten --t-end")
        z, phi = project_arrays(traj.g)
    if not np.all(np.isfinite(z)) or not np.all(z.imag > 0):
        raise NumericalError("projection left the upper half-plane (underflow); shorten --t-end")
    base = os.path.join(args.out_dir, args.name)
    _atomic_write(base + "_group.csv", traj.to_csv)
    _atomic_write(base + "_proj.csv", lambda fh: write_projection_csv(fh, ts, z, phi))
    files = [base + "_group.csv", base + "_proj.csv"]
    circle = None
    if not (M.a == 0 and M.b == 0 and M.c == 0):
        shape = projected_curve_params(M)
        if isinstance(shape, Circle) and np.array_equal(g0, np.eye(2)):
            circle = shape
    if args.svg:
        zp = np.array([reduce_point(w).z_reduced.z for w in z]) if args.modular else z
        svg = render_svg(zp, modular=args.modular, circle=None if args.modular else circle)
        _atomic_write(args.svg, lambda fh: fh.write(svg))
        files.append(args.svg)
    end = traj.g[-1]
    report = {"samples": len(ts), "files": files,
              "return_residual": min(float(np.max(np.abs(end - g0))), float(np.max(np.abs(end + g0))))}
    if circle is not None:
        report["center"] = [circle.center.real, circle.center.imag]
        report["radius"] = circle.radius
    _emit(report)
    return EXIT_OK


def cmd_invariants(args):
    metric = _metric(args)
    M = _momentum(args, metric)
    _emit(_report_invariants(M, metric, _g0(args)))
    return EXIT_OK


def cmd_check(args):
    metric = _metric(args)
    M = _momentum(args, metric)
    g0 = _g0(args)
    if args.dt <= 0 or args.t_end <= 0:
        raise DomainError("need dt > 0 and t_end > 0")
    report = _report_invariants(M, metric, g0)
    om0 = velocity_matrix(M.matrix, metric)
    orc = integrate_oracle(g0, om0, metric, args.t_end, args.dt, sample_every=args.sample_every)
    cf = sample_closed_form(g0, om0, metric, orc.t)
    d_cf, d_or = check_conservation(cf, metric), check_conservation(orc, metric)
    report["drift_closed_form"] = {"H": d_cf.H, "Delta": d_cf.Delta, "m": d_cf.m}
    report["drift_oracle"] = {"H": d_or.H, "Delta": d_or.Delta, "m": d_or.m}
    scale = np.maximum(1.0, np.max(np.abs(cf.g), axis=(-1, -2)))
    report["oracle_residual"] = float(np.max(np.max(np.abs(cf.g - orc.g), axis=(-1, -2)) / scale))
    _emit(report)
    return EXIT_OK


def _lyapunov_job(C, M, metric, args):
    if M is None:
        M = lyapunov_momentum_for_level(C)
    est = lyapunov_estimate(M, metric, T=args.T, delta0=args.delta0,
                            renorm_interval=args.renorm_interval, seed=args.seed)
    rep = est.to_json_dict()
    if C is not None:
        rep["C"] = C
    if args.out_dir:
        tag = "abc" if C is None else f"C{C:g}"
        _atomic_write(os.path.join(args.out_dir, f"lyapunov_{tag}.json"),
                      lambda fh: fh.write(dumps(rep) + "\n"))
    return rep


def cmd_lyapunov(args):
    metric = _metric(args)
    if args.abc is not None or args.uvw is not None:
        jobs = [(None, _momentum(args, metric))]
    else:
        levels = [float(c) for c in args.levels.split(",")]
        if any(not c >= 0 for c in levels):
            raise DomainError("curvature levels must be nonnegative")
        jobs = [(c, None) for c in levels]
    if args.workers < 1:
        raise DomainError("--workers must be at least 1")
    with ThreadPoolExecutor(max_workers=min(args.workers, len(jobs))) as pool:
        reports = list(pool.map(lambda j: _lyapunov_job(j[0], j[1], metric, args), jobs))
    _emit(reports[0] if len(reports) == 1 else reports)
    return EXIT_OK


def cmd_knot(args):
    if args.kind == "modular":
        vals = _floats(args.matrix, 4, "matrix")
        if not all(v.is_integer() for v in vals):
            raise DomainError("--matrix entries must be integers")
        g = ModularElement(*(int(v) for v in vals))
        word = lr_decompose(g)
        _, length = axis_and_length(g)
        _emit({
            "matrix": [[g.entries[0], g.entries[1]], [g.entries[2], g.entries[3]]],
            "trace": g.trace,
            "word": str(word),
            "rademacher": rademacher(word),
            "form": quadratic_form_of(g).as_list(),
            "length": length,
        })
        return EXIT_OK
    metric = _metric(args)
    M = _momentum(args, metric)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = cable_knot_params(M, metric, tol=args.tol, qmax=args.qmax)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if params is None:
        raise DomainError("frequency ratio is not rational within the tolerance")
    _emit(params.to_json_dict())
    return EXIT_OK


def cmd_volume(args):
    if args.gamma2:
        vol = gamma2_volume(args.k)
    else:
        vol = volume_torus_knot_complement(args.p, args.q, args.k)
    _emit({"p": args.p, "q": args.q, "k": args.k, "gamma2": args.gamma2, "volume": vol})
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser():
    ap = argparse.ArgumentParser(prog="sl2geo", description="Geodesic flows on SL(2,R) and the modular quotient.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="closed-form trajectory to CSV (and optional SVG)")
    _add_metric(p)
    _add_initial(p)
    p.add_argument("--t-end", type=float, default=2 * math.pi)
    p.add_argument("--dt", type=float, default=1e-2)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--name", default="geodesic", help="prefix of the CSV files")
    p.add_argument("--svg", help="write an SVG of the projection here")
    p.add_argument("--modular", action="store_true", help="reduce to the fundamental domain and draw it")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("invariants", help="H, Delta, C, kappa, V and the curve class")
    _add_metric(p)
    _add_initial(p)
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("check", help="invariants plus conservation drifts and oracle residual")
    _add_metric(p)
    _add_initial(p)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--sample-every", type=int, default=10)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("lyapunov", help="Benettin estimate on the modular quotient")
    _add_metric(p)
    p.add_argument("--abc", help="momentum (overrides --levels)")
    p.add_argument("--uvw")
    p.add_argument("--levels", default="0,0.25,0.5,0.75", help="comma-separated curvature levels C")
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--delta0", type=float, default=1e-8)
    p.add_argument("--renorm-interval", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--out-dir", help="also write one JSON file per level here")
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("knot", help="cable parameters or modular knot data")
    p.add_argument("kind", choices=["cable", "modular"])
    _add_metric(p)
    p.add_argument("--abc")
    p.add_argument("--uvw")
    p.add_argument("--matrix", default="2,1,1,1", help="integer a,b,c,d for the modular case")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--qmax", type=int, default=200)
    p.set_defaults(func=cmd_knot)

    p = sub.add_parser("volume", help="volume of a torus-knot complement")
    p.add_argument("--p", type=int, default=2)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--k", type=float, default=2.0)
    p.add_argument("--gamma2", action="store_true", help="level-2 congruence quotient instead")
    p.set_defaults(func=cmd_volume)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
