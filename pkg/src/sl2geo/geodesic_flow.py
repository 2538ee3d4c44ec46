"""Geodesic flow on SL(2,R): closed form, RK4 oracle, conserved quantities."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, NumericalError
from .lie_core import (
    AlgebraVelocity,
    GroupElement,
    MetricParams,
    MomentumABC,
    cartan_split,
    exact_det,
    exp_rotation,
    exp_traceless,
    momentum_matrix,
    sl2_inv,
    velocity_matrix,
)

RENORM_EVERY = 100
OVERFLOW_GUARD = 1e12
# det(g) of a float matrix is only resolvable while |m11 m22| + |m12 m21| stays
# moderate; beyond this, renormalising would inject rounding noise.
RENORM_COND_MAX = 1e4
RATIO_TOL = 1e-9
RATIO_QMAX = 200


@dataclass(frozen=True)
class GeodesicState:
    g: GroupElement
    omega: AlgebraVelocity


@dataclass(frozen=True)
class RightMomentum:
    """``m = g M g^{-1} = alpha * ((u, v), (w, -u))``."""

    u: float
    v: float
    w: float
    alpha: float = 2.0

    @property
    def normalized(self):
        return np.array([[self.u, self.v], [self.w, -self.u]])

    @property
    def delta(self):
        return self.u * self.u + self.v * self.w


@dataclass(frozen=True)
class CurvatureRatio:
    """``C = (b - c)^2 / (4a^2 + (b + c)^2)`` kept as a fraction.

    A zero denominator with positive numerator is ``C = +inf`` (fiber case);
    ``0/0`` (``a = b = c = 0``) is undefined.
    """

    numerator: float
    denominator: float

    @property
    def is_defined(self):
        return self.denominator > 0 or self.numerator > 0

    @property
    def is_infinite(self):
        return self.denominator == 0 and self.numerator > 0

    @property
    def value(self):
        if not self.is_defined:
            return math.nan
        if self.is_infinite:
            return math.inf
        return self.numerator / self.denominator

    def __float__(self):
        return self.value


@dataclass(frozen=True)
class InvariantsRecord:
    H: float
    Delta: float
    C: CurvatureRatio
    m: RightMomentum
    kappa: float
    V: float


@dataclass(frozen=True)
class Frequencies:
    omega1: float
    omega2: float

    @property
    def ratio(self):
        return self.omega1 / self.omega2


@dataclass
class Trajectory:
    """Sampled flow: ``t`` has shape (n,), ``g`` and ``omega`` shape (n, ..., 2, 2)."""

    t: np.ndarray
    g: np.ndarray
    omega: np.ndarray

    def __len__(self):
        return len(self.t)

    def state(self, i):
        return GeodesicState(GroupElement(self.g[i]), AlgebraVelocity.from_matrix(self.omega[i]))

    def to_csv(self, path_or_file):
        """Columns ``t, m11, m12, m21, m22, u, v, w``; single trajectories only."""
        if self.g.ndim != 3:
            raise ValueError("CSV export needs an unbatched trajectory")
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "m11", "m12", "m21", "m22", "u", "v", "w"])
            for t, g, om in zip(self.t, self.g, self.omega):
                w.writerow([repr(float(x)) for x in (t, g[0, 0], g[0, 1], g[1, 0], g[1, 1],
                                                      om[0, 0], om[0, 1], om[1, 0])])
        finally:
            if own:
                fh.close()


@dataclass(frozen=True)
class DriftReport:
    H: float
    Delta: float
    m: float

    @property
    def max(self):
        return max(self.H, self.Delta, self.m)


@dataclass(frozen=True)
class PeriodicityResult:
    T: float
    residual: float
    j: int
    sign: int
    closed: bool
    degenerate: bool = False


def _omega_array(omega):
    if isinstance(omega, AlgebraVelocity):
        return omega.matrix
    return np.asarray(omega, dtype=float)


def closed_form_arrays(g0, omega0, metric, t):
    """Vectorised closed form; ``t`` may be an array, giving shape ``t.shape + (2, 2)``.

    ``g(t) = g0 exp(t X0) exp(t Y0)`` and ``Omega(t) = exp(-t Y0) Omega0 exp(t Y0)``.
    """
    g0 = np.asarray(g0, dtype=float)
    om0 = _omega_array(omega0)
    split = cartan_split(om0, metric)
    t = np.asarray(t, dtype=float)
    tb = t.reshape(t.shape + (1,) * (om0.ndim - 2))
    ex = exp_traceless(split.X, tb)
    ey = exp_rotation(split.Y, tb)
    g = g0 @ ex @ ey
    omega = sl2_inv(ey) @ om0 @ ey
    return g, omega


def closed_form_geodesic(g0, omega0, metric, t):
    g, om = closed_form_arrays(g0, omega0, metric, float(t))
    projective = g0.projective if isinstance(g0, GroupElement) else True
    return GeodesicState(GroupElement(g, projective), AlgebraVelocity.from_matrix(om))


def sample_closed_form(g0, omega0, metric, ts):
    ts = np.asarray(ts, dtype=float)
    g, om = closed_form_arrays(g0, omega0, metric, ts)
    return Trajectory(ts, g, om)


def euler_poincare_rhs(omega, k):
    """``dOmega/dt = (k/2)(Omega^T Omega - Omega Omega^T)``."""
    om = _omega_array(omega)
    omt = np.swapaxes(om, -1, -2)
    rhs = 0.5 * k * (omt @ om - om @ omt)
    if isinstance(omega, AlgebraVelocity):
        return AlgebraVelocity.from_matrix(rhs)
    return rhs


def _renormalize_batch(g):
    flat = g.reshape(-1, 2, 2)
    for i, m in enumerate(flat):
        cond = abs(m[0, 0] * m[1, 1]) + abs(m[0, 1] * m[1, 0])
        if cond <= RENORM_COND_MAX:
            d = exact_det(m)
            if d > 0:
                flat[i] = m / math.sqrt(d)
    return flat.reshape(g.shape)


def integrate_oracle(g0, omega0, metric, t_end, dt, *, renorm_every=RENORM_EVERY,
                     overflow_guard=OVERFLOW_GUARD, sample_every=1):
    """Fixed-step classical RK4 for ``g' = g Omega``, ``Omega' = (k/2)[Omega^T, Omega]``.

    Independent of the closed form.  Accepts batches of initial conditions with
    a common leading shape.  Raises :class:`NumericalError` when any entry of
    ``g`` exceeds ``overflow_guard``.
    """
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt}")
    k = metric.k
    g = np.array(g0, dtype=float)
    om = np.array(_omega_array(omega0), dtype=float)
    g, om = np.broadcast_arrays(g, om)
    g, om = g.copy(), om.copy()

    n = int(round(t_end / dt))
    ts, gs, oms = [0.0], [g.copy()], [om.copy()]

    def f(gg, oo):
        oot = np.swapaxes(oo, -1, -2)
        return gg @ oo, 0.5 * k * (oot @ oo - oo @ oot)

    for step in range(1, n + 1):
        k1g, k1o = f(g, om)
        k2g, k2o = f(g + 0.5 * dt * k1g, om + 0.5 * dt * k1o)
        k3g, k3o = f(g + 0.5 * dt * k2g, om + 0.5 * dt * k2o)
        k4g, k4o = f(g + dt * k3g, om + dt * k3o)
        g = g + (dt / 6.0) * (k1g + 2 * k2g + 2 * k3g + k4g)
        om = om + (dt / 6.0) * (k1o + 2 * k2o + 2 * k3o + k4o)
        if renorm_every and step % renorm_every == 0:
            g = _renormalize_batch(g)
        if not np.all(np.abs(g) <= overflow_guard):
            raise NumericalError(
                f"oracle rejected: |g| exceeded overflow_guard={overflow_guard:g} at t={step * dt:g}")
        if step % sample_every == 0 or step == n:
            ts.append(step * dt)
            gs.append(g.copy())
            oms.append(om.copy())
    return Trajectory(np.array(ts), np.array(gs), np.array(oms))


def _abc(omega_mat, metric):
    M = momentum_matrix(omega_mat, metric) / metric.alpha
    return M[..., 0, 0], M[..., 0, 1], M[..., 1, 0]


def hamiltonian(a, b, c, metric):
    al, be = metric.alpha, metric.beta
    return al / (4.0 * be) * (be * (4 * a * a + (b + c) ** 2) - al * (b - c) ** 2)


def curvature_ratio(M):
    a, b, c = M.a, M.b, M.c
    return CurvatureRatio((b - c) ** 2, 4 * a * a + (b + c) ** 2)


def invariants(state, metric):
    om = _omega_array(state.omega)
    g = np.asarray(state.g, dtype=float)
    a, b, c = (float(x) for x in _abc(om, metric))
    M = MomentumABC(a, b, c, metric.alpha)
    X = M.normalized
    mm = g @ X @ sl2_inv(g)
    D = 4 * a * a + (b + c) ** 2
    if D > 0:
        V = math.sqrt(D)
        kappa = (b - c) / V
    elif b != c:
        V, kappa = 0.0, math.copysign(math.inf, b - c)
    else:
        V, kappa = 0.0, math.nan
    return InvariantsRecord(
        H=float(hamiltonian(a, b, c, metric)),
        Delta=a * a + b * c,
        C=CurvatureRatio((b - c) ** 2, D),
        m=RightMomentum(float(mm[0, 0]), float(mm[0, 1]), float(mm[1, 0]), metric.alpha),
        kappa=kappa,
        V=V,
    )


def _rel(diff, scale):
    diff = np.asarray(diff, dtype=float)
    scale = np.asarray(scale, dtype=float)
    out = np.where(scale > 0, diff / np.where(scale > 0, scale, 1.0), np.where(diff > 0, np.inf, 0.0))
    return float(np.max(out)) if out.size else 0.0


def check_conservation(trajectory, metric):
    """Maximum relative drift of ``H``, ``Delta`` and ``m`` along a trajectory.

    ``H`` is relative to ``|H(0)|``; ``Delta`` to ``a^2 + (b^2 + c^2)/2`` (it can
    vanish); ``m`` to ``|g|^2 |M|``, the scale at which ``g M g^{-1}`` is
    resolved in floating point.
    """
    if len(trajectory) == 0:
        raise DomainError("trajectory is empty")
    g = np.asarray(trajectory.g, dtype=float)
    om = np.asarray(trajectory.omega, dtype=float)
    a, b, c = _abc(om, metric)
    H = hamiltonian(a, b, c, metric)
    Dl = a * a + b * c
    X = np.zeros(om.shape)
    X[..., 0, 0], X[..., 0, 1], X[..., 1, 0], X[..., 1, 1] = a, b, c, -a
    m = g @ X @ sl2_inv(g)

    dH = np.abs(H - H[0])
    dD = np.abs(Dl - Dl[0])
    dm = np.max(np.abs(m - m[0]), axis=(-1, -2))
    Xnorm = np.max(np.abs(X[0]), axis=(-1, -2))
    gnorm = np.max(np.abs(g), axis=(-1, -2))
    return DriftReport(
        H=_rel(dH, np.broadcast_to(np.abs(H[0]), dH.shape)),
        Delta=_rel(dD, np.broadcast_to(a[0] ** 2 + (b[0] ** 2 + c[0] ** 2) / 2, dD.shape)),
        m=_rel(dm, gnorm ** 2 * Xnorm),
    )


def frequencies(M, metric):
    """Fiber frequency ``(beta-alpha)/(2 beta) |b-c|`` and circle frequency ``sqrt(-Delta)``."""
    d = M.delta
    if not d < 0:
        raise DomainError(f"frequencies need Delta < 0, got Delta={d:g}")
    w1 = (metric.beta - metric.alpha) / (2.0 * metric.beta) * abs(M.b - M.c)
    return Frequencies(w1, math.sqrt(-d))


def detect_rational_ratio(freqs, tol=RATIO_TOL, qmax=RATIO_QMAX):
    """Coprime ``(p, q)`` with ``|omega1/omega2 - p/q| <= tol`` and ``q <= qmax``, else ``None``."""
    if not freqs.omega2 > 0:
        raise DomainError("omega2 must be positive")
    r = freqs.ratio
    best = Fraction(r).limit_denominator(qmax)
    if abs(r - best.numerator / best.denominator) <= tol:
        return best.numerator, best.denominator
    return None


def verify_group_periodicity(g0, M, metric, p, q, tol=1e-9):
    """Search ``T = pi j / omega2`` (``j = 1..2q``) for ``g(T) = +-g0``.

    Both exponential factors close at ``-I`` on half periods, so the residual is
    minimised over the sign.  Returns the smallest closing ``T``; if none
    closes within ``tol`` the best candidate is returned with ``closed=False``.
    """
    g0 = np.asarray(g0, dtype=float)
    omega0 = velocity_matrix(M.normalized * metric.alpha, metric)
    if not np.any(omega0):
        return PeriodicityResult(0.0, 0.0, 0, 1, True, degenerate=True)
    w2 = frequencies(M, metric).omega2
    best = None
    for j in range(1, 2 * q + 1):
        T = math.pi * j / w2
        g, _ = closed_form_arrays(g0, omega0, metric, T)
        rp = float(np.max(np.abs(g - g0)))
        rm = float(np.max(np.abs(g + g0)))
        res, sign = (rp, 1) if rp <= rm else (rm, -1)
        if res <= tol:
            return PeriodicityResult(T, res, j, sign, True)
        if best is None or res < best.residual:
            best = PeriodicityResult(T, res, j, sign, False)
    return best


def group_residual_at(g0, M, metric, T):
    """``min_sign max|g(T) -+ g0|`` at a prescribed time."""
    g0 = np.asarray(g0, dtype=float)
    omega0 = velocity_matrix(M.normalized * metric.alpha, metric)
    g, _ = closed_form_arrays(g0, omega0, metric, T)
    return min(float(np.max(np.abs(g - g0))), float(np.max(np.abs(g + g0))))


__all__ = [
    "GeodesicState", "RightMomentum", "CurvatureRatio", "InvariantsRecord", "Frequencies",
    "Trajectory", "DriftReport", "PeriodicityResult", "MetricParams",
    "closed_form_arrays", "closed_form_geodesic", "sample_closed_form", "euler_poincare_rhs",
    "integrate_oracle", "hamiltonian", "curvature_ratio", "invariants", "check_conservation",
    "frequencies", "detect_rational_ratio", "verify_group_periodicity", "group_residual_at",
]
