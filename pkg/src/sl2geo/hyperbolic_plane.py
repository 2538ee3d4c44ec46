"""Upper half-plane: projection of group elements, circle law, curvature."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from .geodesic_flow import CurvatureRatio, curvature_ratio
from .lie_core import MomentumABC

SERIES_TOL = 1e-9


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise DomainError(f"point must lie in the upper half-plane, got y={self.y}")

    @property
    def z(self):
        return complex(self.x, self.y)

    def __complex__(self):
        return self.z

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        return cls(z.real, z.imag)


@dataclass(frozen=True)
class UnitTangentPoint:
    z: HPoint
    phi: float


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float


@dataclass(frozen=True)
class Line:
    """``y = slope * x + intercept``; ``slope = inf`` is the vertical line ``x = 0``."""

    slope: float
    intercept: float


@dataclass(frozen=True)
class Point:
    z: HPoint


ProjectedCurve = Union[Circle, Line, Point]


class CurveClass(enum.Enum):
    GEODESIC = "Geodesic"
    HYPERCYCLE = "Hypercycle"
    HOROCYCLE = "Horocycle"
    HYPERBOLIC_CIRCLE = "HyperbolicCircle"
    FIBER = "Fiber"


def _as_complex(z):
    if isinstance(z, HPoint):
        return z.z
    return z


def project_arrays(g):
    """``z = (a i + b)/(c i + d)`` and ``phi = arg(i/(c i + d)^2)`` in ``[0, 2 pi)``."""
    g = np.asarray(g, dtype=float)
    den = g[..., 1, 0] * 1j + g[..., 1, 1]
    z = (g[..., 0, 0] * 1j + g[..., 0, 1]) / den
    phi = np.mod(np.pi / 2 - 2.0 * np.angle(den), 2 * np.pi)
    return z, phi


def project(g):
    z, phi = project_arrays(g)
    return UnitTangentPoint(HPoint.from_complex(complex(z)), float(phi))


def mobius(g, z):
    """Action ``z -> (az + b)/(cz + d)``; returns the same kind it was given."""
    g = np.asarray(g, dtype=float)
    zc = _as_complex(z)
    w = (g[0, 0] * zc + g[0, 1]) / (g[1, 0] * zc + g[1, 1])
    if isinstance(z, HPoint):
        return HPoint.from_complex(w)
    return w


def hyperbolic_distance(z1, z2):
    """Distance in ``ds^2 = (dx^2 + dy^2)/y^2``; stable for nearby points."""
    z1, z2 = _as_complex(z1), _as_complex(z2)
    y1, y2 = np.imag(z1), np.imag(z2)
    return 2.0 * np.arcsinh(np.abs(z1 - z2) / (2.0 * np.sqrt(y1 * y2)))


def projected_curve_params(M):
    """Euclidean shape of the projection of the geodesic through ``I`` with momentum ``M``."""
    a, b, c = M.a, M.b, M.c
    if a == 0 and b == 0 and c == 0:
        raise DomainError("momentum a = b = c = 0 projects to a single point of no curve")
    if c != 0:
        center = complex(2 * a, c - b) / (2 * c)
        if a == 0 and b + c == 0:
            return Point(HPoint.from_complex(center))
        return Circle(center, math.sqrt(4 * a * a + (b + c) ** 2) / (2 * abs(c)))
    if b == 0:
        return Line(math.inf, 1.0)
    return Line(2 * a / b, 1.0)


def explicit_projection(M, t):
    """Closed formula for ``z(t)``, the projection of ``exp(tX)`` applied to ``i``.

    ``sqrt(Delta)`` is taken complex, so the ``Delta < 0`` case is the
    trigonometric continuation.  The sign of the root is chosen so that
    ``|exp(2 sqrt(Delta) t)| <= 1``, which avoids overflow.
    """
    a, b, c = M.a, M.b, M.c
    t = np.asarray(t, dtype=float)
    d = M.delta
    if abs(d) <= SERIES_TOL:
        # Delta -> 0 limit: cosh(st) and sinh(st)/s expanded in Delta t^2
        x = d * t * t
        ch = 1.0 + x / 2.0 + x * x / 24.0 + x ** 3 / 720.0
        sh = t * (1.0 + x / 6.0 + x * x / 120.0 + x ** 3 / 5040.0)
        return 1j * (ch + a * sh - 1j * b * sh) / (ch + 1j * c * sh - a * sh)
    s = np.sqrt(complex(d))
    s = np.where(np.real(s * t) > 0, -s, s) if np.ndim(t) else (-s if (s * t).real > 0 else s)
    E = np.exp(2.0 * s * t)
    num = 1j * (E * s - 1j * b * E + E * a + s - a + 1j * b)
    den = E * s + 1j * c * E - E * a + s + a - 1j * c
    return num / den


def geodesic_curvature(M):
    """Signed curvature ``(b - c)/V`` and speed ``V = sqrt(4a^2 + (b + c)^2)``."""
    D = 4 * M.a ** 2 + (M.b + M.c) ** 2
    if not D > 0:
        raise DomainError("geodesic curvature is undefined when 4a^2 + (b+c)^2 = 0 (fiber case)")
    V = math.sqrt(D)
    return (M.b - M.c) / V, V


def _derivatives(z, h, order=4):
    """Central differences of step ``h``: 3-point (``order=2``) or 5-point (``order=4``) stencils."""
    z = np.asarray(z, dtype=complex)
    if order == 2:
        d1 = (z[2:] - z[:-2]) / (2.0 * h)
        d2 = (z[2:] - 2.0 * z[1:-1] + z[:-2]) / (h * h)
        return z[1:-1], d1, d2
    if order != 4:
        raise ValueError("order must be 2 or 4")
    zm2, zm1, z0, zp1, zp2 = z[:-4], z[1:-3], z[2:-2], z[3:-1], z[4:]
    d1 = (zm2 - 8.0 * zm1 + 8.0 * zp1 - zp2) / (12.0 * h)
    d2 = (-zm2 + 16.0 * zm1 - 30.0 * z0 + 16.0 * zp1 - zp2) / (12.0 * h * h)
    return z0, d1, d2


def magnetic_residual(z, kappa, V, h, order=4):
    """Max over interior samples of ``|z'' + (i/y) z'^2 - i kappa V z'|`` (central differences)."""
    if not V > 0:
        raise DomainError("magnetic residual needs a moving projection (V > 0)")
    if len(z) < order + 1:
        raise DomainError(f"need at least {order + 1} samples")
    zc, d1, d2 = _derivatives(z, h, order)
    res = d2 + 1j * d1 ** 2 / zc.imag - 1j * kappa * V * d1
    return float(np.max(np.abs(res)))


def fd_curvature_and_speed(z, h, order=4):
    """Finite-difference signed geodesic curvature and hyperbolic speed at interior samples.

    ``kappa = y Im(D conj(z')) / |z'|^3`` with ``D = z'' + i z'^2 / y`` the
    covariant acceleration; speed is ``|z'|/y``.
    """
    zc, d1, d2 = _derivatives(z, h, order)
    y = zc.imag
    D = d2 + 1j * d1 ** 2 / y
    absd1 = np.abs(d1)
    return y * np.imag(D * np.conj(d1)) / absd1 ** 3, absd1 / y


def arc_lengths(t, z, phi, k):
    """Arc length of a lifted curve in the ``(x, y, phi)`` metric and of its projection.

    Total metric: ``(dx^2 + dy^2)/y^2 + (k - 1)(dphi + dx/y)^2``; the base
    length uses only the first term.  Trapezoidal rule on central-difference
    speeds.
    """
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=complex)
    ph = np.unwrap(np.asarray(phi, dtype=float))
    dz = np.gradient(z, t)
    dph = np.gradient(ph, t)
    y = z.imag
    base2 = np.abs(dz) ** 2 / y ** 2
    full2 = base2 + (k - 1.0) * (dph + dz.real / y) ** 2
    return float(np.trapezoid(np.sqrt(full2), t)), float(np.trapezoid(np.sqrt(base2), t))


def classify_curve(C, tol=0.0):
    """Class of the projected curve from the curvature ratio ``C``.

    ``tol`` is a relative tolerance for the horocycle (``C = 1``) and geodesic
    (``C = 0``) boundaries; the default classifies exactly.
    """
    if isinstance(C, MomentumABC):
        C = curvature_ratio(C)
    if isinstance(C, CurvatureRatio):
        if not C.is_defined:
            raise DomainError("curvature ratio undefined for a = b = c = 0")
        if C.is_infinite:
            return CurveClass.FIBER
        num, den = C.numerator, C.denominator
        if num <= tol * den:
            return CurveClass.GEODESIC
        if abs(num - den) <= tol * den:
            return CurveClass.HOROCYCLE
        return CurveClass.HYPERCYCLE if num < den else CurveClass.HYPERBOLIC_CIRCLE
    c = float(C)
    if math.isnan(c) or c < 0:
        raise DomainError(f"invalid curvature ratio {C}")
    if math.isinf(c):
        return CurveClass.FIBER
    if c <= tol:
        return CurveClass.GEODESIC
    if abs(c - 1.0) <= tol:
        return CurveClass.HOROCYCLE
    return CurveClass.HYPERCYCLE if c < 1 else CurveClass.HYPERBOLIC_CIRCLE


def write_projection_csv(path_or_file, t, z, phi):
    """Projected-trajectory CSV with columns ``t, x, y, phi``."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "x", "y", "phi"])
        for ti, zi, pi_ in zip(np.asarray(t), np.asarray(z), np.asarray(phi)):
            w.writerow([repr(float(ti)), repr(float(zi.real)), repr(float(zi.imag)), repr(float(pi_))])
    finally:
        if own:
            fh.close()
