"""The modular quotient PSL(2,Z)\\PSL(2,R).

Fundamental-domain reduction, the analytic third integral built from Klein's
j-invariant, a two-trajectory Lyapunov estimate on the quotient, and the
area/volume formulas for the (p, q) orbifolds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, NumericalError
from .geodesic_flow import RightMomentum, closed_form_arrays, hamiltonian
from .hyperbolic_plane import HPoint, hyperbolic_distance, project_arrays
from .lie_core import MomentumABC, exact_det, sl2_inv, velocity_matrix

BOUNDARY_TOL = 1e-12
MAX_ITER = 10_000
J_TERMS = 30
ORBIFOLD_TOL = 1e-9
RHO = complex(0.5, math.sqrt(3) / 2)


class ModularElement:
    """Integer matrix of determinant 1, compared up to sign (PSL(2,Z))."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        vals = (a, b, c, d)
        if not all(isinstance(x, (int, np.integer)) or float(x).is_integer() for x in vals):
            raise DomainError(f"modular element needs integer entries, got {vals}")
        a, b, c, d = (int(x) for x in vals)
        if a * d - b * c != 1:
            raise DomainError(f"modular element needs det 1, got {a * d - b * c}")
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def from_matrix(cls, m):
        m = np.asarray(m)
        ints = [int(round(float(x))) for x in m.ravel()]
        if any(abs(float(x) - i) > 0 for x, i in zip(m.ravel(), ints)):
            raise DomainError("matrix entries must be integers")
        return cls(*ints)

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def T(cls, n=1):
        return cls(1, n, 0, 1)

    @classmethod
    def S(cls):
        return cls(0, -1, 1, 0)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    @property
    def matrix(self):
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def trace(self):
        return self.a + self.d

    def __matmul__(self, other):
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return ModularElement(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __pow__(self, n):
        out = ModularElement.identity()
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out @ base
        return out

    def inverse(self):
        return ModularElement(self.d, -self.b, -self.c, self.a)

    def __neg__(self):
        return ModularElement(-self.a, -self.b, -self.c, -self.d)

    def __eq__(self, other):
        if not isinstance(other, ModularElement):
            return NotImplemented
        return self.entries == other.entries or self.entries == (-other).entries

    def __hash__(self):
        e = self.entries
        return hash(max(e, tuple(-x for x in e)))

    def __repr__(self):
        return f"ModularElement(({self.a}, {self.b}), ({self.c}, {self.d}))"

    def act(self, z):
        """Mobius action evaluated in exact rational arithmetic, rounded once."""
        zc = complex(z.z if isinstance(z, HPoint) else z)
        x, y = Fraction(zc.real), Fraction(zc.imag)
        a, b, c, d = self.entries
        # (a z + b)/(c z + d) = ((a z + b)(c zbar + d)) / |c z + d|^2
        nr = (a * x + b) * (c * x + d) + a * c * y * y
        ni = y * ((c * x + d) * a - (a * x + b) * c)
        den = (c * x + d) ** 2 + (c * y) ** 2
        w = complex(float(nr / den), float(ni / den))
        return HPoint.from_complex(w) if isinstance(z, HPoint) else w


@dataclass
class ReductionResult:
    z_reduced: HPoint
    gamma: ModularElement
    word: list = field(default_factory=list)
    iterations: int = 0


def in_fundamental_domain(z, tol=BOUNDARY_TOL):
    zc = complex(z.z if isinstance(z, HPoint) else z)
    return abs(zc.real) <= 0.5 + tol and abs(zc) >= 1.0 - tol


def reduce_point(z, boundary_tol=BOUNDARY_TOL, max_iter=MAX_ITER):
    """Move ``z`` into ``{|Re z| <= 1/2, |z| >= 1}`` by translations and ``z -> -1/z``.

    The loop runs in floating point; the accumulated integer matrix is then
    re-applied to the input exactly, and the loop resumes if rounding left the
    point outside the domain.  Ties go to ``Re z`` in ``[-1/2, 1/2)``.
    """
    z0 = complex(z.z if isinstance(z, HPoint) else z)
    if not z0.imag > 0:
        raise DomainError(f"reduce_point needs Im z > 0, got {z0}")
    gamma = ModularElement.identity()
    word = []
    w = z0
    it = 0
    for _ in range(8):
        while True:
            it += 1
            if it > max_iter:
                raise NumericalError(f"reduction did not terminate within {max_iter} steps (z={z0})")
            n = math.floor(w.real + 0.5)
            if n:
                w = w - n
                gamma = ModularElement.T(-n) @ gamma
                word.append(f"T^{-n}")
            if abs(w) < 1.0 - boundary_tol:
                w = -1.0 / w
                gamma = ModularElement.S() @ gamma
                word.append("S")
            else:
                break
        w = gamma.act(z0)
        if in_fundamental_domain(w, boundary_tol):
            break
    else:
        raise NumericalError(f"reduction of {z0} does not stabilise")
    return ReductionResult(HPoint.from_complex(w), gamma, word, it)


def reduce_group(g):
    """Split ``g = gamma @ g_reduced`` (up to sign) with ``project(g_reduced)`` in the domain.

    Returns ``(gamma, g_reduced)``.  Note ``gamma`` is the inverse of the
    element that :func:`reduce_point` reports for ``project(g)``.
    """
    g = np.asarray(g, dtype=float)
    cond = abs(g[0, 0] * g[1, 1]) + abs(g[0, 1] * g[1, 0])
    if abs(exact_det(g) - 1.0) > 1e-6 * max(1.0, cond):
        raise DomainError("reduce_group needs det g = 1")
    z, _ = project_arrays(g)
    res = reduce_point(complex(z))
    return res.gamma.inverse(), res.gamma.matrix @ g


def _uvw(m):
    if isinstance(m, RightMomentum):
        return m.u, m.v, m.w
    if isinstance(m, MomentumABC):
        return m.a, m.b, m.c
    m = np.asarray(m, dtype=float)
    if m.shape == (2, 2):
        return m[0, 0], m[0, 1], m[1, 0]
    return tuple(float(x) for x in m)


def fixed_point_of_momentum(m):
    """Point of the upper half-plane fixed by the elliptic element generated by ``m``.

    For ``Delta = u^2 + vw < 0`` this is ``(u + i sign(w) sqrt(-Delta)) / w``;
    the map is homogeneous of degree zero and equivariant under conjugation.
    """
    u, v, w = _uvw(m)
    d = u * u + v * w
    if not d < 0:
        raise DomainError(f"fixed point needs Delta < 0 (two-sheeted hyperboloid), got Delta={d:g}")
    return HPoint(u / w, math.sqrt(-d) / abs(w))


def _divisor_power_sums(n, p):
    s = np.zeros(n + 1)
    for d in range(1, n + 1):
        s[d::d] += float(d) ** p
    return s[1:]


def eisenstein_e4_e6(z, n_terms=J_TERMS):
    q = np.exp(2j * np.pi * complex(z))
    qn = q ** np.arange(1, n_terms + 1)
    e4 = 1 + 240 * np.sum(_divisor_power_sums(n_terms, 3) * qn)
    e6 = 1 - 504 * np.sum(_divisor_power_sums(n_terms, 5) * qn)
    return complex(e4), complex(e6)


def klein_j(z, n_terms=J_TERMS):
    """Klein's modular invariant, normalised so ``j(i) = 1728``.

    The argument is reduced to the fundamental domain first, where
    ``|q| <= exp(-pi sqrt 3)``, then ``1728 E4^3 / (E4^3 - E6^2)`` is summed.
    """
    w = reduce_point(z).z_reduced.z
    e4, e6 = eisenstein_e4_e6(w, n_terms)
    e43 = e4 ** 3
    return 1728.0 * e43 / (e43 - e6 * e6)


def right_momentum(g, omega, metric):
    """``m / alpha = g X g^{-1}`` for the current state."""
    g = np.asarray(g, dtype=float)
    om = np.asarray(omega, dtype=float)
    X = (metric.alpha + metric.beta) * om + (metric.alpha - metric.beta) * om.T
    X = X / (2.0 * metric.alpha)
    mm = g @ X @ sl2_inv(g)
    return RightMomentum(float(mm[0, 0]), float(mm[0, 1]), float(mm[1, 0]), metric.alpha)


def third_integral(state, metric):
    """``F = j(fixed point of m)``, invariant under PSL(2,Z) and conserved when ``Delta < 0``."""
    m = right_momentum(state.g, state.omega, metric)
    return klein_j(fixed_point_of_momentum(m))


def near_orbifold_point(z, tol=ORBIFOLD_TOL):
    zc = complex(z.z if isinstance(z, HPoint) else z)
    return min(abs(zc - 1j), abs(zc - RHO), abs(zc - (RHO - 1))) < tol


@dataclass(frozen=True)
class LyapunovEstimate:
    lam: float
    T: float
    renorm_count: int
    C: float
    saturations: int = 0
    orbifold_hits: int = 0

    @property
    def target(self):
        return math.sqrt(1.0 - self.C) if self.C < 1 else 0.0

    def to_json_dict(self):
        return {
            "C": self.C,
            "lambda": self.lam,
            "T": self.T,
            "renorm_count": self.renorm_count,
            "target": "sqrt(1-C)",
            "target_value": self.target,
            "saturations": self.saturations,
            "orbifold_hits": self.orbifold_hits,
        }


def _separation(g1, g2):
    z, phi = project_arrays(np.stack([g1, g2]))
    dphi = abs((phi[0] - phi[1] + math.pi) % (2 * math.pi) - math.pi)
    return float(hyperbolic_distance(z[0], z[1])) + dphi


def _rescale(g1, g2, factor):
    h = sl2_inv(g1) @ g2
    h = np.eye(2) + factor * (h - np.eye(2))
    h = h / math.sqrt(exact_det(h))
    return g1 @ h


def lyapunov_estimate(M, metric, T=50.0, delta0=1e-8, renorm_interval=0.5, *,
                      g0=None, seed=0, saturation=1.0):
    """Two-trajectory (Benettin) estimate of the largest Lyapunov exponent on the quotient.

    The momentum is rescaled so the projection to the plane has unit
    hyperbolic speed (the fiber case uses unit total speed instead); ``T`` is
    measured in that time.  Only the group position is perturbed, along a
    seeded random direction of sl(2,R).  After every interval the reference
    point is reduced to the fundamental domain and the same modular element is
    applied to the companion; separations above ``saturation`` cause the
    interval to be halved and retried.
    """
    if not T > 0:
        raise DomainError("horizon T must be positive")
    if not 0 < delta0 < 1e-2:
        raise DomainError("delta0 must satisfy 0 < delta0 << 1")
    a, b, c = M.a, M.b, M.c
    D = 4 * a * a + (b + c) ** 2
    if D > 0:
        scale = math.sqrt(D)
    else:
        scale = math.sqrt(2.0 * abs(hamiltonian(a, b, c, metric)))
        if scale == 0:
            raise DomainError("zero momentum has no dynamics")
    Mn = MomentumABC(a / scale, b / scale, c / scale, metric.alpha)
    C = (b - c) ** 2 / D if D > 0 else math.inf

    rng = np.random.default_rng(seed)
    xi = rng.normal(size=3)
    xi /= np.linalg.norm(xi)
    g = np.eye(2) if g0 is None else np.asarray(g0, dtype=float)
    om = velocity_matrix(Mn.matrix, metric)
    g2 = g @ (np.eye(2) + delta0 * np.array([[xi[0], xi[1]], [xi[2], -xi[0]]]))
    g2 = g2 / math.sqrt(exact_det(g2))
    g2 = _rescale(g, g2, delta0 / _separation(g, g2))

    t, total, count, sat, orb = 0.0, 0.0, 0, 0, 0
    tau_max = renorm_interval
    while t < T - 1e-12:
        tau = min(tau_max, T - t)
        g_new, om_new = closed_form_arrays(g, om, metric, tau)
        g2_new, _ = closed_form_arrays(g2, om, metric, tau)
        d = _separation(g_new, g2_new)
        if d > saturation and tau > 1e-6:
            sat += 1
            tau_max = tau / 2.0
            continue
        total += math.log(d / delta0)
        count += 1
        t += tau
        gamma, g_red = reduce_group(g_new)
        gi = gamma.inverse().matrix
        g, om = g_red, om_new
        g2 = _rescale(g, gi @ g2_new, delta0 / d)
        if near_orbifold_point(complex(project_arrays(g)[0])):
            orb += 1
    return LyapunovEstimate(total / T, float(T), count, float(C), sat, orb)


def lyapunov_momentum_for_level(C, V=1.0):
    """A momentum with curvature ratio ``C`` and projected speed ``V`` (``b + c = 0``)."""
    if C < 0:
        raise DomainError("C must be nonnegative")
    if math.isinf(C):
        return MomentumABC(0.0, -V / 2, V / 2)
    return MomentumABC(V / 2, math.sqrt(C) * V / 2, -math.sqrt(C) * V / 2)


def _orbifold_euler_coefficient(p, q):
    """``1 - 1/p - 1/q`` as an exact fraction (``p`` or ``q`` may be ``inf``)."""
    inv = [Fraction(0) if math.isinf(x) else Fraction(1, int(x)) for x in (p, q)]
    return 1 - inv[0] - inv[1]


def _check_pq(p, q):
    for x in (p, q):
        if not (math.isinf(x) or (float(x).is_integer() and x >= 2)):
            raise DomainError(f"orders must be integers >= 2, got {x}")


def area_pq(p, q):
    """Hyperbolic area ``2 (1 - 1/p - 1/q) pi`` of the sphere with one cusp and cone points of orders p, q."""
    _check_pq(p, q)
    return 2.0 * float(_orbifold_euler_coefficient(p, q)) * math.pi


def volume_coefficient(p, q):
    """Exact ``c`` in ``Vol(S^3 - K_{p,q}) = c (k - 1) pi^2``."""
    _check_pq(p, q)
    if not (math.isinf(p) or math.isinf(q)) and math.gcd(int(p), int(q)) != 1:
        raise DomainError(f"torus knot needs coprime p, q, got ({p}, {q})")
    return 4 * _orbifold_euler_coefficient(p, q)


GAMMA2_VOLUME_COEFFICIENT = Fraction(4)


def _check_k(k):
    if not k > 1:
        raise DomainError(f"metric parameter k must exceed 1, got {k}")


def volume_torus_knot_complement(p, q, k):
    _check_k(k)
    return float(volume_coefficient(p, q)) * (k - 1.0) * math.pi ** 2


def modular_volume(k):
    """Volume of the modular 3-fold, the (2, 3) case."""
    return volume_torus_knot_complement(2, 3, k)


def gamma2_volume(k):
    """Volume of the level-2 congruence quotient (area 2 pi base)."""
    _check_k(k)
    return float(GAMMA2_VOLUME_COEFFICIENT) * (k - 1.0) * math.pi ** 2
