"""Kernels for sl(2,R) and SL(2,R) with the naturally reductive metrics.

The metric on the Lie algebra is

    <X, Y> = alpha * tr(sym X sym Y) + beta * tr(skew X skew Y),  alpha > 0 > beta,

with ``k = 1 - beta/alpha``.  The normalised presentation uses ``alpha = 2``,
for which the quotient SL(2,R)/SO(2) has Gaussian curvature -1.

All array kernels accept a leading batch shape ``(..., 2, 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

EXP_BRANCH_TOL = 1e-9
DET_TOL = 1e-12


@dataclass(frozen=True)
class MetricParams:
    alpha: float = 2.0
    beta: float = -2.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"metric requires alpha > 0, got alpha={self.alpha}")
        if not self.beta < 0:
            raise DomainError(f"metric requires beta < 0, got beta={self.beta}")

    @classmethod
    def from_k(cls, k, alpha=2.0):
        """Metric with the given ``k > 1``; ``alpha = 2`` unless stated."""
        if not k > 1:
            raise DomainError(f"metric requires k > 1, got k={k}")
        return cls(alpha=float(alpha), beta=float(alpha) * (1.0 - k))

    @property
    def k(self):
        return 1.0 - self.beta / self.alpha

    @property
    def gaussian_curvature(self):
        return -2.0 / self.alpha


@dataclass(frozen=True)
class AlgebraVelocity:
    """Left angular velocity ``Omega = ((u, v), (w, -u))``."""

    u: float
    v: float
    w: float

    @property
    def matrix(self):
        return np.array([[self.u, self.v], [self.w, -self.u]], dtype=float)

    @classmethod
    def from_matrix(cls, m, tol=1e-12):
        m = np.asarray(m, dtype=float)
        scale = max(1.0, float(np.max(np.abs(m))))
        if abs(m[0, 0] + m[1, 1]) > tol * scale:
            raise DomainError(f"matrix is not traceless: trace={m[0, 0] + m[1, 1]:g}")
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True)
class MomentumABC:
    """Left momentum ``M = alpha * ((a, b), (c, -a))``.

    ``(a, b, c)`` are metric independent: ``M / alpha`` is the matrix ``X`` of
    the Cartan split, so ``a, b, c`` are what the closed-form formulas use.
    """

    a: float
    b: float
    c: float
    alpha: float = 2.0

    @property
    def normalized(self):
        return np.array([[self.a, self.b], [self.c, -self.a]], dtype=float)

    @property
    def matrix(self):
        return self.alpha * self.normalized

    @property
    def delta(self):
        """Casimir ``a^2 + bc = -det M / alpha^2``."""
        return self.a * self.a + self.b * self.c

    def scaled(self, s):
        return MomentumABC(s * self.a, s * self.b, s * self.c, self.alpha)

    def as_tuple(self):
        return (self.a, self.b, self.c)

    @classmethod
    def from_matrix(cls, m, alpha=2.0):
        m = np.asarray(m, dtype=float) / alpha
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(alpha))


class GroupElement:
    """A real unimodular 2x2 matrix.

    ``projective=True`` means PSL(2,R): equality is checked up to sign.  The
    stored matrix itself is never flipped.
    """

    __slots__ = ("_m", "projective")

    def __init__(self, m, projective=True):
        m = np.array(m, dtype=float).reshape(2, 2)
        m.setflags(write=False)
        self._m = m
        self.projective = bool(projective)

    @classmethod
    def identity(cls, projective=True):
        return cls(np.eye(2), projective)

    @property
    def matrix(self):
        return self._m

    def __array__(self, dtype=None, copy=None):
        return self._m.copy() if dtype is None else self._m.astype(dtype)

    def __repr__(self):
        m = self._m
        kind = "PSL" if self.projective else "SL"
        return f"GroupElement[{kind}](({m[0, 0]:.6g}, {m[0, 1]:.6g}), ({m[1, 0]:.6g}, {m[1, 1]:.6g}))"

    def __matmul__(self, other):
        other_m = np.asarray(other, dtype=float)
        return GroupElement(self._m @ other_m, self.projective)

    def det(self):
        return exact_det(self._m)

    def is_unimodular(self, tol=DET_TOL):
        return abs(self.det() - 1.0) <= tol

    def renormalize(self):
        d = self.det()
        if d <= 0:
            raise DomainError(f"cannot renormalize a matrix with det={d:g}")
        return GroupElement(self._m / np.sqrt(d), self.projective)

    def inverse(self):
        return GroupElement(sl2_inv(self._m), self.projective)

    def distance_to(self, other):
        """Max-entry distance, minimised over sign when projective."""
        o = np.asarray(other, dtype=float)
        d = float(np.max(np.abs(self._m - o)))
        if self.projective:
            d = min(d, float(np.max(np.abs(self._m + o))))
        return d

    def close_to(self, other, tol=1e-12):
        return self.distance_to(other) <= tol


def exact_det(m):
    """Determinant of a float 2x2 matrix, evaluated exactly then rounded once."""
    m = np.asarray(m, dtype=float)
    f = [Fraction(float(x)) for x in m.ravel()]
    return float(f[0] * f[3] - f[1] * f[2])


def sl2_inv(m):
    """Inverse of unimodular matrices (adjugate); batch aware."""
    m = np.asarray(m)
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    out[..., 1, 1] = m[..., 0, 0]
    return out


def _T(m):
    return np.swapaxes(m, -1, -2)


def sym_skew_split(X):
    X = np.asarray(X, dtype=float)
    Xt = _T(X)
    return (X + Xt) / 2.0, (X - Xt) / 2.0


def inner_product(X, Y, metric):
    """Metric pairing on sl(2,R) built from sym/skew traces."""
    sx, kx = sym_skew_split(X)
    sy, ky = sym_skew_split(Y)
    tr_sym = np.einsum("...ij,...ji->...", sx, sy)
    tr_skew = np.einsum("...ij,...ji->...", kx, ky)
    return metric.alpha * tr_sym + metric.beta * tr_skew


def momentum_matrix(omega, metric):
    """``M = ((alpha+beta) Omega + (alpha-beta) Omega^T) / 2`` on arrays."""
    om = np.asarray(omega, dtype=float)
    return ((metric.alpha + metric.beta) * om + (metric.alpha - metric.beta) * _T(om)) / 2.0


def velocity_matrix(M, metric):
    """Inverse of :func:`momentum_matrix`."""
    M = np.asarray(M, dtype=float)
    a, b = metric.alpha, metric.beta
    return ((a + b) * M + (b - a) * _T(M)) / (2.0 * a * b)


def momentum_of(omega, metric):
    return MomentumABC.from_matrix(momentum_matrix(np.asarray(omega), metric), metric.alpha)


def velocity_of(M, metric):
    mat = np.asarray(M.matrix if isinstance(M, MomentumABC) else M, dtype=float)
    if isinstance(M, MomentumABC) and M.alpha != metric.alpha:
        mat = M.normalized * metric.alpha
    return AlgebraVelocity.from_matrix(velocity_matrix(mat, metric))


def abc_to_uvw(a, b, c, k):
    """Velocity entries from normalised momentum entries (alpha = 2)."""
    if not k > 1:
        raise DomainError(f"k must exceed 1, got {k}")
    den = 2.0 * (1.0 - k)
    return a, ((2.0 - k) * b - k * c) / den, ((2.0 - k) * c - k * b) / den


def uvw_to_abc(u, v, w, k):
    if not k > 1:
        raise DomainError(f"k must exceed 1, got {k}")
    return u, ((2.0 - k) * v + k * w) / 2.0, ((2.0 - k) * w + k * v) / 2.0


def abc_uvw_convert(direction, x, y, z, k):
    """``direction`` is ``"abc->uvw"`` or ``"uvw->abc"``."""
    if direction == "abc->uvw":
        return abc_to_uvw(x, y, z, k)
    if direction == "uvw->abc":
        return uvw_to_abc(x, y, z, k)
    raise ValueError(f"unknown direction {direction!r}")


def metric_norm2(omega, k):
    """Squared length ``4(u^2 + vw) + k (v - w)^2`` in the alpha = 2 metric."""
    if isinstance(omega, AlgebraVelocity):
        u, v, w = omega.u, omega.v, omega.w
    else:
        om = np.asarray(omega, dtype=float)
        u, v, w = om[..., 0, 0], om[..., 0, 1], om[..., 1, 0]
    return 4.0 * (u * u + v * w) + k * (v - w) ** 2


@dataclass(frozen=True)
class CartanSplit:
    X: np.ndarray
    Y: np.ndarray


def cartan_split(omega, metric):
    """``Omega = X + Y`` with ``Y = k skew(Omega)`` and ``X = M / alpha``."""
    om = np.asarray(omega, dtype=float)
    _, skew = sym_skew_split(om)
    Y = metric.k * skew
    return CartanSplit(om - Y, Y)


def exp_traceless(X, t=1.0, branch_tol=EXP_BRANCH_TOL):
    """``exp(tX)`` for traceless ``X`` using ``X^2 = Delta I``.

    Three regimes: cosh/sinh for ``Delta > 0``, cos/sin for ``Delta < 0``, and a
    short series in ``Delta t^2`` when ``|Delta| <= branch_tol``.
    """
    X = np.asarray(X, dtype=float)
    t = np.asarray(t, dtype=float)
    delta = X[..., 0, 0] ** 2 + X[..., 0, 1] * X[..., 1, 0]
    delta, t = np.broadcast_arrays(delta, t)

    small = np.abs(delta) <= branch_tol
    pos = (delta > 0) & ~small
    neg = (delta < 0) & ~small

    c0 = np.empty(delta.shape)
    c1 = np.empty(delta.shape)

    r = np.sqrt(np.where(pos, delta, 1.0))
    c0 = np.where(pos, np.cosh(r * t), c0)
    c1 = np.where(pos, np.sinh(r * t) / r, c1)

    w = np.sqrt(np.where(neg, -delta, 1.0))
    c0 = np.where(neg, np.cos(w * t), c0)
    c1 = np.where(neg, np.sin(w * t) / w, c1)

    x = delta * t * t
    c0 = np.where(small, 1.0 + x / 2.0 + x * x / 24.0 + x ** 3 / 720.0, c0)
    c1 = np.where(small, t * (1.0 + x / 6.0 + x * x / 120.0 + x ** 3 / 5040.0), c1)

    eye = np.eye(2)
    return c0[..., None, None] * eye + c1[..., None, None] * X


def exp_rotation(Y, t=1.0):
    """``exp(tY)`` for skew ``Y = ((0, y), (-y, 0))``."""
    Y = np.asarray(Y, dtype=float)
    theta = Y[..., 0, 1] * np.asarray(t, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty(np.shape(theta) + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = s
    out[..., 1, 0] = -s
    out[..., 1, 1] = c
    return out
