"""Modular knots (closed geodesics at C = 0) and trefoil cable parameters.

Everything on the modular side runs in exact integer arithmetic.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np

from .errors import DomainError, NumericalError
from .fuchsian import ModularElement
from .geodesic_flow import curvature_ratio, detect_rational_ratio, frequencies
from .lie_core import MomentumABC

R = ModularElement(1, 1, 0, 1)
L = ModularElement(1, 0, 1, 1)
C_WARN = 10.0
CF_STEP_CAP = 10_000


class ElementClass(enum.Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


def classify_modular_element(g):
    t = abs(g.trace)
    if t < 2:
        return ElementClass.ELLIPTIC
    if t == 2:
        return ElementClass.PARABOLIC
    return ElementClass.HYPERBOLIC


def _require_hyperbolic(g):
    if abs(g.trace) <= 2:
        raise DomainError(f"element {g} is not hyperbolic (|trace| = {abs(g.trace)})")


def axis_and_length(g):
    """Real fixed points (roots of ``c x^2 + (d - a) x - b``) and translation length ``2 arccosh(|tr|/2)``."""
    _require_hyperbolic(g)
    a, b, c, d = g.entries
    disc = math.sqrt(g.trace ** 2 - 4)
    roots = sorted(((a - d - disc) / (2 * c), (a - d + disc) / (2 * c)))
    return (roots[0], roots[1]), 2.0 * math.acosh(abs(g.trace) / 2.0)


@dataclass(frozen=True)
class ClosedGeodesic:
    g0: np.ndarray
    X: np.ndarray
    T: float


def closed_geodesic_of(g):
    """Closed C = 0 geodesic ``g0 exp(tX)`` whose period map is ``g``.

    With ``g = P diag(lam, 1/lam) P^{-1}``, ``lam > 1`` and ``det P = 1``, take
    ``g0 = P``, ``X = diag(1, -1)``, ``T = log lam``; then
    ``g0 exp(TX) = g g0``.
    """
    _require_hyperbolic(g)
    if g.trace < 0:
        g = -g
    m = g.matrix
    tr = g.trace
    disc = math.sqrt(tr * tr - 4.0)
    lam = (tr + disc) / 2.0
    a, b, c, d = g.entries
    # eigenvectors (b, lam - a) and (b, 1/lam - a); b != 0 for hyperbolic integer matrices
    if b != 0:
        v1 = np.array([b, lam - a])
        v2 = np.array([b, 1.0 / lam - a])
    else:
        v1 = np.array([lam - d, c])
        v2 = np.array([1.0 / lam - d, c])
    P = np.column_stack([v1, v2])
    det = P[0, 0] * P[1, 1] - P[0, 1] * P[1, 0]
    if det < 0:
        P[:, 1] = -P[:, 1]
        det = -det
    P = P / math.sqrt(det)
    assert np.allclose(m @ P, P @ np.diag([lam, 1 / lam]), atol=1e-9 * lam)
    return ClosedGeodesic(P, np.diag([1.0, -1.0]), math.log(lam))


@dataclass(frozen=True)
class LRWord:
    """``conjugator^{-1} (R^{a1} L^{b1} ... R^{as} L^{bs}) conjugator = +-g``."""

    blocks: tuple
    conjugator: ModularElement

    def element(self):
        out = ModularElement.identity()
        for ra, lb in self.blocks:
            out = out @ (R ** ra) @ (L ** lb)
        return out

    def reconstruct(self):
        c = self.conjugator
        return c.inverse() @ self.element() @ c

    def __str__(self):
        return " ".join(f"R^{ra} L^{lb}" for ra, lb in self.blocks)


def _floor_quadratic(p, D, q):
    """``floor((p + sqrt D) / q)`` exactly, for non-square ``D > 0`` and ``q != 0``."""
    r = isqrt(D)
    if q > 0:
        return (p + r) // q
    # (p + sqrt D)/q = -(p + sqrt D)/|q|, never an integer
    return -((p + r) // -q) - 1


def _attracting_floor(m):
    """Floor of the attracting fixed point of a hyperbolic ``m`` with positive trace."""
    a, b, c, d = m.entries
    D = m.trace ** 2 - 4
    return _floor_quadratic(a - d, D, 2 * c)


def _is_nonnegative(m):
    return all(x >= 0 for x in m.entries)


def _peel(m):
    letters = []
    while m != ModularElement.identity():
        a, b, c, d = m.entries
        if a >= c and b >= d:
            letters.append("R")
            m = R.inverse() @ m
        elif c >= a and d >= b:
            letters.append("L")
            m = L.inverse() @ m
        else:
            raise NumericalError(f"cannot peel non-positive matrix {m}")
        if not _is_nonnegative(m):
            raise NumericalError("peeling left the nonnegative cone")
    return letters


def _blocks(letters):
    runs = []
    for ch in letters:
        if runs and runs[-1][0] == ch:
            runs[-1][1] += 1
        else:
            runs.append([ch, 1])
    return runs


def _canonical_rotation(blocks):
    rots = [tuple(blocks[i:] + blocks[:i]) for i in range(len(blocks))]
    return min(range(len(rots)), key=lambda i: rots[i])


def lr_decompose(g):
    """Positive ``R/L`` word of the conjugacy class of a hyperbolic element.

    The attracting fixed point is pushed through its continued-fraction
    expansion, conjugating the matrix at each step by ``x -> 1/(x - n)``.
    Pairs of steps are ``SL(2,Z)`` conjugations; the expansion becomes purely
    periodic after finitely many steps, at which point the conjugate has
    nonnegative entries and factors uniquely into ``R`` and ``L``.  The word
    is rotated to start with ``R``, end with ``L``, and to the lexicographically
    least block sequence.
    """
    _require_hyperbolic(g)
    A = g if g.trace > 0 else -g
    C = ModularElement.identity()
    for step in range(CF_STEP_CAP):
        if step % 2 == 0 and _is_nonnegative(A):
            break
        n = _attracting_floor(A)
        # x -> 1/(x - n): matrix ((0, 1), (1, -n)) of determinant -1
        Ma, Mb, Mc, Md = 0, 1, 1, -n
        a, b, c, d = A.entries
        # A' = M A M^{-1}, M^{-1} = -((-n, -1), (-1, 0)) = ((n, 1), (1, 0))
        p00, p01 = Ma * a + Mb * c, Ma * b + Mb * d
        p10, p11 = Mc * a + Md * c, Mc * b + Md * d
        A = ModularElement(p00 * n + p01, p00, p10 * n + p11, p10)
        if step % 2 == 0:
            pending = (Ma, Mb, Mc, Md)
        else:
            q = pending
            # product of two det -1 steps: M_this @ M_prev
            two = ModularElement(Ma * q[0] + Mb * q[2], Ma * q[1] + Mb * q[3],
                                 Mc * q[0] + Md * q[2], Mc * q[1] + Md * q[3])
            C = two @ C
    else:
        raise NumericalError(f"no nonnegative conjugate of {g} within {CF_STEP_CAP} steps")

    letters = _peel(A)
    # rotate so the word starts with R and ends with L, then to the least block rotation;
    # rotating by a prefix P turns A into P^{-1} A P
    shift = 0
    while letters[shift] != "R" or letters[shift - 1] != "L":
        shift += 1
    rotated = letters[shift:] + letters[:shift]
    runs = _blocks(rotated)
    blocks = [(runs[i][1], runs[i + 1][1]) for i in range(0, len(runs), 2)]
    i0 = _canonical_rotation(blocks)
    shift += sum(ra + lb for ra, lb in blocks[:i0])
    P = ModularElement.identity()
    for ch in (letters + letters)[:shift]:
        P = P @ (R if ch == "R" else L)
    word = LRWord(tuple(blocks[i0:] + blocks[:i0]), P.inverse() @ C)
    if word.reconstruct() != g:
        raise NumericalError(f"word reconstruction failed for {g}")
    return word


def rademacher(word):
    """Sum of ``R`` exponents minus sum of ``L`` exponents of the word."""
    return sum(ra for ra, _ in word.blocks) - sum(lb for _, lb in word.blocks)


@dataclass(frozen=True)
class QuadraticFormZ:
    A: int
    B: int
    C: int

    @property
    def discriminant(self):
        return self.B * self.B - 4 * self.A * self.C

    def __call__(self, x, y):
        return self.A * x * x + self.B * x * y + self.C * y * y

    def as_list(self):
        return [self.A, self.B, self.C]


def raw_quadratic_form(g):
    """``(c, d - a, -b)``: ``Q(v) = det(v, g v)``, exactly ``g``-invariant."""
    a, b, c, d = g.entries
    return QuadraticFormZ(c, d - a, -b)


def normalize_form(Q):
    k = gcd(gcd(abs(Q.A), abs(Q.B)), abs(Q.C))
    if k == 0:
        raise DomainError("zero form")
    A, B, C = Q.A // k, Q.B // k, Q.C // k
    if A < 0 or (A == 0 and B < 0):
        A, B, C = -A, -B, -C
    return QuadraticFormZ(A, B, C)


def quadratic_form_of(g):
    _require_hyperbolic(g)
    return normalize_form(raw_quadratic_form(g))


@dataclass(frozen=True)
class CableKnotParams:
    p: int
    q: int
    linking: int
    degenerate: bool = False

    def to_json_dict(self):
        out = {"p": self.p, "q": self.q, "linking": self.linking}
        if self.degenerate:
            out["degenerate"] = True
        return out


def cable_from_ratio(p, q):
    if gcd(p, q) != 1:
        raise DomainError(f"cable parameters must be coprime, got ({p}, {q})")
    return CableKnotParams(p, q, 6 * p, degenerate=(p == 0))


def cable_knot_params(M, metric, tol=1e-9, qmax=200, c_warn=C_WARN):
    """Trefoil-cable parameters of the periodic torus with frequency ratio ``p/q``.

    Returns ``None`` when the ratio is not rational within ``tol``/``qmax``.
    Warns when ``C <= c_warn``: the cable picture needs large ``C``.
    """
    if not M.delta < 0:
        raise DomainError(f"cable parameters need Delta < 0, got Delta={M.delta:g}")
    freqs = frequencies(M, metric)
    pq = detect_rational_ratio(freqs, tol, qmax)
    if pq is None:
        return None
    C = curvature_ratio(M).value
    if C <= c_warn:
        warnings.warn(f"C = {C:.6g} <= {c_warn:g}: torus may not embed near the trefoil fibre",
                      stacklevel=2)
    return cable_from_ratio(*pq)


def momentum_for_ratio(p, q, metric):
    """A momentum with ``Delta < 0`` whose frequency ratio is ``p/q``.

    The ratio equals ``k/(k-1) sqrt(C/(C-1))``, so only ratios of at least
    ``k/(k-1)`` are reachable (equality is the fiber case ``C = inf``).
    """
    k = metric.k
    r = p / q
    s = r * (k - 1.0) / k
    if s < 1.0:
        raise DomainError(
            f"ratio {p}/{q} is below the reachable minimum k/(k-1) = {k / (k - 1):.6g} for k={k:g}")
    if s == 1.0:
        return MomentumABC(0.0, -1.0, 1.0, metric.alpha)
    C = s * s / (s * s - 1.0)
    rc = math.sqrt(C)
    return MomentumABC(0.0, 1.0 - rc, 1.0 + rc, metric.alpha)
