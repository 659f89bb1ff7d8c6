"""Deciding Birkhoff-James orthogonality and the constructions built on it.

``x`` is BJ orthogonal to ``y`` when ``||x + lam*y|| >= ||x||`` for every scalar
``lam``. The decision is made by minimizing the convex map ``lam -> ||x + lam*y||``
directly, so it does not depend on smoothness of the norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, SearchFailed, Unsupported
from .norms import NormOracle, conj_differential, extreme_subgradients, grad_norm, is_enumerable
from .optimize import bisect_sign_change, golden_section

EPS_ORTH = 1e-7
LINE_TOL = 1e-9
FUNCTIONAL_TOL = 1e-8
DEGENERATE_RATIO = 1e-14


def canonicalize(x) -> np.ndarray:
    """Unit Euclidean representative whose first non-negligible entry is positive real."""
    v = np.asarray(x)
    v = v.astype(complex if np.iscomplexobj(v) else float)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise DegenerateInput("a line needs a nonzero vector")
    v = v / nrm
    lead = np.flatnonzero(np.abs(v) > 1e-9)[0]
    phase = v[lead] / abs(v[lead])
    v = v / phase
    v[lead] = abs(v[lead])
    return v


def line_angle(a, b) -> float:
    """Angle between the lines through ``a`` and ``b`` (sine of it, accurate for small angles)."""
    ua = np.asarray(a) / np.linalg.norm(a)
    ub = np.asarray(b) / np.linalg.norm(b)
    resid = ub - np.vdot(ua, ub) * ua
    return float(np.arcsin(min(1.0, np.linalg.norm(resid))))


class ProjLine:
    """One-dimensional subspace ``F x``, stored by its canonical representative."""

    __slots__ = ("rep",)

    def __init__(self, x):
        rep = canonicalize(x)
        rep.setflags(write=False)
        self.rep = rep

    def __eq__(self, other):
        if not isinstance(other, ProjLine):
            return NotImplemented
        return self.rep.shape == other.rep.shape and line_angle(self.rep, other.rep) < LINE_TOL

    __hash__ = None

    def same_as(self, other, tol=LINE_TOL) -> bool:
        return line_angle(self.rep, other.rep) < tol

    @property
    def dim(self) -> int:
        return self.rep.shape[0]

    def __repr__(self):
        return f"ProjLine({np.array2string(self.rep, precision=6)})"


def sample_lines(dim: int, count: int, rng=None, field: str = "real") -> list:
    """Lines through Gaussian vectors, i.e. uniform on projective space."""
    rng = np.random.default_rng(rng)
    out = []
    for _ in range(count):
        v = rng.standard_normal(dim)
        if field == "complex":
            v = v + 1j * rng.standard_normal(dim)
        out.append(ProjLine(v))
    return out


@dataclass
class OrthVerdict:
    orthogonal: bool
    min_value: float
    argmin_lambda: complex | float
    margin: float
    norm_x: float


def _pair(oracle: NormOracle, x, y):
    x = oracle.vector(x)
    y = oracle.vector(y)
    nx, ny = oracle(x), oracle(y)
    if nx == 0 or ny == 0:
        raise DegenerateInput("orthogonality is only decided for nonzero vectors")
    if ny < DEGENERATE_RATIO * nx:
        raise DegenerateInput("||y|| is negligible relative to ||x||")
    return x, y, nx, ny


def _min_real(oracle, x, y, bound):
    return golden_section(lambda lam: oracle(x + lam * y), -bound, bound, xtol=1e-13 * bound)


def _min_complex(oracle, x, y, bound):
    best = (0.0, oracle(x))
    grid = np.linspace(-bound, bound, 16)
    for a in grid:
        for b in grid:
            val = oracle(x + complex(a, b) * y)
            if val < best[1]:
                best = (complex(a, b), val)

    def inner(a):
        return golden_section(lambda b: oracle(x + complex(a, b) * y), -bound, bound,
                              xtol=1e-12 * bound)

    a_star, val = golden_section(lambda a: inner(a)[1], -bound, bound, xtol=1e-12 * bound)
    b_star, val = inner(a_star)
    if val < best[1]:
        best = (complex(a_star, b_star), val)
    return best


def min_gain(oracle: NormOracle, x, y, eps=EPS_ORTH) -> OrthVerdict:
    """Minimize ``||x + lam*y||`` over scalars; the verdict compares it with ``||x||``.

    The search is confined to ``|lam| <= 2||x||/||y||``, outside of which the
    value already exceeds ``||x||``.
    """
    x, y, nx, ny = _pair(oracle, x, y)
    bound = 2.0 * nx / ny
    if oracle.is_complex:
        lam, val = _min_complex(oracle, x, y, bound)
    else:
        lam, val = _min_real(oracle, x, y, bound)
    if val >= nx:
        lam, val = 0.0, nx
    margin = val - nx
    return OrthVerdict(orthogonal=margin >= -eps * nx, min_value=val, argmin_lambda=lam,
                       margin=margin, norm_x=nx)


def is_bj_orthogonal(oracle: NormOracle, x, y, eps=EPS_ORTH) -> bool:
    return min_gain(oracle, x, y, eps=eps).orthogonal


def is_orth_via_functional(oracle: NormOracle, x, y, tol=FUNCTIONAL_TOL, eps=None) -> bool:
    """James' criterion: some supporting functional at ``x`` annihilates ``y``.

    Smooth points have one functional. For real polyhedral-type norms the
    supporting functionals form the hull of the enumerated extremes, which
    contains one annihilating ``y`` iff the extreme pairings straddle zero.

    With ``eps`` set, a real smooth pairing ``s`` is accepted when the gain
    it predicts, ``s^2 / (2 Q)`` with ``Q`` the curvature of the norm along
    ``y``, stays within ``eps * ||x||``; this is the tolerance ``min_gain``
    applies to the same pair.
    """
    x, y, nx, ny_norm = _pair(oracle, x, y)
    if is_enumerable(oracle):
        extremes = extreme_subgradients(oracle, x)
    else:
        extremes = [grad_norm(oracle, x)]
    ny = np.linalg.norm(y)
    vals = [np.vdot(g, y) for g in extremes]
    scales = [tol * ny * np.linalg.norm(g) for g in extremes]
    if len(vals) == 1:
        if abs(vals[0]) <= scales[0]:
            return True
        if eps is None or oracle.is_complex:
            return False
        h = 1e-3 * nx / ny_norm
        q = (oracle(x + h * y) - 2.0 * nx + oracle(x - h * y)) / (h * h)
        return q > 0 and vals[0].real ** 2 <= 2.0 * eps * nx * q
    re = [v.real for v in vals]
    slack = max(scales)
    return min(re) <= slack and max(re) >= -slack


def kernel_vector(oracle: NormOracle, x, r) -> np.ndarray:
    """Project ``r`` onto the kernel of the supporting functional at smooth ``x``."""
    g = conj_differential(oracle, x)
    r = oracle.vector(r)
    return r - (np.vdot(g, r) / np.vdot(g, g)) * g


def random_right_orthogonal(oracle: NormOracle, x, rng=None) -> np.ndarray:
    """A random ``y`` with ``x`` BJ orthogonal to ``y`` (``x`` a smooth point)."""
    rng = np.random.default_rng(rng)
    for _ in range(100):
        r = rng.standard_normal(oracle.dim)
        if oracle.is_complex:
            r = r + 1j * rng.standard_normal(oracle.dim)
        y = kernel_vector(oracle, x, r)
        if np.linalg.norm(y) > 1e-6 * np.linalg.norm(r):
            return y
    raise DegenerateInput("could not draw a kernel vector")


def unique_right_neighbor_2d(oracle: NormOracle, line: ProjLine) -> ProjLine:
    """The only line ``[y]`` with ``L -> [y]`` in a smooth 2-D space.

    It is the kernel of the supporting functional, ``(conj g2, -conj g1)``.
    """
    if oracle.dim != 2:
        raise DimensionMismatch("unique right neighbours are defined in dimension 2")
    g = grad_norm(oracle, line.rep)
    return ProjLine(np.array([np.conj(g[1]), -np.conj(g[0])]))


def thales_alpha(oracle: NormOracle, x, y, lambda0: float, cap=1e3, scan=64) -> float:
    """Scalar ``alpha`` with ``(x + alpha*y)`` orthogonal to ``(lambda0*x - alpha*y)``.

    Needs ``x``, ``y`` mutually orthogonal in a smooth real space. The root of
    ``alpha -> <lambda0*x - alpha*y, grad(x + alpha*y)>`` is bracketed on
    ``[0, lambda0*c]`` (``c`` doubled up to ``cap``); the first sign change on a
    uniform scan of the bracket is bisected.
    """
    if oracle.is_complex:
        raise Unsupported("the Thales construction is for real spaces")
    if not lambda0 > 0:
        raise DegenerateInput("lambda0 must be positive")
    x = oracle.vector(x)
    y = oracle.vector(y)

    def h(alpha):
        return float(np.dot(lambda0 * x - alpha * y, grad_norm(oracle, x + alpha * y)))

    c = 1.0
    while h(lambda0 * c) > 0:
        c *= 2.0
        if c > cap:
            raise SearchFailed("no sign change of the Thales residual", bracket=(0.0, lambda0 * cap))
    grid = np.linspace(0.0, lambda0 * c, scan + 1)
    prev = grid[0]
    for a in grid[1:]:
        if h(a) <= 0:
            break
        prev = a
    alpha = bisect_sign_change(h, prev, a)
    if abs(h(alpha)) >= 1e-6:
        raise SearchFailed("Thales residual did not converge", bracket=(prev, a))
    return alpha


def lambda_curve(oracle: NormOracle, alpha) -> complex:
    """``lam(alpha)`` with ``(x + alpha*y)`` orthogonal to ``(lam*x - alpha*y)`` for ``x=e1, y=e2``.

    ``lam = (d||(1,alpha)||/dz2) / (d||(1,alpha)||/dz1) * alpha`` with the
    Wirtinger derivatives ``d/dz = conj`` of the conjugate differential.
    """
    if oracle.dim != 2:
        raise DimensionMismatch("the lambda curve lives in a 2-D space")
    g = conj_differential(oracle, np.array([1.0, alpha], dtype=oracle.dtype))
    dz1, dz2 = np.conj(g[0]), np.conj(g[1])
    if abs(dz1) < 1e-14 * np.linalg.norm(g):
        raise DegenerateInput(f"d||(1, alpha)||/dz1 vanishes at alpha={alpha!r}")
    lam = dz2 / dz1 * alpha
    return complex(lam) if oracle.is_complex else float(np.real(lam))


__all__ = [
    "EPS_ORTH", "ProjLine", "OrthVerdict", "canonicalize", "line_angle", "sample_lines",
    "min_gain", "is_bj_orthogonal", "is_orth_via_functional", "kernel_vector",
    "random_right_orthogonal", "unique_right_neighbor_2d", "thales_alpha", "lambda_curve",
]
