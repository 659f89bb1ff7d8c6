"""Recognizing properties of a norm from BJ orthogonality.

Smoothness, strict convexity and symmetry are universally quantified
properties; the sampled detectors here only report "no witness found in N
trials" when they fail to find a counterexample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bj_core import EPS_ORTH, ProjLine, is_bj_orthogonal, line_angle, min_gain, random_right_orthogonal
from .errors import DegenerateInput, NonSmoothPoint, SearchFailed, Unsupported
from .norms import (
    GAP_TOL,
    NormOracle,
    custom_oracle,
    derivative_gap,
    extreme_subgradients,
    grad_norm,
    is_enumerable,
    probe_directions,
    subgradient_signature,
)
from .sphere import maximize_pairing

SWEEP_POINTS = 10_000
RANK_TOL = 1e-8
MIDPOINT_TOL = 1e-9
MIN_SECANT_ANGLE = 1e-3


# -- smoothness -------------------------------------------------------------


def is_smooth_at(oracle: NormOracle, x, rng=None, gap_tol=GAP_TOL):
    """``(smooth, direction)``: one-sided derivatives along +d and -d must cancel.

    Probes are the coordinate directions plus ``2n`` random ones; ``direction``
    is the probe with the largest gap when the point is a corner, else ``None``.
    """
    x = oracle.vector(x)
    if not np.any(x):
        raise DegenerateInput("smoothness is tested at nonzero points")
    dirs = probe_directions(oracle, rng=rng, n_random=2 * oracle.dim)
    gap, direction = derivative_gap(oracle, x, dirs)
    if gap > gap_tol:
        return False, direction
    return True, None


@dataclass
class SmoothnessReport:
    smooth: bool
    witness_point: Optional[np.ndarray] = None
    witness_directions: list = field(default_factory=list)
    chain: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    verified: bool = True
    probes: int = 0

    @property
    def verdict(self) -> str:
        if self.smooth:
            return f"no nonsmooth point found in {self.probes} probes"
        return "nonsmooth: witness configuration found"


def _slices(n, rng, extra=2):
    eye = np.eye(n)
    planes = [(eye[i], eye[j]) for i in range(n) for j in range(i + 1, n)]
    for _ in range(extra):
        q, _ = np.linalg.qr(rng.standard_normal((n, 2)))
        planes.append((q[:, 0], q[:, 1]))
    return planes


def _gradient_labels(oracle, pts, gap_tol):
    """Stand-in for active-piece labels when no enumeration exists: quantized FD gradients."""
    out = []
    for p in pts:
        try:
            g = grad_norm(oracle, p, gap_tol=gap_tol)
        except NonSmoothPoint:
            out.append(None)
            continue
        out.append(tuple(np.round(g, 1)))
    return out


def find_nonsmooth_point(oracle: NormOracle, rng=None, n_points=SWEEP_POINTS, gap_tol=GAP_TOL):
    """Sweep 2-D slices of the sphere for a corner; returns ``(point, probes)``.

    Adjacent samples whose active piece differs are bisected down to the
    corner. ``point`` is ``None`` when nothing is found. Oracles with a
    closed-form differential are smooth by construction.
    """
    if oracle.has_differential:
        return None, 0
    if oracle.is_complex:
        raise Unsupported("corner search is implemented for real norms")
    rng = np.random.default_rng(rng)
    planes = _slices(oracle.dim, rng)
    per = max(64, n_points // len(planes))
    probes = 0
    enumerable = is_enumerable(oracle)

    def labels(u, v, thetas):
        pts = np.outer(np.cos(thetas), u) + np.outer(np.sin(thetas), v)
        if enumerable:
            return list(subgradient_signature(oracle, pts))
        return _gradient_labels(oracle, pts, gap_tol)

    for u, v in planes:
        thetas = np.linspace(0.0, math.pi, per)
        labs = labels(u, v, thetas)
        probes += per
        for i in range(per - 1):
            if labs[i] == labs[i + 1]:
                continue
            lo, hi, lab_lo = thetas[i], thetas[i + 1], labs[i]
            while hi - lo > 1e-14:
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if labels(u, v, np.array([mid]))[0] == lab_lo:
                    lo = mid
                else:
                    hi = mid
            for theta in (lo, hi):
                p = math.cos(theta) * u + math.sin(theta) * v
                p = p / oracle(p)
                if not is_smooth_at(oracle, p, rng=rng, gap_tol=gap_tol)[0]:
                    return p, probes
    return None, probes


def _independent_pair(functionals):
    for i, f in enumerate(functionals):
        for g in functionals[i + 1:]:
            if np.linalg.matrix_rank(np.vstack([f, g]), tol=RANK_TOL * max(np.abs(f).max(), 1.0)) == 2:
                return f, g
    return None


def _complement_functional(vectors, rng):
    """A random real functional vanishing on ``vectors`` (Euclidean-normalized coefficients)."""
    a = np.vstack(vectors)
    _, s, vh = np.linalg.svd(a)
    rank = int(np.sum(s > RANK_TOL * s[0]))
    basis = vh[rank:]
    f = rng.standard_normal(len(basis)) @ basis
    return f / np.linalg.norm(f)


def nonsmooth_config_search(oracle: NormOracle, rng=None, n_points=SWEEP_POINTS,
                            gap_tol=GAP_TOL) -> SmoothnessReport:
    """Build ``x_1..x_{n-1}`` and two distinct lines ``y, y'`` with
    ``x_i -> x_j`` (i < j), ``x_i -> y`` and ``x_i -> y'``, starting at a corner.

    At the corner ``x_{n-1}`` two independent supporting functionals ``f, f'``
    are taken; ``y`` lies in ``ker f`` but not ``ker f'`` and ``y'`` is the
    point of ``span{x_{n-1}, y}`` in ``ker f'``. Each lower ``x_k`` is where a
    functional vanishing on ``y, x_{n-1}, ..., x_{k+1}`` attains its norm.
    """
    n = oracle.dim
    if n < 2:
        raise DegenerateInput("dimension must be at least 2")
    rng = np.random.default_rng(rng)
    point, probes = find_nonsmooth_point(oracle, rng=rng, n_points=n_points, gap_tol=gap_tol)
    if point is None:
        return SmoothnessReport(smooth=True, probes=probes)
    if not is_enumerable(oracle):
        raise Unsupported(f"corner found at {point!r} but the subdifferential of a "
                          f"{oracle.spec.kind} norm cannot be enumerated")
    pair = _independent_pair(extreme_subgradients(oracle, point))
    if pair is None:
        raise SearchFailed("corner has no two independent supporting functionals")
    f, f2 = pair
    top = point
    y = f2 - (np.dot(f, f2) / np.dot(f, f)) * f
    y2 = np.dot(f2, y) * top - np.dot(f2, top) * y

    chain = [top]
    for _ in range(n - 2):
        g = _complement_functional([y] + chain, rng)
        xk, _ = maximize_pairing(oracle, g, rng=rng)
        if np.dot(g, xk) < 0:
            xk = -xk
        chain.insert(0, xk)

    relations = []
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            relations.append((f"x{i + 1}->x{j + 1}", min_gain(oracle, chain[i], chain[j]).margin))
        relations.append((f"x{i + 1}->y", min_gain(oracle, chain[i], y).margin))
        relations.append((f"x{i + 1}->y'", min_gain(oracle, chain[i], y2).margin))
    wy, wy2 = ProjLine(y), ProjLine(y2)
    verified = all(m >= -EPS_ORTH * oracle(chain[0]) for _, m in relations) and wy != wy2
    return SmoothnessReport(smooth=False, witness_point=top, witness_directions=[wy, wy2],
                            chain=[ProjLine(c) for c in chain], relations=relations,
                            verified=verified, probes=probes)


# -- strict convexity -------------------------------------------------------


@dataclass
class ConvexityReport:
    strictly_convex: bool
    witness: Optional[tuple] = None
    neighborhood: list = field(default_factory=list)
    trials: int = 0

    @property
    def verdict(self) -> str:
        if self.strictly_convex:
            return f"no witness found in {self.trials} trials"
        return "not strictly convex: segment on the unit sphere found"


def sampled_neighborhood(oracle: NormOracle, z, sample) -> list:
    """Indices ``i`` of sample lines with ``z -> sample[i]``."""
    return [i for i, line in enumerate(sample)
            if line_angle(z, line.rep) > 1e-9 and is_bj_orthogonal(oracle, z, line.rep)]


def midpoint_on_sphere(oracle: NormOracle, z1, z2, tol=MIDPOINT_TOL) -> bool:
    return abs(oracle(0.5 * (z1 + z2)) - 1.0) <= tol


def strict_convexity_check(oracle: NormOracle, sample, trials: int, rng=None) -> ConvexityReport:
    """Random secant probes looking for unit ``z1, z2`` (distinct lines) with unit midpoint.

    A hit is accepted once the sampled neighbourhoods of ``z1`` and ``z2``
    also coincide.
    """
    if oracle.dim < 2:
        raise DegenerateInput("dimension must be at least 2")
    if not sample:
        raise DegenerateInput("sample of lines must be nonempty")
    rng = np.random.default_rng(rng)
    n = oracle.dim
    for t in range(1, trials + 1):
        z1 = rng.standard_normal(n)
        d = rng.standard_normal(n)
        if oracle.is_complex:
            z1 = z1 + 1j * rng.standard_normal(n)
            d = d + 1j * rng.standard_normal(n)
        z1 = z1 / oracle(z1)
        d = d / np.linalg.norm(d) * np.linalg.norm(z1) * rng.uniform(0.02, 1.0)
        z2 = z1 + d
        if not np.any(z2):
            continue
        z2 = z2 / oracle(z2)
        if line_angle(z1, z2) < MIN_SECANT_ANGLE or not midpoint_on_sphere(oracle, z1, z2):
            continue
        n1 = sampled_neighborhood(oracle, z1, sample)
        n2 = sampled_neighborhood(oracle, z2, sample)
        if n1 == n2:
            return ConvexityReport(strictly_convex=False, witness=(z1, z2), neighborhood=n1, trials=t)
    return ConvexityReport(strictly_convex=True, trials=trials)


# -- symmetry ---------------------------------------------------------------


@dataclass
class SymmetryReport:
    symmetric: bool
    witness: Optional[tuple] = None
    margin: float = 0.0
    pairs: int = 0
    dim: int = 0

    @property
    def verdict(self) -> str:
        if not self.symmetric:
            return "asymmetric: x -> y but not y -> x"
        base = f"no asymmetric pair found in {self.pairs} pairs"
        if self.dim >= 3:
            return base + " (consistent with an inner-product norm)"
        return base + " (dimension 2: no inner-product conclusion)"


def _right_orthogonal_any(oracle, x, rng):
    try:
        return random_right_orthogonal(oracle, x, rng)
    except NonSmoothPoint:
        if not is_enumerable(oracle):
            return None
        g = extreme_subgradients(oracle, x)[0]
        r = rng.standard_normal(oracle.dim)
        return r - (np.dot(g, r) / np.dot(g, g)) * g


def symmetry_check(oracle: NormOracle, pairs: int, rng=None) -> SymmetryReport:
    """Draw ``x``, build ``y`` with ``x -> y`` and test ``y -> x``."""
    rng = np.random.default_rng(rng)
    n = oracle.dim
    for t in range(1, pairs + 1):
        x = rng.standard_normal(n)
        if oracle.is_complex:
            x = x + 1j * rng.standard_normal(n)
        y = _right_orthogonal_any(oracle, x, rng)
        if y is None or not np.any(y):
            continue
        back = min_gain(oracle, y, x)
        if not back.orthogonal and is_bj_orthogonal(oracle, x, y):
            return SymmetryReport(symmetric=False, witness=(x, y), margin=back.margin, pairs=t, dim=n)
    return SymmetryReport(symmetric=True, pairs=pairs, dim=n)


# -- dimension --------------------------------------------------------------


def _nullspace(rows: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning ``{z : rows @ z = 0}``."""
    n = rows.shape[1]
    if rows.shape[0] == 0:
        return np.eye(n, dtype=rows.dtype)
    _, s, vh = np.linalg.svd(rows)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    return vh[rank:].conj().T


def common_right_neighbor(oracle: NormOracle, lines) -> Optional[ProjLine]:
    """A line ``[z]`` with ``L -> [z]`` for every given line, or ``None``.

    ``z`` spans the common kernel of the supporting functionals.
    """
    reps = [ln.rep if isinstance(ln, ProjLine) else oracle.vector(ln) for ln in lines]
    if not reps:
        raise DegenerateInput("need at least one line")
    rows = np.vstack([np.conj(grad_norm(oracle, r)) for r in reps])
    null = _nullspace(rows)
    if null.shape[1] == 0:
        return None
    z = null[:, 0]
    for r in reps:
        if not is_bj_orthogonal(oracle, r, z):
            raise SearchFailed("kernel vector failed the orthogonality re-check")
    return ProjLine(z)


def dimension_chain(oracle: NormOracle, rng=None) -> list:
    """Chain ``x_1, x_2, ...`` with ``x_i -> x_j`` for ``i < j`` that cannot be extended.

    Each ``x_{k+1}`` is drawn inside the common kernel of the supporting
    functionals at ``x_1..x_k``; the chain stops when that kernel is zero.
    """
    rng = np.random.default_rng(rng)
    basis = np.eye(oracle.dim, dtype=oracle.dtype)
    chain = []
    while basis.shape[1] > 0:
        m = basis.shape[1]
        c = rng.standard_normal(m)
        if oracle.is_complex:
            c = c + 1j * rng.standard_normal(m)
        x = basis @ c
        x = x / oracle(x)
        try:
            g = grad_norm(oracle, x)
        except NonSmoothPoint as exc:
            raise Unsupported(f"nonsmooth point {x!r} met while building the chain") from exc
        chain.append(x)
        h = basis.conj().T @ g
        basis = basis @ _nullspace(np.conj(h)[None, :])
    return chain


def dimension_recovery(oracle: NormOracle, rng=None) -> int:
    """Dimension read off the orthogonality relation: the length of a maximal chain.

    The chain is re-verified pairwise and shown to admit no common right neighbour.
    """
    chain = dimension_chain(oracle, rng)
    for i in range(len(chain)):
        for j in range(i + 1, len(chain)):
            if not is_bj_orthogonal(oracle, chain[i], chain[j]):
                raise SearchFailed(f"chain elements {i} and {j} are not orthogonal")
    if common_right_neighbor(oracle, [ProjLine(c) for c in chain]) is not None:
        raise SearchFailed("chain admits a common right neighbour")
    return len(chain)


def in_neighbors(oracle: NormOracle, x, count: int, rng=None, max_tries=None) -> list:
    """Distinct lines ``[y]`` with ``y -> x``.

    In a random plane ``span{x, z}`` a norm-one functional killing ``x``
    attains its norm at some ``y``; then ``y -> x``.
    """
    rng = np.random.default_rng(rng)
    x = oracle.vector(x)
    target = ProjLine(x)
    found = []
    n = oracle.dim
    for _ in range(max_tries or 20 * count):
        if len(found) >= count:
            break
        z = rng.standard_normal(n)
        if oracle.is_complex:
            z = z + 1j * rng.standard_normal(n)
        q, _ = np.linalg.qr(np.column_stack([x, z]))
        a = q.conj().T @ x
        h = np.array([-np.conj(a[1]), np.conj(a[0])])
        plane = custom_oracle(lambda c, q=q: oracle(q @ c), 2, oracle.spec.field)
        c, _ = maximize_pairing(plane, h, rng=rng)
        y = q @ c
        line = ProjLine(y)
        if line == target or any(line == f for f in found):
            continue
        if is_bj_orthogonal(oracle, y, x):
            found.append(line)
    return found
