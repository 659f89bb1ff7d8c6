"""Pairwise BJ-orthogonal unit systems from maximizing |det| over the unit sphere."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bj_core import EPS_ORTH, min_gain
from .errors import ConvergenceFailure, DegenerateInput
from .norms import NormOracle
from .sphere import maximize_pairing


@dataclass
class AuerbachSystem:
    vectors: np.ndarray  # columns are the unit vectors
    det_trace: list = field(default_factory=list)
    residual: float = float("nan")
    sweeps: int = 0

    @property
    def det(self) -> float:
        return self.det_trace[-1]


def mutual_orthogonality_residual(oracle: NormOracle, vectors) -> float:
    """``max_{i != j} max(0, ||x_i|| - min_lam ||x_i + lam x_j||)``; zero iff all pairs are orthogonal.

    ``vectors`` is a sequence of vectors (or a matrix whose columns are the vectors).
    """
    vecs = _as_list(vectors)
    for v in vecs:
        if not np.any(v):
            raise DegenerateInput("zero vector in the system")
    worst = 0.0
    for i, xi in enumerate(vecs):
        for j, xj in enumerate(vecs):
            if i != j:
                worst = max(worst, -min_gain(oracle, xi, xj).margin)
    return worst


def _as_list(vectors):
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        return [vectors[:, k] for k in range(vectors.shape[1])]
    return [np.asarray(v) for v in vectors]


def _initial_system(oracle: NormOracle, rng) -> np.ndarray:
    n = oracle.dim
    while True:
        y = rng.standard_normal((n, n))
        if oracle.is_complex:
            y = y + 1j * rng.standard_normal((n, n))
        y = y / np.linalg.norm(y, axis=0)
        y = y / np.array([oracle(y[:, k]) for k in range(n)])
        if abs(np.linalg.det(y)) > 1e-6:
            return y


def auerbach_system(oracle: NormOracle, seed=None, max_sweeps=200, rtol=1e-12,
                    eps=EPS_ORTH) -> AuerbachSystem:
    """Coordinate ascent on ``|det(y_1, ..., y_n)|`` over unit vectors.

    With the other columns fixed the determinant is the linear functional
    ``z -> det(Y) * (Y^{-1} z)_k``, so each step maximizes a functional over the
    unit sphere. At a fixed point every ordered pair is BJ orthogonal, since
    otherwise moving ``y_k`` towards ``y_k + lam*y_j`` would raise ``|det|``.
    """
    n = oracle.dim
    if n < 2:
        raise DegenerateInput("an Auerbach system needs dimension >= 2")
    rng = np.random.default_rng(seed)
    y = _initial_system(oracle, rng)
    trace = [abs(np.linalg.det(y))]
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        for k in range(n):
            det = np.linalg.det(y)
            inv = np.linalg.inv(y)
            cof = det * inv[k, :]
            # det(Y with column k = z) = sum_i cof_i z_i = <z, conj(cof)>
            z, _ = maximize_pairing(oracle, np.conj(cof), start=y[:, k], rng=rng)
            cand = y.copy()
            cand[:, k] = z
            if abs(np.linalg.det(cand)) > abs(det):
                y = cand
        trace.append(abs(np.linalg.det(y)))
        if trace[-1] - trace[-2] <= rtol * trace[-2]:
            break
    system = AuerbachSystem(vectors=y, det_trace=trace, sweeps=sweeps)
    system.residual = mutual_orthogonality_residual(oracle, y)
    if system.residual >= eps:
        raise ConvergenceFailure(
            f"pairwise orthogonality residual {system.residual:.3g} after {sweeps} sweeps", system=system)
    return system
