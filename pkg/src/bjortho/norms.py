"""Norm oracles on F^n: built-in families, differentials, subdifferentials and duals.

Linear functionals are represented by coefficient vectors ``g`` acting through
the pairing ``<z, g> = sum_k z_k * conj(g_k)`` (``np.vdot(g, z)``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateInput, DimensionMismatch, NonSmoothPoint, SpecError, Unsupported

KINDS = ("lp", "weighted_lp", "gram", "polyhedral", "custom")
FIELDS = ("real", "complex")

FD_STEP = 1e-6
GAP_TOL = 1e-4
ACTIVE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class NormSpec:
    kind: str
    dim: int
    field: str = "real"
    p: Optional[float] = None
    weights: Optional[np.ndarray] = None
    matrix: Optional[np.ndarray] = None
    rows: Optional[np.ndarray] = None

    @property
    def is_complex(self) -> bool:
        return self.field == "complex"

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim, "field": self.field}
        if self.p is not None:
            out["p"] = "inf" if math.isinf(self.p) else float(self.p)
        if self.weights is not None:
            out["weights"] = [float(w) for w in self.weights]
        if self.matrix is not None:
            out["matrix"] = _encode_array(self.matrix)
        if self.rows is not None:
            out["rows"] = _encode_array(self.rows)
        return out

    def __eq__(self, other):
        if not isinstance(other, NormSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True))


def _encode_array(a: np.ndarray):
    if np.iscomplexobj(a):
        return [[[float(v.real), float(v.imag)] for v in row] for row in a]
    return [[float(v) for v in row] for row in a]


def _decode_array(obj, name: str) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.ndim == 3 and arr.shape[2] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim != 2:
        raise SpecError(f"{name} must be a 2-D array of numbers or [re, im] pairs")
    return arr


class NormOracle:
    """Immutable norm evaluator with optional closed-form differential.

    ``differential`` (when present) maps ``x`` to the coefficient vector of the
    unique supporting functional at ``x``; for complex spaces this is the
    conjugate differential ``d/dRe + i d/dIm``.
    """

    def __init__(self, spec: NormSpec, func: Callable, differential: Optional[Callable] = None):
        self.spec = spec
        self._func = func
        self._differential = differential

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def is_complex(self) -> bool:
        return self.spec.is_complex

    @property
    def dtype(self):
        return complex if self.is_complex else float

    @property
    def has_differential(self) -> bool:
        return self._differential is not None

    def vector(self, x) -> np.ndarray:
        v = np.asarray(x)
        if np.iscomplexobj(v) and not self.is_complex:
            if np.any(v.imag != 0):
                raise DimensionMismatch("complex vector given to a real norm")
            v = v.real
        v = v.astype(self.dtype)
        if v.shape != (self.dim,):
            raise DimensionMismatch(f"expected a vector of length {self.dim}, got shape {v.shape}")
        return v

    def __call__(self, x) -> float:
        return float(self._func(x))

    def differential(self, x) -> np.ndarray:
        return self._differential(x)

    def __repr__(self):
        return f"NormOracle({self.spec.to_dict() if self.spec.kind != 'custom' else 'custom'})"


# -- construction -----------------------------------------------------------


def _lp_eval(p):
    if math.isinf(p):
        return lambda x: np.max(np.abs(x))
    if p == 1:
        return lambda x: np.sum(np.abs(x))
    if p == 2:
        return lambda x: np.linalg.norm(x)

    def ev(x):
        a = np.abs(x)
        m = a.max()
        if m == 0:
            return 0.0
        return m * np.sum((a / m) ** p) ** (1.0 / p)

    return ev


def _phase(x):
    a = np.abs(x)
    out = np.zeros_like(x)
    nz = a > 0
    out[nz] = x[nz] / a[nz]
    return out


def _lp_diff(p, weights, ev):
    def diff(x):
        nrm = ev(x)
        if nrm == 0:
            raise DegenerateInput("differential of the norm at 0")
        g = (np.abs(x) / nrm) ** (p - 1) * _phase(x)
        return g if weights is None else weights * g

    return diff


def build_oracle(spec: NormSpec) -> NormOracle:
    _validate(spec)
    if spec.kind == "lp":
        ev = _lp_eval(spec.p)
        smooth = 1 < spec.p < math.inf
        return NormOracle(spec, ev, _lp_diff(spec.p, None, ev) if smooth else None)
    if spec.kind == "weighted_lp":
        w, p = spec.weights, spec.p
        base = _lp_eval(p)
        if math.isinf(p):
            ev = lambda x: base(w * x)  # noqa: E731
        else:
            scale = w ** (1.0 / p)
            ev = lambda x: base(scale * x)  # noqa: E731
        smooth = 1 < p < math.inf
        return NormOracle(spec, ev, _lp_diff(p, w, ev) if smooth else None)
    if spec.kind == "gram":
        a = spec.matrix

        def ev(x):
            return math.sqrt(max(np.vdot(x, a @ x).real, 0.0))

        def diff(x):
            nrm = ev(x)
            if nrm == 0:
                raise DegenerateInput("differential of the norm at 0")
            return (a @ x) / nrm

        return NormOracle(spec, ev, diff)
    if spec.kind == "polyhedral":
        rows = spec.rows
        return NormOracle(spec, lambda x: np.max(np.abs(rows @ x)), None)
    raise SpecError("custom norms are built with custom_oracle()")


def custom_oracle(func: Callable, dim: int, field: str = "real",
                  differential: Optional[Callable] = None) -> NormOracle:
    """Wrap a user-supplied norm. The caller is responsible for the norm axioms."""
    spec = NormSpec(kind="custom", dim=int(dim), field=field)
    _validate(spec)
    return NormOracle(spec, func, differential)


def _validate(spec: NormSpec) -> None:
    if spec.kind not in KINDS:
        raise SpecError(f"unknown norm kind {spec.kind!r}")
    if spec.field not in FIELDS:
        raise SpecError(f"field must be 'real' or 'complex', got {spec.field!r}")
    if not isinstance(spec.dim, int) or spec.dim < 1:
        raise SpecError("dim must be an integer >= 1")
    if spec.kind in ("lp", "weighted_lp"):
        if spec.p is None or not spec.p >= 1:
            raise SpecError("p must be >= 1")
    if spec.kind == "weighted_lp":
        w = spec.weights
        if w is None or w.shape != (spec.dim,):
            raise SpecError("weights must be a vector of length dim")
        if not np.all(w > 0):
            raise SpecError("weights must be strictly positive")
    if spec.kind == "gram":
        a = spec.matrix
        if a is None or a.shape != (spec.dim, spec.dim):
            raise SpecError("gram matrix must be dim x dim")
        if not np.allclose(a, a.conj().T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
            raise SpecError("gram matrix must be Hermitian")
        if np.iscomplexobj(a) and not spec.is_complex:
            raise SpecError("complex gram matrix requires field 'complex'")
        if np.linalg.eigvalsh(a).min() <= 0:
            raise SpecError("gram matrix is not positive definite")
    if spec.kind == "polyhedral":
        r = spec.rows
        if r is None or r.ndim != 2 or r.shape[1] != spec.dim:
            raise SpecError("polyhedral rows must be an m x dim matrix")
        if np.linalg.matrix_rank(r) < spec.dim:
            raise SpecError("polyhedral rows must have full column rank")


def _parse_p(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf
        value = float(value)
    return float(value)


def spec_from_dict(record: dict) -> NormSpec:
    if not isinstance(record, dict) or "kind" not in record:
        raise SpecError("norm spec must be an object with a 'kind' field")
    kind = record["kind"]
    fld = record.get("field", "real")
    p = _parse_p(record["p"]) if "p" in record else None
    weights = matrix = rows = None
    dim = record.get("dim")
    if kind == "weighted_lp":
        weights = np.asarray(record.get("weights", []), dtype=float)
        dim = dim if dim is not None else len(weights)
    elif kind == "gram":
        matrix = _decode_array(record.get("matrix", []), "matrix")
        dim = dim if dim is not None else matrix.shape[0]
        if np.iscomplexobj(matrix) and "field" not in record:
            fld = "complex"
    elif kind == "polyhedral":
        rows = _decode_array(record.get("rows", []), "rows")
        dim = dim if dim is not None else rows.shape[1]
        if np.iscomplexobj(rows):
            raise SpecError("polyhedral rows must be real")
    if dim is None:
        raise SpecError("dim is required")
    if isinstance(dim, float) and dim.is_integer():
        dim = int(dim)
    return NormSpec(kind=kind, dim=dim, field=fld, p=p, weights=weights, matrix=matrix, rows=rows)


def parse_norm_spec(text) -> NormOracle:
    """Build an oracle from a serialized spec (JSON text or an already-decoded dict)."""
    if isinstance(text, (str, bytes)):
        try:
            record = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"malformed norm spec: {exc}") from exc
    else:
        record = text
    spec = spec_from_dict(record)
    if spec.kind == "custom":
        raise SpecError("custom norms cannot be serialized")
    return build_oracle(spec)


def lp_oracle(p, dim: int, field: str = "real") -> NormOracle:
    return build_oracle(NormSpec(kind="lp", dim=dim, field=field, p=_parse_p(p)))


def gram_oracle(matrix) -> NormOracle:
    a = np.asarray(matrix)
    fld = "complex" if np.iscomplexobj(a) else "real"
    return build_oracle(NormSpec(kind="gram", dim=a.shape[0], field=fld, matrix=a))


def polyhedral_oracle(rows) -> NormOracle:
    r = np.asarray(rows, dtype=float)
    return build_oracle(NormSpec(kind="polyhedral", dim=r.shape[1], rows=r))


# -- evaluation and differentials -------------------------------------------


def eval_norm(oracle: NormOracle, x) -> float:
    return oracle(oracle.vector(x))


def probe_directions(oracle: NormOracle, rng=None, n_random=0) -> list:
    """Coordinate directions (and their imaginary rotations) plus random unit probes."""
    n = oracle.dim
    eye = np.eye(n, dtype=oracle.dtype)
    dirs = list(eye)
    if oracle.is_complex:
        dirs += list(1j * eye)
    if n_random:
        rng = np.random.default_rng(rng)
        for _ in range(n_random):
            d = rng.standard_normal(n)
            if oracle.is_complex:
                d = d + 1j * rng.standard_normal(n)
            dirs.append(d / np.linalg.norm(d))
    return dirs


def one_sided_derivative(oracle: NormOracle, x, d, t=FD_STEP) -> float:
    """Forward difference quotient of the norm at ``x`` along ``d``."""
    return (oracle(x + t * d) - oracle(x)) / t


def derivative_gap(oracle: NormOracle, x, directions, t=FD_STEP):
    """Largest ``D+(d) + D+(-d)`` over the probes; returns ``(gap, direction)``.

    ``x`` is rescaled to Euclidean length 1 first, so the step is relative.
    """
    u = x / np.linalg.norm(x)
    base = oracle(u)
    best_gap, best_dir = -math.inf, None
    for d in directions:
        gap = (oracle(u + t * d) - base + oracle(u - t * d) - base) / t
        if gap > best_gap:
            best_gap, best_dir = gap, d
    return best_gap, best_dir


def _fd_conj_differential(oracle: NormOracle, x) -> np.ndarray:
    h = FD_STEP * max(1.0, float(np.linalg.norm(x)))
    n = oracle.dim
    g = np.zeros(n, dtype=oracle.dtype)
    for k in range(n):
        e = np.zeros(n, dtype=oracle.dtype)
        e[k] = h
        g[k] = (oracle(x + e) - oracle(x - e)) / (2 * h)
        if oracle.is_complex:
            g[k] += 1j * (oracle(x + 1j * e) - oracle(x - 1j * e)) / (2 * h)
    return g


def _check_nonzero(oracle: NormOracle, x) -> np.ndarray:
    x = oracle.vector(x)
    if not np.any(x):
        raise DegenerateInput("zero vector")
    return x


def conj_differential(oracle: NormOracle, x, gap_tol=GAP_TOL) -> np.ndarray:
    """Coefficient vector of the supporting functional at ``x``.

    Uses the closed form when the oracle has one; otherwise checks the
    one-sided derivative gap along the probe directions and, when the norm
    looks smooth, takes central differences.
    """
    x = _check_nonzero(oracle, x)
    if oracle.has_differential:
        return oracle.differential(x)
    gap, direction = derivative_gap(oracle, x, probe_directions(oracle))
    if gap > gap_tol:
        raise NonSmoothPoint(x, direction, gap)
    return _fd_conj_differential(oracle, x)


def grad_norm(oracle: NormOracle, x, gap_tol=GAP_TOL) -> np.ndarray:
    """Differential of the norm at a nonzero ``x``; ``<x, g> = ||x||``.

    On complex spaces this is the conjugate differential.
    """
    return conj_differential(oracle, x, gap_tol=gap_tol)


def is_enumerable(oracle: NormOracle) -> bool:
    s = oracle.spec
    if s.is_complex:
        return False
    return s.kind == "polyhedral" or (s.kind in ("lp", "weighted_lp") and s.p in (1.0, math.inf))


def _signed_rows(oracle: NormOracle) -> np.ndarray:
    s = oracle.spec
    if s.kind == "polyhedral":
        return s.rows
    if s.kind == "lp":
        return np.eye(s.dim)
    return np.diag(s.weights)


def extreme_subgradients(oracle: NormOracle, x, tol=ACTIVE_TOL, limit=4096) -> list:
    """Extreme points of the set of supporting functionals at ``x``.

    Smooth oracles give a single functional. Polyhedral-type norms enumerate
    the active pieces that come within ``tol * ||x||`` of the maximum.
    """
    x = _check_nonzero(oracle, x)
    if oracle.has_differential:
        return [oracle.differential(x)]
    if not is_enumerable(oracle):
        raise Unsupported(f"subdifferential enumeration is not available for {oracle.spec.kind} norms")
    s = oracle.spec
    nrm = oracle(x)
    if s.kind in ("lp", "weighted_lp") and s.p == 1.0:
        w = np.ones(s.dim) if s.weights is None else s.weights
        sign = np.sign(x)
        free = np.flatnonzero(np.abs(w * x) <= tol * nrm)
        if 2 ** len(free) > limit:
            raise Unsupported("too many extreme subgradients to enumerate")
        out = []
        for mask in range(2 ** len(free)):
            g = sign.copy()
            for bit, idx in enumerate(free):
                g[idx] = 1.0 if (mask >> bit) & 1 else -1.0
            out.append(w * g)
        return out
    rows = _signed_rows(oracle)
    vals = rows @ x
    active = np.flatnonzero(np.abs(vals) >= nrm - tol * nrm)
    out, seen = [], []
    for i in active:
        g = np.sign(vals[i]) * rows[i]
        if not any(np.allclose(g, h, rtol=0, atol=1e-15) for h in seen):
            seen.append(g)
            out.append(g)
    return out


def subgradient_signature(oracle: NormOracle, xs: np.ndarray) -> np.ndarray:
    """Integer label of the active piece for each row of ``xs`` (enumerable kinds).

    Two points with different labels are separated by a corner of the sphere.
    """
    s = oracle.spec
    if s.kind in ("lp", "weighted_lp") and s.p == 1.0:
        bits = (xs > 0).astype(np.int64)
        return bits @ (1 << np.arange(s.dim, dtype=np.int64))
    vals = xs @ _signed_rows(oracle).T
    m = vals.shape[1]
    idx = np.argmax(np.abs(vals), axis=1)
    neg = vals[np.arange(len(xs)), idx] < 0
    return idx + m * neg


# -- duals ------------------------------------------------------------------


def dual_oracle(oracle: NormOracle) -> NormOracle:
    """Norm of functionals ``z -> <z, g>`` as a function of the coefficient vector ``g``."""
    s = oracle.spec
    if s.kind in ("lp", "weighted_lp"):
        p = s.p
        q = math.inf if p == 1 else (1.0 if math.isinf(p) else p / (p - 1))
        if s.kind == "lp":
            return build_oracle(NormSpec(kind="lp", dim=s.dim, field=s.field, p=q))
        if math.isinf(p) or p == 1:
            w = 1.0 / s.weights
        else:
            w = s.weights ** (1.0 - q)
        return build_oracle(NormSpec(kind="weighted_lp", dim=s.dim, field=s.field, p=q, weights=w))
    if s.kind == "gram":
        inv = np.linalg.inv(s.matrix)
        inv = 0.5 * (inv + inv.conj().T)
        return build_oracle(NormSpec(kind="gram", dim=s.dim, field=s.field, matrix=inv))
    raise Unsupported(f"no closed-form dual for {s.kind} norms")


def dual_norm(oracle: NormOracle, g, rng=None) -> float:
    """``sup_{||z|| <= 1} |<z, g>|`` by the closed-form dual, an LP, or sphere search."""
    g = oracle.vector(g)
    try:
        return dual_oracle(oracle)(g)
    except Unsupported:
        pass
    if oracle.spec.kind == "polyhedral":
        from scipy.optimize import linprog

        rows = oracle.spec.rows
        a_ub = np.vstack([rows, -rows])
        res = linprog(-g, A_ub=a_ub, b_ub=np.ones(len(a_ub)), bounds=[(None, None)] * oracle.dim,
                      method="highs")
        return float(-res.fun)
    from .sphere import maximize_pairing

    _, value = maximize_pairing(oracle, g, rng=rng)
    return value


@dataclass
class DualFunctional:
    """Norm-one functional ``z -> <z, coeffs>`` attaining its norm at ``attained_at``."""

    coeffs: np.ndarray
    attained_at: np.ndarray
    dual_norm_value: float
    smooth: bool = True
    alternatives: list = dc_field(default_factory=list)


def supporting_functional(oracle: NormOracle, x, rng=None) -> DualFunctional:
    """A supporting functional at ``x / ||x||``.

    At corners of enumerable norms the first extreme functional is reported and
    the remaining extremes go to ``alternatives``.
    """
    x = _check_nonzero(oracle, x)
    unit = x / oracle(x)
    try:
        extremes = [grad_norm(oracle, x)]
        smooth = True
    except NonSmoothPoint:
        extremes = extreme_subgradients(oracle, x)
        smooth = len(extremes) == 1
    g = extremes[0]
    return DualFunctional(coeffs=g, attained_at=unit, dual_norm_value=dual_norm(oracle, g, rng=rng),
                          smooth=smooth, alternatives=extremes[1:])
