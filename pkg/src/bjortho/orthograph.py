"""Di-orthographs over sampled projective lines, and the odd-p planar structure."""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from .bj_core import EPS_ORTH, ProjLine, is_bj_orthogonal, line_angle, random_right_orthogonal, \
    unique_right_neighbor_2d
from .errors import DegenerateInput, DuplicateLines, Overflow, SpecError
from .norms import NormOracle, NormSpec, dual_oracle, grad_norm, lp_oracle, spec_from_dict, build_oracle

PAIRING_SCREEN = 1e-5
EXACT_CLIQUE_LIMIT = 64
PATH_TOL = 1e-7


@dataclass
class OrthoGraph:
    vertices: list
    edges: set
    oracle_spec: Optional[NormSpec] = None

    @property
    def n(self) -> int:
        return len(self.vertices)

    def successors(self, i) -> list:
        return sorted(j for a, j in self.edges if a == i)


def _check_distinct(lines):
    if len(lines) < 2:
        return
    reps = np.vstack([ln.rep for ln in lines])
    overlap = np.abs(reps.conj() @ reps.T)
    np.fill_diagonal(overlap, 0.0)
    for i, j in zip(*np.nonzero(overlap > 1 - 1e-6)):
        if i < j and line_angle(reps[i], reps[j]) < 1e-9:
            raise DuplicateLines(int(i), int(j))


def _map(fn, items, workers):
    if workers and workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


def build_orthograph(oracle: NormOracle, lines, eps=EPS_ORTH, workers=None) -> OrthoGraph:
    """Directed edge ``i -> j`` iff ``line_i`` is BJ orthogonal to ``line_j``.

    With a closed-form differential the pairing of each vertex's functional
    with every other vertex screens out pairs that are clearly not
    orthogonal; the remaining pairs are decided by ``min_gain``.
    """
    lines = list(lines)
    for ln in lines:
        if ln.dim != oracle.dim:
            raise DegenerateInput("line dimension does not match the norm")
    _check_distinct(lines)
    v = len(lines)
    if v == 0:
        return OrthoGraph([], set(), oracle.spec)
    reps = np.vstack([ln.rep for ln in lines]).astype(oracle.dtype)
    if oracle.has_differential:
        grads = np.vstack([grad_norm(oracle, r) for r in reps])
        pairing = np.abs(grads.conj() @ reps.T) / np.linalg.norm(grads, axis=1)[:, None]
        np.fill_diagonal(pairing, np.inf)
        candidates = [(int(i), int(j)) for i, j in zip(*np.nonzero(pairing < PAIRING_SCREEN))]
    else:
        candidates = [(i, j) for i in range(v) for j in range(v) if i != j]
    verdicts = _map(lambda ij: is_bj_orthogonal(oracle, reps[ij[0]], reps[ij[1]], eps=eps),
                    candidates, workers)
    edges = {ij for ij, ok in zip(candidates, verdicts) if ok}
    return OrthoGraph(lines, edges, oracle.spec)


@dataclass
class GraphReport:
    n_vertices: int
    n_edges: int
    simple: bool
    undirected_edge_list: list
    max_clique: list
    clique_exact: bool
    out_degree: dict = field(default_factory=dict)
    in_degree: dict = field(default_factory=dict)


def _degree_stats(counts):
    if not counts:
        return {"min": 0, "max": 0, "mean": 0.0}
    return {"min": int(min(counts)), "max": int(max(counts)), "mean": float(np.mean(counts))}


def _greedy_clique(g: nx.Graph) -> list:
    best = []
    order = sorted(g.nodes, key=lambda u: -g.degree[u])
    for seed in order:
        if g.degree[seed] + 1 <= len(best):
            continue
        clique = [seed]
        cands = set(g.neighbors(seed))
        while cands:
            u = max(cands, key=lambda w: (len(cands & set(g.neighbors(w))), -w))
            clique.append(u)
            cands &= set(g.neighbors(u))
        # one-swap local search: drop a member to admit two outsiders
        improved = True
        while improved:
            improved = False
            for drop in list(clique):
                rest = [c for c in clique if c != drop]
                common = set(g.nodes) - set(clique)
                for c in rest:
                    common &= set(g.neighbors(c))
                for a in common:
                    for b in common & set(g.neighbors(a)):
                        clique = rest + [a, b]
                        improved = True
                        break
                    if improved:
                        break
                if improved:
                    break
        if len(clique) > len(best):
            best = sorted(clique)
    return best


def analyze(graph: OrthoGraph) -> GraphReport:
    """Simplicity, undirected (paired) edges, maximum clique and degree statistics.

    The clique is exact (branch and bound) up to 64 vertices and a greedy
    lower bound beyond that.
    """
    edges = graph.edges
    undirected = sorted((i, j) for i, j in edges if i < j and (j, i) in edges)
    simple = all((j, i) in edges for i, j in edges)
    und = nx.Graph()
    und.add_nodes_from(range(graph.n))
    und.add_edges_from(undirected)
    if graph.n == 0:
        clique, exact = [], True
    elif graph.n <= EXACT_CLIQUE_LIMIT:
        members, _ = nx.max_weight_clique(und, weight=None)
        clique, exact = sorted(members), True
    else:
        clique, exact = _greedy_clique(und), False
    outs = [0] * graph.n
    ins = [0] * graph.n
    for i, j in edges:
        outs[i] += 1
        ins[j] += 1
    return GraphReport(n_vertices=graph.n, n_edges=len(edges), simple=simple,
                       undirected_edge_list=undirected, max_clique=clique, clique_exact=exact,
                       out_degree=_degree_stats(outs), in_degree=_degree_stats(ins))


# -- export -----------------------------------------------------------------


def _encode_vec(v):
    if np.iscomplexobj(v):
        return [[float(c.real), float(c.imag)] for c in v]
    return [float(c) for c in v]


def _label(v) -> str:
    parts = []
    for c in v:
        if np.iscomplexobj(c) and c.imag != 0:
            parts.append(f"{c.real:.6g}{c.imag:+.6g}i")
        else:
            parts.append(f"{float(np.real(c)):.6g}")
    return "(" + ", ".join(parts) + ")"


def graph_to_dict(graph: OrthoGraph) -> dict:
    spec = graph.oracle_spec.to_dict() if graph.oracle_spec is not None and graph.oracle_spec.kind != "custom" else None
    return {"vertices": [_encode_vec(ln.rep) for ln in graph.vertices],
            "edges": [[i, j] for i, j in sorted(graph.edges)],
            "spec": spec}


def graph_to_json(graph: OrthoGraph) -> str:
    return json.dumps(graph_to_dict(graph), sort_keys=True)


def graph_from_dict(record: dict):
    """Return ``(oracle, lines, edges)`` from an exported graph record."""
    if record.get("spec") is None:
        raise SpecError("graph record has no norm spec")
    oracle = build_oracle(spec_from_dict(record["spec"]))
    lines = []
    for v in record["vertices"]:
        arr = np.asarray(v, dtype=float)
        lines.append(ProjLine(arr[:, 0] + 1j * arr[:, 1] if arr.ndim == 2 else arr))
    edges = {(int(i), int(j)) for i, j in record["edges"]}
    return oracle, lines, edges


def graph_to_dot(graph: OrthoGraph) -> str:
    """DOT digraph; an edge present in both directions is written once with ``dir=both``."""
    out = ["digraph orthograph {"]
    for i, ln in enumerate(graph.vertices):
        out.append(f'  {i} [label="{_label(ln.rep)}"];')
    for i, j in sorted(graph.edges):
        if (j, i) in graph.edges:
            if i < j:
                out.append(f"  {i} -> {j} [dir=both];")
        else:
            out.append(f"  {i} -> {j};")
    out.append("}")
    return "\n".join(out) + "\n"


# -- odd p in the plane -----------------------------------------------------


def _odd_p(p) -> int:
    if isinstance(p, bool) or not float(p).is_integer():
        raise SpecError("p must be an odd integer >= 3")
    p = int(p)
    if p < 3 or p % 2 == 0:
        raise SpecError("p must be an odd integer >= 3")
    return p


def _signed_power(t, e):
    return math.copysign(abs(t) ** e, t) if t != 0 else 0.0


def fp_map(p, v) -> np.ndarray:
    """``(x, y) -> (|y|^(p-1) sign y, -|x|^(p-1) sign x)``: representative of the unique right neighbour."""
    p = _odd_p(p)
    x, y = (float(c) for c in np.asarray(v, dtype=float))
    return np.array([_signed_power(y, p - 1), -_signed_power(x, p - 1)])


@dataclass(frozen=True)
class LogVec:
    """Planar vector stored as signs and log-magnitudes (``-inf`` for a zero entry)."""

    signs: tuple
    logs: tuple

    @classmethod
    def from_vector(cls, v):
        x, y = (float(c) for c in v)
        return cls((_sgn(x), _sgn(y)), (_log_abs(x), _log_abs(y)))

    def to_vector(self) -> np.ndarray:
        out = []
        for s, lg in zip(self.signs, self.logs):
            if s == 0:
                out.append(0.0)
                continue
            if lg > 709.78 or lg < -708.39:
                raise Overflow("coordinate outside the floating-point range; use the log-domain form")
            out.append(s * math.exp(lg))
        return np.array(out)

    def unit(self) -> np.ndarray:
        """Euclidean-unit representative (never overflows)."""
        m = max(lg for s, lg in zip(self.signs, self.logs) if s != 0)
        v = np.array([s * math.exp(lg - m) if s != 0 else 0.0 for s, lg in zip(self.signs, self.logs)])
        return v / np.linalg.norm(v)

    def line_key(self):
        """(sign of x*y, log|y| - log|x|): a chart on projective lines."""
        sx, sy = self.signs
        if sx == 0:
            return (0, math.inf)
        if sy == 0:
            return (0, -math.inf)
        return (sx * sy, self.logs[1] - self.logs[0])


def _sgn(t):
    return (t > 0) - (t < 0)


def _log_abs(t):
    return math.log(abs(t)) if t != 0 else -math.inf


def fp_map_log(p, w: LogVec) -> LogVec:
    p = _odd_p(p)
    (sx, sy), (lx, ly) = w.signs, w.logs
    return LogVec((sy, -sx), ((p - 1) * ly, (p - 1) * lx))


def fp_pow_log(p, k: int, v) -> LogVec:
    """Closed form of the ``k``-fold composition, evaluated on log-magnitudes."""
    p = _odd_p(p)
    if k < 0:
        raise SpecError("k must be >= 0")
    w = v if isinstance(v, LogVec) else LogVec.from_vector(v)
    e = (p - 1) ** k
    if e > 1e300:
        raise Overflow(f"exponent (p-1)^k = {p - 1}^{k} is too large")
    ef = float(e)
    (sx, sy), (lx, ly) = w.signs, w.logs
    ax, ay = ef * lx, ef * ly
    case = k % 4
    if case == 0:
        return LogVec((sx, sy), (ax, ay))
    if case == 1:
        return LogVec((sy, -sx), (ay, ax))
    if case == 2:
        return LogVec((-sx, -sy), (ax, ay))
    return LogVec((-sy, sx), (ay, ax))


def fp_pow(p, k: int, v) -> np.ndarray:
    """``f_p^k(v)`` as floats; raises ``Overflow`` when a coordinate leaves the float range."""
    return fp_pow_log(p, k, v).to_vector()


def same_log_line(a: LogVec, b: LogVec, tol=PATH_TOL) -> bool:
    ka, kb = a.line_key(), b.line_key()
    if ka[0] != kb[0]:
        return False
    if math.isinf(ka[1]) or math.isinf(kb[1]):
        return ka[1] == kb[1]
    return abs(ka[1] - kb[1]) < tol


SPECIAL_LINES = {"(1,0)": (1.0, 0.0), "(0,1)": (0.0, 1.0), "(1,1)": (1.0, 1.0), "(1,-1)": (1.0, -1.0)}


@dataclass
class PathRecord:
    start: np.ndarray
    steps: list  # LogVec per step, step 0 is the start
    revisit: Optional[tuple] = None  # (k, j): line k equals earlier line j
    special: Optional[str] = None
    crosscheck_max_angle: float = 0.0

    @property
    def two_cycle(self) -> bool:
        return self.revisit == (2, 0)

    def rows(self):
        ids = []
        for k, w in enumerate(self.steps):
            for j in range(k):
                if same_log_line(w, self.steps[j]):
                    ids.append(ids[j])
                    break
            else:
                ids.append(len(set(ids)))
        for k, (w, lid) in enumerate(zip(self.steps, ids)):
            u = w.unit()
            yield k, float(u[0]), float(u[1]), lid


def path_census(p, start_lines, steps: int) -> list:
    """Follow unique right neighbours in ``(R^2, ||.||_p)`` for odd ``p``.

    Lines are tracked in log-magnitude form so the doubly exponential growth
    of ``(p-1)^k`` neither overflows nor collapses distinct lines near the
    axes. Each hop is also cross-checked against ``unique_right_neighbor_2d``
    while the line is resolvable in floating point.
    """
    p = _odd_p(p)
    oracle = lp_oracle(p, 2)
    out = []
    for start in start_lines:
        rep = start.rep if isinstance(start, ProjLine) else np.asarray(start, dtype=float)
        w = LogVec.from_vector(rep)
        if w.signs == (0, 0):
            raise DegenerateInput("start line needs a nonzero vector")
        record = PathRecord(start=np.asarray(rep, dtype=float), steps=[w])
        for name, v in SPECIAL_LINES.items():
            if same_log_line(w, LogVec.from_vector(v)):
                record.special = name
        for k in range(1, steps + 1):
            nxt = fp_map_log(p, w)
            key = w.line_key()
            if math.isinf(key[1]) or abs(key[1]) < 30:
                expected = unique_right_neighbor_2d(oracle, ProjLine(w.unit()))
                record.crosscheck_max_angle = max(record.crosscheck_max_angle,
                                                  line_angle(expected.rep, nxt.unit()))
            record.steps.append(nxt)
            if record.revisit is None:
                for j in range(k):
                    if same_log_line(nxt, record.steps[j]):
                        record.revisit = (k, j)
                        break
            w = nxt
        out.append(record)
    return out


def write_path_csv(record: PathRecord, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["step", "x", "y", "line_id"])
    for k, x, y, lid in record.rows():
        writer.writerow([k, repr(x), repr(y), lid])


# -- duality ----------------------------------------------------------------


@dataclass
class DualityReport:
    forward_agree: int = 0
    forward_total: int = 0
    converse_agree: int = 0
    converse_total: int = 0
    failures: list = field(default_factory=list)

    @property
    def agreement(self) -> float:
        total = self.forward_total + self.converse_total
        return (self.forward_agree + self.converse_agree) / total if total else 1.0


def dual_antiiso_check(oracle: NormOracle, pairs: int, rng=None, eps=EPS_ORTH) -> DualityReport:
    """Check that ``x -> y`` gives ``f_y -> f_x`` in the dual, and the converse.

    ``f_x`` is the supporting functional (differential) at ``x``; the converse
    starts from dual pairs and maps back through the dual differential.
    """
    dual = dual_oracle(oracle)
    rng = np.random.default_rng(rng)
    report = DualityReport()
    n = oracle.dim

    def draw():
        v = rng.standard_normal(n)
        return v + 1j * rng.standard_normal(n) if oracle.is_complex else v

    for _ in range(pairs):
        x = draw()
        y = random_right_orthogonal(oracle, x, rng)
        ok = is_bj_orthogonal(dual, grad_norm(oracle, y), grad_norm(oracle, x), eps=eps)
        report.forward_total += 1
        report.forward_agree += ok
        if not ok:
            report.failures.append(("forward", x, y))
    for _ in range(pairs):
        a = draw()
        b = random_right_orthogonal(dual, a, rng)
        y = grad_norm(dual, a)
        x = grad_norm(dual, b)
        ok = is_bj_orthogonal(oracle, x, y, eps=eps)
        report.converse_total += 1
        report.converse_agree += ok
        if not ok:
            report.failures.append(("converse", a, b))
    return report
