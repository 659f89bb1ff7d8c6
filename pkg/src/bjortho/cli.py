"""Command-line front end.

Exit status: 0 on success, 2 when a detector found a property witness, 1 on
error (one ``CODE: message`` line on stderr).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .auerbach import auerbach_system
from .bj_core import EPS_ORTH, ProjLine, min_gain, sample_lines, thales_alpha
from .detectors import (
    dimension_recovery,
    nonsmooth_config_search,
    strict_convexity_check,
    symmetry_check,
)
from .errors import BJOrthoError
from .norms import GAP_TOL, grad_norm, parse_norm_spec, supporting_functional
from .orthograph import analyze, build_orthograph, graph_to_dot, graph_to_json, path_census, write_path_csv
from .schemas import SCHEMA_VERSION

EXIT_OK, EXIT_ERROR, EXIT_WITNESS = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    norm_spec_path: Optional[str] = None
    seed: int = 42
    eps_orth: float = EPS_ORTH
    gap_tol: float = GAP_TOL
    options: dict = field(default_factory=dict)


def parse_vector(text: str) -> np.ndarray:
    """``"1,2"`` or, for complex entries, ``"1+2i,0"``."""
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            raise ValueError(f"empty entry in vector {text!r}")
        if tok.endswith("i"):
            body = tok[:-1]
            if body in ("", "+", "-") or body[-1] in "+-":
                body += "1"
            out.append(complex(body + "j"))
        else:
            out.append(float(tok))
    if any(isinstance(v, complex) for v in out):
        return np.array(out, dtype=complex)
    return np.array(out, dtype=float)


def _enc(v):
    v = np.asarray(v)
    if v.ndim == 0:
        v = v.item()
        if isinstance(v, complex):
            return [v.real, v.imag] if v.imag != 0 else v.real
        return float(v)
    return [_enc(c) for c in v]


def _report(command: str, **fields) -> dict:
    return {"schema": SCHEMA_VERSION, "command": command, **fields}


def _dump(record: dict) -> str:
    return json.dumps(record, sort_keys=True, allow_nan=False)


def _workers() -> int:
    env = os.environ.get("BJORTHO_THREADS")
    if not env:
        return 1
    return max(1, min(int(env), os.cpu_count() or 1))


def _load_oracle(config: RunConfig):
    if not config.norm_spec_path:
        raise BJOrthoError("--spec is required for this command")
    try:
        with open(config.norm_spec_path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        err = BJOrthoError(f"cannot read norm spec: {exc}")
        err.code = "E_IO"
        raise err from exc
    return parse_norm_spec(text)


def _cmd_check(config, opts):
    oracle = _load_oracle(config)
    x, y = parse_vector(opts["x"]), parse_vector(opts["y"])
    v = min_gain(oracle, x, y, eps=config.eps_orth)
    return _report("check", orthogonal=bool(v.orthogonal), min_value=v.min_value,
                   argmin_lambda=_enc(v.argmin_lambda), margin=v.margin, norm_x=v.norm_x,
                   x=_enc(oracle.vector(x)), y=_enc(oracle.vector(y))), EXIT_OK


def _cmd_support(config, opts):
    oracle = _load_oracle(config)
    f = supporting_functional(oracle, parse_vector(opts["x"]), rng=config.seed)
    return _report("support", coeffs=_enc(f.coeffs), attained_at=_enc(f.attained_at),
                   dual_norm_value=f.dual_norm_value, smooth=f.smooth,
                   alternatives=[_enc(a) for a in f.alternatives]), EXIT_OK


def _cmd_auerbach(config, opts):
    oracle = _load_oracle(config)
    s = auerbach_system(oracle, seed=config.seed, eps=config.eps_orth)
    cols = [_enc(s.vectors[:, k]) for k in range(s.vectors.shape[1])]
    return _report("auerbach", vectors=cols, det_trace=[float(d) for d in s.det_trace], det=float(s.det),
                   residual=float(s.residual), sweeps=s.sweeps), EXIT_OK


def _line_list(lines):
    return [_enc(ln.rep) for ln in lines]


def _cmd_detect(config, opts):
    oracle = _load_oracle(config)
    prop = opts["property"]
    rng = np.random.default_rng(config.seed)
    if prop == "smooth":
        r = nonsmooth_config_search(oracle, rng=rng, gap_tol=config.gap_tol)
        found = not r.smooth
        extra = {"smooth": r.smooth, "probes": r.probes}
        if found:
            extra.update(witness_point=_enc(r.witness_point),
                         witness_directions=_line_list(r.witness_directions),
                         chain=_line_list(r.chain), verified=r.verified,
                         relations=[{"relation": name, "margin": m} for name, m in r.relations])
    elif prop == "rotund":
        sample = sample_lines(oracle.dim, opts["samples"], rng=rng, field=oracle.spec.field)
        r = strict_convexity_check(oracle, sample, opts["trials"], rng=rng)
        found = not r.strictly_convex
        extra = {"strictly_convex": r.strictly_convex, "trials": r.trials}
        if found:
            extra.update(witness=[_enc(r.witness[0]), _enc(r.witness[1])], neighborhood=r.neighborhood)
    elif prop == "symmetric":
        r = symmetry_check(oracle, opts["pairs"], rng=rng)
        found = not r.symmetric
        extra = {"symmetric": r.symmetric, "pairs": r.pairs}
        if found:
            extra.update(witness=[_enc(r.witness[0]), _enc(r.witness[1])], margin=r.margin)
    else:
        n = dimension_recovery(oracle, rng=rng)
        return _report("detect", property=prop, witness_found=False, dimension=n,
                       verdict=f"dimension {n}"), EXIT_OK
    return (_report("detect", property=prop, witness_found=found, verdict=r.verdict, **extra),
            EXIT_WITNESS if found else EXIT_OK)


def _cmd_graph(config, opts):
    oracle = _load_oracle(config)
    lines = [ProjLine(parse_vector(v)) for v in opts.get("include") or []]
    lines += sample_lines(oracle.dim, opts["samples"], rng=config.seed, field=oracle.spec.field)
    graph = build_orthograph(oracle, lines, eps=config.eps_orth, workers=_workers())
    rep = analyze(graph)
    if opts.get("out"):
        with open(opts["out"], "w", encoding="utf-8") as fh:
            fh.write(graph_to_dot(graph))
    if opts.get("json"):
        with open(opts["json"], "w", encoding="utf-8") as fh:
            fh.write(graph_to_json(graph) + "\n")
    record = _report("graph", n_vertices=rep.n_vertices, n_edges=rep.n_edges, simple=rep.simple,
                     undirected_edge_list=[list(e) for e in rep.undirected_edge_list],
                     max_clique=rep.max_clique, clique_exact=rep.clique_exact,
                     out_degree=rep.out_degree, in_degree=rep.in_degree)
    return record, EXIT_OK


def _cmd_fp_path(config, opts):
    start = parse_vector(opts["start"])
    rec = path_census(opts["p"], [start], opts["steps"])[0]
    if opts.get("csv"):
        with open(opts["csv"], "w", encoding="utf-8", newline="") as fh:
            write_path_csv(rec, fh)
    lines = [[x, y] for _, x, y, _ in rec.rows()]
    return _report("fp-path", p=int(opts["p"]), steps=opts["steps"],
                   revisit=list(rec.revisit) if rec.revisit else None, two_cycle=rec.two_cycle,
                   special=rec.special, lines=lines), EXIT_OK


def _cmd_thales(config, opts):
    oracle = _load_oracle(config)
    x, y = parse_vector(opts["x"]), parse_vector(opts["y"])
    lam0 = opts["lambda0"]
    alpha = thales_alpha(oracle, x, y, lam0)
    u, w = x + alpha * y, lam0 * x - alpha * y
    residual = abs(float(np.dot(w, grad_norm(oracle, u))))
    return _report("thales", alpha=alpha, residual=residual, lambda0=lam0), EXIT_OK


COMMANDS = {
    "check": _cmd_check,
    "support": _cmd_support,
    "auerbach": _cmd_auerbach,
    "detect": _cmd_detect,
    "graph": _cmd_graph,
    "fp-path": _cmd_fp_path,
    "thales": _cmd_thales,
}


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one subcommand; the JSON report goes to ``--report`` or stdout."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        record, status = COMMANDS[config.command](config, config.options)
    except BJOrthoError as exc:
        print(f"{exc.code}: {exc}", file=stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"E_INPUT: {exc}", file=stderr)
        return EXIT_ERROR
    text = _dump(record) + "\n"
    report_path = config.options.get("report")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bjortho", description="Birkhoff-James orthogonality toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", dest="norm_spec_path", help="norm spec file (JSON record)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--eps-orth", type=float, default=EPS_ORTH, help="relative orthogonality margin")
    common.add_argument("--gap-tol", type=float, default=GAP_TOL, help="one-sided derivative gap threshold")
    common.add_argument("--report", help="write the JSON report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="decide x -> y")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = sub.add_parser("support", parents=[common], help="supporting functional at x")
    p.add_argument("--x", required=True)

    sub.add_parser("auerbach", parents=[common], help="pairwise orthogonal unit basis")

    p = sub.add_parser("detect", parents=[common], help="property detectors")
    p.add_argument("--property", required=True, choices=["smooth", "rotund", "symmetric", "dimension"])
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--samples", type=int, default=100, help="sample lines for neighbourhoods")

    p = sub.add_parser("graph", parents=[common], help="di-orthograph on sampled lines")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--include", action="append", help="extra vertex, e.g. '1,0' (repeatable)")
    p.add_argument("--out", help="DOT output path")
    p.add_argument("--json", help="graph JSON output path")

    p = sub.add_parser("fp-path", parents=[common], help="odd-p neighbour path in the plane")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--start", required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--csv")

    p = sub.add_parser("thales", parents=[common], help="Thales scalar for a mutually orthogonal pair")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--lambda0", type=float, required=True)
    return parser


def config_from_args(argv=None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    base = {k: ns.pop(k) for k in ("command", "norm_spec_path", "seed", "eps_orth", "gap_tol")}
    return RunConfig(**base, options=ns)


def main(argv=None) -> int:
    return run(config_from_args(argv))


if __name__ == "__main__":
    sys.exit(main())
