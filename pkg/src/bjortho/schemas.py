"""JSON schemas of the reports written by the command-line tool."""

SCHEMA_VERSION = "bjortho/1"

_number = {"type": "number"}
_scalar = {"oneOf": [_number, {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}]}
_vector = {"type": "array", "items": _scalar}
_base = {"schema": {"const": SCHEMA_VERSION}, "command": {"type": "string"}}


def _report(command, props, required):
    return {
        "type": "object",
        "properties": {**_base, **props, "command": {"const": command}},
        "required": ["schema", "command", *required],
    }


CHECK = _report("check", {
    "orthogonal": {"type": "boolean"},
    "min_value": _number,
    "argmin_lambda": _scalar,
    "margin": _number,
    "norm_x": _number,
    "x": _vector,
    "y": _vector,
}, ["orthogonal", "min_value", "argmin_lambda", "margin"])

SUPPORT = _report("support", {
    "coeffs": _vector,
    "attained_at": _vector,
    "dual_norm_value": _number,
    "smooth": {"type": "boolean"},
    "alternatives": {"type": "array", "items": _vector},
}, ["coeffs", "attained_at", "dual_norm_value", "smooth"])

AUERBACH = _report("auerbach", {
    "vectors": {"type": "array", "items": _vector},
    "det_trace": {"type": "array", "items": _number},
    "det": _number,
    "residual": _number,
    "sweeps": {"type": "integer"},
}, ["vectors", "det_trace", "residual"])

DETECT = _report("detect", {
    "property": {"enum": ["smooth", "rotund", "symmetric", "dimension"]},
    "verdict": {"type": "string"},
    "witness_found": {"type": "boolean"},
    "dimension": {"type": "integer"},
}, ["property", "witness_found"])

GRAPH = _report("graph", {
    "n_vertices": {"type": "integer"},
    "n_edges": {"type": "integer"},
    "simple": {"type": "boolean"},
    "undirected_edge_list": {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}},
    "max_clique": {"type": "array", "items": {"type": "integer"}},
    "clique_exact": {"type": "boolean"},
    "out_degree": {"type": "object"},
    "in_degree": {"type": "object"},
}, ["n_vertices", "n_edges", "simple", "undirected_edge_list", "max_clique"])

FP_PATH = _report("fp-path", {
    "p": {"type": "integer"},
    "steps": {"type": "integer"},
    "revisit": {"oneOf": [{"type": "null"}, {"type": "array", "items": {"type": "integer"}}]},
    "two_cycle": {"type": "boolean"},
    "special": {"oneOf": [{"type": "null"}, {"type": "string"}]},
    "lines": {"type": "array", "items": _vector},
}, ["p", "steps", "revisit", "two_cycle"])

THALES = _report("thales", {
    "alpha": _number,
    "residual": _number,
    "lambda0": _number,
}, ["alpha", "residual"])

GRAPH_EXPORT = {
    "type": "object",
    "properties": {
        "vertices": {"type": "array", "items": _vector},
        "edges": {"type": "array", "items": {"type": "array", "items": {"type": "integer"},
                                             "minItems": 2, "maxItems": 2}},
        "spec": {"type": ["object", "null"]},
    },
    "required": ["vertices", "edges", "spec"],
}

ERROR = _report("error", {"code": {"type": "string"}, "message": {"type": "string"}}, ["code", "message"])

BY_COMMAND = {
    "check": CHECK,
    "support": SUPPORT,
    "auerbach": AUERBACH,
    "detect": DETECT,
    "graph": GRAPH,
    "fp-path": FP_PATH,
    "thales": THALES,
}
