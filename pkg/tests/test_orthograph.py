import io
import json
import re

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bjortho.bj_core import ProjLine, is_bj_orthogonal, sample_lines
from bjortho.errors import DuplicateLines, Overflow, SpecError
from bjortho.norms import gram_oracle, lp_oracle
from bjortho.orthograph import (
    LogVec,
    analyze,
    build_orthograph,
    dual_antiiso_check,
    fp_map,
    fp_map_log,
    fp_pow,
    fp_pow_log,
    graph_from_dict,
    graph_to_dict,
    graph_to_dot,
    graph_to_json,
    path_census,
    write_path_csv,
)

SPECIAL = [ProjLine(v) for v in ([1, 0], [0, 1], [1, 1], [1, -1])]


class TestGraph:
    def test_linf_plane_edges(self):
        o = lp_oracle("inf", 2)
        g = build_orthograph(o, [ProjLine([1, 1]), ProjLine([1, 0]), ProjLine([0, 1])])
        assert (0, 1) in g.edges and (0, 2) in g.edges
        assert (1, 0) not in g.edges

    def test_edges_match_definition(self, rng):
        o = lp_oracle(3, 2)
        lines = SPECIAL + sample_lines(2, 20, rng=rng)
        g = build_orthograph(o, lines)
        for i, a in enumerate(lines):
            for j, b in enumerate(lines):
                if i != j:
                    assert ((i, j) in g.edges) == is_bj_orthogonal(o, a.rep, b.rep)

    @pytest.mark.parametrize("p", [3, 5])
    def test_odd_p_two_undirected_edges(self, p):
        g = build_orthograph(lp_oracle(p, 2), SPECIAL + sample_lines(2, 100, rng=1))
        rep = analyze(g)
        assert rep.undirected_edge_list == [(0, 1), (2, 3)]

    def test_gram_graph_is_simple(self):
        o = gram_oracle(np.array([[2.0, 0.5], [0.5, 1.0]]))
        lines = [ProjLine([1, 0]), ProjLine([-0.5, 2.0])] + sample_lines(2, 30, rng=5)
        rep = analyze(build_orthograph(o, lines))
        assert rep.simple and (0, 1) in rep.undirected_edge_list

    def test_linf_graph_not_simple(self):
        rep = analyze(build_orthograph(lp_oracle("inf", 2), [ProjLine([1, 1]), ProjLine([1, 0])]))
        assert not rep.simple and rep.undirected_edge_list == []

    def test_workers_give_same_graph(self):
        lines = SPECIAL + sample_lines(2, 60, rng=2)
        o = lp_oracle(3, 2)
        assert build_orthograph(o, lines, workers=4).edges == build_orthograph(o, lines).edges

    def test_duplicate_lines(self):
        with pytest.raises(DuplicateLines) as info:
            build_orthograph(lp_oracle(2, 2), [ProjLine([1, 2]), ProjLine([0, 1]), ProjLine([-2, -4])])
        assert info.value.indices == (0, 2)

    def test_euclidean_clique(self):
        lines = [ProjLine(v) for v in np.eye(3)] + sample_lines(3, 10, rng=3)
        rep = analyze(build_orthograph(lp_oracle(2, 3), lines))
        assert rep.max_clique == [0, 1, 2] and rep.clique_exact

    def test_empty_graph(self):
        rep = analyze(build_orthograph(lp_oracle(2, 2), []))
        assert rep.n_vertices == 0 and rep.max_clique == []
        assert graph_to_dot(build_orthograph(lp_oracle(2, 2), [])) == "digraph orthograph {\n}\n"


class TestExport:
    def test_json_round_trip(self):
        o = lp_oracle("inf", 2)
        g = build_orthograph(o, [ProjLine([1, 1]), ProjLine([1, 0]), ProjLine([0, 1])])
        oracle, lines, edges = graph_from_dict(json.loads(graph_to_json(g)))
        assert oracle.spec == o.spec
        assert all(a == b for a, b in zip(lines, g.vertices))
        assert edges == g.edges
        assert graph_to_dict(g)["spec"]["p"] == "inf"

    def test_dot_grammar(self):
        g = build_orthograph(lp_oracle(3, 2), SPECIAL)
        dot = graph_to_dot(g)
        assert dot.startswith("digraph orthograph {")
        edge_lines = [ln for ln in dot.splitlines() if "->" in ln]
        assert len(edge_lines) == 2
        for ln in edge_lines:
            assert re.fullmatch(r'\s*\d+ -> \d+( \[dir=both\])?;', ln)


class TestOddPMap:
    def test_frozen_values(self):
        assert fp_map(3, [0.5, 2]) == pytest.approx([4.0, -0.25])
        assert fp_pow(3, 2, [2, 1]) == pytest.approx([-16.0, -1.0])

    def test_rejects_even_p(self):
        with pytest.raises(SpecError):
            fp_map(4, [1, 1])

    @given(st.floats(0.5, 2), st.floats(0.5, 2), st.integers(0, 8), st.sampled_from([3, 5]))
    @settings(max_examples=80, deadline=None)
    def test_closed_form_matches_iteration(self, a, b, k, p):
        w = LogVec.from_vector([a, -b])
        for _ in range(k):
            w = fp_map_log(p, w)
        closed = fp_pow_log(p, k, [a, -b])
        assert closed.signs == w.signs
        assert closed.logs == pytest.approx(w.logs, rel=1e-12, abs=1e-12)

    def test_float_iteration_agrees_while_in_range(self):
        v = np.array([0.7, 1.3])
        x = v.copy()
        for k in range(1, 6):
            x = fp_map(3, x)
            assert fp_pow(3, k, v) == pytest.approx(x, rel=1e-12)

    def test_overflow(self):
        with pytest.raises(Overflow):
            fp_pow(3, 12, [3.0, 1.0])
        # the log form survives
        assert fp_pow_log(3, 12, [3.0, 1.0]).logs[0] > 700

    def test_unit_never_overflows(self):
        u = fp_pow_log(3, 30, [3.0, 1.0]).unit()
        assert np.linalg.norm(u) == pytest.approx(1.0)


class TestPaths:
    def test_special_lines_are_two_cycles(self):
        recs = path_census(3, [[1, 1], [1, 0]], 6)
        assert all(r.two_cycle for r in recs)
        assert [r.special for r in recs] == ["(1,1)", "(1,0)"]

    def test_generic_start_has_no_revisit(self):
        rec = path_census(3, [[0.3, 0.7]], 12)[0]
        assert rec.revisit is None and rec.special is None
        assert rec.crosscheck_max_angle < 1e-9

    def test_csv(self):
        rec = path_census(3, [[0.3, 0.7]], 4)[0]
        fh = io.StringIO()
        write_path_csv(rec, fh)
        rows = fh.getvalue().splitlines()
        assert rows[0] == "step,x,y,line_id"
        assert len(rows) == 6
        assert [r.split(",")[3] for r in rows[1:]] == ["0", "1", "2", "3", "4"]


@pytest.mark.parametrize("p", [3, 1.5])
def test_dual_antiisomorphism(p):
    rep = dual_antiiso_check(lp_oracle(p, 3), 50, rng=0)
    assert rep.agreement == 1.0 and not rep.failures
