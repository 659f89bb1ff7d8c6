import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bjortho.errors import DegenerateInput, DimensionMismatch, NonSmoothPoint, SpecError, Unsupported
from bjortho.norms import (
    NormSpec,
    build_oracle,
    conj_differential,
    custom_oracle,
    derivative_gap,
    dual_norm,
    dual_oracle,
    eval_norm,
    extreme_subgradients,
    grad_norm,
    gram_oracle,
    lp_oracle,
    parse_norm_spec,
    polyhedral_oracle,
    probe_directions,
    spec_from_dict,
    supporting_functional,
)
from bjortho.sphere import maximize_pairing

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def sampled_sup(oracle, g, count=20_000, seed=0):
    # brute-force dual norm: sup over random directions
    z = np.random.default_rng(seed).standard_normal((count, oracle.dim))
    norms = np.array([oracle(v) for v in z])
    return float((np.abs(z @ g) / norms).max())


class TestEvaluation:
    def test_lp_values(self):
        assert eval_norm(lp_oracle(2, 2), [3, 4]) == pytest.approx(5.0)
        assert eval_norm(lp_oracle(1, 3), [1, -2, 3]) == pytest.approx(6.0)
        assert eval_norm(lp_oracle("inf", 3), [1, -7, 3]) == pytest.approx(7.0)
        assert eval_norm(lp_oracle(3, 2), [1, 1]) == pytest.approx(2 ** (1 / 3))

    def test_complex_lp(self):
        o = lp_oracle(2, 2, field="complex")
        assert eval_norm(o, [3j, 4]) == pytest.approx(5.0)

    def test_large_entries_do_not_overflow(self):
        o = lp_oracle(4, 2)
        assert eval_norm(o, [1e200, 1e200]) == pytest.approx(1e200 * 2 ** 0.25)

    def test_gram(self):
        o = gram_oracle(np.diag([4.0, 1.0]))
        assert eval_norm(o, [1, 0]) == pytest.approx(2.0)

    def test_polyhedral_hexagon(self):
        o = polyhedral_oracle([[1, 0], [0, 1], [1, 1]])
        assert eval_norm(o, [1, 1]) == pytest.approx(2.0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            eval_norm(lp_oracle(2, 3), [1, 2])

    def test_complex_input_rejected_for_real_space(self):
        with pytest.raises((DimensionMismatch, SpecError, TypeError, ValueError)):
            eval_norm(lp_oracle(2, 2), [1j, 0])

    @given(st.lists(finite, min_size=3, max_size=3), st.lists(finite, min_size=3, max_size=3),
           st.sampled_from([1, 1.5, 2, 3, "inf"]))
    @settings(max_examples=60, deadline=None)
    def test_triangle_and_homogeneity(self, x, y, p):
        o = lp_oracle(p, 3)
        x, y = np.array(x), np.array(y)
        assert o(x + y) <= o(x) + o(y) + 1e-9
        assert o(-2.5 * x) == pytest.approx(2.5 * o(x), abs=1e-9)


class TestSpecs:
    def test_round_trip(self):
        spec = NormSpec(kind="weighted_lp", dim=3, p=3.0, weights=np.array([1.0, 2.0, 3.0]))
        again = spec_from_dict(json.loads(json.dumps(spec.to_dict())))
        assert again == spec and hash(again) == hash(spec)

    def test_inf_string(self):
        o = parse_norm_spec('{"kind": "lp", "p": "inf", "dim": 2}')
        assert math.isinf(o.spec.p)

    def test_complex_gram_from_pairs(self):
        o = parse_norm_spec({"kind": "gram", "matrix": [[[2, 0], [0, 1]], [[0, -1], [2, 0]]]})
        assert o.is_complex
        assert o(np.array([1, 0], dtype=complex)) == pytest.approx(math.sqrt(2))

    @pytest.mark.parametrize("record, msg", [
        ({"kind": "lp", "p": 0.5, "dim": 2}, "p must be"),
        ({"kind": "gram", "matrix": [[1, 2], [2, 1]]}, "not positive definite"),
        ({"kind": "gram", "matrix": [[1, 2], [0, 1]]}, "Hermitian"),
        ({"kind": "polyhedral", "rows": [[1, 1], [2, 2]]}, "full column rank"),
        ({"kind": "weighted_lp", "p": 2, "weights": [1, -1]}, "positive"),
        ({"kind": "banana", "dim": 2}, "unknown norm kind"),
        ({"kind": "lp", "p": 2}, "dim is required"),
    ])
    def test_invalid_specs(self, record, msg):
        with pytest.raises(SpecError, match=msg):
            parse_norm_spec(record)

    def test_malformed_json(self):
        with pytest.raises(SpecError):
            parse_norm_spec("{not json")

    def test_custom_not_serializable(self):
        with pytest.raises(SpecError):
            parse_norm_spec({"kind": "custom", "dim": 2})


class TestDifferentials:
    def test_lp_closed_form(self):
        g = grad_norm(lp_oracle(3, 2), [1.0, 2.0])
        nrm = 9 ** (1 / 3)
        assert g == pytest.approx([(1 / nrm) ** 2, (2 / nrm) ** 2])

    def test_differential_pairs_to_norm(self, rng):
        for o in (lp_oracle(1.5, 4), lp_oracle(4, 4, field="complex"), gram_oracle(np.diag([1.0, 2, 3, 4]))):
            x = rng.standard_normal(4) + (1j * rng.standard_normal(4) if o.is_complex else 0)
            g = conj_differential(o, x)
            assert np.vdot(g, x).real == pytest.approx(o(x), rel=1e-12)
            assert abs(np.vdot(g, x).imag) < 1e-12
            assert dual_norm(o, g) == pytest.approx(1.0, rel=1e-10)

    def test_fd_matches_closed_form(self, rng):
        closed = lp_oracle(3, 3)
        wrapped = custom_oracle(closed, 3)
        x = rng.standard_normal(3)
        assert grad_norm(wrapped, x) == pytest.approx(grad_norm(closed, x), abs=1e-7)

    def test_complex_fd_matches_closed_form(self, rng):
        closed = lp_oracle(3, 2, field="complex")
        wrapped = custom_oracle(closed, 2, field="complex")
        x = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        assert grad_norm(wrapped, x) == pytest.approx(grad_norm(closed, x), abs=1e-7)

    def test_corner_raises(self):
        with pytest.raises(NonSmoothPoint) as info:
            grad_norm(lp_oracle("inf", 2), [1.0, 1.0])
        assert info.value.gap > 1e-4

    def test_smooth_face_point_of_linf(self):
        assert grad_norm(lp_oracle("inf", 2), [1.0, 0.3]) == pytest.approx([1.0, 0.0], abs=1e-8)

    def test_zero_vector(self):
        with pytest.raises(DegenerateInput):
            grad_norm(lp_oracle(2, 2), [0.0, 0.0])

    def test_gap_of_smooth_norm_is_small(self, rng):
        o = lp_oracle(3, 3)
        gap, _ = derivative_gap(o, rng.standard_normal(3), probe_directions(o, rng, 2))
        assert gap < 1e-4


class TestSubgradients:
    def test_linf_corner(self):
        ext = extreme_subgradients(lp_oracle("inf", 2), [1.0, 1.0])
        assert sorted(map(tuple, ext)) == [(0.0, 1.0), (1.0, 0.0)]

    def test_l1_zero_coordinate(self):
        ext = extreme_subgradients(lp_oracle(1, 2), [1.0, 0.0])
        assert sorted(map(tuple, ext)) == [(1.0, -1.0), (1.0, 1.0)]

    def test_custom_unsupported(self):
        o = custom_oracle(lambda x: np.abs(x).max(), 2)
        with pytest.raises(Unsupported):
            extreme_subgradients(o, [1.0, 1.0])


class TestDuals:
    @pytest.mark.parametrize("p, q", [(3, 1.5), (1, math.inf), (math.inf, 1), (2, 2)])
    def test_lp_conjugate_exponent(self, p, q):
        assert dual_oracle(lp_oracle(p, 3)).spec.p == pytest.approx(q)

    @pytest.mark.parametrize("oracle", [
        lp_oracle(3, 3), lp_oracle(1, 3), lp_oracle("inf", 3),
        polyhedral_oracle([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]]),
        build_oracle(NormSpec(kind="weighted_lp", dim=3, p=3.0, weights=np.array([1.0, 2.0, 0.5]))),
        gram_oracle(np.array([[2.0, 0.3, 0], [0.3, 1, 0], [0, 0, 3]])),
    ], ids=["l3", "l1", "linf", "poly", "weighted", "gram"])
    def test_dual_against_sampled_sup(self, oracle):
        g = np.array([0.3, -1.2, 0.7])
        exact = dual_norm(oracle, g)
        brute = sampled_sup(oracle, g)
        assert brute <= exact * (1 + 1e-12)
        assert brute == pytest.approx(exact, rel=2e-2)

    def test_sphere_search_matches_closed_form(self, rng):
        o = lp_oracle(3, 4)
        g = rng.standard_normal(4)
        custom = custom_oracle(o, 4)
        assert dual_norm(custom, g, rng=1) == pytest.approx(dual_norm(o, g), rel=1e-10)

    def test_complex_sphere_search(self, rng):
        o = lp_oracle(3, 2, field="complex")
        g = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        z, value = maximize_pairing(o, g, rng=1)
        assert o(z) == pytest.approx(1.0)
        assert value == pytest.approx(dual_oracle(o)(g), rel=1e-10)

    def test_supporting_functional_at_corner(self):
        f = supporting_functional(lp_oracle("inf", 2), [1.0, 1.0])
        assert not f.smooth and len(f.alternatives) == 1
        assert f.dual_norm_value == pytest.approx(1.0)
        assert np.dot(f.coeffs, f.attained_at) == pytest.approx(1.0)
