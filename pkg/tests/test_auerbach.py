import numpy as np
import pytest

from bjortho.auerbach import auerbach_system, mutual_orthogonality_residual
from bjortho.errors import ConvergenceFailure, DegenerateInput
from bjortho.norms import gram_oracle, lp_oracle, polyhedral_oracle


def grid_max_det_linf(step=1e-3):
    # brute-force oracle: |det| over pairs of points on half the l_inf sphere
    t = np.arange(-1.0, 1.0 + step / 2, step)
    pts = np.vstack([np.column_stack([np.ones_like(t), t]), np.column_stack([t, np.ones_like(t)])])
    det = pts[:, None, 0] * pts[None, :, 1] - pts[:, None, 1] * pts[None, :, 0]
    return float(np.abs(det).max())


def test_linf_plane_reaches_grid_maximum():
    s = auerbach_system(lp_oracle("inf", 2), seed=0)
    assert s.det == pytest.approx(grid_max_det_linf(), abs=1e-3)
    assert s.det == pytest.approx(2.0, abs=1e-9)


def test_euclidean_gives_orthonormal_basis():
    s = auerbach_system(lp_oracle(2, 3), seed=1)
    assert s.vectors.T @ s.vectors == pytest.approx(np.eye(3), abs=1e-6)
    assert s.det == pytest.approx(1.0, abs=1e-10)


def test_l1_det_bound():
    # unit vectors of l_1 have |det| <= 1 (Hadamard with l2 <= l1)
    s = auerbach_system(lp_oracle(1, 3), seed=2)
    assert s.det <= 1 + 1e-9
    assert s.residual < 1e-6


@pytest.mark.parametrize("p", [1.5, 3, 4])
@pytest.mark.parametrize("n", [2, 3, 4])
def test_pairwise_orthogonal_and_unit(p, n):
    o = lp_oracle(p, n)
    s = auerbach_system(o, seed=n)
    assert s.residual < 1e-6
    assert all(o(s.vectors[:, k]) == pytest.approx(1.0, abs=1e-12) for k in range(n))
    assert np.all(np.diff(s.det_trace) >= 0)


def test_gram_and_polyhedral():
    for o in (gram_oracle(np.array([[2.0, 0.4], [0.4, 1.0]])), polyhedral_oracle([[1, 0], [0, 1], [1, 1]])):
        s = auerbach_system(o, seed=4)
        assert mutual_orthogonality_residual(o, s.vectors) < 1e-6


def test_complex_space():
    o = lp_oracle(3, 2, field="complex")
    s = auerbach_system(o, seed=5)
    assert s.residual < 1e-6


def test_seed_determinism():
    a = auerbach_system(lp_oracle(3, 3), seed=11)
    b = auerbach_system(lp_oracle(3, 3), seed=11)
    assert np.array_equal(a.vectors, b.vectors) and a.det_trace == b.det_trace


def test_sweep_budget_exhausted():
    with pytest.raises(ConvergenceFailure) as info:
        auerbach_system(lp_oracle(3, 4), seed=0, max_sweeps=1, rtol=0.0)
    assert info.value.system is not None


def test_residual_accepts_lists_and_rejects_zero():
    o = lp_oracle(2, 2)
    assert mutual_orthogonality_residual(o, [np.array([1.0, 0]), np.array([0, 1.0])]) == 0.0
    assert mutual_orthogonality_residual(o, [np.array([1.0, 0]), np.array([1.0, 1.0])]) > 0.1
    with pytest.raises(DegenerateInput):
        mutual_orthogonality_residual(o, [np.array([1.0, 0]), np.zeros(2)])
