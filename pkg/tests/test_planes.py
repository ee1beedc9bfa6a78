import numpy as np
import pytest

from conftest import newton_sample, slice_sample
from monadlab.monads import h0_plane
from monadlab.planes import (
    PROBE_THRESHOLD,
    PlanePoint,
    QUADRIC_MONOMIALS,
    UnderdeterminedFit,
    plane_intersection_dim,
    probe_verdict,
    quadric_fit,
    quadric_row,
    unstable_plane_test,
    w_dimension_probe,
    w_line_probe,
)
from monadlab.tensors import beta_matrix


def test_unstable_test_agrees_with_h0():
    A = slice_sample(4).A
    rng = np.random.default_rng(2)
    planes = [np.array([a, b, 0, 0]) for a, b in rng.integers(-5, 6, (5, 2)) if a or b]
    planes += [rng.integers(-9, 10, 4) for _ in range(20)]
    for f in planes:
        hit, bstar = unstable_plane_test(A, f)
        assert hit == (h0_plane(A, f) >= 1)
        if hit:
            # f* (x) b* really lies in the column space of beta.
            from monadlab.linalg import rank
            B = beta_matrix(A)
            col = np.outer(f, bstar).reshape(-1, 1)
            assert rank(np.concatenate([B, col], axis=1)) == rank(B)
            assert plane_intersection_dim(A, f) == 1


def test_zero_covector_rejected():
    with pytest.raises(ValueError):
        unstable_plane_test(slice_sample(2).A, np.zeros(4, dtype=int))


def test_k2_unstable_planes_form_a_quadric():
    A = slice_sample(2).A
    probe = w_dimension_probe(A, trials=20, seed=0)
    assert probe.verdict == "dim>=2"
    for p in probe.hit_points:
        assert p.h0 == 1
    q, resid = quadric_fit(probe.hit_points)
    assert resid <= 1e-8
    assert np.isclose(np.linalg.norm(q), 1.0)


def test_line_probe_rejects_dependent_endpoints():
    with pytest.raises(ValueError):
        w_line_probe(slice_sample(2).A, np.array([1, 2, 3, 4]), np.array([2, 4, 6, 8]))


def test_line_probe_on_float_sample():
    A = newton_sample(2).A
    hits = w_line_probe(A, np.array([1, 0, 2, -1]), np.array([0, 1, 1, 3]), seed=1)
    for p in hits:
        assert h0_plane(A, p.fstar, tol=1e-7) == 1


def test_probe_verdict_threshold():
    assert probe_verdict(20, 16) == "dim>=2"
    assert probe_verdict(20, 15) == "dim<=1-likely"
    assert probe_verdict(10, 10) == "dim<=1-likely"
    assert PROBE_THRESHOLD == 0.8


def test_quadric_fit_known_quadric():
    rng = np.random.default_rng(0)
    pts = []
    # x0 x3 - x1 x2 = 0 parametrised by (s, t, s u, t u).
    for s, t, u in rng.standard_normal((15, 3)):
        pts.append(np.array([s, t, s * u, t * u]))
    q, resid = quadric_fit(pts)
    assert resid < 1e-10
    expected = np.zeros(len(QUADRIC_MONOMIALS))
    expected[QUADRIC_MONOMIALS.index((0, 3))] = 1
    expected[QUADRIC_MONOMIALS.index((1, 2))] = -1
    expected /= np.linalg.norm(expected)
    assert min(np.linalg.norm(q - expected), np.linalg.norm(q + expected)) < 1e-8


def test_quadric_fit_underdetermined():
    with pytest.raises(UnderdeterminedFit):
        quadric_fit([np.array([1, 0, 0, 0])] * 8)
    line = [np.array([1, t, 0, 0]) for t in range(12)]
    with pytest.raises(UnderdeterminedFit):
        quadric_fit(line)


def test_quadric_row_is_scale_free():
    p = np.array([1, 2, 3, 4])
    assert np.allclose(quadric_row(p), quadric_row(5 * p))


def test_plane_point_invariants():
    with pytest.raises(ValueError):
        PlanePoint(np.array([1, 0, 0, 0]), np.array([1, 0]), 0)
    with pytest.raises(ValueError):
        PlanePoint(np.array([1, 0, 0, 0]), None, 1)
