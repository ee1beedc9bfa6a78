from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from monadlab.linalg import (
    COMPLEX,
    PRIME,
    RATIONAL,
    Field,
    common_eigenvector,
    is_skew,
    is_symmetric,
    kernel_basis,
    pencil_roots,
    rank,
    rational_congruence_diagonalize,
    solve_affine,
    symmetric_congruence_normalize,
    to_fraction_array,
)


def schoolbook_rank(rows):
    """Oracle: plain Fraction Gaussian elimination, written independently."""
    m = [[Fraction(x) for x in r] for r in rows]
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
    return r


int_matrices = arrays(np.int64, st.tuples(st.integers(1, 7), st.integers(1, 7)),
                      elements=st.integers(-4, 4))


@settings(max_examples=120, deadline=None)
@given(int_matrices)
def test_rank_matches_schoolbook_oracle(M):
    expected = schoolbook_rank(M.tolist())
    assert rank(to_fraction_array(M)) == expected
    assert rank(M, PRIME) == expected
    assert rank(M.astype(complex), COMPLEX) == expected


@settings(max_examples=80, deadline=None)
@given(int_matrices)
def test_kernel_basis_is_a_basis(M):
    Mf = to_fraction_array(M)
    ker = kernel_basis(Mf)
    assert len(ker) == M.shape[1] - rank(Mf)
    for v in ker:
        assert np.all(Mf @ v == 0)
    if ker:
        assert rank(np.stack(ker)) == len(ker)


def test_low_rank_products_need_the_exact_path():
    rng = np.random.default_rng(3)
    U = rng.integers(-50, 50, (30, 4))
    V = rng.integers(-50, 50, (4, 40))
    assert rank(to_fraction_array(U @ V)) == 4
    assert rank(U @ V, RATIONAL) == 4


def test_rational_entries():
    M = to_fraction_array([[1, 2], [3, 4]]) / 7
    M[1] = M[0] * Fraction(5, 3)
    assert rank(M) == 1


def test_prime_field_requires_large_prime():
    with pytest.raises(ValueError):
        Field("prime")
    with pytest.raises(ValueError):
        Field("prime", p=101)
    with pytest.raises(ValueError):
        Field("complex", tol=0)


def test_float_kernel_tolerance():
    M = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-12]])
    assert rank(M, Field("complex", tol=1e-8)) == 1
    assert rank(M, Field("complex", tol=1e-14)) == 2
    (v,) = kernel_basis(M, Field("complex", tol=1e-8))
    assert np.linalg.norm(M @ v) < 1e-8


def test_solve_affine():
    M = to_fraction_array([[1, 2, 3], [2, 4, 6]])
    x = solve_affine(M, to_fraction_array([1, 2]))
    assert np.all(M @ x == to_fraction_array([1, 2]))
    assert solve_affine(M, to_fraction_array([1, 3])) is None


def test_pencil_roots_known():
    R1 = np.eye(2)
    R2 = np.diag([2.0, 5.0])
    roots = sorted(r.real for r in pencil_roots(R1, R2))
    assert np.allclose(roots, [2, 5])


def test_pencil_roots_identically_singular():
    R1 = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 0]], dtype=float)
    R2 = np.array([[0, 2, 0], [-2, 0, 0], [0, 0, 0]], dtype=float)
    assert pencil_roots(R1, R2) is None


def test_common_eigenvector():
    rng = np.random.default_rng(0)
    T = rng.standard_normal((4, 4))
    Ti = np.linalg.inv(T)
    U = T @ np.diag([1, 2, 3, 4]) @ Ti
    V = T @ np.diag([5, 1, 1, 2]) @ Ti
    f, a, b = common_eigenvector(U, V)
    assert np.linalg.norm(U @ f - a * f) < 1e-8
    assert np.linalg.norm(V @ f - b * f) < 1e-8


@settings(max_examples=60, deadline=None)
@given(arrays(np.int64, (4, 4), elements=st.integers(-3, 3)))
def test_rational_congruence(M):
    M = M + M.T
    T, d = rational_congruence_diagonalize(to_fraction_array(M))
    D = T.T @ to_fraction_array(M) @ T
    r = len(d)
    assert r == schoolbook_rank(M.tolist())
    expected = np.zeros((4, 4), dtype=object)
    for i, x in enumerate(d):
        expected[i, i] = x
    assert np.all(D == expected)
    assert all(x != 0 for x in d)


def test_float_congruence_normalize():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((4, 2))
    M = X @ X.T
    T, r = symmetric_congruence_normalize(M)
    assert r == 2
    assert np.allclose(T.T @ M @ T, np.diag([1, 1, 0, 0]), atol=1e-8)


def test_skew_and_symmetric_predicates():
    J = np.array([[0, 1], [-1, 0]])
    assert is_skew(J) and not is_symmetric(J)
    assert is_symmetric(J @ J.T)
