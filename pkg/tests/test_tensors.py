from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monadlab.linalg import rank, to_complex_array, to_fraction_array
from monadlab.tensors import (
    ATensor,
    STensor,
    a_dim,
    act_on_A,
    act_on_gamma_value,
    b_pairs,
    beta,
    beta_matrix,
    dgamma,
    epsilon,
    flattenings,
    gamma,
    inverse,
    pair_ac,
    random_atensor,
    random_invertible,
    random_stensor,
    rho,
    rho_matrix,
    rk_S,
    s_dim,
    symplectic_gram,
    symplectic_random,
    tau0,
    xi,
    xi_matrix,
)

seeds = st.integers(0, 2**31)
ks = st.integers(2, 5)


def brute_gamma_form(A, x):
    """F(x) J F(x)^T evaluated directly."""
    F = A.monad_matrix(to_fraction_array(x))
    return F @ symplectic_gram(A.k) @ F.T


def test_dimensions():
    assert [s_dim(k) for k in range(1, 6)] == [0, 10, 30, 60, 100]
    assert [a_dim(k) for k in range(1, 6)] == [16, 48, 96, 160, 240]
    J = symplectic_gram(2)
    assert np.all(J.T == -J)


def test_shape_validation():
    with pytest.raises(ValueError):
        ATensor(np.zeros((4, 2, 5)))
    with pytest.raises(ValueError):
        STensor(2, np.zeros((2, 4, 4)))
    up = np.zeros((1, 4, 4))
    up[0, 0, 1] = 1
    with pytest.raises(ValueError):
        STensor(2, up)


@settings(max_examples=25, deadline=None)
@given(ks, seeds)
def test_gamma_matches_evaluated_quadric(k, seed):
    rng = np.random.default_rng(seed)
    A = random_atensor(k, rng)
    g = gamma(A, mode="forms")
    pos = 0
    x = rng.integers(-3, 4, 4)
    G = brute_gamma_form(A, x)
    # Reassemble the quadric at x from its monomial coefficients.
    for j, j2 in b_pairs(k):
        val = Fraction(0)
        for i in range(4):
            for i2 in range(i, 4):
                val += g[pos] * int(x[i]) * int(x[i2])
                pos += 1
        assert val == G[j, j2]


@settings(max_examples=25, deadline=None)
@given(ks, seeds)
def test_gamma_modes_agree_up_to_constant(k, seed):
    A = random_atensor(k, np.random.default_rng(seed))
    gc, gf = gamma(A), gamma(A, mode="forms")
    nz = [i for i in range(len(gf)) if gf[i] != 0]
    if nz:
        c = gc[nz[0]] / gf[nz[0]]
        assert all(gc[i] == c * gf[i] for i in range(len(gf)))


@settings(max_examples=20, deadline=None)
@given(ks, seeds)
def test_dgamma_is_the_polarisation(k, seed):
    rng = np.random.default_rng(seed)
    A, B = random_atensor(k, rng), random_atensor(k, rng)
    assert np.all(dgamma(A) @ B.vec() == gamma(A + B) - gamma(A) - gamma(B))


def test_dgamma_float_derivative():
    rng = np.random.default_rng(5)
    A = random_atensor(3, rng, exact=False)
    B = random_atensor(3, rng, exact=False)
    h = 1e-6
    fd = (gamma(ATensor(A.a + h * B.a)) - gamma(ATensor(A.a - h * B.a))) / (2 * h)
    # For a quadratic map the polarisation is the derivative.
    assert np.allclose(dgamma(A) @ B.vec(), fd, atol=1e-6)


def test_k1_gamma_vanishes():
    A = random_atensor(1, np.random.default_rng(0))
    assert gamma(A).size == 0


@settings(max_examples=20, deadline=None)
@given(ks, seeds)
def test_beta_epsilon_definitions(k, seed):
    rng = np.random.default_rng(seed)
    A = random_atensor(k, rng)
    J = symplectic_gram(k)
    h = to_fraction_array(rng.integers(-3, 4, 2 * k + 2))
    # beta(A, h)[i, j] = sum_l a[i, j, l] omega(h_l, h)
    expect = np.einsum("ijl,l->ij", A.a, J @ h)
    assert np.all(beta(A, h) == expect)
    C = to_fraction_array(rng.integers(-3, 4, (4, k)))
    assert np.all(epsilon(A, C) == np.einsum("ijl,ij->l", A.a, C))


@settings(max_examples=20, deadline=None)
@given(ks, seeds)
def test_xi_matrix_matches_rho_columns(k, seed):
    rng = np.random.default_rng(seed)
    A, S = random_atensor(k, rng), random_stensor(k, rng)
    direct = xi(A, S)
    via_matrix = (xi_matrix(A) @ S.vec()).reshape(4, k, 2 * k + 2)
    assert np.all(direct == via_matrix)
    for l in range(2 * k + 2):
        assert np.all(direct[:, :, l] == rho(S, A.a[:, :, l]))


@settings(max_examples=30, deadline=None)
@given(ks, seeds)
def test_adjointness_constant_quarter(k, seed):
    rng = np.random.default_rng(seed)
    A, B, S = random_atensor(k, rng), random_atensor(k, rng), random_stensor(k, rng)
    lhs = (gamma(A + B) - gamma(A) - gamma(B)) @ S.vec()
    assert lhs == Fraction(1, 4) * pair_ac(B, xi(A, S))


@settings(max_examples=20, deadline=None)
@given(ks, seeds)
def test_rk_S_even_and_flattenings_agree(k, seed):
    S = random_stensor(k, np.random.default_rng(seed), size=1)
    sig, sig_hat = flattenings(S)
    r = rank(rho_matrix(S))
    assert r % 2 == 0
    assert r == rank(sig) == rank(sig_hat) == rk_S(S)


def test_rk_of_single_term():
    f = np.array([1, 2, 0, -1])
    q = np.outer(f, f)
    S = STensor.from_terms(3, [(q, [1, 0, 0], [0, 1, 0])])
    assert rk_S(S) == 2
    assert rk_S(STensor.zeros(3)) == 0


def test_symplectic_random_preserves_J():
    rng = np.random.default_rng(0)
    for k in range(1, 6):
        Y = symplectic_random(k, rng)
        J = symplectic_gram(k)
        assert np.all(Y.T @ J @ Y == J)


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), seeds)
def test_group_action_equivariance_of_gamma(k, seed):
    rng = np.random.default_rng(seed)
    A = random_atensor(k, rng)
    P, Q, Y = random_invertible(4, rng), random_invertible(k, rng), symplectic_random(k, rng)
    lhs = gamma(act_on_A(P, Q, Y, A))
    rhs = act_on_gamma_value(P, Q, gamma(A), k)
    assert np.all(lhs == rhs)


def test_inverse_exact():
    rng = np.random.default_rng(2)
    M = random_invertible(4, rng)
    assert np.all(M @ inverse(M) == to_fraction_array(np.eye(4, dtype=int)))


def test_transformed_roundtrip():
    rng = np.random.default_rng(4)
    S = random_stensor(3, rng)
    P, Q = random_invertible(4, rng), random_invertible(3, rng)
    back = S.transformed(P, Q).transformed(inverse(P), inverse(Q))
    assert np.all(back.upper == S.upper)


def test_from_vec_roundtrip():
    S = random_stensor(4, np.random.default_rng(9))
    assert np.all(STensor.from_vec(4, S.vec()).upper == S.upper)


def test_tau0_vanishes_when_xi_does():
    rng = np.random.default_rng(1)
    S = random_stensor(2, rng)
    A = ATensor.zeros(2)
    h = to_fraction_array(rng.integers(-2, 3, 6))
    assert np.all(tau0(A, S, h) == 0)


def test_float_and_exact_agree():
    rng = np.random.default_rng(11)
    A, S = random_atensor(3, rng), random_stensor(3, rng)
    assert np.allclose(to_complex_array(xi(A, S)), xi(A.to_complex(), S.to_complex()))
    assert np.allclose(to_complex_array(beta_matrix(A)), beta_matrix(A.to_complex()))
