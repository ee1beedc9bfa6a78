import numpy as np
import pytest

from conftest import newton_sample, slice_sample
from monadlab.audit import audit
from monadlab.linalg import rank, to_fraction_array
from monadlab.monads import (
    NonSymplecticError,
    NotFound,
    certify,
    e1_witness_at,
    generate_newton,
    generate_slice,
    group_act,
    h0_plane,
    plane_basis,
    slice_degenerate,
)
from monadlab.tensors import (
    ATensor,
    epsilon,
    gamma,
    random_atensor,
    random_invertible,
    symplectic_gram,
    symplectic_random,
)


def test_zero_tensor_certificate():
    cert = certify(ATensor.zeros(3), e1_samples=5)
    assert cert.e2_exact_zero and cert.e3_rank == 0
    assert not cert.e1_pass and cert.e1_witness is not None
    assert not cert.is_instanton


def test_e1_witness_is_a_zero_of_epsilon():
    A = slice_degenerate(3, np.eye(4, dtype=int))
    cert = certify(A, e1_samples=5)
    f, b = cert.e1_witness
    assert np.all(epsilon(A, np.outer(f, b)) == 0)


def test_k1_full_rank_is_instanton():
    rng = np.random.default_rng(0)
    A = random_atensor(1, rng, size=5)
    while rank(A.flat()) < 4:
        A = random_atensor(1, rng, size=5)
    cert = certify(A)
    assert cert.is_instanton and cert.e3_rank == 4 and cert.h0K == 0
    # Direct check of E1 at random points: a nonzero 1 x 4 row.
    for _ in range(20):
        f = rng.integers(-9, 10, 4)
        if np.any(f):
            assert np.any(A.monad_matrix(to_fraction_array(f)) != 0)


def test_certify_needs_samples():
    with pytest.raises(ValueError):
        certify(ATensor.zeros(2), e1_samples=0)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_slice_generator(k):
    s = slice_sample(k)
    assert s.A.exact
    assert all(x == 0 for x in gamma(s.A))
    assert s.certificate.is_instanton
    assert s.certificate.e3_rank == 2 * k + 2 and s.certificate.h0K == 0
    assert s.provenance["kind"] == "slice-solve"


def test_slice_is_deterministic():
    assert generate_slice(3, 11).A.equals(generate_slice(3, 11).A)


def test_slice_k2_audits_to_13():
    assert audit(slice_sample(2).A).moduli_tangent_dim == 13


def test_slice_rejects_bad_k():
    with pytest.raises(ValueError):
        generate_slice(6, 0)
    with pytest.raises(ValueError):
        generate_newton(0, 0)


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_degenerate_draws_rejected(k):
    rng = np.random.default_rng(k)
    for _ in range(5):
        C = rng.integers(-3, 4, (k + 1, k + 1))
        A = slice_degenerate(k, C + C.T)
        assert all(x == 0 for x in gamma(A))
        cert = certify(A, e1_samples=10)
        assert not cert.is_instanton and cert.h0K >= 1
        assert not cert.internal_error


@pytest.mark.parametrize("k", [2, 5])
def test_newton_generator(k):
    s = newton_sample(k)
    rel = np.linalg.norm(gamma(s.A)) / np.linalg.norm(s.A.a) ** 2
    assert rel <= 1e-10
    assert s.certificate.e3_rank == 2 * k + 2
    assert s.provenance["kind"] == "gauss-newton"


def test_newton_from_exact_sample_needs_no_iterations():
    s = generate_newton(3, 0, start=slice_sample(3).A)
    assert s.provenance["iterations"] == 0


def test_newton_non_convergence_raises():
    with pytest.raises(NotFound):
        generate_newton(4, 0, max_iter=0, restarts=1)


def test_group_action_identity_and_J():
    A = slice_sample(3).A
    I4 = to_fraction_array(np.eye(4, dtype=int))
    I3 = to_fraction_array(np.eye(3, dtype=int))
    I8 = to_fraction_array(np.eye(8, dtype=int))
    assert group_act((I4, I3, I8), A).equals(A)
    B = group_act((I4, I3, symplectic_gram(3)), A)
    c0, c1 = certify(A), certify(B)
    assert (c0.is_instanton, c0.e3_rank) == (c1.is_instanton, c1.e3_rank)


def test_group_action_random_elements_preserve_certificate():
    A = slice_sample(2).A
    rng = np.random.default_rng(8)
    for _ in range(5):
        g = (random_invertible(4, rng), random_invertible(2, rng), symplectic_random(2, rng))
        B = group_act(g, A)
        assert all(x == 0 for x in gamma(B))
        assert certify(B, e1_samples=30).is_instanton


def test_scalar_action():
    A = slice_sample(3).A
    assert certify(A.scaled(7), e1_samples=30).is_instanton


def test_non_symplectic_rejected():
    A = slice_sample(2).A
    I4 = np.eye(4, dtype=int)
    Y = to_fraction_array(2 * np.eye(6, dtype=int))
    with pytest.raises(NonSymplecticError):
        group_act((to_fraction_array(I4), to_fraction_array(np.eye(2, dtype=int)), Y), A)


def test_h0_plane_bounds_and_basis_independence():
    A = slice_sample(4).A
    rng = np.random.default_rng(1)
    for _ in range(30):
        f = rng.integers(-9, 10, 4)
        if not np.any(f):
            continue
        h = h0_plane(A, f)
        assert h in (0, 1)
        basis = plane_basis(f, True)
        M = random_invertible(3, rng)
        assert h0_plane(A, f, basis=M @ basis) == h


def test_h0_plane_zero_covector():
    with pytest.raises(ValueError):
        h0_plane(slice_sample(2).A, np.zeros(4, dtype=int))


def test_e1_witness_at_full_rank_point():
    A = slice_sample(3).A
    assert e1_witness_at(A, to_fraction_array([1, 2, 3, 4])) is None
