import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monadlab.linalg import to_fraction_array
from monadlab.pencils import (
    Cond1Witness,
    Cond2Witness,
    WrongCase,
    ZsProbe,
    claim2_witness,
    classify_S,
    lemma21_solve,
    random_S_of_rank,
    sigma12_max_rank,
    verify_cond1,
    zs_dimension_probe,
    zs_residual,
)
from monadlab.tensors import STensor, rho, rk_S


def recheck(R1, R2, w):
    scale = max(np.linalg.norm(R1, 2), np.linalg.norm(R2, 2))
    r1 = np.linalg.norm(R1 @ w.v0 - w.lam[0] * w.u0) / scale
    r2 = np.linalg.norm(R2 @ w.v0 - w.lam[1] * w.u0) / scale
    image = np.linalg.norm(np.concatenate([R1 @ w.v0, R2 @ w.v0])) / scale
    return max(r1, r2), image


def test_lemma21_standard_example():
    J = np.array([[0.0, 1.0], [-1.0, 0.0]])
    w = lemma21_solve(J, np.zeros((2, 2)))
    assert np.allclose(w.v0, [1, 0]) and np.allclose(w.u0, [0, -1])
    assert w.lam == (1, 0)


def skew(rng, n):
    X = rng.integers(-5, 6, (n, n))
    return (X - X.T).astype(float)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**31))
def test_lemma21_random_pairs(n, seed):
    rng = np.random.default_rng(seed)
    R1, R2 = skew(rng, n), skew(rng, n)
    if not (R1.any() or R2.any()):
        return
    w = lemma21_solve(R1, R2)
    res, image = recheck(R1, R2, w)
    assert res <= 1e-8 and image > 1e-9


def test_lemma21_identically_singular():
    rng = np.random.default_rng(0)
    T = rng.integers(-2, 3, (5, 5)).astype(float)
    while abs(np.linalg.det(T)) < 0.5:
        T = rng.integers(-2, 3, (5, 5)).astype(float)
    mats = []
    for _ in range(2):
        X = np.zeros((5, 5))
        X[:3, :3] = skew(rng, 3)
        mats.append(T.T @ X @ T)
    w = lemma21_solve(*mats)
    res, image = recheck(*mats, w)
    assert res <= 1e-8 and image > 1e-9


def test_lemma21_rejections():
    with pytest.raises(ValueError):
        lemma21_solve(np.zeros((3, 3)), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        lemma21_solve(np.eye(2), np.zeros((2, 2)))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_case_a(k):
    S = random_S_of_rank(k, 2, seed=k, bias="a")
    cls = classify_S(S, seed=0)
    assert cls.case == "cond1" and cls.lemma_case == "a" and cls.r <= 2
    assert isinstance(cls.witness, Cond1Witness)
    verify_cond1(S, cls.witness.Bstar)


@pytest.mark.parametrize("k", [4, 5])
def test_case_b_exact_witness(k):
    S = random_S_of_rank(k, 6, seed=1, bias="b")
    cls = classify_S(S, seed=0)
    assert cls.case == "cond2" and cls.r == 3
    w = cls.witness
    assert isinstance(w, Cond2Witness) and w.exact
    for j in range(k):
        b = to_fraction_array(np.eye(k, dtype=int)[j])
        assert np.all(rho(S, np.outer(w.fstar0, b)) == 0)


@pytest.mark.parametrize("bias,r", [("c", 4), ("d", 3)])
def test_case_c_and_d(bias, r):
    S = random_S_of_rank(5, 8, seed=2, bias=bias)
    cls = classify_S(S, seed=0)
    assert cls.case == "cond3" and cls.r == r
    probe = cls.witness
    assert isinstance(probe, ZsProbe)
    assert len(probe.hit_points) >= 20 and probe.jacobian_rank == 2
    for p in probe.hit_points:
        assert zs_residual(S, p.fstar, p.bstar) <= 1e-8


def test_claim2_rejects_wrong_case():
    S = random_S_of_rank(5, 8, seed=2, bias="c")
    with pytest.raises(WrongCase):
        claim2_witness(S, np.random.default_rng(0).standard_normal((2, 5)))


def test_classifier_rank_range():
    with pytest.raises(ValueError):
        classify_S(STensor.zeros(3))
    with pytest.raises(ValueError):
        classify_S(random_S_of_rank(3, 6, seed=0))


def test_zs_probe_zero_and_not_applicable():
    assert zs_dimension_probe(STensor.zeros(4)).verdict == "dim>=2"
    assert zs_dimension_probe(random_S_of_rank(3, 2, seed=0)).verdict == "not-applicable"


def test_sigma12_rank_is_invariant_under_disguise():
    S = random_S_of_rank(5, 8, seed=4, bias="c")
    r, _ = sigma12_max_rank(S)
    assert r == 4


@pytest.mark.parametrize("k,target", [(2, 4), (3, 6), (5, 10)])
def test_random_S_of_rank(k, target):
    assert rk_S(random_S_of_rank(k, target, seed=3)) == target


def test_random_S_of_rank_rejects_bad_requests():
    with pytest.raises(ValueError):
        random_S_of_rank(3, 3, 0)
    with pytest.raises(ValueError):
        random_S_of_rank(4, 8, 0, bias="c")
