import numpy as np
import pytest

from conftest import newton_sample, slice_sample
from monadlab.audit import (
    NotCertified,
    audit,
    gauge_dim,
    lemma31_check,
    smooth_tangent_threshold,
    synth_unsmooth_pair,
    tangent_dims,
    theorem_tracer,
    xi_corank,
)
from monadlab.pencils import random_S_of_rank
from monadlab.tensors import ATensor, STensor, random_atensor, random_stensor, xi


def test_dimension_constants():
    for k in range(1, 6):
        assert gauge_dim(k) == 3 * k * k + 5 * k + 3
        assert smooth_tangent_threshold(k) == (8 * k - 3) + gauge_dim(k)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_slice_samples_are_smooth(k):
    rep = audit(slice_sample(k).A)
    assert rep.moduli_tangent_dim == 8 * k - 3
    assert rep.tangent_I_dim == smooth_tangent_threshold(k)
    assert rep.xi_corank == 0 and rep.smooth
    assert rep.rank_dgamma == rep.rank_xi
    assert rep.riemann_roch_gap == 0


def test_float_audit_agrees_with_exact():
    A = slice_sample(4).A
    exact, flt = audit(A), audit(A.to_complex())
    assert (exact.moduli_tangent_dim, exact.xi_corank) == (flt.moduli_tangent_dim, flt.xi_corank)


def test_newton_sample_audit():
    rep = audit(newton_sample(3).A)
    assert rep.moduli_tangent_dim == 21 and rep.xi_corank == 0


def test_scale_invariance():
    A = slice_sample(3).A
    r1, r2 = audit(A).to_dict(), audit(A.scaled(-3)).to_dict()
    for key in ("tangent_I_dim", "moduli_tangent_dim", "xi_corank", "rank_dgamma"):
        assert r1[key] == r2[key]


def test_uncertified_rejected():
    with pytest.raises(NotCertified):
        audit(ATensor.zeros(2))
    with pytest.raises(NotCertified):
        tangent_dims(random_atensor(3, np.random.default_rng(0)))


def test_report_carries_both_thresholds():
    d = audit(slice_sample(2).A).to_dict()
    assert d["tangent_threshold"] == 3 * 4 + 26
    assert d["tangent_threshold_as_printed"] == 3 * 4 + 36


@pytest.mark.parametrize("k,rk", [(2, 2), (3, 4), (4, 6)])
def test_synthetic_pair(k, rk):
    S = random_S_of_rank(k, rk, seed=1)
    A, diag = synth_unsmooth_pair(S, seed=2)
    assert np.all(xi(A, S) == 0)
    assert diag["xi_zero"] and not diag["certified"]
    assert diag["kernel_dim"] == (4 * k - rk) * (2 * k + 2)
    rep = audit(A, require_certified=False)
    assert rep.xi_corank >= 1
    assert rep.riemann_roch_gap == 0
    cor, basis = xi_corank(A)
    assert cor == rep.xi_corank and len(basis) == cor


def test_synthetic_rejects_zero():
    with pytest.raises(ValueError):
        synth_unsmooth_pair(STensor.zeros(3), seed=0)


def test_lemma31_on_planted_pair():
    S = random_S_of_rank(3, 2, seed=5)
    A, _ = synth_unsmooth_pair(S, seed=5)
    out = lemma31_check(A, S)
    assert out["all_zero"]


@pytest.mark.parametrize("k", [2, 3])
def test_tracer_case_I(k):
    S = random_S_of_rank(k, 2, seed=3, bias="a")
    A, _ = synth_unsmooth_pair(S, seed=3)
    out = theorem_tracer(A, S, seed=0)
    assert out.case in ("I", "E3")
    if out.case == "I":
        assert out.evidence["e1_fails_at_f0"]


def test_tracer_case_III():
    S = random_S_of_rank(5, 8, seed=0, bias="c")
    A, _ = synth_unsmooth_pair(S, seed=1)
    out = theorem_tracer(A, S, seed=0)
    assert out.case == "III"
    assert out.evidence["im_beta_equals_ker_rho"]


def test_tracer_rank_bound():
    S = random_S_of_rank(2, 4, seed=1)
    A, _ = synth_unsmooth_pair(S, seed=1)
    # dim ker rho = 4 < rank beta could be, so beta degenerates first.
    assert theorem_tracer(A, S).case in ("E3", "rank-bound")


def test_tracer_preconditions():
    rng = np.random.default_rng(0)
    A, S = random_atensor(3, rng), random_stensor(3, rng)
    with pytest.raises(ValueError):
        theorem_tracer(A, S)
    with pytest.raises(ValueError):
        theorem_tracer(A, STensor.zeros(3))
