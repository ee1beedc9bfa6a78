"""Tangent dimensions, the xi obstruction, and an executable trace of the smoothness argument."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .linalg import COMPLEX, Field, kernel_basis, rank, to_complex_array, to_fraction_array
from .monads import certify, MonadCertificate
from .pencils import Cond1Witness, Cond2Witness, ZsProbe, classify_S, WitnessError
from .planes import w_dimension_probe
from .tensors import (
    ATensor,
    STensor,
    a_dim,
    beta_matrix,
    dgamma,
    epsilon_matrix,
    rho_matrix,
    rk_S,
    s_dim,
    tau0,
    xi,
    xi_matrix,
)


class NotCertified(ValueError):
    """An operation that needs a certified instanton got something else."""


class TheoremViolation(AssertionError):
    """A computation contradicted a proven statement: worth reporting, never expected."""


def gauge_dim(k: int) -> int:
    """dim of GL_k x Sp_{2k+2} modulo the scalars +-1 acting trivially: 3k^2+5k+3."""
    return 3 * k * k + 5 * k + 3


def smooth_tangent_threshold(k: int) -> int:
    """dim T_A I at a smooth point: (8k-3) + gauge dimension = 3k^2+13k."""
    return 3 * k * k + 13 * k


def _field(A: ATensor, tol: Optional[float] = None) -> Field:
    if A.exact:
        return Field("rational")
    return COMPLEX if tol is None else Field("complex", tol=tol)


@dataclass
class AuditReport:
    k: int
    tangent_I_dim: int
    moduli_tangent_dim: int
    xi_corank: int
    rank_dgamma: int
    rank_xi: int
    smooth: bool
    backend: str
    w_probe: Optional[dict] = None
    certificate: Optional[dict] = None
    timings: dict = field(default_factory=dict)

    @property
    def riemann_roch_gap(self) -> int:
        """moduli_tangent_dim - xi_corank - (8k - 3); zero whenever the two ranks agree."""
        return self.moduli_tangent_dim - self.xi_corank - (8 * self.k - 3)

    def to_dict(self) -> dict:
        k = self.k
        return {
            "k": k,
            "tangent_I_dim": self.tangent_I_dim,
            "moduli_tangent_dim": self.moduli_tangent_dim,
            "xi_corank": self.xi_corank,
            "rank_dgamma": self.rank_dgamma,
            "rank_xi": self.rank_xi,
            "smooth": self.smooth,
            "expected_dim": 8 * k - 3,
            "tangent_threshold": smooth_tangent_threshold(k),
            "tangent_threshold_as_printed": 3 * k * k + 18 * k,
            "backend": self.backend,
            "w_probe": self.w_probe,
            "certificate": self.certificate,
            "timings": self.timings,
        }


def _require_certified(A: ATensor, cert: Optional[MonadCertificate]) -> MonadCertificate:
    cert = cert or certify(A)
    if not cert.is_instanton:
        raise NotCertified(f"A is not a certified instanton: {cert.summary()}")
    return cert


def tangent_dims(A: ATensor, require_certified: bool = True, tol: Optional[float] = None):
    """(dim T_A I, moduli tangent dimension) from the rank of d gamma at A."""
    if require_certified:
        _require_certified(A, None)
    rk = rank(dgamma(A), _field(A, tol))
    tI = a_dim(A.k) - rk
    return tI, tI - gauge_dim(A.k)


def xi_corank(A: ATensor, tol: Optional[float] = None):
    """(corank, kernel basis as STensors) of S -> xi(A, S)."""
    k = A.k
    if s_dim(k) == 0:
        return 0, []
    X = xi_matrix(A)
    fld = _field(A, tol)
    rk = rank(X, fld)
    corank = s_dim(k) - rk
    basis = []
    if corank:
        basis = [STensor.from_vec(k, v, exact=A.exact) for v in kernel_basis(X, fld)]
    return corank, basis


def audit(A: ATensor, require_certified: bool = True, probe_trials: int = 0, seed: int = 0,
          tol: Optional[float] = None, cert: Optional[MonadCertificate] = None) -> AuditReport:
    k = A.k
    timings = {}
    t0 = time.perf_counter()
    if require_certified:
        cert = _require_certified(A, cert)
    timings["certify"] = time.perf_counter() - t0
    fld = _field(A, tol)
    t0 = time.perf_counter()
    r_dg = rank(dgamma(A), fld)
    timings["rank_dgamma"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    r_xi = rank(xi_matrix(A), fld) if s_dim(k) else 0
    timings["rank_xi"] = time.perf_counter() - t0
    tI = a_dim(k) - r_dg
    mod = tI - gauge_dim(k)
    cor = s_dim(k) - r_xi
    probe = None
    if probe_trials:
        t0 = time.perf_counter()
        probe = w_dimension_probe(A, probe_trials, seed).summary()
        timings["w_probe"] = time.perf_counter() - t0
    return AuditReport(
        k=k,
        tangent_I_dim=tI,
        moduli_tangent_dim=mod,
        xi_corank=cor,
        rank_dgamma=r_dg,
        rank_xi=r_xi,
        smooth=cor == 0,
        backend=str(fld),
        w_probe=probe,
        certificate=None if cert is None else cert.summary(),
        timings=timings,
    )


# -------------------------------------------------- vanishing consequences

def _is_zero(M) -> bool:
    M = np.asarray(M)
    if M.dtype == object:
        return bool(np.all(M == 0))
    return float(np.abs(M).max(initial=0.0)) <= 1e-9


def _max_abs(M) -> float:
    return float(np.abs(to_complex_array(M)).max(initial=0.0))


def _xi_vanishes(A: ATensor, S: STensor) -> bool:
    X = xi(A, S)
    if X.dtype == object:
        return bool(np.all(X == 0))
    scale = max(np.linalg.norm(to_complex_array(A.a)) * np.linalg.norm(to_complex_array(S.upper)), 1e-300)
    return float(np.abs(X).max(initial=0.0)) <= 1e-9 * scale


def _mixed(A: ATensor, S: STensor):
    if A.exact == S.exact:
        return A, S
    return A.to_complex(), S.to_complex()


def lemma31_check(A: ATensor, S: STensor) -> dict:
    """tau_0(A, S, h_l) = 0 for all l, epsilon(A, rho(S, B*)) = 0 for all B*, and rho o beta = 0."""
    A, S = _mixed(A, S)
    if not _xi_vanishes(A, S):
        raise ValueError("lemma31_check needs xi(A, S) = 0")
    n = A.n
    eye = np.eye(n, dtype=int)
    tau = [tau0(A, S, to_fraction_array(eye[l]) if A.exact else eye[l]) for l in range(n)]
    eps_rho = epsilon_matrix(A) @ rho_matrix(S)
    rho_beta = rho_matrix(S) @ beta_matrix(A)
    report = {
        "tau0_zero": all(_is_zero(t) for t in tau),
        "epsilon_rho_zero": _is_zero(eps_rho),
        "rho_beta_zero": _is_zero(rho_beta),
        "residuals": {
            "tau0": max(_max_abs(t) for t in tau),
            "epsilon_rho": _max_abs(eps_rho),
            "rho_beta": _max_abs(rho_beta),
        },
    }
    report["all_zero"] = report["tau0_zero"] and report["epsilon_rho_zero"] and report["rho_beta_zero"]
    return report


def primitive_integer_vector(v) -> np.ndarray:
    """Clear denominators and common factors of a rational vector."""
    fr = [Fraction(x) for x in v]
    den = math.lcm(*[x.denominator for x in fr])
    ints = [int(x * den) for x in fr]
    g = math.gcd(*ints) or 1
    return to_fraction_array(np.array([x // g for x in ints], dtype=object))


def synth_unsmooth_pair(S: STensor, seed: int, size: int = 3):
    """Random exact A with xi(A, S) = 0.

    xi(A, S) = rho(S) applied to every h-column of A, so the solutions are
    the tensors whose columns lie in ker rho(S).
    """
    if S.is_zero():
        raise ValueError("S must be nonzero")
    k = S.k
    n = 2 * k + 2
    fld = Field("rational") if S.exact else COMPLEX
    ker = kernel_basis(rho_matrix(S), fld)
    if not ker:
        raise ValueError("xi(., S) has zero kernel")
    if S.exact:
        # Primitive integer kernel vectors keep exact ranks of A cheap.
        ker = [primitive_integer_vector(v) for v in ker]
    K = np.stack(ker, axis=1)
    rng = np.random.default_rng(seed)
    C = rng.integers(-size, size + 1, (K.shape[1], n))
    if S.exact:
        flat = K @ to_fraction_array(C)
    else:
        flat = K @ C.astype(complex)
    A = ATensor.from_array(flat.reshape(4, k, n), exact=S.exact)
    cert = certify(A, e1_samples=50, seed=seed)
    diagnostics = {
        "rk_S": rk_S(S),
        "kernel_dim": K.shape[1] * n,
        "xi_zero": _xi_vanishes(A, S),
        "certificate": cert.summary(),
        "certified": cert.is_instanton,
    }
    return A, diagnostics


# ------------------------------------------------------------------ tracer

@dataclass
class TraceOutcome:
    case: str
    evidence: dict
    certified: bool = False

    def to_dict(self) -> dict:
        return {"case": self.case, "evidence": self.evidence, "certified": self.certified}


def _export(v):
    v = np.asarray(v)
    if v.dtype == object:
        return [str(x) for x in v]
    return [[float(z.real), float(z.imag)] for z in to_complex_array(v)]


def _case_I(A: ATensor, w: Cond1Witness) -> dict:
    """epsilon(A, f0 (x) b0) = 0 with f0 (x) b0 = rho(S, B*): an (E1) failure at f0."""
    Ac = A.to_complex()
    img = to_complex_array(epsilon_matrix(Ac)) @ np.outer(w.f0, w.b0).reshape(-1)
    scale = max(np.linalg.norm(to_complex_array(Ac.a)) * np.linalg.norm(w.f0) * np.linalg.norm(w.b0), 1e-300)
    res = float(np.linalg.norm(img) / scale)
    if res > 1e-8:
        raise TheoremViolation(f"case I: epsilon(A, f0 (x) b0) = {res:.2e} is not zero")
    # The same fact read as a rank drop of F(f0), on the scale of A and f0.
    F = to_complex_array(Ac.monad_matrix(w.f0))
    smin = np.linalg.svd(F, compute_uv=False)[-1]
    drop = float(smin / max(np.linalg.norm(to_complex_array(Ac.a)) * np.linalg.norm(w.f0), 1e-300))
    if drop > 1e-8:
        raise TheoremViolation(f"case I: F(f0) keeps full rank (relative sigma_min {drop:.2e})")
    return {"f0": _export(w.f0), "b0": _export(w.b0), "epsilon_residual": res,
            "rank_ratio": w.rank_ratio, "F_f0_sigma_min": drop, "e1_fails_at_f0": True}


def _case_II(A: ATensor, w: Cond2Witness) -> dict:
    """{f*0} (x) M inside Im beta with dim M = (2k+2) + k - rank[beta | f*0 (x) I_k] >= 3."""
    k, n = A.k, A.n
    exact = A.exact and w.exact
    B = beta_matrix(A) if exact else to_complex_array(beta_matrix(A))
    f0 = w.fstar0 if exact else to_complex_array(w.fstar0)
    eye = to_fraction_array(np.eye(k, dtype=int)) if exact else np.eye(k)
    Fk = np.concatenate([f0[i] * eye for i in range(4)], axis=0)
    M = np.concatenate([B, Fk], axis=1)
    fld = Field("rational") if exact else Field("complex", tol=1e-9)
    dim_M = n + k - rank(M, fld)
    if dim_M < 3:
        raise TheoremViolation(f"case II: dim M = {dim_M} < 3")
    return {"fstar0": _export(w.fstar0), "dim_M": dim_M, "exact": exact,
            "dim_ker_rho_minus_dim_im_beta": 2 * k - 6 if k >= 3 else None}


def _case_III(A: ATensor, S: STensor, probe: ZsProbe) -> dict:
    """Im beta = ker rho, so X_A = Z_S, whose dimension the Z_S probe bounds below."""
    fld = Field("rational") if (A.exact and S.exact) else Field("complex", tol=1e-9)
    A2, S2 = _mixed(A, S)
    B = beta_matrix(A2)
    rb = rank(B, fld)
    ker = kernel_basis(rho_matrix(S2), fld)
    joint = rank(np.concatenate([B, np.stack(ker, axis=1)], axis=1), fld)
    if not (rb == len(ker) == joint):
        raise TheoremViolation(f"case III: rank beta {rb}, dim ker rho {len(ker)}, joint {joint}")
    if probe.verdict != "dim>=2":
        raise TheoremViolation("case III: Z_S probe did not certify dim >= 2")
    return {"rank_beta": rb, "dim_ker_rho": len(ker), "im_beta_equals_ker_rho": True,
            "zs_points": probe.hits, "jacobian_rank": probe.jacobian_rank, "method": probe.method}


def theorem_tracer(A: ATensor, S: STensor, seed: int = 0, e1_samples: int = 50) -> TraceOutcome:
    """Run the case analysis on a pair with xi(A, S) = 0, S != 0.

    Outcomes: "I" (E1 failure witness), "II" ({f*0} (x) M in Im beta with
    dim M >= 3), "III" (Im beta = ker rho and dim Z_S >= 2), "E3" (rank beta
    < 2k+2, before the rank bound), "rank-bound" (rk S > 2k-2 with full
    rank beta).  A pair whose A certifies as an instanton raises
    TheoremViolation whatever the case.
    """
    if S.is_zero():
        raise ValueError("S must be nonzero")
    k = A.k
    if S.k != k:
        raise ValueError("A and S have different k")
    A2, S2 = _mixed(A, S)
    if not _xi_vanishes(A2, S2):
        raise ValueError("theorem_tracer needs xi(A, S) = 0")
    cert = certify(A, e1_samples=e1_samples, seed=seed)
    if cert.is_instanton:
        raise TheoremViolation("a certified instanton has a nonzero S with xi(A, S) = 0")
    fld = Field("rational") if (A2.exact and S2.exact) else Field("complex", tol=1e-9)
    rho_beta = rho_matrix(S2) @ beta_matrix(A2)
    if not _is_zero(rho_beta):
        raise TheoremViolation("Im beta is not inside ker rho")
    rb = rank(beta_matrix(A2), fld)
    rk = rk_S(S2) if S2.exact else rank(rho_matrix(S2), fld)
    base = {"rank_beta": rb, "rk_S": rk, "inclusion_im_beta_in_ker_rho": True,
            "certificate": cert.summary()}
    if rb < 2 * k + 2:
        return TraceOutcome("E3", {**base, "reason": "rank beta < 2k+2"})
    if rk > 2 * k - 2:
        # dim ker rho = 4k - rk < 2k+2 = rank beta, impossible under the inclusion.
        return TraceOutcome("rank-bound", {**base, "reason": "rk S > 2k-2 with rank beta = 2k+2"})
    cls = classify_S(S if S.exact else S2, seed=seed)
    base["classification"] = cls.summary()
    if cls.case == "cond1":
        return TraceOutcome("I", {**base, **_case_I(A2, cls.witness)})
    if cls.case == "cond2":
        return TraceOutcome("II", {**base, **_case_II(A, cls.witness)})
    return TraceOutcome("III", {**base, **_case_III(A, S, cls.witness)})
