"""Instanton conditions, sample generators, the group action and plane restrictions."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.linalg

from .linalg import (
    COMPLEX,
    Field,
    LinalgError,
    kernel_basis,
    rank,
    to_complex_array,
    to_fraction_array,
)
from .tensors import (
    ATensor,
    act_on_A,
    dgamma,
    beta_matrix,
    gamma,
    symplectic_gram,
)

log = logging.getLogger(__name__)

SLICE_DRAWS = 32
NEWTON_RESTARTS = 16

# Rank drops of structured tensors tend to sit on coordinate subspaces,
# which random probes never hit.
COORDINATE_PROBES = tuple(
    [np.eye(4, dtype=int)[i] for i in range(4)]
    + [np.eye(4, dtype=int)[i] + np.eye(4, dtype=int)[j] for i in range(4) for j in range(i + 1, 4)]
)


class NotFound(RuntimeError):
    """A generator exhausted its retry budget."""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual


class NonSymplecticError(ValueError):
    pass


@dataclass
class MonadCertificate:
    k: int
    e2_exact_zero: bool
    e2_residual: float
    e2_pass: bool
    e3_rank: int
    e1_pass: bool
    e1_samples: int
    e1_witness: Optional[tuple] = None
    h0K: int = 0

    @property
    def e3_pass(self) -> bool:
        return self.e3_rank == 2 * self.k + 2

    @property
    def is_instanton(self) -> bool:
        return self.e1_pass and self.e2_pass and self.e3_pass

    @property
    def internal_error(self) -> bool:
        # (E1) and (E2) force (E3); seeing otherwise means a bug upstream.
        return self.e1_pass and self.e2_pass and not self.e3_pass

    def summary(self) -> dict:
        return {
            "k": self.k,
            "e2": "exact-zero" if self.e2_exact_zero else f"residual({self.e2_residual:.3e})",
            "e2_pass": self.e2_pass,
            "e3_rank": self.e3_rank,
            "e1": (f"pass-probabilistic({self.e1_samples})" if self.e1_pass else "fail"),
            "e1_witness": None if self.e1_witness is None else [
                [str(x) for x in self.e1_witness[0]], [str(x) for x in self.e1_witness[1]]
            ],
            "h0K": self.h0K,
            "is_instanton": self.is_instanton,
        }


@dataclass
class InstantonSample:
    A: ATensor
    certificate: MonadCertificate
    provenance: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.A.k


def _field_for(A: ATensor, tol: Optional[float]) -> Field:
    if A.exact:
        return Field("rational")
    return COMPLEX if tol is None else Field("complex", tol=tol)


def e1_witness_at(A: ATensor, f, tol: Optional[float] = None):
    """A nonzero b with epsilon(A, f (x) b) = 0, or None when F(f) has full rank."""
    fld = _field_for(A, tol)
    F = A.monad_matrix(f)
    if rank(F, fld) == A.k:
        return None
    ker = kernel_basis(np.asarray(F).T, fld)
    return ker[0]


def certify(A: ATensor, e1_samples: int = 200, seed: int = 0, extra_f=(),
            tol: Optional[float] = None) -> MonadCertificate:
    """Check (E1), (E2), (E3) for A.

    (E2) is gamma(A) = 0 (exact on rational input, relative to |A|^2 in
    float).  (E3) is rank beta = 2k+2.  (E1) is checked on ``e1_samples``
    random rational f (plus any ``extra_f`` and the coordinate points
    e_i, e_i + e_j): F(f) must keep full rank k,
    and a rank drop yields a witness (f, b) with epsilon(A, f (x) b) = 0.
    """
    if e1_samples < 1:
        raise ValueError("e1_samples must be >= 1")
    k = A.k
    fld = _field_for(A, tol)
    g = gamma(A)
    if A.exact:
        e2_zero = all(x == 0 for x in g)
        e2_res = 0.0 if e2_zero else float(max(abs(Fraction(x)) for x in g))
        e2_pass = e2_zero
    else:
        e2_zero = False
        scale = max(float(np.linalg.norm(A.a)) ** 2, 1e-300)
        e2_res = float(np.linalg.norm(g)) if g.size else 0.0
        e2_pass = e2_res <= fld.tol * scale
    e3 = rank(beta_matrix(A), fld)
    h0K = A.n - rank(A.flat(), fld)
    rng = np.random.default_rng(seed)
    witness = None
    probes = [np.asarray(f) for f in extra_f] + list(COORDINATE_PROBES)
    probes += [rng.integers(-50, 51, 4) for _ in range(e1_samples)]
    for f in probes:
        if not np.any(f != 0):
            continue
        f = to_fraction_array(f) if A.exact and np.asarray(f).dtype != complex else np.asarray(f)
        if not A.exact:
            f = to_complex_array(f)
        b = e1_witness_at(A, f, tol)
        if b is not None:
            witness = (f, b)
            break
    return MonadCertificate(
        k=k,
        e2_exact_zero=e2_zero,
        e2_residual=e2_res,
        e2_pass=e2_pass,
        e3_rank=e3,
        e1_pass=witness is None,
        e1_samples=len(probes),
        e1_witness=witness,
        h0K=h0K,
    )


# ------------------------------------------------------------- generators

def _banded_P(k: int) -> np.ndarray:
    """Coefficients of P(x): x_1 on the diagonal, x_2 on the superdiagonal."""
    a = np.zeros((4, k, 2 * k + 2), dtype=int)
    for j in range(k):
        a[0, j, j] = 1
        a[1, j, j + 1] = 1
    return a


def _q_indices(k: int) -> list[int]:
    n = 2 * k + 2
    return [(i * k + j) * n + l for i in range(4) for j in range(k) for l in range(k + 1, n)]


@lru_cache(maxsize=None)
def slice_solution_basis(k: int) -> tuple:
    """Exact basis of the Q-coefficients making F = [P | Q] a complex.

    F J F^T = P Q^T - Q P^T, so gamma vanishes iff the polarisation of the
    fixed P-part against the Q-part vanishes: a linear system in Q.
    """
    AP = ATensor.from_array(_banded_P(k), exact=True)
    idx = _q_indices(k)
    if k == 1:
        basis = []
        for t in range(len(idx)):
            v = np.empty(len(idx), dtype=object)
            v[:] = Fraction(0)
            v[t] = Fraction(1)
            basis.append(v)
        return tuple(basis)
    D = dgamma(AP)[:, idx]
    return tuple(kernel_basis(D))


def slice_tensor(k: int, q) -> ATensor:
    a = to_fraction_array(_banded_P(k)).reshape(-1).copy()
    a[_q_indices(k)] = q
    return ATensor(a.reshape(4, k, 2 * k + 2))


def slice_degenerate(k: int, C) -> ATensor:
    """[P | P C] with C a constant symmetric (k+1) x (k+1) matrix."""
    C = to_fraction_array(C)
    P = to_fraction_array(_banded_P(k))
    a = P.copy()
    for i in range(4):
        a[i, :, k + 1:] = P[i, :, : k + 1] @ C
    return ATensor(a)


def generate_slice(k: int, seed: int, max_draws: int = SLICE_DRAWS, e1_samples: int = 200,
                   coeff_size: int = 3) -> InstantonSample:
    if not 1 <= k <= 5:
        raise ValueError("generate_slice needs 1 <= k <= 5")
    rng = np.random.default_rng(seed)
    basis = slice_solution_basis(k)
    for draw in range(max_draws):
        c = rng.integers(-coeff_size, coeff_size + 1, len(basis))
        q = np.empty(len(_q_indices(k)), dtype=object)
        q[:] = Fraction(0)
        for ci, v in zip(c, basis):
            if ci:
                q = q + int(ci) * v
        A = slice_tensor(k, q)
        cert = certify(A, e1_samples=e1_samples, seed=seed * 1000 + draw)
        if cert.internal_error:
            raise AssertionError(f"E1 and E2 hold but E3 rank is {cert.e3_rank}")
        if cert.is_instanton:
            return InstantonSample(A, cert, {"kind": "slice-solve", "seed": seed, "draw": draw})
        log.debug("slice draw %d rejected: %s", draw, cert.summary())
    raise NotFound(f"no certified slice draw for k={k}, seed={seed} after {max_draws} draws")


def newton_refine(A: ATensor, max_iter: int = 50, target: float = 1e-12):
    """Gauss-Newton on gamma(A) = 0 with minimum-norm steps.

    Returns (A, iterations, relative residual |gamma(A)| / |A|^2).
    """
    A = A.to_complex()
    it = 0
    rel = 0.0
    for it in range(max_iter + 1):
        r = gamma(A)
        rel = float(np.linalg.norm(r)) / max(float(np.linalg.norm(A.a)) ** 2, 1e-300) if r.size else 0.0
        if rel <= target or it == max_iter:
            break
        Jm = dgamma(A)
        step, *_ = np.linalg.lstsq(Jm, -r, rcond=None)
        A = ATensor(A.a + step.reshape(A.a.shape))
    return A, it, rel


def generate_newton(k: int, seed: int, max_iter: int = 50, start: Optional[ATensor] = None,
                    restarts: int = NEWTON_RESTARTS, perturbation: float = 0.3,
                    e1_samples: int = 200) -> InstantonSample:
    """Numeric sampler of the complex {gamma = 0} certified post hoc.

    Without ``start`` each restart perturbs a fresh slice sample by a complex
    random tensor of relative size ``perturbation`` and projects back to the
    variety; with ``start`` the given tensor is perturbed instead.
    """
    if not 1 <= k <= 5:
        raise ValueError("generate_newton needs 1 <= k <= 5")
    rng = np.random.default_rng(seed)
    last = None
    for attempt in range(restarts):
        if start is not None:
            base = start.to_complex()
            scale = perturbation if attempt else 0.0
        else:
            base = generate_slice(k, seed=int(rng.integers(2**31))).A.to_complex()
            scale = perturbation
        norm = float(np.linalg.norm(base.a))
        noise = rng.standard_normal(base.a.shape) + 1j * rng.standard_normal(base.a.shape)
        A0 = ATensor(base.a + scale * norm * noise / np.linalg.norm(noise))
        A, iters, rel = newton_refine(A0, max_iter=max_iter)
        last = rel
        if rel > 1e-10:
            continue
        cert = certify(A, e1_samples=e1_samples, seed=seed * 1000 + attempt)
        if cert.is_instanton:
            prov = {"kind": "gauss-newton", "seed": seed, "iterations": iters,
                    "residual": rel, "attempt": attempt}
            return InstantonSample(A, cert, prov)
    raise NotFound(f"Gauss-Newton failed for k={k}, seed={seed}", residual=last)


# ------------------------------------------------------------ group action

def check_symplectic(Y, k: int, tol: float = 1e-10) -> None:
    Y = np.asarray(Y)
    J = symplectic_gram(k, Y.dtype == object)
    D = Y.T @ J @ Y - J
    if Y.dtype == object:
        if np.any(D != 0):
            raise NonSymplecticError("middle factor does not preserve omega")
    elif np.abs(D).max() > tol * max(1.0, np.abs(Y).max() ** 2):
        raise NonSymplecticError("middle factor does not preserve omega")


def group_act(g, A: ATensor) -> ATensor:
    """Apply g = (P, Q, Y) in GL_4 x GL_k x Sp_{2k+2} to A."""
    P, Q, Y = g
    check_symplectic(Y, A.k)
    return act_on_A(P, Q, Y, A)


# --------------------------------------------------------- plane sections

def plane_basis(fstar, exact: bool) -> np.ndarray:
    """Basis (3 x 4, rows) of the plane {f* = 0} in C^4: echelon if exact, else orthonormal."""
    fstar = np.asarray(fstar)
    if exact:
        basis = kernel_basis(to_fraction_array(fstar).reshape(1, 4))
        return np.stack(basis)
    # Orthonormal in float: echelon normalisation divides by tiny pivots.
    return scipy.linalg.null_space(to_complex_array(fstar).reshape(1, 4)).T


def restriction_matrix(A: ATensor, basis) -> np.ndarray:
    """3k x (2k+2) matrix with rows (m, j): sum_i a[i, j, l] u_m[i]."""
    return np.concatenate([A.monad_matrix(u) for u in basis], axis=0)


def h0_plane(A: ATensor, fstar, basis=None, tol: Optional[float] = None) -> int:
    """h^0 of the restriction to the plane {f* = 0}: dim ker of the restriction matrix."""
    fstar = np.asarray(fstar)
    if not np.any(fstar != 0):
        raise ValueError("fstar must be nonzero")
    exact = A.exact and fstar.dtype != complex and not np.issubdtype(fstar.dtype, np.floating)
    Ause = A if exact else A.to_complex()
    if basis is None:
        basis = plane_basis(fstar, exact)
    M = restriction_matrix(Ause, basis)
    fld = Field("rational") if exact else (COMPLEX if tol is None else Field("complex", tol=tol))
    return A.n - rank(M, fld)
