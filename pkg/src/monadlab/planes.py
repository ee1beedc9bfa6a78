"""Unstable planes: the locus W(E) seen through rank-one elements of Im beta."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.linalg

from .linalg import COMPLEX, Field, kernel_basis, pencil_roots, rank, to_complex_array, to_fraction_array
from .monads import h0_plane
from .tensors import ATensor, beta_matrix

PROBE_THRESHOLD = 0.8
MIN_PROBE_TRIALS = 20


class UnderdeterminedFit(ValueError):
    pass


@dataclass
class PlanePoint:
    fstar: np.ndarray
    bstar: Optional[np.ndarray]
    h0: int

    def __post_init__(self):
        if self.h0 < 1:
            raise ValueError("a plane point needs h0 >= 1")
        if self.bstar is None:
            raise ValueError("a plane point carries its b* direction")

    def to_dict(self) -> dict:
        return {"fstar": _export(self.fstar), "bstar": _export(self.bstar), "h0": self.h0}


@dataclass
class DimensionProbe:
    trials: int
    hits: int
    verdict: str
    hit_points: list = field(default_factory=list)

    def summary(self) -> dict:
        return {"trials": self.trials, "hits": self.hits, "verdict": self.verdict,
                "points": len(self.hit_points)}


def _export(v):
    v = np.asarray(v)
    if v.dtype == object:
        return [str(x) for x in v]
    v = to_complex_array(v)
    return [[float(z.real), float(z.imag)] for z in v]


def probe_verdict(trials: int, hits: int) -> str:
    if trials >= MIN_PROBE_TRIALS and hits >= math.ceil(PROBE_THRESHOLD * trials):
        return "dim>=2"
    return "dim<=1-likely"


def _is_exact_vector(v) -> bool:
    v = np.asarray(v)
    return v.dtype == object or np.issubdtype(v.dtype, np.integer)


def _incidence_matrix(B: np.ndarray, fstar: np.ndarray, k: int) -> np.ndarray:
    """[Im beta | f* (x) I_k] as a 4k x (2k+2+k) matrix."""
    Fk = np.kron(fstar.reshape(4, 1), np.eye(k, dtype=int))
    if B.dtype == object:
        Fk = to_fraction_array(Fk) if fstar.dtype != object else np.kron(
            fstar.reshape(4, 1), to_fraction_array(np.eye(k, dtype=int)))
    return np.concatenate([B, Fk], axis=1)


def unstable_plane_test(A: ATensor, fstar, tol: Optional[float] = None):
    """Does f* (x) b* lie in Im beta for some b* != 0?  Returns (bool, b* or None).

    One rank computation on the assembled columns of beta and f* (x) C^k.
    """
    fstar = np.asarray(fstar)
    if not np.any(fstar != 0):
        raise ValueError("fstar must be nonzero")
    exact = A.exact and _is_exact_vector(fstar)
    if exact:
        fstar = to_fraction_array(fstar)
        B = beta_matrix(A)
        fld = Field("rational")
    else:
        fstar = to_complex_array(fstar)
        B = beta_matrix(A.to_complex())
        fld = COMPLEX if tol is None else Field("complex", tol=tol)
    M = _incidence_matrix(B, fstar, A.k)
    ker = kernel_basis(M, fld)
    if not ker:
        return False, None
    n = A.n
    # beta x + f* (x) y = 0 means f* (x) (-y) is in Im beta.
    for v in ker:
        y = -v[n:]
        if np.any(y != 0) if exact else np.abs(y).max() > 1e-9:
            return True, y
    return False, None


def plane_intersection_dim(A: ATensor, fstar, tol: Optional[float] = None) -> int:
    """dim {b* : f* (x) b* in Im beta}; beta and f* (x) . are injective for instantons."""
    fstar = np.asarray(fstar)
    exact = A.exact and _is_exact_vector(fstar)
    if exact:
        M = _incidence_matrix(beta_matrix(A), to_fraction_array(fstar), A.k)
        fld = Field("rational")
    else:
        M = _incidence_matrix(beta_matrix(A.to_complex()), to_complex_array(fstar), A.k)
        fld = COMPLEX if tol is None else Field("complex", tol=tol)
    return M.shape[1] - rank(M, fld)


def _verify_point(A: ATensor, fstar, tol: Optional[float]) -> Optional[PlanePoint]:
    h0 = h0_plane(A, fstar, tol=tol)
    if h0 < 1:
        return None
    ok, bstar = unstable_plane_test(A, fstar, tol=tol)
    if not ok:
        return None
    return PlanePoint(np.asarray(fstar), bstar, h0)


def _rational_candidate(t: complex, max_den: int = 1000) -> Optional[Fraction]:
    if abs(t.imag) > 1e-9 * max(1.0, abs(t)):
        return None
    q = Fraction(t.real).limit_denominator(max_den)
    return q if abs(float(q) - t.real) <= 1e-9 * max(1.0, abs(t.real)) else None


def line_parameters(A: ATensor, f0, f1, seed: int = 0, tol: float = 1e-8) -> list:
    """Parameters t where f0 + t f1 is an unstable plane (finite part of the pencil)."""
    k, n = A.k, A.n
    B = to_complex_array(beta_matrix(A))
    N0 = _incidence_matrix(B, to_complex_array(f0), k)
    N1 = np.concatenate([np.zeros_like(B), np.kron(to_complex_array(f1).reshape(4, 1), np.eye(k))], axis=1)
    rng = np.random.default_rng(seed)
    cols = n + k
    # det(L N(t)) is a combination of the maximal minors of N(t), so the
    # common zeros of the minors are among its roots.
    L = (rng.standard_normal((cols, 4 * k)) + 1j * rng.standard_normal((cols, 4 * k))) / np.sqrt(8 * k)
    R1, R2 = -(L @ N1), L @ N0
    roots = pencil_roots(R1, R2)
    if roots is None:
        # Every point of the line is a hit: report nothing finite, the caller decides.
        return None
    # Refine against the generalized eigenvalues of the linear pencil.
    evs = scipy.linalg.eigvals(R2, R1)
    evs = evs[np.isfinite(evs)]
    out = []
    for t in roots:
        if evs.size:
            t = complex(evs[np.argmin(np.abs(evs - t))])
        Nt = N0 + t * N1
        s = np.linalg.svd(Nt, compute_uv=False)
        if s[-1] <= tol * max(s[0], 1.0):
            if not any(abs(t - u) <= 1e-7 * max(1.0, abs(t)) for u in out):
                out.append(t)
    return out


def w_line_probe(A: ATensor, f0star, f1star, seed: int = 0, tol: Optional[float] = None) -> list:
    """Unstable planes on the pencil f0* + t f1*, each re-verified by h0_plane."""
    f0 = np.asarray(f0star)
    f1 = np.asarray(f1star)
    pair = np.stack([to_complex_array(f0), to_complex_array(f1)])
    if np.linalg.matrix_rank(pair, tol=1e-12 * max(np.abs(pair).max(), 1.0)) < 2:
        raise ValueError("pencil endpoints must be independent")
    ts = line_parameters(A, f0, f1, seed=seed)
    if ts is None:
        return []
    exact_line = A.exact and _is_exact_vector(f0) and _is_exact_vector(f1)
    hits = []
    for t in ts:
        q = _rational_candidate(t) if exact_line else None
        if q is not None:
            fstar = to_fraction_array(f0) + q * to_fraction_array(f1)
            point = _verify_point(A, fstar, None)
            if point is not None:
                hits.append(point)
                continue
        fstar = to_complex_array(f0) + t * to_complex_array(f1)
        fstar = fstar / np.linalg.norm(fstar)
        point = _verify_point(A, fstar, tol if tol is not None else 1e-7)
        if point is not None:
            hits.append(point)
    return hits


def w_dimension_probe(A: ATensor, trials: int = MIN_PROBE_TRIALS, seed: int = 0) -> DimensionProbe:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    hits = 0
    points = []
    for trial in range(trials):
        while True:
            f0 = rng.integers(-9, 10, 4)
            f1 = rng.integers(-9, 10, 4)
            if np.linalg.matrix_rank(np.stack([f0, f1]).astype(float)) == 2:
                break
        found = w_line_probe(A, f0, f1, seed=seed * 7919 + trial)
        if found:
            hits += 1
            points.extend(found)
    return DimensionProbe(trials, hits, probe_verdict(trials, hits), points)


QUADRIC_MONOMIALS = tuple((i, j) for i in range(4) for j in range(i, 4))


def quadric_row(p) -> np.ndarray:
    p = to_complex_array(p)
    p = p / np.linalg.norm(p)
    return np.array([p[i] * p[j] for i, j in QUADRIC_MONOMIALS])


def quadric_fit(points, holdout: Optional[int] = None):
    """Fit a quadric through points of P^3*.  Returns (10 coefficients, residual).

    Coefficients follow QUADRIC_MONOMIALS and have unit norm.  The fit uses
    the least singular vector of the evaluation matrix on the fitting points;
    the residual is the largest |q(p)| over held-out points (unit-normalised),
    or over all points when nothing is held out.
    """
    pts = [pp.fstar if isinstance(pp, PlanePoint) else pp for pp in points]
    if len(pts) < 9:
        raise UnderdeterminedFit(f"need at least 9 points, got {len(pts)}")
    if holdout is None:
        holdout = max(0, min(len(pts) - 9, len(pts) // 4))
    fit_pts = pts[: len(pts) - holdout]
    test_pts = pts[len(pts) - holdout:] or pts
    E = np.stack([quadric_row(p) for p in fit_pts])
    _, s, vh = np.linalg.svd(E)
    if len(s) < 9 or s[8] <= 1e-10 * s[0]:
        raise UnderdeterminedFit("points are not in general position for a quadric fit")
    q = vh[-1].conj()
    residual = max(abs(quadric_row(p) @ q) for p in test_pts)
    return q, float(residual)
