"""Dense linear algebra over three scalar fields.

Matrices are plain numpy arrays.  Exact rational matrices use ``dtype=object``
with :class:`fractions.Fraction` (or ``int``) entries; float matrices use a
complex or real numeric dtype.  The prime field is selected explicitly through
a :class:`Field` and accepts integer or rational input, which is reduced mod p.

Exact rank is fraction-free (Bareiss) elimination on integer-scaled rows.  A
rank computed modulo a prime never exceeds the rational rank, so a full rank
modulo p is already an exact certificate and lets the rational path skip the
big-integer elimination in the common full-rank case.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

DEFAULT_PRIME = 2**61 - 1
DEFAULT_TOL = 1e-8


class LinalgError(ValueError):
    pass


class NonCommutingError(LinalgError):
    def __init__(self, commutator_norm: float, bound: float):
        super().__init__(
            f"matrices do not commute: |[U,V]| = {commutator_norm:.3e} > {bound:.3e}"
        )
        self.commutator_norm = commutator_norm


@dataclass(frozen=True)
class Field:
    """Scalar backend tag.  ``tol`` is only consulted by the complex backend."""

    kind: str
    p: Optional[int] = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.kind not in ("rational", "prime", "complex"):
            raise ValueError(f"unknown field kind {self.kind!r}")
        if self.kind == "prime" and (self.p is None or self.p < 2**31):
            raise ValueError("prime field needs p >= 2**31")
        if self.kind == "complex" and not self.tol > 0:
            raise ValueError("complex backend needs a positive tolerance")

    @property
    def exact(self) -> bool:
        return self.kind != "complex"

    def __str__(self):
        if self.kind == "prime":
            return f"prime({self.p})"
        return self.kind


def _env_tol() -> float:
    return float(os.environ.get("MONADLAB_TOL", DEFAULT_TOL))


def _env_prime() -> int:
    return int(os.environ.get("MONADLAB_PRIME", DEFAULT_PRIME))


RATIONAL = Field("rational")
PRIME = Field("prime", p=_env_prime())
COMPLEX = Field("complex", tol=_env_tol())


# ---------------------------------------------------------------- conversions

def is_exact_array(M) -> bool:
    return np.asarray(M).dtype == object


def field_of(M) -> Field:
    return RATIONAL if is_exact_array(M) else COMPLEX


def to_fraction_array(M) -> np.ndarray:
    M = np.asarray(M)
    out = np.empty(M.shape, dtype=object)
    for idx, x in np.ndenumerate(M):
        if isinstance(x, complex | np.complexfloating):
            if x.imag != 0:
                raise LinalgError("complex entry cannot be made rational")
            x = x.real
        if isinstance(x, np.integer):
            x = int(x)
        elif isinstance(x, np.floating):
            x = float(x)
        out[idx] = x if isinstance(x, Fraction) else Fraction(x)
    return out


def to_complex_array(M) -> np.ndarray:
    M = np.asarray(M)
    if M.dtype == object:
        return np.vectorize(complex, otypes=[complex])(M) if M.size else M.astype(complex)
    return M.astype(complex)


def _integer_rows(M: np.ndarray) -> np.ndarray:
    """Scale each row of a rational matrix by its denominator lcm."""
    M = np.asarray(M, dtype=object)
    out = np.empty(M.shape, dtype=object)
    for i in range(M.shape[0]):
        row = [Fraction(x) for x in M[i]]
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out[i] = [int(x * den) for x in row]
    return out


def _mod_p(M: np.ndarray, p: int) -> np.ndarray:
    M = np.asarray(M, dtype=object)
    out = np.empty(M.shape, dtype=object)
    for idx, x in np.ndenumerate(M):
        x = Fraction(int(x)) if isinstance(x, np.integer) else Fraction(x)
        if x.denominator % p == 0:
            raise LinalgError("denominator divisible by the field prime")
        out[idx] = x.numerator % p * pow(x.denominator, -1, p) % p
    return out


# ---------------------------------------------------------------- predicates

def is_symmetric(M, tol: float = 0.0) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if M.dtype == object:
        return bool(np.all(M == M.T))
    return bool(np.max(np.abs(M - M.T), initial=0.0) <= tol * max(1.0, np.abs(M).max(initial=0)))


def is_skew(M, tol: float = 0.0) -> bool:
    """Skew means M^T = -M with an exactly zero diagonal on every backend."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    if np.any(np.diagonal(M) != 0):
        return False
    if M.dtype == object:
        return bool(np.all(M == -M.T))
    return bool(np.max(np.abs(M + M.T), initial=0.0) <= tol * max(1.0, np.abs(M).max(initial=0)))


# ------------------------------------------------------- exact elimination

def _ff_gauss_jordan(M: np.ndarray, modulus: Optional[int] = None):
    """Fraction-free Gauss-Jordan on an integer object matrix.

    Returns (reduced matrix, pivot columns).  Over Z every entry stays an
    integer (Bareiss division by the previous pivot); modulo a prime the
    pivot row is normalised to 1 instead.  Pivot choice is the first nonzero
    entry in the column, so the result is deterministic.
    """
    A = np.array(M, dtype=object, copy=True)
    m, n = A.shape
    pivots: list[int] = []
    prev = 1
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(A[row:, col] != 0)[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            A[[row, piv]] = A[[piv, row]]
        if modulus is None:
            d = A[row, col]
            others = np.arange(m) != row
            colv = A[others, col].copy()
            A[others] = (d * A[others] - np.outer(colv, A[row])) // prev
            prev = d
        else:
            inv = pow(int(A[row, col]), -1, modulus)
            A[row] = (A[row] * inv) % modulus
            others = np.nonzero((np.arange(m) != row) & (A[:, col] != 0))[0]
            if others.size:
                colv = A[others, col].copy()
                A[others] = (A[others] - np.outer(colv, A[row])) % modulus
        pivots.append(col)
        row += 1
    return A, pivots


def _ff_rank(M: np.ndarray, modulus: Optional[int] = None) -> int:
    """Forward-only elimination; cheaper than full Gauss-Jordan."""
    A = np.array(M, dtype=object, copy=True)
    m, n = A.shape
    prev = 1
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.nonzero(A[row:, col] != 0)[0]
        if nz.size == 0:
            continue
        piv = row + int(nz[0])
        if piv != row:
            A[[row, piv]] = A[[piv, row]]
        if row + 1 < m:
            below = A[row + 1:, col].copy()
            if modulus is None:
                d = A[row, col]
                A[row + 1:, col:] = (d * A[row + 1:, col:] - np.outer(below, A[row, col:])) // prev
                prev = d
            else:
                inv = pow(int(A[row, col]), -1, modulus)
                factor = (below * inv) % modulus
                A[row + 1:, col:] = (A[row + 1:, col:] - np.outer(factor, A[row, col:])) % modulus
        row += 1
    return row


def _rref_rational(M: np.ndarray):
    A = _integer_rows(M)
    R, pivots = _ff_gauss_jordan(A)
    out = np.zeros(A.shape, dtype=object)
    out[:] = Fraction(0)
    for i, c in enumerate(pivots):
        d = R[i, c]
        out[i] = [Fraction(int(x), int(d)) for x in R[i]]
    return out, pivots


def _rref_prime(M: np.ndarray, p: int):
    R, pivots = _ff_gauss_jordan(_mod_p(M, p), modulus=p)
    return R, pivots


def _rref_float(M: np.ndarray, tol: float):
    """Gauss-Jordan with partial pivoting (largest magnitude)."""
    A = np.array(M, dtype=complex, copy=True)
    m, n = A.shape
    scale = np.abs(A).max(initial=0.0)
    thresh = tol * max(scale, 1e-300)
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        piv = row + int(np.argmax(np.abs(A[row:, col])))
        if abs(A[piv, col]) <= thresh:
            A[row:, col] = 0
            continue
        if piv != row:
            A[[row, piv]] = A[[piv, row]]
        A[row] /= A[row, col]
        others = np.arange(m) != row
        A[others] -= np.outer(A[others, col], A[row])
        pivots.append(col)
        row += 1
    A[row:] = 0
    return A, pivots


# ------------------------------------------------------------------ public

def rank(M, field: Optional[Field] = None) -> int:
    """Row rank.  Float rank counts singular values above tol * largest."""
    M = np.asarray(M)
    field = field or field_of(M)
    if M.size == 0:
        return 0
    if field.kind == "complex":
        s = np.linalg.svd(to_complex_array(M), compute_uv=False)
        if s[0] == 0:
            return 0
        return int(np.sum(s > field.tol * s[0]))
    if field.kind == "prime":
        return _ff_rank(_mod_p(M, field.p), modulus=field.p)
    full = min(M.shape)
    try:
        if _ff_rank(_mod_p(M, PRIME.p), modulus=PRIME.p) == full:
            return full
    except LinalgError:
        pass
    return _ff_rank(_integer_rows(M))


def _normalise_leading(v: np.ndarray) -> np.ndarray:
    nz = np.nonzero(v != 0)[0]
    if nz.size == 0:
        return v
    return v / v[nz[0]]


def kernel_basis(M, field: Optional[Field] = None) -> list[np.ndarray]:
    """Right-kernel basis read off the reduced echelon form.

    Each returned vector has leading (first nonzero) entry equal to 1.
    """
    M = np.asarray(M)
    field = field or field_of(M)
    m, n = M.shape
    if m == 0:
        return [_unit(n, j, field) for j in range(n)]
    if field.kind == "rational":
        R, pivots = _rref_rational(M)
        zero, one = Fraction(0), Fraction(1)
    elif field.kind == "prime":
        R, pivots = _rref_prime(M, field.p)
        zero, one = 0, 1
    else:
        Mc = to_complex_array(M)
        # RREF of the SVD null space keeps float kernels reproducible.
        r = rank(Mc, field)
        if r == n:
            return []
        _, _, vh = np.linalg.svd(Mc)
        N = vh[r:].conj()
        Rn, piv = _rref_float(N, 1e-12)
        return [_normalise_leading(Rn[i]) for i in range(len(piv))]
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.empty(n, dtype=object)
        v[:] = zero
        v[f] = one
        for i, c in enumerate(pivots):
            if field.kind == "prime":
                v[c] = (-R[i, f]) % field.p
            else:
                v[c] = -R[i, f]
        if field.kind == "prime":
            nz = np.nonzero(v != 0)[0]
            inv = pow(int(v[nz[0]]), -1, field.p)
            v = (v * inv) % field.p
        else:
            v = _normalise_leading(v)
        basis.append(v)
    return basis


def _unit(n, j, field):
    if field.kind == "complex":
        v = np.zeros(n, dtype=complex)
        v[j] = 1
        return v
    v = np.empty(n, dtype=object)
    v[:] = Fraction(0) if field.kind == "rational" else 0
    v[j] = Fraction(1) if field.kind == "rational" else 1
    return v


def solve_affine(M, b, field: Optional[Field] = None) -> Optional[np.ndarray]:
    """Some x with Mx = b, or None when the system is inconsistent."""
    M = np.asarray(M)
    b = np.asarray(b).reshape(-1)
    if M.shape[0] != b.shape[0]:
        raise LinalgError(f"height mismatch: {M.shape[0]} vs {b.shape[0]}")
    field = field or field_of(M)
    n = M.shape[1]
    if field.kind == "complex":
        Mc, bc = to_complex_array(M), to_complex_array(b)
        x, *_ = np.linalg.lstsq(Mc, bc, rcond=None)
        scale = np.linalg.norm(Mc, 2) * np.linalg.norm(x) + np.linalg.norm(bc)
        if np.linalg.norm(Mc @ x - bc) > field.tol * max(scale, 1e-300):
            return None
        return x
    aug = np.concatenate([np.asarray(M, dtype=object), b.reshape(-1, 1).astype(object)], axis=1)
    if field.kind == "rational":
        R, pivots = _rref_rational(aug)
        x = np.empty(n, dtype=object)
        x[:] = Fraction(0)
    else:
        R, pivots = _rref_prime(aug, field.p)
        x = np.zeros(n, dtype=object)
    if pivots and pivots[-1] == n:
        return None
    for i, c in enumerate(pivots):
        x[c] = R[i, n]
    return x


# ------------------------------------------------------- float-only tools

def pencil_roots(R1, R2, tol: float = DEFAULT_TOL) -> Optional[list[complex]]:
    """Roots of det(R2 - mu R1), or None if that determinant vanishes identically.

    The determinant is sampled on n+1 points of a circle and interpolated
    (a DFT, since the nodes are roots of unity); roots come from the
    companion matrix of the interpolated polynomial.  Roots at infinity
    (degree drop) are not reported.
    """
    R1 = to_complex_array(R1)
    R2 = to_complex_array(R2)
    if R1.shape != R2.shape or R1.ndim != 2 or R1.shape[0] != R1.shape[1]:
        raise LinalgError("pencil needs two square matrices of equal size")
    n = R1.shape[0]
    norm = max(np.linalg.norm(R1), np.linalg.norm(R2))
    if norm == 0:
        return None
    # A pencil is singular iff it is singular at a generic point.
    probe = 0.6180339887 + 0.3183098862j
    if rank(R2 - probe * R1, Field("complex", tol=tol)) < n:
        return None
    radius = max(1.0, np.linalg.norm(R2) / max(np.linalg.norm(R1), 1e-300))
    radius = min(radius, 1e6)
    nodes = radius * np.exp(2j * np.pi * np.arange(n + 1) / (n + 1))
    vals = np.array([np.linalg.det(R2 - mu * R1) for mu in nodes])
    # vals[m] = sum_d c_d radius^d w^{dm}; invert the DFT.
    coeffs = np.fft.fft(vals) / (n + 1) / radius ** np.arange(n + 1)
    # coeffs[d] multiplies mu^d; drop vanishing leading terms.
    scale = np.abs(coeffs).max()
    deg = n
    while deg > 0 and abs(coeffs[deg]) <= 1e-12 * scale:
        deg -= 1
    if deg == 0:
        return []
    return list(np.roots(coeffs[deg::-1]))


def common_eigenvector(U, V, tol: float = DEFAULT_TOL):
    """Unit f with U f = a f and V f = b f for commuting U, V.

    Takes an eigenspace of U (which V preserves when they commute) and an
    eigenvector of V restricted to it.  Returns (f, a, b).
    """
    U = to_complex_array(U)
    V = to_complex_array(V)
    if U.shape != V.shape or U.shape[0] != U.shape[1]:
        raise LinalgError("need square matrices of equal size")
    n = U.shape[0]
    nu, nv = np.linalg.norm(U), np.linalg.norm(V)
    comm = np.linalg.norm(U @ V - V @ U)
    bound = tol * max(nu * nv, 1e-300)
    if comm > bound:
        raise NonCommutingError(float(comm), float(bound))
    evals = np.linalg.eigvals(U)
    order = sorted(range(n), key=lambda i: (round(evals[i].real, 9), round(evals[i].imag, 9)))
    scale = max(nu, 1.0)
    best = None
    for i in order:
        lam = evals[i]
        _, s, vh = np.linalg.svd(U - lam * np.eye(n))
        # Loose threshold gathers numerically clustered eigenvalues.
        d = max(1, int(np.sum(s <= 1e-6 * scale)))
        E = vh[n - d:].conj().T
        VE = E.conj().T @ V @ E
        w_vals, w_vecs = np.linalg.eig(VE)
        for j in range(d):
            f = E @ w_vecs[:, j]
            f = f / np.linalg.norm(f)
            a = np.vdot(f, U @ f)
            b = np.vdot(f, V @ f)
            res = max(np.linalg.norm(U @ f - a * f), np.linalg.norm(V @ f - b * f))
            if best is None or res < best[0]:
                best = (res, f, a, b)
        if best[0] <= tol * max(scale, nv, 1.0):
            break
    _, f, a, b = best
    return f, complex(a), complex(b)


def symmetric_congruence_normalize(M, tol: float = DEFAULT_TOL):
    """Invertible T with T^T M T = diag(1,...,1,0,...,0) for complex symmetric M.

    Symmetric (not Hermitian) elimination: pick a vector v with v^T M v != 0,
    scale it to v^T M v = 1, and project the remaining basis onto its
    M-orthogonal complement.  Diagonal pivots are taken first-come once they
    reach a tenth of the largest diagonal magnitude.  Returns (T, r).
    """
    M = to_complex_array(M)
    n = M.shape[0]
    if M.shape != (n, n) or not is_symmetric(M, tol):
        raise LinalgError("symmetric_congruence_normalize needs a symmetric matrix")
    scale = np.abs(M).max(initial=0.0)
    basis = [np.eye(n, dtype=complex)[:, j] for j in range(n)]
    cols = []
    while basis:
        B = np.stack(basis, axis=1)
        G = B.T @ M @ B
        gmax = np.abs(G).max(initial=0.0)
        if gmax <= tol * max(scale, 1e-300) or scale == 0:
            break
        diag = np.abs(np.diagonal(G))
        if diag.max() >= 0.1 * gmax:
            a = int(np.nonzero(diag >= 0.1 * diag.max())[0][0])
            v = basis[a]
            drop = a
        else:
            a, b = np.unravel_index(int(np.argmax(np.abs(G - np.diag(np.diagonal(G))))), G.shape)
            v = basis[a] + basis[b]
            drop = a
        d = v @ M @ v
        t = v / np.sqrt(d)
        cols.append(t)
        rest = [basis[j] for j in range(len(basis)) if j != drop]
        basis = [w - (t @ M @ w) * t for w in rest]
    r = len(cols)
    T = np.stack(cols + basis, axis=1) if (cols or basis) else np.zeros((0, 0), complex)
    return T, r


def rational_congruence_diagonalize(M):
    """Exact T with T^T M T = diag(d_1, ..., d_r, 0, ..., 0), all d_i != 0.

    Symmetric elimination over Q without square roots; the pivot rule mirrors
    symmetric_congruence_normalize (diagonal pivot first, else e_a + e_b).
    Returns (T, d) with d the list of nonzero diagonal entries.
    """
    M = to_fraction_array(M)
    n = M.shape[0]
    if M.shape != (n, n) or not is_symmetric(M):
        raise LinalgError("rational_congruence_diagonalize needs a symmetric matrix")
    basis = [to_fraction_array(np.eye(n, dtype=int)[:, j]) for j in range(n)]
    cols, diag = [], []
    while basis:
        G = [[basis[a] @ M @ basis[b] for b in range(len(basis))] for a in range(len(basis))]
        piv = next((a for a in range(len(basis)) if G[a][a] != 0), None)
        if piv is not None:
            v, drop = basis[piv], piv
        else:
            pair = next(((a, b) for a in range(len(basis)) for b in range(a + 1, len(basis)) if G[a][b] != 0), None)
            if pair is None:
                break
            v, drop = basis[pair[0]] + basis[pair[1]], pair[0]
        d = v @ M @ v
        cols.append(v)
        diag.append(d)
        rest = [basis[j] for j in range(len(basis)) if j != drop]
        basis = [w - ((v @ M @ w) / d) * v for w in rest]
    T = np.stack(cols + basis, axis=1)
    return T, diag
