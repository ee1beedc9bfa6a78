"""The three tensor spaces of the monad picture and the equivariant maps between them.

Fixed bases throughout: f_1..f_4 of C^4, b_1..b_k of C^k, h_1..h_{2k+2} of
C^{2k+2}, with the symplectic Gram matrix J = [[0, I], [-I, 0]].  Indices are
0-based in code.

* ``ATensor``  a[i, j, l]: coefficient of f_i^* (x) b_j^* (x) h_l.
* ``STensor``  sigma^{ij}_{lp}: S = sum over all i, j, l, p of
  sigma^{ij}_{lp} f_l f_p (x) b_i ^ b_j, stored as the blocks i < j.
* ``CTensor``  c[i, j, l]: coefficient of f_i (x) b_j (x) h_l.

Quadratic values in S^2 C^4* (x) Lambda^2 C^k* are vectors of monomial
coefficients ordered by (j < j', i <= i').
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Optional

import numpy as np

from .linalg import rank, to_complex_array, to_fraction_array, is_exact_array


@lru_cache(maxsize=None)
def b_pairs(k: int) -> tuple[tuple[int, int], ...]:
    return tuple(combinations(range(k), 2))


@lru_cache(maxsize=None)
def f_monomials() -> tuple[tuple[int, int], ...]:
    return tuple(combinations_with_replacement(range(4), 2))


def s_dim(k: int) -> int:
    return 10 * k * (k - 1) // 2


def a_dim(k: int) -> int:
    return 4 * k * (2 * k + 2)


def symplectic_gram(k: int, exact: bool = True) -> np.ndarray:
    n = k + 1
    J = np.zeros((2 * n, 2 * n), dtype=int)
    J[:n, n:] = np.eye(n, dtype=int)
    J[n:, :n] = -np.eye(n, dtype=int)
    if exact:
        return J.astype(object)
    return J.astype(complex)


def _zeros(shape, exact: bool) -> np.ndarray:
    if exact:
        out = np.empty(shape, dtype=object)
        out[...] = Fraction(0)
        return out
    return np.zeros(shape, dtype=complex)


def _coerce(arr, exact: Optional[bool]) -> np.ndarray:
    arr = np.asarray(arr)
    if exact is None:
        exact = arr.dtype == object or np.issubdtype(arr.dtype, np.integer)
    return to_fraction_array(arr) if exact else to_complex_array(arr)


# --------------------------------------------------------------- ATensor

@dataclass(frozen=True, eq=False)
class ATensor:
    a: np.ndarray

    def __post_init__(self):
        if self.a.ndim != 3 or self.a.shape[0] != 4 or self.a.shape[2] != 2 * self.a.shape[1] + 2:
            raise ValueError(f"ATensor grid must have shape (4, k, 2k+2), got {self.a.shape}")
        self.a.setflags(write=False)

    @classmethod
    def from_array(cls, arr, exact: Optional[bool] = None) -> "ATensor":
        return cls(_coerce(arr, exact))

    @classmethod
    def zeros(cls, k: int, exact: bool = True) -> "ATensor":
        return cls(_zeros((4, k, 2 * k + 2), exact))

    @classmethod
    def from_monad_matrix(cls, coeffs, exact: Optional[bool] = None) -> "ATensor":
        """coeffs[i] is the k x (2k+2) matrix multiplying x_i in F(x)."""
        return cls.from_array(np.asarray(coeffs), exact)

    @property
    def k(self) -> int:
        return self.a.shape[1]

    @property
    def exact(self) -> bool:
        return self.a.dtype == object

    @property
    def n(self) -> int:
        return 2 * self.k + 2

    def flat(self) -> np.ndarray:
        """(4k) x (2k+2) matrix, rows indexed by (i, j) with i major."""
        return self.a.reshape(4 * self.k, self.n)

    def vec(self) -> np.ndarray:
        return self.a.reshape(-1)

    def monad_matrix(self, x) -> np.ndarray:
        """F(x) with F(x)[j, l] = sum_i a[i, j, l] x_i."""
        return np.tensordot(np.asarray(x, dtype=self.a.dtype), self.a, axes=(0, 0))

    def to_complex(self) -> "ATensor":
        return ATensor(to_complex_array(self.a)) if self.exact else self

    def scaled(self, lam) -> "ATensor":
        return ATensor(self.a * lam)

    def __add__(self, other: "ATensor") -> "ATensor":
        return ATensor(self.a + other.a)

    def equals(self, other: "ATensor") -> bool:
        return self.a.shape == other.a.shape and bool(np.all(self.a == other.a))


# --------------------------------------------------------------- STensor

@dataclass(frozen=True, eq=False)
class STensor:
    k: int
    upper: np.ndarray  # (k(k-1)/2, 4, 4), symmetric blocks sigma^{ij}, i < j

    def __post_init__(self):
        if self.upper.shape != (len(b_pairs(self.k)), 4, 4):
            raise ValueError(f"STensor for k={self.k} needs shape ({len(b_pairs(self.k))}, 4, 4)")
        up = self.upper
        if up.dtype == object:
            sym = np.all(up == up.transpose(0, 2, 1))
        else:
            skew_part = np.abs(up - up.transpose(0, 2, 1)).max(initial=0.0)
            sym = skew_part <= 1e-9 * max(1.0, np.abs(up).max(initial=0.0))
        if not sym:
            raise ValueError("sigma blocks must be symmetric")
        self.upper.setflags(write=False)

    @property
    def exact(self) -> bool:
        return self.upper.dtype == object

    @classmethod
    def zeros(cls, k: int, exact: bool = True) -> "STensor":
        return cls(k, _zeros((len(b_pairs(k)), 4, 4), exact))

    @classmethod
    def from_blocks(cls, blocks, exact: Optional[bool] = None) -> "STensor":
        """Build from a full (k, k, 4, 4) block array; only i < j is read."""
        blocks = _coerce(blocks, exact)
        k = blocks.shape[0]
        pairs = b_pairs(k)
        up = _zeros((len(pairs), 4, 4), blocks.dtype == object)
        for t, (i, j) in enumerate(pairs):
            up[t] = blocks[i, j]
        return cls(k, up)

    @classmethod
    def from_vec(cls, k: int, v, exact: Optional[bool] = None) -> "STensor":
        v = _coerce(np.asarray(v).reshape(-1), exact)
        up = _zeros((len(b_pairs(k)), 4, 4), v.dtype == object)
        pos = 0
        for t in range(len(b_pairs(k))):
            for l, p in f_monomials():
                up[t, l, p] = v[pos]
                up[t, p, l] = v[pos]
                pos += 1
        return cls(k, up)

    @classmethod
    def from_terms(cls, k: int, terms, exact: bool = True) -> "STensor":
        """S = sum of coeff * (f^T x)(g^T x)-type terms q (x) (u ^ v).

        Each term is (q, u, v): q a symmetric 4x4 matrix (the quadric f g^T +
        g f^T, or f f^T, in sigma normalisation), u and v vectors in C^k.
        The resulting block is sigma^{ij} = q (u_i v_j - u_j v_i).
        """
        blocks = _zeros((k, k, 4, 4), exact)
        for q, u, v in terms:
            q = _coerce(q, exact)
            u = _coerce(u, exact)
            v = _coerce(v, exact)
            w = np.outer(u, v) - np.outer(v, u)
            blocks = blocks + w[:, :, None, None] * q[None, None, :, :]
        return cls.from_blocks(blocks, exact)

    @classmethod
    def monomial(cls, k: int, l: int, p: int, i: int, j: int, coeff=1, exact: bool = True) -> "STensor":
        """coeff * f_l f_p (x) b_i ^ b_j as a single basis element of the tensor space."""
        if i == j:
            return cls.zeros(k, exact)
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        up = _zeros((len(b_pairs(k)), 4, 4), exact)
        t = b_pairs(k).index((i, j))
        c = Fraction(coeff) if exact else complex(coeff)
        # basis element f_l f_p b_i^b_j collects 4 sigma entries (2 if l == p)
        val = sign * c / (2 if l == p else 4)
        up[t, l, p] = val
        up[t, p, l] = val
        return cls(k, up)

    def blocks(self) -> np.ndarray:
        """Full (k, k, 4, 4) grid with sigma^{ji} = -sigma^{ij}, sigma^{ii} = 0."""
        out = _zeros((self.k, self.k, 4, 4), self.exact)
        for t, (i, j) in enumerate(b_pairs(self.k)):
            out[i, j] = self.upper[t]
            out[j, i] = -self.upper[t]
        return out

    def vec(self) -> np.ndarray:
        out = []
        for t in range(len(b_pairs(self.k))):
            for l, p in f_monomials():
                out.append(self.upper[t, l, p])
        return np.array(out, dtype=self.upper.dtype).reshape(-1)

    def to_complex(self) -> "STensor":
        return STensor(self.k, to_complex_array(self.upper)) if self.exact else self

    def __add__(self, other: "STensor") -> "STensor":
        return STensor(self.k, self.upper + other.upper)

    def scaled(self, lam) -> "STensor":
        return STensor(self.k, self.upper * lam)

    def is_zero(self) -> bool:
        if self.exact:
            return bool(np.all(self.upper == 0))
        return float(np.abs(self.upper).max(initial=0.0)) == 0.0

    def transformed(self, P, Q) -> "STensor":
        """Action of (P, Q) in GL_4 x GL_k on S^2 C^4 (x) Lambda^2 C^k.

        sigma'^{mn} = sum_ij Q[m,i] Q[n,j] P sigma^{ij} P^T.
        """
        exact = self.exact and np.asarray(P).dtype == object and np.asarray(Q).dtype == object
        blk = self.blocks() if exact else to_complex_array(self.blocks())
        P = np.asarray(P) if exact else to_complex_array(P)
        Q = np.asarray(Q) if exact else to_complex_array(Q)
        tmp = np.einsum("mi,nj,ijab->mnab", Q, Q, blk) if not exact else _obj_bilinear_b(Q, blk)
        out = _zeros(tmp.shape, exact)
        for m in range(self.k):
            for n in range(self.k):
                out[m, n] = P @ tmp[m, n] @ P.T
        if not exact:
            out = (out + out.transpose(0, 1, 3, 2)) / 2
        return STensor.from_blocks(out, exact)


def _obj_bilinear_b(Q, blk):
    k = blk.shape[0]
    out = _zeros(blk.shape, True)
    for m in range(k):
        for n in range(k):
            acc = _zeros((4, 4), True)
            for i in range(k):
                if Q[m, i] == 0:
                    continue
                for j in range(k):
                    if Q[n, j] == 0 or i == j:
                        continue
                    acc = acc + Q[m, i] * Q[n, j] * blk[i, j]
            out[m, n] = acc
    return out


# ---------------------------------------------------------------- maps

def gamma(A: ATensor, mode: str = "coefficient") -> np.ndarray:
    """gamma(A) in S^2 C^4* (x) Lambda^2 C^k* as monomial coefficients.

    ``coefficient`` expands the defining quadratic sum with its factor 1/2;
    ``forms`` reads the quadric entries of F(x) J F(x)^T off evaluations at
    e_i and e_i + e_i'.  The two agree up to a per-k constant.
    """
    k = A.k
    pairs, monos = b_pairs(k), f_monomials()
    if mode == "coefficient":
        J = symplectic_gram(k, A.exact)
        AJ = A.a @ J
        # T[i, j, i2, j2] = 1/2 sum_{l, l'} a[i,j,l] J[l,l'] a[i2,j2,l']
        flatAJ = AJ.reshape(4 * k, A.n)
        T = (flatAJ @ A.flat().T).reshape(4, k, 4, k)
        half = Fraction(1, 2) if A.exact else 0.5
        out = _zeros(len(pairs) * len(monos), A.exact)
        pos = 0
        for j, j2 in pairs:
            for i, i2 in monos:
                # f_i* f_i2* is symmetric, b_j* ^ b_j2* antisymmetric
                val = T[i, j, i2, j2] - T[i, j2, i2, j]
                if i != i2:
                    val = val + T[i2, j, i, j2] - T[i2, j2, i, j]
                out[pos] = half * val
                pos += 1
        return out
    if mode == "forms":
        J = symplectic_gram(k, A.exact)
        one = Fraction(1) if A.exact else 1.0
        zero = Fraction(0) if A.exact else 0.0

        def G(x):
            F = A.monad_matrix(x)
            return F @ J @ F.T

        diag = {}
        for i in range(4):
            e = [zero] * 4
            e[i] = one
            diag[i] = G(e)
        out = _zeros(len(pairs) * len(monos), A.exact)
        pos = 0
        for j, j2 in pairs:
            for i, i2 in monos:
                if i == i2:
                    out[pos] = diag[i][j, j2]
                else:
                    e = [zero] * 4
                    e[i] = one
                    e[i2] = one
                    out[pos] = G(e)[j, j2] - diag[i][j, j2] - diag[i2][j, j2]
                pos += 1
        return out
    raise ValueError(f"unknown gamma mode {mode!r}")


def dgamma(A: ATensor) -> np.ndarray:
    """Matrix of B -> gamma(A+B) - gamma(A) - gamma(B), shape 5k(k-1) x 4k(2k+2).

    With M(A,B)[j,j2,i,i2] = sum a[i,j,l] J[l,l'] b[i2,j2,l'], the polarised
    value is g = M(A,B) + M(B,A), folded into monomial coordinates.
    """
    k, n = A.k, A.n
    J = symplectic_gram(k, A.exact)
    AJ = (A.flat() @ J).reshape(4, k, n)
    D = _zeros((s_dim(k), 4, k, n), A.exact)
    pos = 0
    for j, j2 in b_pairs(k):
        for i, i2 in f_monomials():
            orders = [(i, i2)] if i == i2 else [(i, i2), (i2, i)]
            for a_, c_ in orders:
                # d g[j,j2,a,c] / d b[c, j2, :] = AJ[a, j, :]
                D[pos, c_, j2] = D[pos, c_, j2] + AJ[a_, j]
                # M(B,A)[j,j2,a,c] = -sum_l b[a,j,l] AJ[c,j2,l]
                D[pos, a_, j] = D[pos, a_, j] - AJ[c_, j2]
            pos += 1
    return D.reshape(s_dim(k), 4 * k * n)


def beta_matrix(A: ATensor) -> np.ndarray:
    """Column l' is beta(A, h_l') = sum_l a[., ., l] omega(h_l, h_l')."""
    return A.flat() @ symplectic_gram(A.k, A.exact)


def beta(A: ATensor, h) -> np.ndarray:
    """beta(A, h) as a 4 x k array."""
    return (beta_matrix(A) @ np.asarray(h)).reshape(4, A.k)


def epsilon_matrix(A: ATensor) -> np.ndarray:
    """Column (i, j) is epsilon(A, f_i (x) b_j) = sum_l a[i,j,l] h_l."""
    return A.flat().T


def epsilon(A: ATensor, C) -> np.ndarray:
    """epsilon(A, C) for C a 4 x k array in C^4 (x) C^k."""
    return epsilon_matrix(A) @ np.asarray(C).reshape(-1)


def rho_matrix(S: STensor) -> np.ndarray:
    """4k x 4k matrix of B* -> rho(S, B*), both sides indexed (i, j) with i major.

    rho(S, f_i* (x) b_j*) = 4 sum_{p, m} sigma^{jm}_{ip} f_p (x) b_m.
    """
    k = S.k
    blk = S.blocks()
    R = _zeros((4, k, 4, k), S.exact)
    four = 4
    for j in range(k):
        for m in range(k):
            if j == m:
                continue
            # R[p, m, i, j] = 4 sigma^{jm}[i, p]
            R[:, m, :, j] = four * blk[j, m].T
    return R.reshape(4 * k, 4 * k)


def rho(S: STensor, B) -> np.ndarray:
    return (rho_matrix(S) @ np.asarray(B).reshape(-1)).reshape(4, S.k)


def xi_matrix(A: ATensor) -> np.ndarray:
    """Matrix of vec(S) -> xi(A, S), shape 4k(2k+2) x 5k(k-1).

    xi(A, S) = sum_l rho(S, a[:, :, l]) (x) h_l: the defining formula of xi
    is the formula of rho applied slice by slice in the h-index.
    """
    k, n = A.k, A.n
    X = _zeros((4, k, n, s_dim(k)), A.exact)
    col = 0
    for j1, j2 in b_pairs(k):
        for l, p in f_monomials():
            entries = {(l, p)} | {(p, l)}
            for (u, w) in entries:
                for (jj, mm, sgn) in ((j1, j2, 1), (j2, j1, -1)):
                    # sigma^{jj,mm}_{u,w} = sgn: out[w, mm, :] += 4 sgn a[u, jj, :]
                    X[w, mm, :, col] = X[w, mm, :, col] + 4 * sgn * A.a[u, jj, :]
            col += 1
    return X.reshape(4 * k * n, s_dim(k))


def xi(A: ATensor, S: STensor) -> np.ndarray:
    """xi(A, S) as a (4, k, 2k+2) CTensor grid."""
    R = rho_matrix(S)
    flat = A.flat()
    if A.exact != S.exact:
        R, flat = to_complex_array(R), to_complex_array(flat)
    return (R @ flat).reshape(4, A.k, A.n)


def pair_ac(B: ATensor, C) -> object:
    """Invariant pairing of A-space with C-space: sum_ij omega(C_ij, B_ij)."""
    C = np.asarray(C)
    J = symplectic_gram(B.k, B.exact and C.dtype == object)
    Cf = C.reshape(4 * B.k, B.n)
    Bf = B.flat()
    if J.dtype != object:
        Cf, Bf = to_complex_array(Cf), to_complex_array(Bf)
    return np.sum((Cf @ J) * Bf)


def kappa(C, h) -> np.ndarray:
    """kappa(C, h) = sum c[i,j,l] omega(h_l, h) f_i (x) b_j, a 4 x k array."""
    C = np.asarray(C)
    k = C.shape[1]
    J = symplectic_gram(k, C.dtype == object)
    if C.dtype != object:
        J = J.astype(complex)
    return C @ (J @ np.asarray(h))


def tau0(A: ATensor, S: STensor, h) -> np.ndarray:
    return kappa(xi(A, S), h)


def flattenings(S: STensor):
    """(sigma, sigma_hat), both 4k x 4k.

    sigma has k x k blocks sigma^{ij} (rows (b, f) ordered b major);
    sigma_hat has 4 x 4 blocks sigma_hat^{ip} with sigma_hat^{ip}_{jm} = sigma^{jm}_{ip}.
    """
    k = S.k
    blk = S.blocks()
    sigma = blk.transpose(0, 2, 1, 3).reshape(4 * k, 4 * k)
    sigma_hat = blk.transpose(2, 0, 3, 1).reshape(4 * k, 4 * k)
    return sigma, sigma_hat


def rk_S(S: STensor, check: bool = True) -> int:
    r = rank(rho_matrix(S))
    if check:
        sig, sig_hat = flattenings(S)
        rs, rh = rank(sig), rank(sig_hat)
        if not (r == rs == rh):
            raise AssertionError(f"flattening ranks disagree: rho {r}, sigma {rs}, sigma_hat {rh}")
    return r


# ------------------------------------------------------------ group action

def symplectic_random(k: int, rng: np.random.Generator, exact: bool = True, size: int = 2) -> np.ndarray:
    """Random element of Sp_{2k+2} built from shear and block-diagonal factors."""
    n = k + 1
    if exact:
        def rnd(shape):
            return to_fraction_array(rng.integers(-size, size + 1, shape))
        Id = to_fraction_array(np.eye(2 * n, dtype=int))
    else:
        def rnd(shape):
            return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        Id = np.eye(2 * n, dtype=complex)
    g = Id
    for _ in range(2):
        Sy = rnd((n, n))
        Sy = Sy + Sy.T
        upper = Id.copy()
        upper[:n, n:] = Sy
        Sy2 = rnd((n, n))
        Sy2 = Sy2 + Sy2.T
        lower = Id.copy()
        lower[n:, :n] = Sy2
        g = g @ upper @ lower
    L = _unimodular(n, rng, exact)
    Linv_T = _inverse(L).T
    blockd = Id.copy()
    blockd[:n, :n] = L
    blockd[n:, n:] = Linv_T
    return g @ blockd


def _unimodular(n, rng, exact):
    """Random invertible matrix with a cheap exact inverse (unit triangular product)."""
    if exact:
        U = np.eye(n, dtype=int)
        Lo = np.eye(n, dtype=int)
        iu = np.triu_indices(n, 1)
        U[iu] = rng.integers(-2, 3, len(iu[0]))
        Lo[(iu[1], iu[0])] = rng.integers(-2, 3, len(iu[0]))
        return to_fraction_array(Lo @ U)
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_invertible(n: int, rng: np.random.Generator, exact: bool = True) -> np.ndarray:
    return _unimodular(n, rng, exact)


def _inverse(M):
    M = np.asarray(M)
    if M.dtype != object:
        return np.linalg.inv(M)
    from .linalg import solve_affine
    n = M.shape[0]
    cols = []
    for c in range(n):
        e = np.zeros(n, dtype=int).astype(object)
        e[c] = 1
        x = solve_affine(to_fraction_array(M), to_fraction_array(e))
        if x is None:
            raise ValueError("matrix is singular")
        cols.append(x)
    return np.stack(cols, axis=1)


def inverse(M):
    return _inverse(M)


def act_on_A(P, Q, Y, A: ATensor) -> ATensor:
    """(P, Q, Y) in GL_4 x GL_k x Sp acts on C^4* (x) C^k* (x) C^{2k+2}.

    P and Q act on the vector spaces C^4 and C^k, hence by P^{-T}, Q^{-T} on
    the covector indices of A; Y acts on the h index directly.
    """
    exact = A.exact and all(np.asarray(g).dtype == object for g in (P, Q, Y))
    a = A.a if exact else to_complex_array(A.a)
    Pi = _inverse(P).T if exact else np.linalg.inv(to_complex_array(P)).T
    Qi = _inverse(Q).T if exact else np.linalg.inv(to_complex_array(Q)).T
    Yc = np.asarray(Y) if exact else to_complex_array(Y)
    k, n = A.k, A.n
    t = (Pi @ a.reshape(4, k * n)).reshape(4, k, n)
    t = np.stack([Qi @ t[i] for i in range(4)])
    t = np.stack([t[i] @ Yc.T for i in range(4)])
    return ATensor(t)


def act_on_gamma_value(P, Q, g: np.ndarray, k: int) -> np.ndarray:
    """Transport a gamma value (covector quadrics) along (P, Q)."""
    exact = g.dtype == object and all(np.asarray(x).dtype == object for x in (P, Q))
    Pi = _inverse(P).T if exact else np.linalg.inv(to_complex_array(P)).T
    Qi = _inverse(Q).T if exact else np.linalg.inv(to_complex_array(Q)).T
    # monomial coefficients -> symmetric quadric matrices q[j, j2]
    blocks = _zeros((k, k, 4, 4), exact)
    half = Fraction(1, 2) if exact else 0.5
    pos = 0
    for j, j2 in b_pairs(k):
        for i, i2 in f_monomials():
            v = g[pos]
            if i == i2:
                blocks[j, j2, i, i] = v
            else:
                blocks[j, j2, i, i2] = half * v
                blocks[j, j2, i2, i] = half * v
            pos += 1
        blocks[j2, j] = -blocks[j, j2]
    S = STensor.from_blocks(blocks, exact).transformed(Pi, Qi)
    out = _zeros(len(g), exact)
    pos = 0
    nb = S.blocks()
    for j, j2 in b_pairs(k):
        for i, i2 in f_monomials():
            out[pos] = nb[j, j2, i, i] if i == i2 else 2 * nb[j, j2, i, i2]
            pos += 1
    return out


def act_on_C(P, Q, Y, C) -> np.ndarray:
    C = np.asarray(C)
    exact = C.dtype == object and all(np.asarray(x).dtype == object for x in (P, Q, Y))
    if not exact:
        C, P, Q, Y = (to_complex_array(x) for x in (C, P, Q, Y))
    k, n = C.shape[1], C.shape[2]
    t = (np.asarray(P) @ C.reshape(4, k * n)).reshape(4, k, n)
    t = np.stack([np.asarray(Q) @ t[i] for i in range(4)])
    return np.stack([t[i] @ np.asarray(Y).T for i in range(4)])


def random_atensor(k: int, rng: np.random.Generator, exact: bool = True, size: int = 3) -> ATensor:
    if exact:
        return ATensor.from_array(rng.integers(-size, size + 1, (4, k, 2 * k + 2)), exact=True)
    return ATensor(rng.standard_normal((4, k, 2 * k + 2)) + 1j * rng.standard_normal((4, k, 2 * k + 2)))


def random_stensor(k: int, rng: np.random.Generator, exact: bool = True, size: int = 3) -> STensor:
    if exact:
        return STensor.from_vec(k, rng.integers(-size, size + 1, s_dim(k)), exact=True)
    return STensor.from_vec(k, rng.standard_normal(s_dim(k)) + 1j * rng.standard_normal(s_dim(k)), exact=False)
