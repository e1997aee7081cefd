"""Tensor Bernstein enclosures of bivariate polynomials with error tracking.

Sign certification of a homogeneous polynomial on a sphere cell reduces to
the sign of its face polynomial on a parameter box, since the positive
sphere-normalization factor cannot change signs.  The face polynomial is
held in the tensor Bernstein basis of each cell; the coefficient hull
encloses the value range, and de Casteljau subdivision shrinks the slack
quadratically.

Every coefficient array carries a scalar roundoff bound ``err``: an upper
bound on the max-norm distance to the exact Bernstein coefficients.  The
bounds use standard floating-point error accumulation for convex
combinations and positively weighted sums, with a generous safety factor,
so a certificate min(B) > err (or max(B) < -err) is a sound sign proof.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "binomial_matrix",
    "power_to_bernstein_matrix",
    "split_matrices",
    "affine_compose_matrix",
    "face_power_coeffs",
    "gradient_power_coeffs",
    "root_bernstein",
    "split_children",
    "classify",
    "bernstein_on_boxes",
]

_EPS = np.finfo(float).eps


@lru_cache(maxsize=64)
def binomial_matrix(m: int) -> np.ndarray:
    """C[i, k] = binomial(i, k), zero for k > i."""
    C = np.zeros((m + 1, m + 1))
    for i in range(m + 1):
        C[i, 0] = 1.0
        for k in range(1, i + 1):
            C[i, k] = C[i - 1, k - 1] + C[i - 1, k]
    return C


@lru_cache(maxsize=64)
def power_to_bernstein_matrix(m: int) -> np.ndarray:
    """T with b = T p converting power coefficients on [0,1] to Bernstein.

    T[i, k] = C(i, k) / C(m, k) for k <= i; all entries lie in [0, 1].
    """
    C = binomial_matrix(m)
    T = np.zeros((m + 1, m + 1))
    for i in range(m + 1):
        for k in range(i + 1):
            T[i, k] = C[i, k] / C[m, k]
    return T


@lru_cache(maxsize=64)
def split_matrices(m: int) -> tuple[np.ndarray, np.ndarray]:
    """De Casteljau halving matrices (left, right) for degree m on [0,1].

    left[i, k] = C(i, k) / 2^i; right[i, k] = C(m-i, k-i) / 2^(m-i).
    Rows are convex combinations (entries >= 0 summing to 1).
    """
    C = binomial_matrix(m)
    L = np.zeros((m + 1, m + 1))
    R = np.zeros((m + 1, m + 1))
    for i in range(m + 1):
        for k in range(i + 1):
            L[i, k] = C[i, k] / 2.0**i
        for k in range(i, m + 1):
            R[i, k] = C[m - i, k - i] / 2.0 ** (m - i)
    return L, R


def affine_compose_matrix(m: int, a: float, h: float) -> np.ndarray:
    """A with p' = A p giving coefficients of q(a + h xi) from those of q(u).

    A[k, l] = C(l, k) a^(l-k) h^k for l >= k.
    """
    C = binomial_matrix(m)
    A = np.zeros((m + 1, m + 1))
    for k in range(m + 1):
        hk = h**k
        for l in range(k, m + 1):
            A[k, l] = C[l, k] * a ** (l - k) * hk
    return A


def face_power_coeffs(n: int, mono_coeffs: np.ndarray, exponents: np.ndarray, face: int) -> np.ndarray:
    """Power-basis coefficient matrix of the face polynomial on data face 0..2.

    Face ``k`` fixes homogeneous coordinate k to +1; the remaining
    coordinates, in ascending axis order, become (u, v).  Each monomial maps
    to a single entry, so the construction is exact.
    """
    if face not in (0, 1, 2):
        raise ValueError("data faces are 0..2")
    P = np.zeros((n + 1, n + 1))
    others = [i for i in range(3) if i != face]
    for coef, (a, b, c) in zip(mono_coeffs, exponents):
        e = (int(a), int(b), int(c))
        P[e[others[0]], e[others[1]]] += coef
    return P


def gradient_power_coeffs(n: int, P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Power coefficients of the spherical-critical-point polynomials.

    The restriction of the section to the sphere has a critical point at a
    face parameter (u, v) exactly when both
    g1 = (1 + u^2 + v^2) dq/du - n u q and
    g2 = (1 + u^2 + v^2) dq/dv - n v q vanish; both have degree n + 1.
    Rows shifted past the array edge are identically zero by the total
    degree bound, so the clipped slices below lose nothing.
    """
    m = n + 1
    G1 = np.zeros((m + 1, m + 1))
    G2 = np.zeros((m + 1, m + 1))
    idx = np.arange(1, n + 1, dtype=float)
    Du = P[1:, :] * idx[:, None]  # coeff of u^a v^b in dq/du, a <= n-1
    Dv = P[:, 1:] * idx[None, :]
    G1[:n, : n + 1] += Du
    G1[2 : n + 2, : n + 1] += Du
    G1[:n, 2 : n + 2] += Du[:, :n]
    G1[1 : n + 2, : n + 1] -= n * P
    G2[: n + 1, :n] += Dv
    G2[: n + 1, 2 : n + 2] += Dv
    G2[2 : n + 2, :n] += Dv[:n, :]
    G2[: n + 1, 1 : n + 2] -= n * P
    return G1, G2


def _sandwich(A: np.ndarray, P: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ P @ B.T


def root_bernstein(P: np.ndarray) -> tuple[np.ndarray, float]:
    """Bernstein coefficients of q on the full face box [-1,1]^2 plus an
    upper bound on their floating-point error."""
    m = P.shape[0] - 1
    A = affine_compose_matrix(m, -1.0, 2.0)
    T = power_to_bernstein_matrix(m)
    M = T @ A
    B = _sandwich(M, P, M)
    absB = _sandwich(np.abs(M), np.abs(P), np.abs(M))
    err = 8.0 * (m + 1) * _EPS * float(absB.max(initial=0.0))
    return B, err


def split_children(B: np.ndarray, err: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a batch of cells into their four children.

    ``B`` has shape (N, m+1, m+1); returns (child coefficients with shape
    (N, 4, m+1, m+1), child errors (N, 4)).  Child order is
    (di, dj) = (0,0), (0,1), (1,0), (1,1) where di indexes the u half and
    dj the v half; child (di, dj) covers cell (2i+di, 2j+dj).
    """
    m = B.shape[-1] - 1
    L, R = split_matrices(m)
    out = np.empty((B.shape[0], 4, m + 1, m + 1))
    for idx, (su, sv) in enumerate(((L, L), (L, R), (R, L), (R, R))):
        out[:, idx] = np.einsum("ik,nkl,jl->nij", su, B, sv, optimize=True)
    scale = np.abs(B).reshape(B.shape[0], -1).max(axis=1)
    cerr = (err + 8.0 * (m + 1) * _EPS * scale)[:, None] * np.ones((1, 4))
    return out, cerr


def classify(B: np.ndarray, err: np.ndarray) -> np.ndarray:
    """Status per cell: +1 all-positive, -1 all-negative, 0 unknown."""
    flat = B.reshape(B.shape[0], -1)
    bmin = flat.min(axis=1)
    bmax = flat.max(axis=1)
    status = np.zeros(B.shape[0], dtype=np.int8)
    status[bmin > err] = 1
    status[bmax < -err] = -1
    return status


def bernstein_on_boxes(P: np.ndarray, a_u: np.ndarray, a_v: np.ndarray, h: float):
    """Bernstein coefficients of q on boxes [a_u, a_u+h] x [a_v, a_v+h].

    Batched over boxes (a_u, a_v are arrays in [-1,1] face coordinates).
    Returns (B with shape (N, m+1, m+1), err (N,)).
    """
    m = P.shape[0] - 1
    N = a_u.shape[0]
    C = binomial_matrix(m)
    expo = np.arange(m + 1)
    emat = np.clip(expo[None, :] - expo[:, None], 0, None)  # l - k, clipped
    mask = expo[None, :] >= expo[:, None]
    hk = h ** expo.astype(float)

    def compose_batch(a):
        apow = np.ones((N, m + 1))
        for e in range(1, m + 1):
            apow[:, e] = apow[:, e - 1] * a
        pows = apow[:, emat]  # a^(l-k), advanced indexing over the exponent table
        return C.T[None] * pows * hk[None, :, None] * mask[None]

    Au = compose_batch(np.asarray(a_u, dtype=float))
    Av = compose_batch(np.asarray(a_v, dtype=float))
    T = power_to_bernstein_matrix(m)
    Pu = np.einsum("nkl,lj->nkj", Au, P, optimize=True)
    Puv = np.einsum("nkj,nmj->nkm", Pu, Av, optimize=True)
    B = np.einsum("ik,nkm,jm->nij", T, Puv, T, optimize=True)
    absPu = np.einsum("nkl,lj->nkj", np.abs(Au), np.abs(P), optimize=True)
    absPuv = np.einsum("nkj,nmj->nkm", absPu, np.abs(Av), optimize=True)
    absB = np.einsum("ik,nkm,jm->nij", T, absPuv, T, optimize=True)
    err = 16.0 * (m + 1) * _EPS * absB.reshape(N, -1).max(axis=1)
    return B, err
