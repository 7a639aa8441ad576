"""Dense real linear algebra kernels.

Everything here is built on two primitives written out in numpy:

* cyclic Jacobi rotations for symmetric eigenproblems, using the round-robin
  (tournament) ordering so that the n/2 disjoint rotations of a round are
  applied in one vectorised step. The same code runs on a single matrix or
  on a stack of shape ``(..., k, k)``, which is what the brute-force RIP
  enumeration needs.
* Householder QR, used for least squares and for orthonormalising random
  bases.

Singular values come from a Jacobi eigendecomposition of the smaller Gram
matrix.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, PreconditionError
from .tolerances import TOL

__all__ = [
    "SymEigen",
    "as_matrix",
    "as_vector",
    "sym_eigen",
    "sym_eigvals_stack",
    "spectral_norm",
    "singular_values",
    "inv_sqrt_sym",
    "householder_qr",
    "least_squares",
]


@dataclass(frozen=True)
class SymEigen:
    """Eigenvalues in non-increasing order and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def as_matrix(M, name="matrix"):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise PreconditionError(f"{name} must be 2-D, got shape {M.shape}")
    if M.size == 0:
        raise PreconditionError(f"{name} is empty")
    if not np.all(np.isfinite(M)):
        raise PreconditionError(f"{name} has non-finite entries")
    return M


def as_vector(v, name="vector"):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise PreconditionError(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise PreconditionError(f"{name} has non-finite entries")
    return v


@lru_cache(maxsize=64)
def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair (p, q), p < q, once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        P, Q = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= n or b >= n:
                continue
            P.append(min(a, b))
            Q.append(max(a, b))
        rounds.append((np.array(P, dtype=np.intp), np.array(Q, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _offdiag_norm(A):
    # summed directly; ||A||^2 - ||diag||^2 cancels catastrophically
    n = A.shape[-1]
    iu = np.triu_indices(n, 1)
    upper = A[..., iu[0], iu[1]]
    return np.sqrt(2.0 * np.sum(upper * upper, axis=-1))


def _jacobi(A, want_vectors):
    """Diagonalise a stack of symmetric matrices in place of a copy.

    Returns (diagonal, V) with V None when ``want_vectors`` is false.
    """
    A = np.array(A, dtype=np.float64, copy=True)
    n = A.shape[-1]
    V = None
    if want_vectors:
        V = np.broadcast_to(np.eye(n), A.shape).copy()
    scale = np.sqrt(np.sum(A * A, axis=(-2, -1)))
    target = TOL.jacobi_offdiag * scale
    rounds = _round_robin(n)

    sweeps = 0
    while np.any(_offdiag_norm(A) > target):
        if sweeps == TOL.jacobi_max_sweeps:
            raise ConvergenceError(
                f"Jacobi did not converge in {TOL.jacobi_max_sweeps} sweeps"
            )
        for P, Q in rounds:
            app = A[..., P, P]
            aqq = A[..., Q, Q]
            apq = A[..., P, Q]
            nonzero = apq != 0.0
            # theta overflows to inf for negligible apq, which gives t = 0
            with np.errstate(over="ignore", divide="ignore"):
                theta = (aqq - app) / (2.0 * np.where(nonzero, apq, 1.0))
                sgn = np.where(theta >= 0.0, 1.0, -1.0)
                t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(nonzero, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            cr, sr = c[..., :, None], s[..., :, None]
            rp, rq = A[..., P, :], A[..., Q, :]
            A[..., P, :] = cr * rp - sr * rq
            A[..., Q, :] = sr * rp + cr * rq

            cc, sc = c[..., None, :], s[..., None, :]
            cp, cq = A[..., :, P], A[..., :, Q]
            A[..., :, P] = cc * cp - sc * cq
            A[..., :, Q] = sc * cp + cc * cq
            # exact zero for the annihilated entries
            A[..., P, Q] = 0.0
            A[..., Q, P] = 0.0

            if V is not None:
                vp, vq = V[..., :, P], V[..., :, Q]
                V[..., :, P] = cc * vp - sc * vq
                V[..., :, Q] = sc * vp + cc * vq
        sweeps += 1
    return np.diagonal(A, axis1=-2, axis2=-1).copy(), V


def _symmetrized(M):
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise PreconditionError(f"matrix must be square, got shape {M.shape}")
    asym = np.max(np.abs(M - M.T))
    if asym > TOL.symmetry:
        raise PreconditionError(f"matrix is not symmetric (max |M - M^T| = {asym:.3g})")
    return 0.5 * (M + M.T)


def sym_eigen(M):
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    The input is symmetrised as ``(M + M.T) / 2`` after checking that it is
    symmetric to within ``TOL.symmetry``.

    Returns
    -------
    SymEigen
        Eigenvalues sorted non-increasing, eigenvectors as matching columns.
    """
    S = _symmetrized(M)
    w, V = _jacobi(S, want_vectors=True)
    order = np.argsort(-w, kind="stable")
    return SymEigen(w[order], V[:, order])


def sym_eigvals_stack(stack):
    """Eigenvalues of each matrix in a stack ``(..., k, k)``, sorted non-increasing.

    No symmetry check is made; callers pass Gram matrices.
    """
    stack = np.asarray(stack, dtype=np.float64)
    w, _ = _jacobi(stack, want_vectors=False)
    return -np.sort(-w, axis=-1)


def _check_gram_eigs(w):
    # slightly negative values are round-off; anything beyond this is a bug
    floor = -TOL.eig_clamp * max(1.0, float(np.max(np.abs(w))))
    if np.any(w < floor):
        raise ConvergenceError("Gram matrix has a clearly negative eigenvalue")


def singular_values(M):
    """Singular values of ``M`` (``min(rows, cols)`` of them), non-increasing.

    The eigenvectors ``v_i`` of the smaller Gram matrix are computed by
    Jacobi and each value is taken as ``||M v_i||`` (or ``||M^T u_i||``)
    rather than ``sqrt(lambda_i)``; the square root of a tiny Gram
    eigenvalue would only be accurate to about ``sqrt(eps) * sigma_max``.
    """
    M = as_matrix(M)
    wide = M.shape[0] <= M.shape[1]
    G = M @ M.T if wide else M.T @ M
    w, V = _jacobi(G, want_vectors=True)
    _check_gram_eigs(w)
    sv = np.linalg.norm((M.T if wide else M) @ V, axis=0)
    return -np.sort(-sv)


def spectral_norm(M):
    """Operator 2-norm: the largest singular value.

    Symmetric input goes through ``sym_eigen`` directly (max |eigenvalue|),
    anything else through the Gram matrix.
    """
    M = as_matrix(M)
    if M.shape[0] == M.shape[1] and np.max(np.abs(M - M.T)) <= TOL.symmetry:
        w = sym_eigen(M).eigenvalues
        return float(np.max(np.abs(w)))
    return float(singular_values(M)[0])


def inv_sqrt_sym(M):
    """Symmetric inverse square root ``V diag(1/sqrt(lambda)) V^T``.

    Raises ``PreconditionError`` when the smallest eigenvalue is at or below
    ``TOL.pos_def``; near-singular input is never regularised.
    """
    eig = sym_eigen(M)
    lam_min = eig.eigenvalues[-1]
    if lam_min <= TOL.pos_def:
        raise PreconditionError(
            f"matrix is not positive definite (smallest eigenvalue {lam_min:.3g})"
        )
    V = eig.eigenvectors
    R = (V / np.sqrt(eig.eigenvalues)) @ V.T
    return 0.5 * (R + R.T)


def householder_qr(M, full=False):
    """QR factorisation by Householder reflections with ``diag(R) >= 0``.

    For an ``m x k`` input with ``m >= k`` returns ``(Q, R)`` with ``Q``
    ``m x k`` (``m x m`` when ``full``) and ``R`` ``k x k`` upper triangular
    (``m x k`` when ``full``). The sign convention makes the factorisation
    unique for full-rank input.
    """
    M = as_matrix(M)
    m, k = M.shape
    if m < k:
        raise PreconditionError(f"householder_qr needs rows >= cols, got {M.shape}")
    R = M.copy()
    Q = np.eye(m)
    for j in range(k):
        x = R[j:, j]
        normx = np.linalg.norm(x)
        if normx == 0.0:
            continue
        alpha = -normx if x[0] >= 0 else normx
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        R[j:, j:] -= 2.0 * np.outer(v, v @ R[j:, j:])
        Q[:, j:] -= 2.0 * np.outer(Q[:, j:] @ v, v)
        R[j + 1 :, j] = 0.0

    signs = np.where(np.diagonal(R) < 0, -1.0, 1.0)
    R[:k, :] *= signs[:, None]
    Q[:, :k] *= signs[None, :]
    if full:
        return Q, R
    return Q[:, :k], R[:k, :]


def _back_substitute(R, b):
    k = R.shape[0]
    c = np.zeros(k)
    for i in range(k - 1, -1, -1):
        c[i] = (b[i] - R[i, i + 1 :] @ c[i + 1 :]) / R[i, i]
    return c


def least_squares(M, b):
    """Minimise ``||M c - b||`` for full-column-rank ``M`` via Householder QR.

    Column rank is judged from the diagonal of R: the smallest ``|R_ii|``
    must exceed ``TOL.rank`` times the largest.
    """
    M = as_matrix(M)
    b = as_vector(b, "b")
    if b.shape[0] != M.shape[0]:
        raise PreconditionError(f"b has length {b.shape[0]}, expected {M.shape[0]}")
    if M.shape[0] < M.shape[1]:
        raise PreconditionError("least_squares: more columns than rows (rank-deficient)")
    Q, R = householder_qr(M)
    d = np.abs(np.diagonal(R))
    if d.max() == 0.0 or d.min() <= TOL.rank * d.max():
        raise PreconditionError("least_squares: matrix is rank-deficient")
    return _back_substitute(R, Q.T @ b)
