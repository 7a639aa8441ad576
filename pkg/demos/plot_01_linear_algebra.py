"""
Dense linear algebra without LAPACK
===================================

The package carries its own cyclic Jacobi eigensolver and Householder QR.
This script compares both against numpy's LAPACK wrappers.
"""

import numpy as np

from noisefold.linalg import householder_qr, inv_sqrt_sym, least_squares, singular_values, sym_eigen

rng = np.random.default_rng(0)

# A random symmetric positive definite matrix
M = rng.standard_normal((40, 40))
S = M @ M.T + 40 * np.eye(40)

# eigenvalues come back in non-increasing order
eig = sym_eigen(S)
print("largest eigenvalue gap vs LAPACK:", np.max(np.abs(eig.eigenvalues - np.linalg.eigvalsh(S)[::-1])))
print("reconstruction error:", np.max(np.abs(eig.reconstruct() - S)))

# The inverse square root whitens S
R = inv_sqrt_sym(S)
print("|R S R - I|_max:", np.max(np.abs(R @ S @ R - np.eye(40))))

# Singular values of a wide matrix
A = rng.standard_normal((8, 50))
print("singular values agree:", np.allclose(singular_values(A), np.linalg.svd(A, compute_uv=False)))

# QR and least squares on a tall system
T = rng.standard_normal((30, 6))
Q, Rq = householder_qr(T)
print("Q orthonormal:", np.allclose(Q.T @ Q, np.eye(6)), " R diagonal >= 0:", bool(np.all(np.diag(Rq) >= 0)))
b = rng.standard_normal(30)
print("lstsq agrees:", np.allclose(least_squares(T, b), np.linalg.lstsq(T, b, rcond=None)[0]))
