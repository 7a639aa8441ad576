"""Greedy sparse recovery: orthogonal matching pursuit and one-shot thresholding.

Both rank columns by the normalised correlation ``|M_i^T r| / ||M_i||``;
whitening changes column norms, so raw correlations would bias selection.
Ties go to the lowest column index.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .linalg import as_matrix, as_vector, least_squares
from .model import SparseSignal
from .tolerances import TOL


@dataclass(frozen=True)
class RecoveryResult:
    """Estimate ``xhat`` (zero off ``support``); ``support`` is in selection order."""

    xhat: np.ndarray
    support: np.ndarray
    residual_norm: float
    iterations: int
    residual_history: tuple = ()


def _prepare(M, y, s):
    M = as_matrix(M, "M")
    y = as_vector(y, "y")
    n, p = M.shape
    if y.shape[0] != n:
        raise PreconditionError(f"y has length {y.shape[0]}, expected {n}")
    s = int(s)
    if not 1 <= s <= min(n, p):
        raise PreconditionError(f"need 1 <= s <= min(n, p) = {min(n, p)}, got s={s}")
    norms = np.linalg.norm(M, axis=0)
    if np.any(norms <= TOL.zero_column):
        raise PreconditionError("measurement matrix has a zero column")
    return M, y, s, norms


def omp(M, y, s):
    """Orthogonal matching pursuit with a budget of ``s`` atoms.

    Each iteration adds the column with the largest normalised correlation to
    the residual, then refits all selected coefficients by least squares.
    Stops early once ``||r|| <= 1e-10 ||y||``. If a refit becomes
    rank-deficient the last atom is dropped and the partial fit is returned.
    """
    M, y, s, norms = _prepare(M, y, s)
    p = M.shape[1]
    ynorm = np.linalg.norm(y)
    stop = TOL.omp_residual * ynorm

    support = []
    coef = np.zeros(0)
    r = y.copy()
    rnorm = ynorm
    history = [rnorm]
    available = np.ones(p, dtype=bool)
    iterations = 0
    while len(support) < s and rnorm > stop:
        scores = np.abs(M.T @ r) / norms
        scores[~available] = -1.0
        j = int(np.argmax(scores))
        try:
            trial_coef = least_squares(M[:, support + [j]], y)
        except PreconditionError:
            break
        support.append(j)
        available[j] = False
        coef = trial_coef
        r = y - M[:, support] @ coef
        rnorm = float(np.linalg.norm(r))
        history.append(rnorm)
        iterations += 1

    xhat = np.zeros(p)
    xhat[support] = coef
    return RecoveryResult(
        xhat=xhat,
        support=np.array(support, dtype=np.intp),
        residual_norm=rnorm,
        iterations=iterations,
        residual_history=tuple(history),
    )


def threshold_recover(M, y, s):
    """Keep the ``s`` columns most correlated with ``y``, then fit them by least squares."""
    M, y, s, norms = _prepare(M, y, s)
    scores = np.abs(M.T @ y) / norms
    support = np.sort(np.argsort(-scores, kind="stable")[:s])
    coef = least_squares(M[:, support], y)
    xhat = np.zeros(M.shape[1])
    xhat[support] = coef
    r = y - M[:, support] @ coef
    return RecoveryResult(
        xhat=xhat, support=support, residual_norm=float(np.linalg.norm(r)), iterations=1
    )


ALGORITHMS = {"omp": omp, "threshold": threshold_recover}


def squared_error(xhat, x):
    """``||xhat - x||^2``; either argument may be a ``SparseSignal`` or a dense vector."""
    a = x.to_dense() if isinstance(x, SparseSignal) else np.asarray(x, dtype=np.float64)
    b = xhat.to_dense() if isinstance(xhat, SparseSignal) else np.asarray(xhat, dtype=np.float64)
    if a.shape != b.shape:
        raise PreconditionError(f"dimension mismatch: {b.shape} vs {a.shape}")
    d = b - a
    return float(d @ d)
