"""The equivalent white-noise system and its perturbation constants.

With ``Q = sigma^2 I + sigma0^2 A A^T`` and the folding factor
``gamma = sigma^2 + (p/n) sigma0^2``, the model ``y = A x + v`` is
multiplied by ``W = (Q / gamma)^{-1/2}``. The result is ``W y = B x + u``
with ``B = W A`` and ``cov(u) = gamma I``.

How far ``B`` is from ``A`` is controlled by
``eta = ||I - (n/p) A A^T||_2``.

* ``eta1 = eta / (1 - eta)`` bounds ``||Q1^{-1} - I||``, where ``Q1 = Q / gamma``
  (the sum of the geometric series in ``I - Q1``);
* ``eta3 = (1 - eta)^{-1/2} - 1`` bounds ``||Q1^{-1/2} - I||`` (the binomial
  series of ``(1 - x)^{-1/2}``);
* ``eta2 = (2 sqrt(1 - eta) - 1)^{-2} - 1`` equals ``(1 + eta1) / (1 - eta3)^2 - 1``.

The three are evaluated in closed form, never by summing the series.

For small ``eta``, ``eta2 = 2 eta + O(eta^2)``. A bound of the form
``eta2 < 5 eta`` does *not* hold on all of ``eta < 1/2``: it fails from about
``eta = 0.36`` upward (``eta2(0.4) = 2.3155...``). Nothing here relies on it.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .linalg import as_matrix, as_vector, inv_sqrt_sym, spectral_norm
from .model import effective_noise_covariance


@dataclass(frozen=True)
class FoldingFactor:
    """``gamma = sigma^2 + (p/n) sigma0^2`` and the SNR loss ``gamma / sigma^2``.

    ``degradation`` is ``None`` when ``sigma == 0``.
    """

    gamma: float
    degradation: float | None
    degradation_ratio_form: float | None


def folding_gamma(sigma, sigma0, n, p):
    sigma, sigma0 = float(sigma), float(sigma0)
    if int(n) < 1 or int(p) < 1:
        raise PreconditionError(f"dimensions must be positive, got n={n}, p={p}")
    if sigma < 0 or sigma0 < 0:
        raise PreconditionError("noise levels must be non-negative")
    if sigma == 0 and sigma0 == 0:
        raise PreconditionError("sigma and sigma0 are both zero")
    ratio = p / n
    gamma = sigma**2 + ratio * sigma0**2
    if sigma == 0:
        return FoldingFactor(gamma, None, None)
    return FoldingFactor(gamma, gamma / sigma**2, 1.0 + ratio * (sigma0**2 / sigma**2))


def compute_eta(A):
    """``||I - (n/p) A A^T||_2`` for an n x p matrix ``A``."""
    A = as_matrix(A, "A")
    n, p = A.shape
    D = np.eye(n) - (n / p) * (A @ A.T)
    return spectral_norm(0.5 * (D + D.T))


def eta_gaussian_bound(n, p, t):
    """High-probability bound on eta for i.i.d. N(0, 1/n) entries.

    ``2 sqrt(n/p) + n/p + 4 t / sqrt(p)``, holding with probability at least
    ``1 - 2 exp(-t^2 / 2)`` for ``0 < t <= sqrt(n)`` and ``p >= n`` once ``n``
    is large enough.
    """
    if p < n:
        raise PreconditionError(f"bound requires p >= n, got n={n}, p={p}")
    if not 0 < t <= math.sqrt(n):
        raise PreconditionError(f"bound requires 0 < t <= sqrt(n), got t={t}")
    return 2.0 * math.sqrt(n / p) + n / p + 4.0 * t / math.sqrt(p)


def eta_bound_probability(t):
    return 1.0 - 2.0 * math.exp(-t * t / 2.0)


def _check_eta(eta, upper, name):
    eta = float(eta)
    if not 0.0 <= eta < upper:
        raise PreconditionError(f"{name} needs 0 <= eta < {upper}, got {eta}")
    return eta


def eta1(eta):
    eta = _check_eta(eta, 1.0, "eta1")
    return eta / (1.0 - eta)


def eta3(eta):
    eta = _check_eta(eta, 1.0, "eta3")
    return (1.0 - eta) ** -0.5 - 1.0


def eta2(eta):
    eta = _check_eta(eta, 0.75, "eta2")
    return (2.0 * math.sqrt(1.0 - eta) - 1.0) ** -2 - 1.0


@dataclass(frozen=True)
class WhitenedSystem:
    B: np.ndarray
    W: np.ndarray
    gamma: float
    eta: float
    Q1: np.ndarray

    @property
    def shape(self):
        return self.B.shape


def whiten(A, noise):
    """Build ``B = (Q / gamma)^{-1/2} A`` for ``Q = sigma^2 I + sigma0^2 A A^T``.

    Raises ``PreconditionError`` if ``Q`` is singular, which can only happen
    when ``sigma == 0`` and ``A A^T`` is rank-deficient.
    """
    A = as_matrix(A, "A")
    n, p = A.shape
    gamma = folding_gamma(noise.sigma, noise.sigma0, n, p).gamma
    Q1 = effective_noise_covariance(A, noise) / gamma
    try:
        W = inv_sqrt_sym(Q1)
    except PreconditionError as exc:
        raise PreconditionError(f"noise covariance is singular: {exc}") from exc
    return WhitenedSystem(B=W @ A, W=W, gamma=gamma, eta=compute_eta(A), Q1=Q1)


def apply_whitening(system, y):
    y = as_vector(y, "y")
    if y.shape[0] != system.W.shape[0]:
        raise PreconditionError(f"y has length {y.shape[0]}, expected {system.W.shape[0]}")
    return system.W @ y
