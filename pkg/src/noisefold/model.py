"""Sparse signals and the two forward measurement models.

``measure_standard`` draws ``y = A x + w`` and ``measure_prenoise`` draws
``y = A (x + z) + w``. The pre-noise draw is stored in its equivalent form
``y = A x + v`` with ``v = w + A z``.

Noise streams: for a measurement seed ``seed``, ``w`` comes from sub-stream 1
and ``z`` from sub-stream 2. Both models draw ``w`` the same way, so for the
same seed they share ``w`` exactly, and setting ``sigma0 = 0`` reproduces
the standard model bit for bit.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .linalg import as_matrix
from .rng import RandomStream, derive_seed

W_STREAM = 1
Z_STREAM = 2


@dataclass(frozen=True)
class SparseSignal:
    p: int
    support: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        support = np.asarray(self.support, dtype=np.intp)
        values = np.asarray(self.values, dtype=np.float64)
        if support.shape != values.shape or support.ndim != 1:
            raise PreconditionError("support and values must be 1-D and the same length")
        if support.size > self.p:
            raise PreconditionError("more nonzeros than the ambient dimension")
        if support.size and (support.min() < 0 or support.max() >= self.p):
            raise PreconditionError("support index out of range")
        if np.any(np.diff(support) <= 0):
            raise PreconditionError("support must be sorted and distinct")
        if np.any(values == 0.0):
            raise PreconditionError("amplitudes on the support must be nonzero")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @property
    def s(self):
        return int(self.support.size)

    def to_dense(self):
        x = np.zeros(self.p)
        x[self.support] = self.values
        return x


@dataclass(frozen=True)
class NoiseSpec:
    """Standard deviations of measurement noise (sigma) and signal noise (sigma0)."""

    sigma: float
    sigma0: float

    def __post_init__(self):
        for name in ("sigma", "sigma0"):
            val = float(getattr(self, name))
            if not np.isfinite(val) or val < 0:
                raise PreconditionError(f"{name} must be finite and >= 0, got {val}")
            object.__setattr__(self, name, val)


@dataclass(frozen=True)
class MeasurementDraw:
    y: np.ndarray
    z: np.ndarray
    w: np.ndarray
    v: np.ndarray


def gen_sparse_signal(p, s, amplitude, seed):
    """An s-sparse vector with entries +/-amplitude on a uniformly random support.

    The support is the set of indices holding the ``s`` smallest of ``p``
    uniform keys, which is a uniform draw without replacement.
    """
    p, s = int(p), int(s)
    if not 1 <= s <= p:
        raise PreconditionError(f"need 1 <= s <= p, got s={s}, p={p}")
    if not amplitude > 0:
        raise PreconditionError(f"amplitude must be positive, got {amplitude}")
    stream = RandomStream(seed)
    keys = stream.uniform(p)
    support = np.sort(np.argsort(keys, kind="stable")[:s])
    values = amplitude * stream.signs(s)
    return SparseSignal(p, support, values)


def _dense_signal(x, p):
    if isinstance(x, SparseSignal):
        if x.p != p:
            raise PreconditionError(f"signal dimension {x.p} does not match {p} columns")
        return x.to_dense()
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (p,):
        raise PreconditionError(f"signal shape {x.shape} does not match {p} columns")
    return x


def measure_standard(A, x, noise, seed):
    """``y = A x + w`` with ``w ~ N(0, sigma^2 I)``; ``z = 0`` and ``v = w``."""
    A = as_matrix(A, "A")
    n, p = A.shape
    xd = _dense_signal(x, p)
    w = noise.sigma * RandomStream(derive_seed(seed, W_STREAM)).normal(n)
    v = w
    y = A @ xd + v
    return MeasurementDraw(y=y, z=np.zeros(p), w=w, v=v)


def measure_prenoise(A, x, noise, seed):
    """``y = A (x + z) + w`` with independent ``z ~ N(0, sigma0^2 I)``.

    Computed as ``A x + v`` with ``v = w + A z``.
    """
    A = as_matrix(A, "A")
    n, p = A.shape
    xd = _dense_signal(x, p)
    w = noise.sigma * RandomStream(derive_seed(seed, W_STREAM)).normal(n)
    z = noise.sigma0 * RandomStream(derive_seed(seed, Z_STREAM)).normal(p)
    v = w + A @ z
    y = A @ xd + v
    return MeasurementDraw(y=y, z=z, w=w, v=v)


def effective_noise_covariance(A, noise):
    """Covariance of ``v = w + A z``: ``sigma^2 I + sigma0^2 A A^T``."""
    A = as_matrix(A, "A")
    AAt = A @ A.T
    Q = noise.sigma**2 * np.eye(A.shape[0]) + noise.sigma0**2 * AAt
    return 0.5 * (Q + Q.T)
