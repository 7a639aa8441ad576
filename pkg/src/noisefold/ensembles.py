"""Random measurement-matrix families.

All generators are pure functions of ``(n, p, seed)``: entries are filled in
row-major order from a single :class:`~noisefold.rng.RandomStream`.
"""

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .linalg import householder_qr
from .rng import RandomStream, check_seed, derive_seed

FAMILIES = ("gaussian", "bernoulli", "sphere-columns", "concat-orthobases")


def _check_dims(n, p):
    if int(n) < 1 or int(p) < 1:
        raise PreconditionError(f"dimensions must be positive, got n={n}, p={p}")
    return int(n), int(p)


def gen_gaussian(n, p, seed):
    """i.i.d. N(0, 1/n) entries."""
    n, p = _check_dims(n, p)
    z = RandomStream(seed).normal(n * p)
    return z.reshape(n, p) / np.sqrt(n)


def gen_bernoulli(n, p, seed):
    """i.i.d. entries equal to +1/sqrt(n) or -1/sqrt(n) with probability 1/2."""
    n, p = _check_dims(n, p)
    return RandomStream(seed).signs(n * p).reshape(n, p) / np.sqrt(n)


def gen_sphere_columns(n, p, seed):
    """Columns drawn independently and uniformly from the unit sphere in R^n.

    Each column is a standard Gaussian vector divided by its norm. A column
    that comes out exactly zero is redrawn from the same stream.
    """
    n, p = _check_dims(n, p)
    stream = RandomStream(seed)
    A = stream.normal(n * p).reshape(n, p)
    norms = np.linalg.norm(A, axis=0)
    for j in np.flatnonzero(norms == 0.0):
        col = np.zeros(n)
        while not np.any(col):
            col = stream.normal(n)
        A[:, j] = col
        norms[j] = np.linalg.norm(col)
    return A / norms


def gen_concat_orthobases(n, r, seed):
    """``[A_1 ... A_r]``, each block an orthogonal n x n matrix.

    Block k is the Q factor (with non-negative diagonal of R) of an n x n
    standard Gaussian draw, so ``A @ A.T == r * I`` up to round-off.
    """
    n, r = _check_dims(n, r)
    stream = RandomStream(seed)
    blocks = []
    for _ in range(r):
        G = stream.normal(n * n).reshape(n, n)
        Q, _ = householder_qr(G)
        blocks.append(Q)
    return np.hstack(blocks)


@dataclass(frozen=True)
class EnsembleSpec:
    """Recipe for a reproducible measurement matrix."""

    family: str
    n: int
    p: int
    seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise PreconditionError(
                f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}"
            )
        if self.n < 1:
            raise PreconditionError(f"n must be >= 1, got {self.n}")
        if self.p < self.n:
            raise PreconditionError(f"p must be >= n, got n={self.n}, p={self.p}")
        if self.family == "concat-orthobases" and self.p % self.n:
            raise PreconditionError(
                f"concat-orthobases needs p to be a multiple of n, got n={self.n}, p={self.p}"
            )
        check_seed(self.seed)

    def generate(self):
        return generate(self)

    def stream(self, index):
        """Same family and size, seeded from sub-stream ``index`` of this seed."""
        return EnsembleSpec(self.family, self.n, self.p, derive_seed(self.seed, index))


def generate(spec):
    if spec.family == "gaussian":
        return gen_gaussian(spec.n, spec.p, spec.seed)
    if spec.family == "bernoulli":
        return gen_bernoulli(spec.n, spec.p, spec.seed)
    if spec.family == "sphere-columns":
        return gen_sphere_columns(spec.n, spec.p, spec.seed)
    return gen_concat_orthobases(spec.n, spec.p // spec.n, spec.seed)
