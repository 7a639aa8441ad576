"""Seeded random streams.

Each stream is a Philox-4x64 counter-based generator (numpy's bit generator,
which follows the Random123 reference) keyed directly by a 64-bit seed with
the counter starting at zero. Only the raw 64-bit outputs are used; uniforms
and normals are derived here so the numbers do not depend on numpy's
``Generator`` method implementations.

Sub-seeds come from SplitMix64: ``derive_seed(master, i)`` is the ``i``-th
(0-based) output of a SplitMix64 sequence started at ``master``.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_TWO_POW_M53 = 2.0**-53


def mix64(x):
    """SplitMix64 finaliser (Stafford variant 13)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def check_seed(seed):
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def derive_seed(master, *path):
    """Sub-seed for a stream index (or a path of nested indices)."""
    h = check_seed(master)
    for index in path:
        if index < 0:
            raise ValueError("stream index must be non-negative")
        h = mix64(h + (int(index) + 1) * GOLDEN_GAMMA)
    return h


class RandomStream:
    """A single reproducible stream of uniforms, normals and signs."""

    def __init__(self, seed):
        self.seed = check_seed(seed)
        self._bitgen = np.random.Philox(key=self.seed)

    def raw(self, size):
        return self._bitgen.random_raw(int(size))

    def uniform(self, size):
        """Uniforms on [0, 1) with 53 random bits each."""
        return (self.raw(size) >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53

    def normal(self, size):
        """Standard normals by the Box-Muller transform.

        Consumes two raw words per pair of outputs; for odd ``size`` the
        second value of the last pair is discarded.
        """
        size = int(size)
        pairs = (size + 1) // 2
        r = self.raw(2 * pairs).reshape(pairs, 2) >> np.uint64(11)
        u1 = (r[:, 0].astype(np.float64) + 1.0) * _TWO_POW_M53  # (0, 1]
        u2 = r[:, 1].astype(np.float64) * _TWO_POW_M53
        radius = np.sqrt(-2.0 * np.log(u1))
        angle = 2.0 * np.pi * u2
        out = np.empty((pairs, 2))
        out[:, 0] = radius * np.cos(angle)
        out[:, 1] = radius * np.sin(angle)
        return out.reshape(-1)[:size]

    def signs(self, size):
        """Equiprobable +1.0 / -1.0 from the top bit of each raw word."""
        top = self.raw(size) >> np.uint64(63)
        return np.where(top == 1, 1.0, -1.0)
