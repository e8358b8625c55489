"""Counter-based uniforms for the compiled simulators.

Every trial gets a key derived from ``(seed, trial)`` and reads its
uniforms by counter, so the value of a trial never depends on which thread
ran it or in what order. The mixer is the SplitMix64 finalizer.
"""

from __future__ import annotations

import math

import numba as nb
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0

# Largest value -log1p(-u) can take for u produced by ``uniform``.
MAX_EXP_DRAW = 54.0 * math.log(2.0)


@nb.njit(inline="always", cache=True)
def mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@nb.njit(inline="always", cache=True)
def trial_key(seed_key, trial):
    return mix64(np.uint64(seed_key) ^ mix64(np.uint64(trial)))


@nb.njit(inline="always", cache=True)
def uniform(key, ctr):
    """Uniform in ``[2**-54, 1 - 2**-54]``; never exactly 0 or 1."""
    x = mix64(np.uint64(key) + (np.uint64(ctr) + np.uint64(1)) * _GOLDEN)
    return (np.float64(x >> np.uint64(11)) + 0.5) * _INV53


def seed_key(seed: int) -> np.uint64:
    """Key for a user seed; any Python int is reduced modulo 2**64."""
    return np.uint64(mix64(np.uint64(int(seed) % (1 << 64))))
