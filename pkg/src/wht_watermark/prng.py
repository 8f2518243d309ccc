"""Counter-based SplitMix64 generator.

Output ``i`` of stream ``seed`` is ``mix(seed + (i + 1) * GAMMA)`` where
``mix`` is the SplitMix64 xorshift-multiply finalizer:

    z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
    z ^= z >> 27;  z *= 0x94D049BB133111EB
    z ^= z >> 31

All arithmetic is modulo 2**64, so streams are reproducible on any
platform and can be generated in vectorized blocks.
"""

from __future__ import annotations

import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
MUL1 = np.uint64(0xBF58476D1CE4E5B9)
MUL2 = np.uint64(0x94D049BB133111EB)

_MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * MUL1
    z = z ^ (z >> np.uint64(27))
    z = z * MUL2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self.counter = 0

    def next_u64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return _mix(np.uint64(self.seed) + idx * GAMMA)

    def uniform(self, n: int) -> np.ndarray:
        """Doubles in [0, 1) from the top 53 bits."""
        return (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def normal(self, n: int) -> np.ndarray:
        """Standard normals by Box-Muller, two uniforms per pair."""
        m = (n + 1) // 2
        u1 = self.uniform(m)
        u2 = self.uniform(m)
        radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 lies in (0, 1]
        theta = 2.0 * np.pi * u2
        return np.concatenate((radius * np.cos(theta), radius * np.sin(theta)))[:n]

    def choice(self, population: int, k: int) -> np.ndarray:
        """k distinct indices from range(population), ascending."""
        if not 0 <= k <= population:
            raise ValueError(f"cannot draw {k} items from {population}")
        keys = self.next_u64(population)
        order = np.argsort(keys, kind="stable")
        return np.sort(order[:k])
