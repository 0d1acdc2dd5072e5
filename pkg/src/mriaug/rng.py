"""Counter-based seeded randomness with derivable per-sample streams.

Built on the Philox 4x64 generator, which is keyed rather than stateful:
identical (seed, stream) pairs reproduce identical draw sequences on any
platform and under any thread schedule. Batch parallelism derives one
stream per sample index, so results never depend on execution order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    """SplitMix64 finalizer; the standard 64-bit avalanche mix."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_stream(base_seed: int, index: int) -> int:
    """Stable 64-bit stream id for sample `index` under `base_seed`."""
    return _splitmix64((base_seed & _MASK64) ^ _splitmix64(index & _MASK64))


class SeededRng:
    """One deterministic draw stream, addressed by (seed, stream).

    Instances are cheap and not shareable across concurrent consumers:
    create one per sample stream. All draw methods delegate to a
    numpy Generator over Philox keyed with the two 64-bit words.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def child(self, index: int) -> "SeededRng":
        """Independent stream for sample `index` (order-independent)."""
        return SeededRng(self.seed, derive_stream(self.stream, index))

    def uniform(self, lo: float, hi: float, size=None):
        return self._gen.uniform(lo, hi, size=size)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        return int(self._gen.integers(lo, hi, endpoint=True))

    def normal(self, sigma: float, size=None):
        return self._gen.standard_normal(size=size) * sigma

    def choice3(self) -> int:
        """Uniform axis index from {0, 1, 2}."""
        return int(self._gen.integers(0, 3))

    def seed64(self) -> int:
        """Fresh 64-bit value, e.g. to key a recorded sub-stream."""
        return int(self._gen.integers(0, _MASK64, dtype=np.uint64, endpoint=True))
