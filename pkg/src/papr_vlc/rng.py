"""Counter-based random streams.

Every OFDM symbol gets its own Philox substream: the key is derived from the
user seed and the symbol index sits in the high word of the 256-bit counter.
Symbol ``i`` therefore sees the same draws no matter how many symbols come
before it, which worker generates it, or in what order.
"""

from __future__ import annotations

import os

import numpy as np

_KEY_MASK = (1 << 64) - 1


class RandomStream:
    """Reproducible substream for one ``(seed, index)`` pair."""

    __slots__ = ("seed", "index", "_bitgen")

    def __init__(self, seed: int, index: int = 0):
        if seed < 0 or index < 0:
            raise ValueError("seed and index must be non-negative")
        self.seed = int(seed)
        self.index = int(index)
        # The counter increments from its low word; one symbol never draws
        # enough blocks to carry into the index word.
        self._bitgen = np.random.Philox(
            key=self.seed & _KEY_MASK, counter=[0, 0, 0, self.index]
        )

    def spawn(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, index)

    def raw(self, size: int) -> np.ndarray:
        """``size`` uniformly distributed 64-bit words."""
        return self._bitgen.random_raw(size)

    def integers(self, high: int, size: int) -> np.ndarray:
        """Uniform integers on ``[0, high)``; ``high`` must be a power of two."""
        if high <= 0 or high & (high - 1):
            raise ValueError(f"high must be a power of two, got {high}")
        return (self.raw(size) & np.uint64(high - 1)).astype(np.int64)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(self._bitgen)


def worker_count() -> int:
    """Worker cap from ``PAPR_VLC_THREADS`` (0 or unset means one per CPU)."""
    raw = os.environ.get("PAPR_VLC_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"PAPR_VLC_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError("PAPR_VLC_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)
