"""
Seedable counter-based random number streams.

Every stochastic operation in bandgate draws from an ``Rng``. A stream is
identified by ``(seed, stream_id)``; ``substream`` derives independent child
streams (one per fold, per seed, per noise source) so that parallel work
reproduces the sequential schedule exactly.
"""

from typing import Optional, Tuple, Union

import numpy as np

StreamKey = Union[int, Tuple[int, ...]]


class Rng:
    """Philox-backed random stream keyed by a seed and a substream path."""

    def __init__(self, seed: int, stream_id: StreamKey = 0):
        if isinstance(stream_id, tuple):
            key = tuple(int(part) for part in stream_id)
        else:
            key = (int(stream_id),)
        self.seed = int(seed)
        self.stream_key = key
        sequence = np.random.SeedSequence(self.seed, spawn_key=key)
        self._generator = np.random.Generator(np.random.Philox(sequence))

    @property
    def stream_id(self) -> Tuple[int, ...]:
        return self.stream_key

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def substream(self, *keys: int) -> "Rng":
        """Independent child stream addressed by extra key components."""
        return Rng(self.seed, self.stream_key + tuple(int(k) for k in keys))

    def normal(self, scale: float = 1.0, size: Optional[Union[int, Tuple[int, ...]]] = None):
        return self._generator.normal(0.0, scale, size)

    def uniform(self, low: float = 0.0, high: float = 1.0,
                size: Optional[Union[int, Tuple[int, ...]]] = None):
        return self._generator.uniform(low, high, size)

    def integers(self, low: int, high: int, size: Optional[Union[int, Tuple[int, ...]]] = None):
        return self._generator.integers(low, high, size)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self._generator.choice(n, size=size, replace=replace)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream_id={self.stream_key})"
