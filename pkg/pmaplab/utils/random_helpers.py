from __future__ import annotations

import zlib
from typing import Sequence, TypeVar

import numpy as np

T = TypeVar("T")

_WORD_LIMIT = 2**63


class SeededStream:
    """Splittable seeded generator.

    Every stream is a numpy ``Generator`` fed by a ``SeedSequence``; child
    streams are derived from labels, so ``stream("shift")`` is reproducible no
    matter how many draws other streams have made.
    """

    def __init__(self, seed: int, spawn_key: Sequence[int] = ()) -> None:
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self._generator = np.random.default_rng(sequence)

    def stream(self, label: str | int) -> "SeededStream":
        key = label if isinstance(label, int) else zlib.crc32(str(label).encode("utf-8"))
        return SeededStream(self.seed, (*self.spawn_key, key))

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)``; arbitrary precision."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound < _WORD_LIMIT:
            return int(self._generator.integers(0, bound))
        nbytes = (bound.bit_length() + 7) // 8
        limit = (256**nbytes // bound) * bound
        while True:
            draw = int.from_bytes(self._generator.bytes(nbytes), "big")
            if draw < limit:
                return draw % bound

    def between(self, low: int, high: int) -> int:
        """Uniform integer in the closed range ``[low, high]``."""
        return low + self.below(high - low + 1)

    def choice(self, items: Sequence[T]) -> T:
        return items[self.below(len(items))]

    def shuffled(self, items: Sequence[T]) -> list[T]:
        order = list(items)
        for i in range(len(order) - 1, 0, -1):
            j = self.below(i + 1)
            order[i], order[j] = order[j], order[i]
        return order


def seeded_stream(seed: int, label: str | None = None) -> SeededStream:
    root = SeededStream(seed)
    return root.stream(label) if label else root
