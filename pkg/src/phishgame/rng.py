"""Deterministic, splittable pseudo-random generator.

All randomness in the package flows through :class:`SplitMix64` so that
corpora, stage plans and bot runs are reproducible from explicit seeds
across platforms and Python versions (``random.Random`` guarantees
stability, but a self-contained 64-bit generator keeps the algorithm
nameable and portable to other implementations of the same file formats).

The generator is the SplitMix64 sequence: state advances by the golden
ratio increment 0x9E3779B97F4A7C15 and outputs a finalizing mix of the
state.  Substreams are derived by hashing a parent seed together with a
textual label (BLAKE2b, first 8 bytes), so independent components never
share a stream by accident.
"""

from __future__ import annotations

import hashlib
from typing import Sequence, TypeVar

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")


def derive_seed(seed: int, *labels: object) -> int:
    """Derive a 64-bit child seed from a parent seed and labels."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed & _MASK).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest(), "big")


class SplitMix64:
    """SplitMix64 stream with convenience sampling helpers."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def split(self, *labels: object) -> "SplitMix64":
        """Independent substream keyed by labels (does not advance self)."""
        return SplitMix64(derive_seed(self._state, *labels))

    def random(self) -> float:
        """Uniform float in [0, 1)."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n). Uses rejection to avoid modulo bias."""
        if n <= 0:
            raise ValueError("randrange() arg must be positive")
        limit = (_MASK + 1) - ((_MASK + 1) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.randrange(hi - lo + 1)

    def choice(self, seq: Sequence[T]) -> T:
        if not seq:
            raise IndexError("choice() from empty sequence")
        return seq[self.randrange(len(seq))]

    def weighted_choice(self, items: Sequence[T], weights: Sequence[float]) -> T:
        total = float(sum(weights))
        if total <= 0.0:
            raise ValueError("weighted_choice() needs a positive total weight")
        r = self.random() * total
        acc = 0.0
        for item, w in zip(items, weights):
            acc += w
            if r < acc:
                return item
        return items[-1]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, seq: Sequence[T], k: int) -> list[T]:
        """k distinct elements, order randomized."""
        if k > len(seq):
            raise ValueError("sample() larger than population")
        pool = list(seq)
        self.shuffle(pool)
        return pool[:k]
