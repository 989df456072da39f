"""Deterministic pseudo-random primitives.

Everything stochastic in the simulator flows through splitmix64 so that a
single u64 seed pins down worlds, texture packs, and policy exploration
bit-for-bit across runs and platforms.
"""
from __future__ import annotations

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15  # splitmix64 state increment

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def splitmix64(x: int) -> int:
    """One splitmix64 output step for state ``x`` (stateless mix)."""
    z = (x + GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Sequential splitmix64 stream.

    The internal state advances by the golden-ratio increment per draw, so
    draw ``i`` equals ``splitmix64(seed + i * GOLDEN)``; ``fill`` exploits
    this counter form to produce the identical sequence vectorised.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        # 53 high-quality bits -> [0, 1)
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def next_below(self, n: int) -> int:
        """Uniform draw in [0, n). Modulo bias is negligible for desk-scale n."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def fill(self, n: int) -> np.ndarray:
        """Vectorised equivalent of ``[next_u64() for _ in range(n)]``."""
        if n == 0:
            return np.empty(0, dtype=np.uint64)
        idx = np.arange(1, n + 1, dtype=np.uint64)
        z = (np.uint64(self.state) + idx * np.uint64(GOLDEN)).astype(np.uint64)
        self.state = int(z[-1])
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


# Domain separator keeping actor randomness independent of the world stream
# that shares the episode seed.
ACTOR_STREAM_SALT = 0x6C078965D1F34BF2


def actor_stream(episode_seed: int) -> SplitMix64:
    """The RNG an acting policy draws from during one episode.

    Both live evaluation and demonstration recording derive the stream this
    way, so a stochastic policy takes identical decisions in either path and
    recorded scores match evaluated ones."""
    return SplitMix64(splitmix64(episode_seed ^ ACTOR_STREAM_SALT))


def _fnv1a64_py(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & MASK64
    return h


try:  # pragma: no cover - exercised indirectly
    from numba import njit

    @njit(cache=True)
    def _fnv1a64_jit(buf):  # type: ignore[no-untyped-def]
        h = np.uint64(0xCBF29CE484222325)
        prime = np.uint64(0x100000001B3)
        for i in range(buf.shape[0]):
            h = np.uint64(h ^ np.uint64(buf[i]))
            h = np.uint64(h * prime)
        return h

    def fnv1a64(data: bytes) -> int:
        """FNV-1a 64-bit hash of ``data``."""
        return int(_fnv1a64_jit(np.frombuffer(data, dtype=np.uint8)))

except Exception:  # pragma: no cover - numba unavailable

    def fnv1a64(data: bytes) -> int:
        """FNV-1a 64-bit hash of ``data`` (pure-python fallback)."""
        return _fnv1a64_py(data)
