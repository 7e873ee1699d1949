"""Counter-based random streams.

Every logical consumer (node, adversary) owns a stream identified by
``(seed, stream_id)``. Draw ``k`` of a stream is a pure function of
``(key, k)``: a SplitMix64 generator whose state after ``k + 1`` steps is
``key + (k + 1) * GOLDEN``. Streams therefore do not depend on how many other
entities exist or in which order they are visited.

The scalar helpers here are plain Python ints masked to 64 bits; the numba
kernel carries a uint64 copy of the same arithmetic and the test-suite checks
the two agree bit for bit.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

# Stream id reserved for the jammer, far away from node ids 0..n-1.
ADVERSARY_STREAM = 1 << 63

_INV_2_53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream_id: int) -> int:
    return mix64(mix64(seed & MASK64) ^ mix64((stream_id * GOLDEN + MIX2) & MASK64))


def raw_at(key: int, counter: int) -> int:
    return mix64(key + (counter + 1) * GOLDEN)


def uniform_at(key: int, counter: int) -> float:
    """Uniform double in [0, 1) with 53 random bits."""
    return (raw_at(key, counter) >> 11) * _INV_2_53


def derive_seed(*parts: int) -> int:
    """Hash an ordered tuple of integers into a 64-bit seed."""
    h = 0x243F6A8885A308D3
    for part in parts:
        h = mix64(h ^ mix64((part * GOLDEN) & MASK64))
    return h


class Stream:
    """Sequential view over one counter-based stream."""

    def __init__(self, seed: int, stream_id: int):
        self.seed = seed
        self.stream_id = stream_id
        self.key = stream_key(seed, stream_id)
        self.counter = 0

    def at(self, counter: int) -> float:
        return uniform_at(self.key, counter)

    def random(self) -> float:
        u = uniform_at(self.key, self.counter)
        self.counter += 1
        return u

    def integer(self, upper: int) -> int:
        """Uniform integer in ``[0, upper]`` (inclusive)."""
        return int(self.random() * (upper + 1))

    def __iter__(self):
        return self

    def __next__(self) -> float:
        return self.random()


def rng_stream(seed: int, stream_id: int) -> Stream:
    return Stream(seed, stream_id)
