"""Deterministic random number generation for all stochastic components.

The generator is xoshiro256** (Blackman & Vigna), a publicly specified
64-bit generator with pure integer state transitions, so identical seeds
give identical streams on every platform. It is fixed for the lifetime of
this repository; the compiled kernels re-implement the same algorithm and
are required (and tested) to consume the stream identically.

Seeding: a 64-bit seed is expanded into the four 64-bit state words by
taking four successive outputs of splitmix64 started at the seed.

Derived streams: ``derive_seed(base, *indices)`` folds integer indices
(e.g. gamma index, replicate index) into a base seed through the
splitmix64 finalizer, giving decorrelated, reproducible per-task seeds.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15

_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    """splitmix64 output finalizer (avalanching bijection on 64 bits)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def splitmix64_stream(seed: int, count: int) -> list[int]:
    """First `count` outputs of splitmix64 with initial state `seed`."""
    out = []
    x = seed & MASK64
    for _ in range(count):
        x = (x + GOLDEN) & MASK64
        out.append(mix64(x))
    return out


def derive_seed(base: int, *indices: int) -> int:
    """Fold task indices into `base`, one mix64 round per index.

    Used to hand out decorrelated seeds across sweep cells and replicates
    without any shared-stream bookkeeping.
    """
    h = base & MASK64
    for ix in indices:
        h = mix64((h + GOLDEN * (ix + 1)) & MASK64)
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** with splitmix64 seeding.

    This is the reference implementation; `_kernels._cy` carries a C twin.
    State is exposed via `get_state`/`set_state` so a stream can be handed
    to a kernel and resumed afterwards.
    """

    def __init__(self, seed: int):
        s = splitmix64_stream(seed, 4)
        if not any(s):  # cannot happen from splitmix64, but the all-zero state is invalid
            s[0] = GOLDEN
        self._s = s

    def get_state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)

    def set_state(self, state) -> None:
        s = [int(w) & MASK64 for w in state]
        if len(s) != 4 or not any(s):
            raise ValueError("state must be four 64-bit words, not all zero")
        self._s = s

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def next_double(self) -> float:
        # 53-bit mantissa convention: (x >> 11) * 2^-53, uniform on [0, 1)
        return (self.next_u64() >> 11) * 1.1102230246251565e-16

    def next_below(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection (threshold = 2^64 mod n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = ((1 << 64) - n) % n
        while True:
            r = self.next_u64()
            if r >= threshold:
                return r % n
