"""Reproducible random streams.

Every random draw in the package comes from xoshiro256** (Blackman & Vigna,
2018), a 64-bit xorshift-family generator whose output is defined purely in
terms of 64-bit integer arithmetic, so a seed produces the same stream on
every platform.  Generators are seeded by expanding a 64-bit seed with
SplitMix64, as recommended by the xoshiro authors.

Derived variates:

* uniform:      ``((x >> 11) + 1) * 2**-53``, which lies in (0, 1].
* exponential:  ``-log(u)`` for one uniform u.
* normal:       Box-Muller cosine branch, ``sqrt(-2 log u1) * cos(2 pi u2)``,
                consuming exactly two uniforms (the sine branch is discarded).

Per-replication seeds are ``mix_seed(master_seed, index)`` where::

    mix_seed(s, i) = fmix(s ^ fmix((i + 1) * 0x9E3779B97F4A7C15))

and ``fmix`` is the SplitMix64 finalizer (a 64-bit avalanche function).
The draw primitives are numba-compiled and shared by the pure-Python
reference path and the compiled Monte-Carlo kernel.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U1 = np.uint64(1)
_TWO_PI = 2.0 * math.pi
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, nogil=True)
def fmix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, nogil=True)
def mix_seed_u64(seed, index):
    return fmix64(seed ^ fmix64((index + _U1) * GOLDEN_GAMMA))


@njit(cache=True, nogil=True)
def seed_state(seed, state):
    """Fill a length-4 uint64 ``state`` from ``seed`` via SplitMix64."""
    x = seed
    for i in range(4):
        x = x + GOLDEN_GAMMA
        state[i] = fmix64(x)


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True, nogil=True)
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << np.uint64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(cache=True, nogil=True)
def next_uniform(s):
    return float((next_u64(s) >> np.uint64(11)) + _U1) * _INV_2_53


@njit(cache=True, nogil=True)
def next_exponential(s):
    return -math.log(next_uniform(s))


@njit(cache=True, nogil=True)
def next_normal(s):
    u1 = next_uniform(s)
    u2 = next_uniform(s)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


def mix_seed(seed: int, index: int) -> int:
    """Derive an independent 64-bit child seed from ``(seed, index)``."""
    return int(mix_seed_u64(np.uint64(seed & MASK64), np.uint64(index & MASK64)))


class Stream:
    """A xoshiro256** stream exposing the variates the simulators consume."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self.state = np.zeros(4, dtype=np.uint64)
        seed_state(np.uint64(self.seed), self.state)

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def uniform(self) -> float:
        return next_uniform(self.state)

    def exponential(self) -> float:
        return next_exponential(self.state)

    def normal(self) -> float:
        return next_normal(self.state)

    def __repr__(self) -> str:
        return f"Stream(seed={self.seed:#018x})"
