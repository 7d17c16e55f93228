"""Counter-seeded xoshiro256** streams.

Every Monte Carlo trial owns one stream, identified by ``(master_seed,
stream_id)``.  The 256-bit xoshiro state is filled from a SplitMix64 sequence
whose starting value mixes the two identifiers, so trials can be generated in
any order (or on any worker) and still reproduce bit-for-bit.

Constants are the published ones (Steele/Lea/Flood SplitMix64; Blackman/Vigna
xoshiro256** 1.0), so another language can regenerate the same streams:

    key   = mix64(master_seed XOR mix64(stream_id + GOLDEN))
    state = [splitmix64 outputs 1..4 starting from key]

Doubles are ``(next >> 11) * 2**-53``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

GOLDEN = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1

_U = np.uint64
_GOLDEN = _U(GOLDEN)
_M1 = _U(0xBF58476D1CE4E5B9)
_M2 = _U(0x94D049BB133111EB)
_S30 = _U(30)
_S27 = _U(27)
_S31 = _U(31)
_S11 = _U(11)
_S17 = _U(17)
_FIVE = _U(5)
_NINE = _U(9)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def rotl(x, k):
    return (x << _U(k)) | (x >> _U(64 - k))


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def seed_into(s, master_seed, stream_id):
    """Reset ``s`` (uint64[4]) to the start of stream ``(master_seed, stream_id)``."""
    x = mix64(_U(master_seed) ^ mix64(_U(stream_id) + _GOLDEN))
    for i in range(4):
        x = x + _GOLDEN
        s[i] = mix64(x)


@njit(cache=True)
def seed_state(master_seed, stream_id):
    """Fresh xoshiro256** state for one stream (uint64[4])."""
    s = np.empty(4, dtype=np.uint64)
    seed_into(s, master_seed, stream_id)
    return s


@njit(cache=True, inline="always")
def next_u64(s):
    result = rotl(s[1] * _FIVE, 7) * _NINE
    t = s[1] << _S17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = rotl(s[3], 45)
    return result


@njit(cache=True, inline="always")
def next_double(s):
    return float(next_u64(s) >> _S11) * _INV53


@njit(cache=True)
def _fill_u64(s, out):
    for i in range(out.shape[0]):
        out[i] = next_u64(s)


@njit(cache=True)
def _fill_double(s, out):
    for i in range(out.shape[0]):
        out[i] = next_double(s)


def splitmix64(x: int) -> tuple[int, int]:
    """One SplitMix64 step in pure Python: returns (output, next_state)."""
    x = (x + GOLDEN) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), x


@dataclass(frozen=True)
class RandomStream:
    master_seed: int
    stream_id: int

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) <= MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def state(self) -> np.ndarray:
        return seed_state(np.uint64(self.master_seed), np.uint64(self.stream_id))

    def u64(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.uint64)
        _fill_u64(self.state(), out)
        return out

    def uniform(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.float64)
        _fill_double(self.state(), out)
        return out
