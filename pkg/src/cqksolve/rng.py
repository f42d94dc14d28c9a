"""Deterministic Xoshiro256++ stream with fixed, documented semantics.

Benchmark instances must be bit-reproducible across platforms and
implementations, so the generator is pinned down completely:

* state: four 64-bit words seeded from a single 64-bit seed by applying
  SplitMix64 four times;
* raw stream: standard xoshiro256++ (rotl(s0 + s3, 23) + s0 output,
  the usual 17/45 shift/rotate state transition);
* uniform in [0, 1): the top 53 bits, ``(x >> 11) * 2**-53``;
* uniform in [p, q): ``p + u * (q - p)``;
* standard normal: Box-Muller from two consecutive uniforms per value,
  ``sqrt(-2 ln u1) * cos(2 pi u2)`` with ``u1 = ((x >> 11) + 1) * 2**-53``
  so the log argument is never zero; the sine partner is discarded, so
  each normal consumes exactly two raw draws.

The sequential kernels are numba-compiled; the state array is advanced
in place.
"""

import numpy as np
from numba import njit

__all__ = ["Xoshiro256pp"]

_U64 = np.uint64


@njit(cache=True)
def _splitmix64(z):
    z = (z + _U64(0x9E3779B97F4A7C15)) & _U64(0xFFFFFFFFFFFFFFFF)
    out = z
    out = (out ^ (out >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    out = (out ^ (out >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z, out ^ (out >> _U64(31))


@njit(cache=True)
def _seed_state(seed):
    s = np.empty(4, dtype=np.uint64)
    z = _U64(seed)
    for i in range(4):
        z, s[i] = _splitmix64(z)
    return s


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << _U64(k)) | (x >> _U64(64 - k))


@njit(cache=True, inline="always")
def _next_u64(s):
    result = _rotl(s[0] + s[3], 23) + s[0]
    t = s[1] << _U64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(cache=True)
def _fill_uniform01(s, out):
    scale = 2.0 ** -53
    for i in range(out.shape[0]):
        out[i] = float(_next_u64(s) >> _U64(11)) * scale


@njit(cache=True)
def _fill_normal(s, out):
    scale = 2.0 ** -53
    twopi = 2.0 * np.pi
    for i in range(out.shape[0]):
        u1 = float((_next_u64(s) >> _U64(11)) + _U64(1)) * scale
        u2 = float(_next_u64(s) >> _U64(11)) * scale
        out[i] = np.sqrt(-2.0 * np.log(u1)) * np.cos(twopi * u2)


class Xoshiro256pp:
    """Seeded xoshiro256++ stream producing uniform and normal arrays."""

    def __init__(self, seed):
        self._state = _seed_state(np.uint64(seed))

    def uniform01(self, size):
        out = np.empty(size, dtype=np.float64)
        _fill_uniform01(self._state, out)
        return out

    def uniform(self, lo, hi, size):
        return lo + self.uniform01(size) * (hi - lo)

    def normal(self, size, std=1.0):
        out = np.empty(size, dtype=np.float64)
        _fill_normal(self._state, out)
        if std != 1.0:
            out *= std
        return out

    def integers(self, upper, size):
        """Uniform ints in [0, upper) by rejection-free scaling of u64 draws."""
        u = self.uniform01(size)
        return np.minimum((u * upper).astype(np.int64), upper - 1)
