"""Philox4x32-10 counter-based generator (Salmon et al., SC'11).

Every draw is a pure function of a 128-bit counter and a 64-bit key, so each
Monte Carlo path owns an independent stream addressed by ``(seed, path, step)``
and results do not depend on how paths are scheduled across threads.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

__all__ = ["philox4x32", "philox_block", "uniform_pair", "normal_pair"]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK = np.uint64(0xFFFFFFFF)
_SHIFT = np.uint64(32)
_TO_53 = np.uint64(11)
_TWO_M53 = 2.0**-53


@njit(nogil=True, cache=True)
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Ten Philox rounds on 32-bit words held in uint64 registers."""
    c0 = np.uint64(c0) & _MASK
    c1 = np.uint64(c1) & _MASK
    c2 = np.uint64(c2) & _MASK
    c3 = np.uint64(c3) & _MASK
    k0 = np.uint64(k0) & _MASK
    k1 = np.uint64(k1) & _MASK
    for i in range(10):
        if i > 0:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0, lo0 = p0 >> _SHIFT, p0 & _MASK
        hi1, lo1 = p1 >> _SHIFT, p1 & _MASK
        c0, c1, c2, c3 = hi1 ^ c1 ^ k0, lo1, hi0 ^ c3 ^ k1, lo0
    return c0, c1, c2, c3


@njit(nogil=True, cache=True)
def philox_block(seed, path, step):
    """Four words for ``step`` of stream ``path``; key is the 64-bit seed."""
    seed = np.uint64(seed)
    path = np.uint64(path)
    step = np.uint64(step)
    return philox4x32(
        step & _MASK, step >> _SHIFT, path & _MASK, path >> _SHIFT,
        seed & _MASK, seed >> _SHIFT,
    )


@njit(nogil=True, cache=True)
def uniform_pair(seed, path, step):
    """Two uniforms in the open interval (0, 1) with 53 random bits each."""
    w0, w1, w2, w3 = philox_block(seed, path, step)
    a = ((w0 << _SHIFT) | w1) >> _TO_53
    b = ((w2 << _SHIFT) | w3) >> _TO_53
    return (float(a) + 0.5) * _TWO_M53, (float(b) + 0.5) * _TWO_M53


@njit(nogil=True, cache=True)
def normal_pair(seed, path, step):
    """Two independent standard normals by Box-Muller."""
    u1, u2 = uniform_pair(seed, path, step)
    rad = math.sqrt(-2.0 * math.log(u1))
    ang = 2.0 * math.pi * u2
    return rad * math.cos(ang), rad * math.sin(ang)
