"""Shared read-only lookup tables for both kernel backends."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..waveform import carrier_table

__all__ = ["carrier_table", "fft_plan", "is_pow2"]


def is_pow2(x: int) -> bool:
    return x > 0 and (x & (x - 1)) == 0


@lru_cache(maxsize=16)
def fft_plan(grid_size: int):
    """Twiddle factors and bit-reversal permutation for a power-of-two grid.

    Twiddles use the positive-exponent convention so the transform is the
    unnormalized inverse DFT (matches ifft(..., norm="forward")).
    Returns empty arrays for non power-of-two sizes; callers fall back to
    direct summation.
    """
    if not is_pow2(grid_size):
        empty_c = np.empty(0, dtype=np.complex128)
        empty_i = np.empty(0, dtype=np.int64)
        return empty_c, empty_i
    twid = np.exp(2j * np.pi * np.arange(grid_size // 2) / grid_size)
    bits = grid_size.bit_length() - 1
    idx = np.arange(grid_size, dtype=np.int64)
    brev = np.zeros(grid_size, dtype=np.int64)
    for _ in range(bits):
        brev = (brev << 1) | (idx & 1)
        idx >>= 1
    twid.flags.writeable = False
    brev.flags.writeable = False
    return twid, brev
