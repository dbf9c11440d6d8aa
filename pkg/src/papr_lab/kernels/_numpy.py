"""Pure-numpy kernel backend (batched pocketfft transforms).

Reference implementation of the hot kernels: same contracts and the same
random-sign consumption order as the numba backend, so the two can be
swapped via the env flag and compared in the benchmark.
"""
from __future__ import annotations

import numpy as np

from . import _plans

_CHUNK = 4096  # rows per batched transform in the enumeration kernels


def _peak_abs(rows: np.ndarray) -> np.ndarray:
    return np.sqrt(np.max(rows.real**2 + rows.imag**2, axis=-1))


def select_block(w, grid_size, start_index, shots, tail_signs, paired):
    """Sequential sign selection for one block of scaled weights ``w``.

    Per undecided position j the two candidate conditional-CF estimates are
    sample averages over ``shots`` random completions of the later signs;
    the sign with the lower estimate wins (ties go to +1).
    """
    n = w.size
    m = start_index
    carrier = _plans.carrier_table(n, grid_size)
    signs = np.ones(n, dtype=np.int8)
    width = n - m
    est_plus = np.empty(width)
    est_minus = np.empty(width)
    base = w[:m] @ carrier[:m]
    pos = 0
    for idx, j in enumerate(range(m, n)):
        t = n - j - 1
        crow = w[j] * carrier[j]
        if t == 0:
            up = base + crow
            fp = np.sqrt(np.max(up.real**2 + up.imag**2))
            um = up - 2.0 * crow
            fm = np.sqrt(np.max(um.real**2 + um.imag**2))
        elif paired:
            block = tail_signs[pos : pos + shots * t].reshape(shots, t)
            pos += shots * t
            rows = np.zeros((shots, grid_size), dtype=np.complex128)
            rows[:, j] = w[j]
            rows[:, j + 1 : n] = block * w[j + 1 : n]
            time = np.fft.ifft(rows, axis=1, norm="forward")
            time += base
            fp = float(np.mean(_peak_abs(time)))
            time -= 2.0 * crow
            fm = float(np.mean(_peak_abs(time)))
        else:
            fp = fm = 0.0
            for cand in (1.0, -1.0):
                block = tail_signs[pos : pos + shots * t].reshape(shots, t)
                pos += shots * t
                rows = np.zeros((shots, grid_size), dtype=np.complex128)
                rows[:, j] = cand * w[j]
                rows[:, j + 1 : n] = block * w[j + 1 : n]
                time = np.fft.ifft(rows, axis=1, norm="forward")
                time += base
                val = float(np.mean(_peak_abs(time)))
                if cand > 0:
                    fp = val
                else:
                    fm = val
        est_plus[idx] = fp
        est_minus[idx] = fm
        chosen = 1 if fp <= fm else -1
        signs[j] = chosen
        base = base + chosen * crow
    return signs, est_plus, est_minus


def exact_cf(w, grid_size, prefix):
    """Exact conditional CF: average over all completions of the free signs."""
    n = w.size
    j = prefix.size
    t = n - j
    carrier = _plans.carrier_table(n, grid_size)
    base = (prefix.astype(np.float64) * w[:j]) @ carrier[:j]
    if t == 0:
        return float(np.sqrt(np.max(base.real**2 + base.imag**2)))
    count = 1 << t
    shifts = np.arange(t, dtype=np.uint64)
    total = 0.0
    for start in range(0, count, _CHUNK):
        stop = min(start + _CHUNK, count)
        codes = np.arange(start, stop, dtype=np.uint64)
        bits = (codes[:, None] >> shifts) & 1
        rows = np.zeros((stop - start, grid_size), dtype=np.complex128)
        rows[:, j:n] = (1.0 - 2.0 * bits) * w[j:n]
        time = np.fft.ifft(rows, axis=1, norm="forward")
        time += base
        total += float(np.sum(_peak_abs(time)))
    return total / count


def exhaustive_best(w, grid_size):
    """Global CF minimum over all sign vectors with the first sign fixed +1."""
    n = w.size
    count = 1 << (n - 1)
    shifts = np.arange(n - 1, dtype=np.uint64)
    best_val = np.inf
    best_code = 0
    for start in range(0, count, _CHUNK):
        stop = min(start + _CHUNK, count)
        codes = np.arange(start, stop, dtype=np.uint64)
        bits = (codes[:, None] >> shifts) & 1
        rows = np.zeros((stop - start, grid_size), dtype=np.complex128)
        rows[:, 0] = w[0]
        rows[:, 1:n] = (1.0 - 2.0 * bits) * w[1:n]
        time = np.fft.ifft(rows, axis=1, norm="forward")
        vals = _peak_abs(time)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_code = start + k
    signs = np.ones(n, dtype=np.int8)
    for b in range(n - 1):
        if (best_code >> b) & 1:
            signs[b + 1] = -1
    return signs, best_val
