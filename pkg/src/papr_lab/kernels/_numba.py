"""Numba kernel backend.

The selection kernel fuses tail synthesis (radix-2 transform on
power-of-two grids, direct summation otherwise), the paired candidate
evaluation and the peak scan into one nogil function, avoiding the large
per-step temporaries the numpy backend allocates.
"""
from __future__ import annotations

import numpy as np
from numba import njit

from . import _plans


@njit(cache=True, nogil=True, inline="always")
def _inv_dft_pow2(vec, out, twid, brev):
    # unnormalized inverse DFT, decimation in time; out <- transform(vec)
    size = vec.shape[0]
    for i in range(size):
        out[i] = vec[brev[i]]
    span = 2
    while span <= size:
        half = span // 2
        step = size // span
        for start in range(0, size, span):
            for k in range(half):
                tw = twid[k * step]
                t = tw * out[start + half + k]
                out[start + half + k] = out[start + k] - t
                out[start + k] = out[start + k] + t
        span *= 2


@njit(cache=True, nogil=True)
def _select_block(w, carrier, twid, brev, start_index, shots, tail_signs, paired):
    n = w.shape[0]
    grid = carrier.shape[1]
    use_fft = twid.shape[0] > 0
    m = start_index
    signs = np.ones(n, dtype=np.int8)
    width = n - m
    est_plus = np.empty(width, dtype=np.float64)
    est_minus = np.empty(width, dtype=np.float64)

    base = np.zeros(grid, dtype=np.complex128)
    for k in range(m):
        wk = w[k]
        for i in range(grid):
            base[i] += wk * carrier[k, i]

    vec = np.empty(grid, dtype=np.complex128)
    time = np.empty(grid, dtype=np.complex128)
    cand2 = np.empty(grid, dtype=np.complex128)
    pos = 0
    for j in range(m, n):
        t = n - j - 1
        wj = w[j]
        for i in range(grid):
            cand2[i] = 2.0 * wj * carrier[j, i]
        if t == 0:
            peak_p = 0.0
            peak_m = 0.0
            for i in range(grid):
                up = base[i] + 0.5 * cand2[i]
                um = up - cand2[i]
                pp = up.real * up.real + up.imag * up.imag
                pm = um.real * um.real + um.imag * um.imag
                if pp > peak_p:
                    peak_p = pp
                if pm > peak_m:
                    peak_m = pm
            fp = np.sqrt(peak_p)
            fm = np.sqrt(peak_m)
        else:
            passes = 1 if paired else 2
            fp = 0.0
            fm = 0.0
            for p in range(passes):
                cand = 1.0 if (paired or p == 0) else -1.0
                acc_p = 0.0
                acc_m = 0.0
                for s in range(shots):
                    row = pos + s * t
                    if use_fft:
                        for i in range(grid):
                            vec[i] = 0.0
                        vec[j] = cand * wj
                        for k in range(t):
                            kk = j + 1 + k
                            if tail_signs[row + k] > 0:
                                vec[kk] = w[kk]
                            else:
                                vec[kk] = -w[kk]
                        _inv_dft_pow2(vec, time, twid, brev)
                    else:
                        for i in range(grid):
                            time[i] = cand * wj * carrier[j, i]
                        for k in range(t):
                            kk = j + 1 + k
                            wk = w[kk] if tail_signs[row + k] > 0 else -w[kk]
                            for i in range(grid):
                                time[i] += wk * carrier[kk, i]
                    if paired:
                        peak_p = 0.0
                        peak_m = 0.0
                        for i in range(grid):
                            up = base[i] + time[i]
                            um = up - cand2[i]
                            pp = up.real * up.real + up.imag * up.imag
                            pm = um.real * um.real + um.imag * um.imag
                            if pp > peak_p:
                                peak_p = pp
                            if pm > peak_m:
                                peak_m = pm
                        acc_p += np.sqrt(peak_p)
                        acc_m += np.sqrt(peak_m)
                    else:
                        peak = 0.0
                        for i in range(grid):
                            u = base[i] + time[i]
                            pw = u.real * u.real + u.imag * u.imag
                            if pw > peak:
                                peak = pw
                        if cand > 0:
                            acc_p += np.sqrt(peak)
                        else:
                            acc_m += np.sqrt(peak)
                pos += shots * t
                if paired:
                    fp = acc_p / shots
                    fm = acc_m / shots
                elif cand > 0:
                    fp = acc_p / shots
                else:
                    fm = acc_m / shots
        idx = j - m
        est_plus[idx] = fp
        est_minus[idx] = fm
        chosen = np.int8(1) if fp <= fm else np.int8(-1)
        signs[j] = chosen
        sgn = 0.5 if chosen > 0 else -0.5
        for i in range(grid):
            base[i] += sgn * cand2[i]
    return signs, est_plus, est_minus


@njit(cache=True, nogil=True)
def _exact_cf(w, carrier, prefix):
    # Gray-code walk over all completions; each neighbour differs in one sign.
    n = w.shape[0]
    grid = carrier.shape[1]
    j = prefix.shape[0]
    t = n - j
    sig = np.zeros(grid, dtype=np.complex128)
    for k in range(j):
        wk = w[k] if prefix[k] > 0 else -w[k]
        for i in range(grid):
            sig[i] += wk * carrier[k, i]
    cur = np.ones(t, dtype=np.int8)
    for k in range(t):
        wk = w[j + k]
        for i in range(grid):
            sig[i] += wk * carrier[j + k, i]
    peak = 0.0
    for i in range(grid):
        pw = sig[i].real * sig[i].real + sig[i].imag * sig[i].imag
        if pw > peak:
            peak = pw
    total = np.sqrt(peak)
    if t == 0:
        return total
    count = 1 << t
    for g in range(1, count):
        flip = 0
        gg = g
        while gg & 1 == 0:
            gg >>= 1
            flip += 1
        k = j + flip
        delta = -2.0 * (w[k] if cur[flip] > 0 else -w[k])
        cur[flip] = -cur[flip]
        peak = 0.0
        for i in range(grid):
            sig[i] += delta * carrier[k, i]
            pw = sig[i].real * sig[i].real + sig[i].imag * sig[i].imag
            if pw > peak:
                peak = pw
        total += np.sqrt(peak)
    return total / count


@njit(cache=True, nogil=True)
def _exhaustive(w, carrier):
    n = w.shape[0]
    grid = carrier.shape[1]
    t = n - 1
    sig = np.zeros(grid, dtype=np.complex128)
    for k in range(n):
        wk = w[k]
        for i in range(grid):
            sig[i] += wk * carrier[k, i]
    cur = np.ones(n, dtype=np.int8)
    best = np.ones(n, dtype=np.int8)
    peak = 0.0
    for i in range(grid):
        pw = sig[i].real * sig[i].real + sig[i].imag * sig[i].imag
        if pw > peak:
            peak = pw
    best_val = np.sqrt(peak)
    count = 1 << t
    for g in range(1, count):
        flip = 0
        gg = g
        while gg & 1 == 0:
            gg >>= 1
            flip += 1
        k = 1 + flip
        delta = -2.0 * (w[k] if cur[k] > 0 else -w[k])
        cur[k] = -cur[k]
        peak = 0.0
        for i in range(grid):
            sig[i] += delta * carrier[k, i]
            pw = sig[i].real * sig[i].real + sig[i].imag * sig[i].imag
            if pw > peak:
                peak = pw
        val = np.sqrt(peak)
        if val < best_val:
            best_val = val
            for k2 in range(n):
                best[k2] = cur[k2]
    return best, best_val


def select_block(w, grid_size, start_index, shots, tail_signs, paired):
    carrier = _plans.carrier_table(w.size, grid_size)
    twid, brev = _plans.fft_plan(grid_size)
    return _select_block(w, carrier, twid, brev, start_index, shots, tail_signs, paired)


def exact_cf(w, grid_size, prefix):
    carrier = _plans.carrier_table(w.size, grid_size)
    return float(_exact_cf(w, carrier, prefix))


def exhaustive_best(w, grid_size):
    carrier = _plans.carrier_table(w.size, grid_size)
    signs, val = _exhaustive(w, carrier)
    return signs, float(val)


def warmup():
    """Force JIT compilation of all kernels on tiny inputs."""
    w = (np.arange(4) + 1.0 + 0.5j).astype(np.complex128) * 0.1
    tails = np.array([1, -1, 1, -1, 1, -1], dtype=np.int8)
    select_block(w, 8, 1, 1, tails, True)
    select_block(w, 8, 1, 1, np.concatenate([tails, tails]), False)
    select_block(w, 12, 1, 1, tails, True)  # non-pow2 grid path
    exact_cf(w, 8, np.ones(2, dtype=np.int8))
    exhaustive_best(w, 8)
