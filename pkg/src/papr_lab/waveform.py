"""Oversampled OFDM symbol synthesis and peak metrics.

The symbol duration is normalized out; the time grid is t_i = i / (L*n)
for i = 0 .. L*n-1, so synthesis is a zero-padded inverse DFT. Peak metrics
are taken over the discrete grid only.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constellation import Constellation


@dataclass(frozen=True)
class OfdmConfig:
    """Simulation geometry: subcarrier count, oversampling, constellation."""

    n: int
    constellation: Constellation
    oversample: int = 4

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"subcarrier count must be >= 2, got {self.n}")
        if self.oversample < 1:
            raise ValueError(f"oversampling factor must be >= 1, got {self.oversample}")

    @property
    def grid_size(self) -> int:
        return self.n * self.oversample

    @property
    def cf_scale(self) -> float:
        """1 / sqrt(n * mean_power): folds both normalizations into one weight."""
        return 1.0 / np.sqrt(self.n * self.constellation.mean_power)


@lru_cache(maxsize=16)
def carrier_table(n: int, grid_size: int) -> np.ndarray:
    """Read-only (n, grid_size) table of exp(2j*pi*k*i/grid_size)."""
    k = np.arange(n)[:, None]
    i = np.arange(grid_size)[None, :]
    table = np.exp(2j * np.pi * k * i / grid_size)
    table.flags.writeable = False
    return table


def _validate_signs(signs: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(signs)
    if x.shape != (n,):
        raise ValueError(f"sign vector has shape {x.shape}, expected ({n},)")
    if not np.all(np.abs(x) == 1):
        raise ValueError("sign vector entries must be +1 or -1")
    return x.astype(np.float64)


def synthesize(block: np.ndarray, signs: np.ndarray, config: OfdmConfig) -> np.ndarray:
    """Time-domain samples of one sign-modulated OFDM symbol.

    samples[i] = (1/sqrt(n)) * sum_k signs[k] * block[k] * exp(2j*pi*k*i/(L*n))

    Implemented as a zero-padded unnormalized inverse FFT.
    """
    c = np.asarray(block, dtype=np.complex128)
    if c.shape != (config.n,):
        raise ValueError(f"block has shape {c.shape}, expected ({config.n},)")
    x = _validate_signs(signs, config.n)
    padded = np.zeros(config.grid_size, dtype=np.complex128)
    padded[: config.n] = x * c / np.sqrt(config.n)
    return np.fft.ifft(padded, norm="forward")


def time_domain_batch(rows: np.ndarray, grid_size: int) -> np.ndarray:
    """Zero-padded synthesis of many symbol rows at once.

    rows: (B, n) complex frequency-domain coefficients (scaling already
    applied by the caller). Returns (B, grid_size) time-domain samples.
    """
    b, n = rows.shape
    padded = np.zeros((b, grid_size), dtype=np.complex128)
    padded[:, :n] = rows
    return np.fft.ifft(padded, axis=1, norm="forward")


def crest_factor_batch(symbol_rows: np.ndarray, config: OfdmConfig) -> np.ndarray:
    """Crest factor of each row of sign-applied (unscaled) symbols, vectorized."""
    samples = time_domain_batch(np.asarray(symbol_rows, dtype=np.complex128), config.grid_size)
    peak = np.max(samples.real**2 + samples.imag**2, axis=1)
    return np.sqrt(peak) * config.cf_scale


def papr(samples: np.ndarray, mean_power: float) -> float:
    """Peak sample power over the constellation mean power (linear ratio)."""
    s = np.asarray(samples)
    if s.size == 0:
        raise ValueError("signal is empty")
    if mean_power <= 0:
        raise ValueError(f"mean power must be positive, got {mean_power}")
    peak = float(np.max(s.real**2 + s.imag**2))
    return peak / mean_power


def papr_db(samples: np.ndarray, mean_power: float) -> float:
    return 10.0 * np.log10(papr(samples, mean_power))


def crest_factor(samples: np.ndarray, mean_power: float) -> float:
    """Square root of the PAPR; the objective the selection descends."""
    return float(np.sqrt(papr(samples, mean_power)))
