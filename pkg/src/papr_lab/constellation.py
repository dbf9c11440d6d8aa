"""Symmetric QAM/QPSK constellations and random data-block generation.

Constellations are kept on the unnormalized odd-integer grid: the crest
factor, PAPR and every concentration quantity used downstream depend only
on the ratio of constellation statistics, so scaling buys nothing and the
integer grid is exactly representable in floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CONSTELLATION_NAMES = ("qpsk", "qam16", "qam64", "qam256")

_ORDER = {"qpsk": 4, "qam16": 16, "qam64": 64, "qam256": 256}


@dataclass(frozen=True)
class Constellation:
    """A symmetric point set with its power statistics.

    Attributes:
        name: one of ``qpsk``, ``qam16``, ``qam64``, ``qam256``.
        points: the complex point set (read-only array, grid order).
        mean_power: arithmetic mean of ``|c|**2`` over the points.
        max_distance: largest inter-point distance, ``2 * max |c|``.
    """

    name: str
    points: np.ndarray = field(repr=False)
    mean_power: float
    max_distance: float

    @property
    def order(self) -> int:
        return self.points.size

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))


def build_constellation(name: str) -> Constellation:
    """Build a square-grid constellation on coordinates {±1, ±3, ...}.

    QPSK is the 4-point grid {±1 ± 1j}. The set is symmetric: the negation
    of every point is also a point.
    """
    key = name.lower()
    if key not in _ORDER:
        raise ValueError(f"unknown constellation {name!r}; expected one of {CONSTELLATION_NAMES}")
    side = int(np.sqrt(_ORDER[key]))
    coords = np.arange(-(side - 1), side, 2, dtype=np.float64)
    re, im = np.meshgrid(coords, coords, indexing="ij")
    points = (re + 1j * im).ravel()
    points.flags.writeable = False
    # real**2 + imag**2 is exact on the odd-integer grid; abs()**2 is not
    energy = points.real**2 + points.imag**2
    mean_power = float(np.mean(energy))
    max_distance = float(2.0 * np.sqrt(np.max(energy)))
    return Constellation(key, points, mean_power, max_distance)


def sample_block(constellation: Constellation, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one data block: n i.i.d. uniform picks from the point set.

    Args:
        constellation: the point set to draw from.
        n: number of subcarriers; must be >= 2.
        rng: numpy Generator; the caller owns reproducibility.

    Returns:
        complex128 array of length n.
    """
    if n < 2:
        raise ValueError(f"block length must be >= 2, got {n}")
    idx = rng.integers(0, constellation.order, size=n)
    return constellation.points[idx]


def canonical_symbol(symbol: complex, constellation: Constellation) -> complex:
    """Collapse the pair {c, -c} to a single representative.

    The representative is the member with positive real part; ties on the
    imaginary axis go to positive imaginary part. A receiver that discards
    symbol signs maps both members of a pair to this value.
    """
    if not np.any(constellation.points == symbol):
        raise ValueError(f"{symbol} is not a point of {constellation.name}")
    c = complex(symbol)
    if c.real > 0 or (c.real == 0 and c.imag > 0):
        return c
    return -c


def canonical_block(symbols: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Vectorized canonical_symbol over a block (sign-discarding detection)."""
    out = np.asarray(symbols, dtype=np.complex128).copy()
    flip = (out.real < 0) | ((out.real == 0) & (out.imag < 0))
    out[flip] = -out[flip]
    return out
