"""Statistical characterization: CCDFs, effective PAPR, concentration bounds.

Covers the empirical tail machinery (CCDF, effective-PAPR read-off), the
mean-CF estimate, sampling of the partial expectation that upper-bounds
the reduced crest factor, and the bounded-differences tail bound with its
inversion.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, sample_block
from .errors import CapacityError
from .waveform import OfdmConfig, crest_factor_batch


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with a strict-tail CCDF: P(value > v)."""

    sorted_values: np.ndarray

    @property
    def size(self) -> int:
        return self.sorted_values.size

    def ccdf(self, thresholds) -> np.ndarray:
        idx = np.searchsorted(self.sorted_values, np.asarray(thresholds), side="right")
        return (self.size - idx) / self.size

    def curve_points(self) -> tuple[np.ndarray, np.ndarray]:
        """Distinct sample values with the CCDF just after each drop."""
        values = np.unique(self.sorted_values)
        return values, self.ccdf(values)


def empirical_ccdf(values) -> EmpiricalDistribution:
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise ValueError("cannot build a distribution from an empty sample")
    return EmpiricalDistribution(np.sort(arr))


def _effective_papr_segment(dist: EmpiricalDistribution, level: float):
    """Locate the tail crossing; returns (value, slope d(value)/d(log10 ccdf))."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    if dist.size * level < 10.0:
        raise CapacityError(
            f"{dist.size} samples cannot resolve the {level:g} tail "
            f"(need at least {int(np.ceil(10.0 / level))})"
        )
    values, tail = dist.curve_points()
    k = int(np.searchsorted(-tail, -level, side="left"))  # first tail[k] <= level
    if k >= values.size:
        k = values.size - 1
    if tail[k] == level:
        if 0 < k and tail[k - 1] > 0:
            slope = (values[k] - values[k - 1]) / (np.log10(tail[k]) - np.log10(tail[k - 1]))
        else:
            slope = 0.0
        return float(values[k]), float(slope)
    if k == 0:
        return float(values[0]), 0.0
    lo, hi = tail[k], tail[k - 1]
    if lo <= 0.0:
        # degenerate tail: the top value holds all remaining mass, so the
        # crossing has no right anchor in log space; staircase answer
        return float(values[k]), 0.0
    slope = (values[k] - values[k - 1]) / (np.log10(lo) - np.log10(hi))
    value = values[k - 1] + slope * (np.log10(level) - np.log10(hi))
    return float(value), float(slope)


def effective_papr(dist: EmpiricalDistribution, level: float = 1e-3) -> float:
    """Tail read-off: the value whose CCDF equals ``level``.

    Interpolates linearly in (value, log10 CCDF) coordinates between the
    empirical drop points; refuses (CapacityError) when fewer than ten
    samples sit above the requested level.
    """
    return _effective_papr_segment(dist, level)[0]


def effective_papr_with_stderr(dist: EmpiricalDistribution, level: float = 1e-3):
    """Effective PAPR plus a delta-method standard error.

    The binomial error of the tail estimate at ``level`` is mapped through
    the local slope of the interpolated CCDF.
    """
    value, slope = _effective_papr_segment(dist, level)
    se_tail = np.sqrt(level * (1.0 - level) / dist.size)
    se = abs(slope) * se_tail / (level * np.log(10.0))
    return value, float(se)


def estimate_mean_cf(config: OfdmConfig, num_samples: int, rng: np.random.Generator,
                     chunk: int = 4096) -> float:
    """Monte Carlo mean of the crest factor over random data and signs."""
    if num_samples < 1:
        raise ValueError(f"num_samples must be >= 1, got {num_samples}")
    n = config.n
    points = config.constellation.points
    total = 0.0
    done = 0
    while done < num_samples:
        b = min(chunk, num_samples - done)
        idx = rng.integers(0, points.size, size=(b, n))
        signs = rng.integers(0, 2, size=(b, n), dtype=np.int8) * 2 - 1
        rows = signs * points[idx]
        total += float(np.sum(crest_factor_batch(rows, config)))
        done += b
    return total / num_samples


def partial_expectation_samples(config: OfdmConfig, start_index: int, num_blocks: int,
                                shots: int, rng: np.random.Generator) -> np.ndarray:
    """Estimates of the conditional CF with the first signs pinned to +1.

    One estimate per random block: the sample average over ``shots``
    completions of the signs from ``start_index`` on. These samples trace
    the distribution of the random upper bound on the reduced CF.
    """
    n = config.n
    if not 0 <= start_index < n:
        raise ValueError(f"start index must be in [0, {n - 1}], got {start_index}")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    out = np.empty(num_blocks)
    free = n - start_index
    for b in range(num_blocks):
        block = sample_block(config.constellation, n, rng)
        draws = rng.integers(0, 2, size=(shots, free), dtype=np.int8) * 2 - 1
        rows = np.empty((shots, n), dtype=np.complex128)
        rows[:, :start_index] = block[:start_index]
        rows[:, start_index:] = draws * block[start_index:]
        out[b] = float(np.mean(crest_factor_batch(rows, config)))
    return out


def mcdiarmid_tail(deviation: float, constellation: Constellation) -> float:
    """One-sided bounded-differences tail bound for the partial expectation.

    P(partial expectation exceeds its mean by ``deviation``) is at most
    exp(-2 * deviation**2 * mean_power / max_distance**2); the subcarrier
    count cancels out of the exponent.
    """
    if deviation < 0:
        raise ValueError(f"deviation must be >= 0, got {deviation}")
    ratio = constellation.max_distance**2 / constellation.mean_power
    return float(np.exp(-2.0 * deviation**2 / ratio))


def mcdiarmid_deviation(prob: float, constellation: Constellation) -> float:
    """Inverse of mcdiarmid_tail: deviation whose tail bound equals ``prob``."""
    if not 0.0 < prob <= 1.0:
        raise ValueError(f"probability must be in (0, 1], got {prob}")
    ratio = constellation.max_distance**2 / constellation.mean_power
    return float(np.sqrt(0.5 * ratio * np.log(1.0 / prob)))


def bound_papr_db(mean_cf: float, deviation: float) -> float:
    """PAPR level (dB) matching a CF of mean + deviation."""
    if mean_cf < 0 or deviation < 0:
        raise ValueError("mean CF and deviation must be >= 0")
    return float(20.0 * np.log10(mean_cf + deviation))


def mcdiarmid_ccdf_curve(mean_cf: float, constellation: Constellation,
                         cf_values: np.ndarray) -> np.ndarray:
    """Tail-bound curve anchored at an estimated mean CF.

    curve(v) = min(1, tail bound at v - mean) for v >= mean, 1 below it.
    """
    dev = np.maximum(np.asarray(cf_values, dtype=np.float64) - mean_cf, 0.0)
    ratio = constellation.max_distance**2 / constellation.mean_power
    return np.exp(-2.0 * dev**2 / ratio)
