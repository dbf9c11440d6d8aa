"""Conditional crest-factor expectations given a fixed sign prefix.

Two routes: the Monte Carlo sample average used by the selection
algorithm, and exact enumeration over all completions, which serves as the
independent oracle in tests and in the exact-mode selector.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import CapacityError
from .waveform import OfdmConfig, crest_factor_batch

ENUMERATION_GUARD = 22  # exact route refuses more than 2**22 completions


@dataclass(frozen=True)
class ConditionalQuery:
    """A block plus the signs decided so far (prefix of +1/-1 values)."""

    block: np.ndarray
    prefix: np.ndarray
    config: OfdmConfig

    def __post_init__(self):
        block = np.ascontiguousarray(self.block, dtype=np.complex128)
        prefix = np.ascontiguousarray(self.prefix, dtype=np.int8)
        if block.shape != (self.config.n,):
            raise ValueError(f"block has shape {block.shape}, expected ({self.config.n},)")
        if prefix.ndim != 1 or prefix.size > self.config.n:
            raise ValueError("prefix must be 1-D with length <= n")
        if prefix.size and not np.all(np.abs(prefix) == 1):
            raise ValueError("prefix entries must be +1 or -1")
        object.__setattr__(self, "block", block)
        object.__setattr__(self, "prefix", prefix)

    @property
    def decided(self) -> int:
        return self.prefix.size

    @property
    def free(self) -> int:
        return self.config.n - self.prefix.size


def _weights(query: ConditionalQuery) -> np.ndarray:
    return query.block * query.config.cf_scale


def estimate_conditional_cf(query: ConditionalQuery, shots: int,
                            rng: np.random.Generator) -> float:
    """Sample-average estimate of the conditional CF.

    Averages the crest factor over ``shots`` i.i.d. uniform completions of
    the undecided signs. Unbiased; variance shrinks like 1/shots.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = query.config.n
    j = query.decided
    if j == n:
        rows = (query.prefix * query.block)[None, :]
        return float(crest_factor_batch(rows, query.config)[0])
    draws = rng.integers(0, 2, size=(shots, n - j), dtype=np.int8) * 2 - 1
    rows = np.empty((shots, n), dtype=np.complex128)
    rows[:, :j] = query.prefix * query.block[:j]
    rows[:, j:] = draws * query.block[j:]
    return float(np.mean(crest_factor_batch(rows, query.config)))


def exact_conditional_cf(query: ConditionalQuery) -> float:
    """Exact conditional CF: mean over all 2**free completions."""
    if query.free > ENUMERATION_GUARD:
        raise CapacityError(
            f"{query.free} free signs exceed the enumeration guard ({ENUMERATION_GUARD})"
        )
    return kernels.exact_cf(_weights(query), query.config.grid_size, query.prefix)


def paired_candidate_estimates(query: ConditionalQuery, shots: int,
                               rng: np.random.Generator) -> tuple[float, float]:
    """Estimates for fixing the next sign to +1 and to -1.

    The same random completions are used for both candidates (common
    random numbers), so shared noise cancels in the comparison that drives
    the sign decision.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = query.config.n
    j = query.decided
    if j >= n:
        raise ValueError("no undecided sign left to evaluate")
    t = n - j - 1
    rows = np.empty((shots, n), dtype=np.complex128)
    rows[:, :j] = query.prefix * query.block[:j]
    rows[:, j] = query.block[j]
    if t:
        draws = rng.integers(0, 2, size=(shots, t), dtype=np.int8) * 2 - 1
        rows[:, j + 1 :] = draws * query.block[j + 1 :]
    plus = float(np.mean(crest_factor_batch(rows, query.config)))
    rows[:, j] = -query.block[j]
    minus = float(np.mean(crest_factor_batch(rows, query.config)))
    return plus, minus
