"""Sign-selection algorithms and rate-loss accounting.

The main algorithm walks the undecided positions in index order and fixes
each sign to whichever choice has the lower estimated conditional crest
factor. An exact-oracle variant replaces the estimates with full
enumeration (small n only), and exhaustive search plus a best-of-K random
baseline bracket the achievable reduction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .constellation import Constellation, canonical_block
from .errors import CapacityError
from .estimator import ENUMERATION_GUARD, ConditionalQuery, exact_conditional_cf
from .waveform import OfdmConfig, crest_factor, crest_factor_batch, papr_db, synthesize

EXHAUSTIVE_GUARD = 16


@dataclass(frozen=True)
class SelectionTrace:
    """Per-decision record: both candidate values and the chosen sign."""

    start_index: int
    cand_plus: np.ndarray
    cand_minus: np.ndarray
    chosen: np.ndarray
    initial_estimate: float | None = None

    def __len__(self) -> int:
        return self.chosen.size


_EMPTY_TRACE = SelectionTrace(0, np.empty(0), np.empty(0), np.empty(0, dtype=np.int8))


@dataclass(frozen=True)
class SelectionResult:
    signs: np.ndarray
    trace: SelectionTrace
    final_cf: float
    final_papr_db: float


def _finish(block, config, signs, trace) -> SelectionResult:
    samples = synthesize(block, signs, config)
    cf = crest_factor(samples, config.constellation.mean_power)
    return SelectionResult(signs, trace, cf, papr_db(samples, config.constellation.mean_power))


def _check_start_index(start_index: int, n: int) -> None:
    if not 1 <= start_index <= n - 1:
        raise ValueError(f"start index must be in [1, {n - 1}], got {start_index}")


def select_signs(block: np.ndarray, config: OfdmConfig, shots: int, start_index: int,
                 rng: np.random.Generator, *, paired: bool = True) -> SelectionResult:
    """Sequential Monte Carlo sign selection.

    Signs before ``start_index`` stay +1 (start_index=1 uses every free
    sign; larger values trade reduction for lower rate loss). Each decision
    averages ``shots`` random completions per candidate; ties go to +1.
    """
    c = np.ascontiguousarray(block, dtype=np.complex128)
    n = config.n
    if c.shape != (n,):
        raise ValueError(f"block has shape {c.shape}, expected ({n},)")
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    _check_start_index(start_index, n)
    need = kernels.tail_sign_count(n, start_index, shots, paired)
    tails = rng.integers(0, 2, size=need, dtype=np.int8) * 2 - 1
    w = c * config.cf_scale
    signs, cand_plus, cand_minus = kernels.select_block(
        w, config.grid_size, start_index, shots, tails, paired
    )
    trace = SelectionTrace(
        start_index, cand_plus, cand_minus, signs[start_index:].copy(),
        initial_estimate=float(0.5 * (cand_plus[0] + cand_minus[0])),
    )
    return _finish(c, config, signs, trace)


def select_signs_exact(block: np.ndarray, config: OfdmConfig,
                       start_index: int) -> SelectionResult:
    """Selection driven by exact conditional expectations (oracle mode).

    Deterministic; each step enumerates every completion, so the usable
    range is bounded by the enumeration guard.
    """
    c = np.ascontiguousarray(block, dtype=np.complex128)
    n = config.n
    _check_start_index(start_index, n)
    if n - start_index > ENUMERATION_GUARD:
        raise CapacityError(
            f"{n - start_index} free signs exceed the enumeration guard ({ENUMERATION_GUARD})"
        )
    signs = np.ones(n, dtype=np.int8)
    width = n - start_index
    cand_plus = np.empty(width)
    cand_minus = np.empty(width)
    for idx, j in enumerate(range(start_index, n)):
        plus = exact_conditional_cf(
            ConditionalQuery(c, np.append(signs[:j], 1).astype(np.int8), config)
        )
        minus = exact_conditional_cf(
            ConditionalQuery(c, np.append(signs[:j], -1).astype(np.int8), config)
        )
        cand_plus[idx] = plus
        cand_minus[idx] = minus
        signs[j] = 1 if plus <= minus else -1
    initial = exact_conditional_cf(ConditionalQuery(c, signs[:start_index], config))
    trace = SelectionTrace(start_index, cand_plus, cand_minus,
                           signs[start_index:].copy(), initial_estimate=initial)
    return _finish(c, config, signs, trace)


def exhaustive_best_signs(block: np.ndarray, config: OfdmConfig) -> SelectionResult:
    """Global optimum over all sign vectors with the first sign fixed to +1."""
    c = np.ascontiguousarray(block, dtype=np.complex128)
    if config.n > EXHAUSTIVE_GUARD:
        raise CapacityError(
            f"exhaustive search limited to n <= {EXHAUSTIVE_GUARD}, got {config.n}"
        )
    signs, _ = kernels.exhaustive_best(c * config.cf_scale, config.grid_size)
    return _finish(c, config, signs, _EMPTY_TRACE)


def slm_random_baseline(block: np.ndarray, config: OfdmConfig, num_candidates: int,
                        rng: np.random.Generator) -> SelectionResult:
    """Best of ``num_candidates`` uniformly random sign vectors (first sign +1)."""
    if num_candidates < 1:
        raise ValueError(f"need at least one candidate, got {num_candidates}")
    c = np.ascontiguousarray(block, dtype=np.complex128)
    n = config.n
    draws = rng.integers(0, 2, size=(num_candidates, n - 1), dtype=np.int8) * 2 - 1
    rows = np.empty((num_candidates, n), dtype=np.complex128)
    rows[:, 0] = c[0]
    rows[:, 1:] = draws * c[1:]
    values = crest_factor_batch(rows, config)
    k = int(np.argmin(values))
    best_signs = np.ones(n, dtype=np.int8)
    best_signs[1:] = draws[k]
    return _finish(c, config, best_signs, _EMPTY_TRACE)


def rate_loss(start_index: int, n: int) -> float:
    """Side-information cost of discarding signs from start_index on, in b/sym."""
    if not 0 <= start_index <= n:
        raise ValueError(f"start index must be in [0, {n}], got {start_index}")
    return (n - start_index) / n


def verify_sign_transparency(block: np.ndarray, result: SelectionResult,
                             constellation: Constellation,
                             received: np.ndarray | None = None) -> bool:
    """Check that sign-discarding detection recovers the canonical data.

    ``received`` defaults to the sign-modulated symbols the transmitter
    would emit; pass a tampered vector to model corruption.
    """
    c = np.asarray(block, dtype=np.complex128)
    if received is None:
        received = result.signs * c
    return bool(np.array_equal(canonical_block(received, constellation),
                               canonical_block(c, constellation)))
