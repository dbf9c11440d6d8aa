"""Block-parallel experiment drivers shared by the CLI and the test suite.

Every run spawns one child seed per block up front, so results are a pure
function of (parameters, seed) and independent of the thread count or
scheduling order.
"""
from __future__ import annotations

import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .constellation import Constellation, build_constellation
from .waveform import OfdmConfig, crest_factor_batch, papr_db, synthesize

log = logging.getLogger("papr_lab")


@dataclass(frozen=True)
class RunSpec:
    """Parameters of one reduction experiment."""

    n: int = 64
    modulation: str = "qam16"
    oversample: int = 4
    shots: int = 100
    start_index: int = 1
    num_blocks: int = 1
    seed: int = 0
    paired: bool = True
    threads: int = 1
    partial_index: int | None = None  # also sample the partial expectation here

    def config(self) -> OfdmConfig:
        return OfdmConfig(self.n, build_constellation(self.modulation), self.oversample)


@dataclass(frozen=True)
class ReductionRun:
    """Per-block PAPR before/after selection, plus optional bound samples."""

    spec: RunSpec
    papr0_db: np.ndarray
    papr1_db: np.ndarray
    partial_cf: np.ndarray | None = None


def _block_worker(args):
    (child, config, shots, start_index, paired, partial_index, tail_count) = args
    rng = np.random.default_rng(child)
    points = config.constellation.points
    n = config.n
    block = points[rng.integers(0, points.size, size=n)]
    mean_power = config.constellation.mean_power
    p0 = papr_db(synthesize(block, np.ones(n, dtype=np.int8), config), mean_power)

    partial = np.nan
    if partial_index is not None:
        free = n - partial_index
        draws = rng.integers(0, 2, size=(shots, free), dtype=np.int8) * 2 - 1
        rows = np.empty((shots, n), dtype=np.complex128)
        rows[:, :partial_index] = block[:partial_index]
        rows[:, partial_index:] = draws * block[partial_index:]
        partial = float(np.mean(crest_factor_batch(rows, config)))

    tails = rng.integers(0, 2, size=tail_count, dtype=np.int8) * 2 - 1
    signs, _, _ = kernels.select_block(
        block * config.cf_scale, config.grid_size, start_index, shots, tails, paired
    )
    p1 = papr_db(synthesize(block, signs, config), mean_power)
    return p0, p1, partial


def run_reduction(spec: RunSpec) -> ReductionRun:
    """Sample `num_blocks` random blocks and reduce each one."""
    config = spec.config()
    kernels.warmup()
    tail_count = kernels.tail_sign_count(spec.n, spec.start_index, spec.shots, spec.paired)
    children = np.random.SeedSequence(spec.seed).spawn(spec.num_blocks)
    tasks = [
        (child, config, spec.shots, spec.start_index, spec.paired,
         spec.partial_index, tail_count)
        for child in children
    ]
    papr0 = np.empty(spec.num_blocks)
    papr1 = np.empty(spec.num_blocks)
    partial = np.empty(spec.num_blocks)
    step = max(1, spec.num_blocks // 10)
    if spec.threads > 1:
        with ThreadPoolExecutor(max_workers=spec.threads) as pool:
            for i, (p0, p1, pz) in enumerate(pool.map(_block_worker, tasks)):
                papr0[i], papr1[i], partial[i] = p0, p1, pz
                if (i + 1) % step == 0:
                    log.info("blocks %d/%d", i + 1, spec.num_blocks)
    else:
        for i, task in enumerate(tasks):
            papr0[i], papr1[i], partial[i] = _block_worker(task)
            if (i + 1) % step == 0:
                log.info("blocks %d/%d", i + 1, spec.num_blocks)
    return ReductionRun(
        spec, papr0, papr1,
        partial if spec.partial_index is not None else None,
    )


def configure_logging(verbose: bool = True) -> None:
    """Route progress lines to stderr (stdout stays machine-readable)."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("[%(name)s] %(message)s"))
    log.handlers.clear()
    log.addHandler(handler)
    log.setLevel(logging.INFO if verbose else logging.WARNING)
