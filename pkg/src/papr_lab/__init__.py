"""Sign-selection PAPR reduction for OFDM: library and experiment CLI."""

from .constellation import (
    Constellation,
    build_constellation,
    canonical_block,
    canonical_symbol,
    sample_block,
)
from .errors import CapacityError
from .waveform import OfdmConfig, crest_factor, papr, papr_db, synthesize

__all__ = [
    "CapacityError",
    "Constellation",
    "OfdmConfig",
    "build_constellation",
    "canonical_block",
    "canonical_symbol",
    "crest_factor",
    "papr",
    "papr_db",
    "sample_block",
    "synthesize",
]

__version__ = "0.1.0"
