"""Short addition chains for large integers.

Chain constructions (binary, windowed, power-tree and cross-window methods,
plus addition sequences for the pre-computation), an exact shortest-chain
search for small integers, and a seeded benchmark harness.
"""

from __future__ import annotations

from .asa import AdditionSequence, asa, cwm_asa, cwm_asa_best, cwm_asa_stats
from .chain import (
    AdditionChain,
    ChainBuilder,
    ChainFormatError,
    ValidationReport,
    bit_profile,
    emit_chain,
    exponentiate_with_chain,
    parse_chain,
    parse_natural,
    square_and_multiply,
    validate_chain,
)
from .classic import WmParams, bm, bm_scaled, bm_star, wm
from .cwm import (
    CwmParams,
    WindowMap,
    build_chain,
    cwm,
    cwm_best,
    cwm_precompute,
    cwm_stats,
    extract_windows,
    hba_subtract,
)
from .sptm import sptm, sptm_best

__all__ = [
    "AdditionChain",
    "AdditionSequence",
    "ChainBuilder",
    "ChainFormatError",
    "CwmParams",
    "ValidationReport",
    "WindowMap",
    "WmParams",
    "asa",
    "bit_profile",
    "bm",
    "bm_scaled",
    "bm_star",
    "build_chain",
    "cwm",
    "cwm_asa",
    "cwm_asa_best",
    "cwm_asa_stats",
    "cwm_best",
    "cwm_precompute",
    "cwm_stats",
    "emit_chain",
    "exponentiate_with_chain",
    "extract_windows",
    "hba_subtract",
    "parse_chain",
    "parse_natural",
    "sptm",
    "sptm_best",
    "square_and_multiply",
    "validate_chain",
    "wm",
]

__version__ = "0.1.0"
