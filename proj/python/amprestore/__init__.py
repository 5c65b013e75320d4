"""Approximate message passing sparse recovery and audio click removal."""

from ._amprestore import (
    DivergenceError,
    SolverConfig,
    WavError,
    amp_recover,
    amp_recover_fixed,
    corrupt_clicks,
    dct_forward,
    dct_inverse,
    dequantize,
    ist_recover,
    mac,
    make_gaussian_instance,
    overlap_add,
    quantize,
    read_wav,
    restore,
    rmse,
    segment_blocks,
    snr_improvement,
    soft_threshold,
    trsh,
    write_wav,
)

__all__ = [
    "DivergenceError",
    "SolverConfig",
    "WavError",
    "amp_recover",
    "amp_recover_fixed",
    "corrupt_clicks",
    "dct_forward",
    "dct_inverse",
    "dequantize",
    "ist_recover",
    "mac",
    "make_gaussian_instance",
    "overlap_add",
    "quantize",
    "read_wav",
    "restore",
    "rmse",
    "segment_blocks",
    "snr_improvement",
    "soft_threshold",
    "trsh",
    "write_wav",
]
