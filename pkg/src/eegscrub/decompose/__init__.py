"""Signal decompositions (EMD, DWT, SSA) and canonical correlation analysis."""

from .cca import CcaResult, cca
from .emd import ImfSet, emd, find_extrema
from .ssa import SsaModel, default_window, ssa_decompose, ssa_reconstruct
from .wavelet import (
    DB4_HI,
    DB4_LO,
    WaveletDecomposition,
    band_lengths,
    dwt_forward,
    dwt_inverse,
)

__all__ = [
    "CcaResult",
    "cca",
    "ImfSet",
    "emd",
    "find_extrema",
    "SsaModel",
    "default_window",
    "ssa_decompose",
    "ssa_reconstruct",
    "DB4_HI",
    "DB4_LO",
    "WaveletDecomposition",
    "band_lengths",
    "dwt_forward",
    "dwt_inverse",
]
