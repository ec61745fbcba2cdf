"""Erasure coding for chunked relay: GF(2^8) plus random linear coding."""

from . import gf256
from .gf256 import backend_name
from .rlnc import (
    CODED_FRAME_BYTES,
    COEFF_SEED_WIRE_BYTES,
    CodedChunk,
    CoefficientVector,
    DecoderState,
    decode,
    decoder_add,
    encode,
    next_coefficients,
    pad_chunks,
)

__all__ = [
    "gf256",
    "backend_name",
    "CODED_FRAME_BYTES",
    "COEFF_SEED_WIRE_BYTES",
    "CodedChunk",
    "CoefficientVector",
    "DecoderState",
    "decode",
    "decoder_add",
    "encode",
    "next_coefficients",
    "pad_chunks",
]
