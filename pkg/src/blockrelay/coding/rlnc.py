"""Random linear coding of equal-length chunks over GF(2^8).

Coefficient vectors come from a keyed counter stream: a (stream seed, index)
pair fully determines the vector, so wire messages can carry those twelve
bytes instead of a dense m-byte vector. Receivers run incremental Gaussian
elimination and can reconstruct the sources once rank reaches m.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

from . import gf256

_PERSON = b"blockrelay.rlnc"

# Wire layout of a coded chunk, used for byte accounting only:
#   block id (8) + mode flag (1) + m (2) + payload length (4) = 15 byte frame,
#   then the coefficient form, then the payload.
CODED_FRAME_BYTES = 15
COEFF_SEED_WIRE_BYTES = 12  # stream seed reference (8) + index (4)


def _canon(seed) -> bytes:
    """Canonical byte form of a stream seed (ints, bytes, str, nested tuples)."""
    if isinstance(seed, bytes):
        return b"B" + struct.pack(">I", len(seed)) + seed
    if isinstance(seed, str):
        raw = seed.encode("utf-8")
        return b"S" + struct.pack(">I", len(raw)) + raw
    if isinstance(seed, (tuple, list)):
        parts = b"".join(_canon(s) for s in seed)
        return b"T" + struct.pack(">I", len(seed)) + parts
    if isinstance(seed, (int, np.integer)):
        v = int(seed)
        if -(2**63) <= v < 2**63:
            return b"I" + struct.pack(">q", v)
        raw = str(v).encode("ascii")
        return b"N" + struct.pack(">I", len(raw)) + raw
    raise TypeError(f"unsupported stream seed type: {type(seed)!r}")


def next_coefficients(stream_seed, index: int, m: int) -> np.ndarray:
    """Coefficient vector `index` of the stream; deterministic, never all-zero."""
    if m < 1:
        raise ValueError("m must be positive")
    key = _canon(stream_seed)
    salt = 0
    while True:
        out = bytearray()
        counter = 0
        while len(out) < m:
            h = hashlib.blake2b(
                key + struct.pack(">qqq", index, salt, counter),
                digest_size=64,
                person=_PERSON,
            )
            out += h.digest()
            counter += 1
        vec = np.frombuffer(bytes(out[:m]), dtype=np.uint8).copy()
        if vec.any():
            return vec
        salt += 1  # all-zero vectors carry no information; redraw


@dataclass(frozen=True)
class CoefficientVector:
    """Coefficients of one coded chunk, in compact (seed, index) form.

    `dense=True` marks vectors that should be accounted as m wire bytes
    rather than the compact twelve.
    """

    stream_seed: object
    index: int
    m: int
    dense: bool = False

    def expand(self) -> np.ndarray:
        return next_coefficients(self.stream_seed, self.index, self.m)

    def wire_bytes(self) -> int:
        return self.m if self.dense else COEFF_SEED_WIRE_BYTES


@dataclass(frozen=True)
class CodedChunk:
    """One coded chunk: coefficient vector plus the combined payload."""

    coeffs: CoefficientVector
    payload: bytes = b""

    def wire_bytes(self, payload_len: int | None = None) -> int:
        n = len(self.payload) if payload_len is None else payload_len
        return CODED_FRAME_BYTES + self.coeffs.wire_bytes() + n


def _as_matrix(source_chunks) -> np.ndarray:
    mat = np.asarray(
        [np.frombuffer(bytes(c), dtype=np.uint8) for c in source_chunks]
    )
    if mat.ndim != 2:
        raise ValueError("source chunks must be equal-length byte vectors")
    return mat


def encode(source_chunks, coeffs: CoefficientVector | np.ndarray) -> CodedChunk:
    """Combine m equal-length source chunks under a coefficient vector."""
    mat = _as_matrix(source_chunks)
    if isinstance(coeffs, CoefficientVector):
        cv = coeffs
        vec = coeffs.expand()
    else:
        vec = np.asarray(coeffs, dtype=np.uint8)
        cv = CoefficientVector(stream_seed=b"", index=-1, m=len(vec), dense=True)
    if len(vec) != mat.shape[0]:
        raise ValueError("coefficient count must match source chunk count")
    out = np.empty(mat.shape[1], dtype=np.uint8)
    gf256.kernels.encode_into(out, mat, vec)
    return CodedChunk(coeffs=cv, payload=out.tobytes())


class DecoderState:
    """Incremental decoder: tracks rank, reconstructs sources at full rank."""

    def __init__(self, m: int, payload_len: int = 0, kernels=None):
        if m < 1:
            raise ValueError("m must be positive")
        self.m = m
        self.payload_len = payload_len
        self.rank = 0
        self._rows = np.zeros((m, m), dtype=np.uint8)
        self._pays = np.zeros((m, payload_len), dtype=np.uint8)
        self._occupied = np.zeros(m, dtype=np.uint8)
        self._kern = kernels if kernels is not None else gf256.kernels
        self._reduced = False

    @property
    def decodable(self) -> bool:
        return self.rank == self.m

    def add(self, coeffs, payload: bytes | np.ndarray | None = None) -> str:
        """Fold one coded chunk in; returns rank_increased/redundant/complete."""
        vec = coeffs.expand() if isinstance(coeffs, CoefficientVector) else coeffs
        work_c = np.array(vec, dtype=np.uint8, copy=True)
        if work_c.shape != (self.m,):
            raise ValueError("coefficient vector length must equal m")
        if payload is None:
            work_p = np.zeros(self.payload_len, dtype=np.uint8)
        else:
            work_p = np.frombuffer(bytes(payload), dtype=np.uint8).copy()
            if work_p.shape[0] != self.payload_len:
                raise ValueError("payload length mismatch")
        pivot = self._kern.decoder_add(
            self._rows, self._pays, self._occupied, work_c, work_p
        )
        if pivot < 0:
            return "redundant"
        self.rank += 1
        return "complete" if self.rank == self.m else "rank_increased"

    def add_chunk(self, chunk: CodedChunk) -> str:
        return self.add(chunk.coeffs, chunk.payload)

    def decode(self) -> list[bytes]:
        """Return the m source chunks; requires full rank."""
        if not self.decodable:
            raise ValueError(f"rank {self.rank} of {self.m}, cannot decode yet")
        if not self._reduced:
            self._kern.reduce_full(self._rows, self._pays)
            self._reduced = True
        return [self._pays[i].tobytes() for i in range(self.m)]


def decoder_add(state: DecoderState, chunk: CodedChunk) -> str:
    """Functional form of DecoderState.add for chunk objects."""
    return state.add_chunk(chunk)


def decode(state: DecoderState) -> list[bytes]:
    """Functional form of DecoderState.decode."""
    return state.decode()


def pad_chunks(chunks: list[bytes]) -> list[bytes]:
    """Zero-pad byte chunks to a common length (coding needs equal sizes)."""
    if not chunks:
        return []
    width = max(len(c) for c in chunks)
    return [c + b"\x00" * (width - len(c)) for c in chunks]
