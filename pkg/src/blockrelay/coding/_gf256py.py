"""Reference vector kernels for GF(2^8), numpy-backed.

Semantics here define the contract; the compiled extension must match
byte for byte. Decoder rows are kept normalized: the pivot row stored for
column c has a unit entry at c and zeros to its left.
"""

from __future__ import annotations

import numpy as np

_MUL = None
_INV = None


def init_tables(mul: np.ndarray, inv: np.ndarray) -> None:
    global _MUL, _INV
    _MUL = mul
    _INV = inv


def scale_xor(dst: np.ndarray, coeff: int, src: np.ndarray) -> None:
    """dst ^= coeff * src, element-wise in the field."""
    if coeff == 0:
        return
    if coeff == 1:
        dst ^= src
    else:
        dst ^= _MUL[coeff, src]


def scale(vec: np.ndarray, coeff: int) -> None:
    """vec *= coeff, element-wise in the field."""
    if coeff != 1:
        vec[:] = _MUL[coeff, vec]


def encode_into(out: np.ndarray, sources: np.ndarray, coeffs: np.ndarray) -> None:
    """out = sum_i coeffs[i] * sources[i] over the field."""
    out[:] = 0
    for i in range(sources.shape[0]):
        scale_xor(out, int(coeffs[i]), sources[i])


def decoder_add(
    rows: np.ndarray,
    pays: np.ndarray,
    occupied: np.ndarray,
    ncoef: np.ndarray,
    npay: np.ndarray,
) -> int:
    """Reduce one received row against the stored pivots.

    Mutates ncoef/npay as scratch. Returns the pivot column claimed by this
    row, or -1 when the row is linearly dependent on what is already stored.
    """
    m = rows.shape[0]
    has_payload = npay.size > 0
    for col in range(m):
        c = int(ncoef[col])
        if c == 0:
            continue
        if occupied[col]:
            scale_xor(ncoef[col:], c, rows[col, col:])
            if has_payload:
                scale_xor(npay, c, pays[col])
        else:
            icv = int(_INV[c])
            rows[col, col:] = ncoef[col:]
            scale(rows[col, col:], icv)
            if has_payload:
                pays[col] = npay
                scale(pays[col], icv)
            occupied[col] = 1
            return col
    return -1


def reduce_full(rows: np.ndarray, pays: np.ndarray) -> None:
    """Back-substitute a full-rank system so rows become the identity.

    Processing columns right to left means only the (r, col) coefficient
    entry is live at each step; payload rows end up equal to the sources.
    """
    m = rows.shape[0]
    has_payload = pays.shape[1] > 0
    for col in range(m - 1, 0, -1):
        for r in range(col):
            f = int(rows[r, col])
            if f:
                rows[r, col] = 0
                if has_payload:
                    scale_xor(pays[r], f, pays[col])
