"""GF(2^8) field arithmetic under the AES reduction polynomial.

Lookup tables are built once at import. The byte-level vector kernels live in
a compiled extension when it is available; a numpy fallback keeps everything
working from a plain source checkout. Set BLOCKRELAY_PURE=1 to force the
fallback (used by the benchmark and the backend-equivalence tests).
"""

from __future__ import annotations

import os

import numpy as np

REDUCING_POLY = 0x11B  # x^8 + x^4 + x^3 + x + 1
GENERATOR = 0x03  # 0x02 does not generate the multiplicative group of this field


def _build_tables() -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    exp = np.zeros(510, dtype=np.uint8)
    log = np.zeros(256, dtype=np.int64)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        t = x << 1  # multiply by the generator: x*3 = x*2 + x
        if t & 0x100:
            t ^= REDUCING_POLY
        x = t ^ x
    exp[255:509] = exp[0:254]

    # Dense product table; 64 KiB, the price of branch-free multiplication.
    lsum = log[:, None] + log[None, :]
    mul = exp[lsum]
    mul[0, :] = 0
    mul[:, 0] = 0

    inv = np.zeros(256, dtype=np.uint8)
    inv[1:] = exp[255 - log[1:]]
    return exp, log, mul, inv


EXP, LOG, MUL, INV = _build_tables()


def add(a, b):
    """Field addition (works on ints and uint8 arrays alike)."""
    return a ^ b


def mul(a, b):
    """Field multiplication via the product table."""
    return MUL[a, b]


def inv(a: int) -> int:
    """Multiplicative inverse; zero has none."""
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^8)")
    return int(INV[a])


def _load_backend():
    forced = os.environ.get("BLOCKRELAY_PURE", "") not in ("", "0")
    if not forced:
        try:
            from . import _gf256ext as kern

            kern.init_tables(np.ascontiguousarray(MUL), np.ascontiguousarray(INV))
            return kern, "compiled"
        except ImportError:
            pass
    from . import _gf256py as kern

    kern.init_tables(MUL, INV)
    return kern, "fallback"


kernels, BACKEND = _load_backend()


def backend_name() -> str:
    """Which vector-kernel backend got selected at import."""
    return BACKEND


def get_kernels(pure: bool = False):
    """Return the kernel module; pure=True always gives the numpy fallback."""
    if pure:
        from . import _gf256py as kern

        kern.init_tables(MUL, INV)
        return kern
    return kernels
