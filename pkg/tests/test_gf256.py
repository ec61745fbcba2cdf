"""Field arithmetic checks against an independent bitwise oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockrelay.coding import gf256

POLY = 0x11B


def peasant_mul(a: int, b: int) -> int:
    """Oracle: shift-and-add carryless multiply with polynomial reduction."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & 0x100:
            a ^= POLY
    return r


def test_mul_table_matches_bitwise_oracle_exhaustively():
    mul = gf256.MUL
    for a in range(256):
        row = mul[a]
        for b in range(256):
            assert row[b] == peasant_mul(a, b), (a, b)


def test_generator_has_full_multiplicative_order():
    seen = set()
    x = 1
    for _ in range(255):
        seen.add(x)
        x = peasant_mul(x, gf256.GENERATOR)
    assert x == 1
    assert len(seen) == 255


def test_exp_log_are_mutually_consistent():
    for a in range(1, 256):
        assert int(gf256.EXP[gf256.LOG[a]]) == a


def test_add_is_xor():
    assert gf256.add(0x57, 0x83) == 0xD4
    a = np.arange(256, dtype=np.uint8)
    assert np.array_equal(gf256.add(a, a), np.zeros(256, dtype=np.uint8))


def test_inverses():
    for a in range(1, 256):
        assert peasant_mul(a, gf256.inv(a)) == 1
    with pytest.raises(ZeroDivisionError):
        gf256.inv(0)


bytes_st = st.integers(min_value=0, max_value=255)


@settings(max_examples=200, deadline=None)
@given(bytes_st, bytes_st, bytes_st)
def test_field_axioms_sampled(a, b, c):
    mul = lambda x, y: int(gf256.MUL[x, y])
    assert mul(a, b) == mul(b, a)
    assert mul(a, mul(b, c)) == mul(mul(a, b), c)
    assert mul(a, b ^ c) == mul(a, b) ^ mul(a, c)
    assert mul(a, 1) == a
    assert mul(a, 0) == 0


@pytest.fixture(scope="module")
def both_backends():
    if gf256.backend_name() != "compiled":
        pytest.skip("compiled extension not built in this environment")
    return gf256.get_kernels(pure=False), gf256.get_kernels(pure=True)


def test_backend_scale_xor_equivalence(both_backends):
    fast, ref = both_backends
    rng = np.random.default_rng(11)
    for _ in range(50):
        n = int(rng.integers(1, 200))
        coeff = int(rng.integers(0, 256))
        src = rng.integers(0, 256, size=n, dtype=np.uint8)
        d1 = rng.integers(0, 256, size=n, dtype=np.uint8)
        d2 = d1.copy()
        fast.scale_xor(d1, coeff, src)
        ref.scale_xor(d2, coeff, src)
        assert np.array_equal(d1, d2)


def test_backend_encode_equivalence(both_backends):
    fast, ref = both_backends
    rng = np.random.default_rng(12)
    srcs = rng.integers(0, 256, size=(16, 77), dtype=np.uint8)
    coeffs = rng.integers(0, 256, size=16, dtype=np.uint8)
    o1 = np.empty(77, dtype=np.uint8)
    o2 = np.empty(77, dtype=np.uint8)
    fast.encode_into(o1, srcs, coeffs)
    ref.encode_into(o2, srcs, coeffs)
    assert np.array_equal(o1, o2)


def test_backend_decoder_equivalence(both_backends):
    fast, ref = both_backends
    rng = np.random.default_rng(13)
    m, L = 12, 30
    state1 = (np.zeros((m, m), np.uint8), np.zeros((m, L), np.uint8), np.zeros(m, np.uint8))
    state2 = (np.zeros((m, m), np.uint8), np.zeros((m, L), np.uint8), np.zeros(m, np.uint8))
    for _ in range(3 * m):
        c = rng.integers(0, 256, size=m, dtype=np.uint8)
        p = rng.integers(0, 256, size=L, dtype=np.uint8)
        r1 = fast.decoder_add(*state1, c.copy(), p.copy())
        r2 = ref.decoder_add(*state2, c.copy(), p.copy())
        assert r1 == r2
        assert np.array_equal(state1[0], state2[0])
        assert np.array_equal(state1[1], state2[1])
    if state1[2].all():
        fast.reduce_full(state1[0], state1[1])
        ref.reduce_full(state2[0], state2[1])
        assert np.array_equal(state1[0], state2[0])
        assert np.array_equal(state1[1], state2[1])
