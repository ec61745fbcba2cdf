# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2^8) vector kernels.

Mirror of _gf256py; that module is the behavioural reference. Tables are
copied into static C arrays by init_tables() before first use.
"""

cdef unsigned char MUL[256][256]
cdef unsigned char INV[256]


def init_tables(const unsigned char[:, :] mul, const unsigned char[:] inv):
    cdef int i, j
    for i in range(256):
        INV[i] = inv[i]
        for j in range(256):
            MUL[i][j] = mul[i, j]


cpdef void scale_xor(unsigned char[:] dst, int coeff, const unsigned char[:] src):
    """dst ^= coeff * src, element-wise in the field."""
    cdef Py_ssize_t i, n = dst.shape[0]
    cdef const unsigned char* row
    if coeff == 0:
        return
    if coeff == 1:
        for i in range(n):
            dst[i] ^= src[i]
        return
    row = MUL[coeff]
    for i in range(n):
        dst[i] ^= row[src[i]]


cpdef void scale(unsigned char[:] vec, int coeff):
    """vec *= coeff, element-wise in the field."""
    cdef Py_ssize_t i, n = vec.shape[0]
    cdef const unsigned char* row
    if coeff == 1:
        return
    row = MUL[coeff]
    for i in range(n):
        vec[i] = row[vec[i]]


cpdef void encode_into(unsigned char[:] out, const unsigned char[:, :] sources,
                       const unsigned char[:] coeffs):
    """out = sum_i coeffs[i] * sources[i] over the field."""
    cdef Py_ssize_t i, j, m = sources.shape[0], n = out.shape[0]
    cdef int c
    cdef const unsigned char* row
    for j in range(n):
        out[j] = 0
    for i in range(m):
        c = coeffs[i]
        if c == 0:
            continue
        if c == 1:
            for j in range(n):
                out[j] ^= sources[i, j]
        else:
            row = MUL[c]
            for j in range(n):
                out[j] ^= row[sources[i, j]]


cpdef int decoder_add(unsigned char[:, :] rows, unsigned char[:, :] pays,
                      unsigned char[:] occupied,
                      unsigned char[:] ncoef, unsigned char[:] npay):
    """Reduce one received row against the stored pivots.

    Mutates ncoef/npay as scratch. Returns the claimed pivot column or -1
    for a linearly dependent row.
    """
    cdef Py_ssize_t m = rows.shape[0], L = npay.shape[0]
    cdef Py_ssize_t col, i
    cdef int c, icv
    cdef const unsigned char* row
    for col in range(m):
        c = ncoef[col]
        if c == 0:
            continue
        if occupied[col]:
            row = MUL[c]
            for i in range(col, m):
                ncoef[i] ^= row[rows[col, i]]
            for i in range(L):
                npay[i] ^= row[pays[col, i]]
        else:
            icv = INV[c]
            row = MUL[icv]
            for i in range(col, m):
                rows[col, i] = row[ncoef[i]]
            for i in range(L):
                pays[col, i] = row[npay[i]]
            occupied[col] = 1
            return <int> col
    return -1


cpdef void reduce_full(unsigned char[:, :] rows, unsigned char[:, :] pays):
    """Back-substitute a full-rank system so rows become the identity."""
    cdef Py_ssize_t m = rows.shape[0], L = pays.shape[1]
    cdef Py_ssize_t col, r, i
    cdef int f
    cdef const unsigned char* row
    for col in range(m - 1, 0, -1):
        for r in range(col):
            f = rows[r, col]
            if f:
                rows[r, col] = 0
                row = MUL[f]
                for i in range(L):
                    pays[r, i] ^= row[pays[col, i]]
