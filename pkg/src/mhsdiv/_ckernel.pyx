# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernel for moduli below 2**64.

Same contract as :func:`mhsdiv._pykernel.scan`. Products are formed in
128 bits, so any modulus < 2**64 is exact.
"""
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    #include <stdint.h>
    typedef unsigned __int128 mhs_u128;
    typedef __int128 mhs_i128;

    static inline uint64_t mhs_mulmod(uint64_t a, uint64_t b, uint64_t m) {
        return (uint64_t)(((mhs_u128)a * b) % m);
    }

    static inline uint64_t mhs_addmod(uint64_t a, uint64_t b, uint64_t m) {
        mhs_u128 s = (mhs_u128)a + b;
        return (uint64_t)(s >= m ? s - m : s);
    }

    static inline uint64_t mhs_powmod(uint64_t b, uint64_t e, uint64_t m) {
        uint64_t r = 1 % m;
        b %= m;
        while (e) {
            if (e & 1) r = mhs_mulmod(r, b, m);
            b = mhs_mulmod(b, b, m);
            e >>= 1;
        }
        return r;
    }

    /* inverse of a unit a modulo m via extended Euclid */
    static inline uint64_t mhs_invmod(uint64_t a, uint64_t m) {
        mhs_i128 r0 = m, r1 = a % m, x0 = 0, x1 = 1, q, tmp;
        while (r1 != 0) {
            q = r0 / r1;
            tmp = r0 - q * r1; r0 = r1; r1 = tmp;
            tmp = x0 - q * x1; x0 = x1; x1 = tmp;
        }
        if (x0 < 0) x0 += m;
        return (uint64_t)x0;
    }
    """
    uint64_t mhs_mulmod(uint64_t a, uint64_t b, uint64_t m) nogil
    uint64_t mhs_addmod(uint64_t a, uint64_t b, uint64_t m) nogil
    uint64_t mhs_powmod(uint64_t b, uint64_t e, uint64_t m) nogil
    uint64_t mhs_invmod(uint64_t a, uint64_t m) nogil


def scan(parts, p, t, modulus, n_start, n_end, psum, test_modulus=0):
    cdef int d = len(parts)
    cdef uint64_t M = modulus
    cdef uint64_t P = p
    cdef uint64_t T = test_modulus
    cdef int tt = t
    cdef uint64_t n, k, u, start = n_start, end = n_end
    cdef int i, v, j
    cdef uint64_t *ps = <uint64_t *> malloc((d + 1) * sizeof(uint64_t))
    cdef uint64_t *sp = <uint64_t *> malloc(d * sizeof(uint64_t))
    cdef uint64_t *scale = <uint64_t *> malloc(d * (tt + 1) * sizeof(uint64_t))
    # ring buffer over the last d indices: unit part inverse and valuation
    cdef uint64_t *ring_inv = <uint64_t *> malloc(d * sizeof(uint64_t))
    cdef int *ring_v = <int *> malloc(d * sizeof(int))
    if not ps or not sp or not scale or not ring_inv or not ring_v:
        free(ps); free(sp); free(scale); free(ring_inv); free(ring_v)
        raise MemoryError()

    hits = []
    try:
        for i in range(d + 1):
            ps[i] = <uint64_t> (psum[i] % modulus)
        for i in range(d):
            sp[i] = parts[i]
            for v in range(tt + 1):
                scale[i * (tt + 1) + v] = <uint64_t> pow(p, (tt - v) * parts[i], modulus)

        with nogil:
            # prime the ring with k = start-d+1 .. start-1
            for k in range(start - d + 1, start):
                u = k
                v = 0
                while u % P == 0:
                    u = u // P
                    v += 1
                ring_inv[k % d] = mhs_invmod(u, M)
                ring_v[k % d] = v

            for n in range(start, end):
                u = n
                v = 0
                while u % P == 0:
                    u = u // P
                    v += 1
                ring_inv[n % d] = mhs_invmod(u, M)
                ring_v[n % d] = v
                k = n - d
                for i in range(d):
                    k += 1
                    j = <int> (k % d)
                    ps[i + 1] = mhs_addmod(
                        ps[i + 1],
                        mhs_mulmod(
                            mhs_mulmod(scale[i * (tt + 1) + ring_v[j]], ps[i], M),
                            mhs_powmod(ring_inv[j], sp[i], M),
                            M,
                        ),
                        M,
                    )
                if T != 0 and ps[d] % T == 0:
                    with gil:
                        hits.append((n, ps[d]))

        for i in range(d + 1):
            psum[i] = ps[i]
    finally:
        free(ps); free(sp); free(scale); free(ring_inv); free(ring_v)
    return hits
