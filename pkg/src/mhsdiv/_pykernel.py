"""Pure-Python scan kernel.

Reference implementation of the scaled partial-sum recursion. It works for
moduli of any size, so it doubles as the arbitrary-precision backend when a
modulus does not fit in 64 bits.
"""


def scan(parts, p, t, modulus, n_start, n_end, psum, test_modulus=0):
    """Advance ``psum`` over ``n_start <= n < n_end`` and collect zero hits.

    ``psum[i]`` holds ``p**(t*wt_i) * H(s_1..s_i; n-d+i) mod modulus`` and is
    updated in place. Returns ``[(n, psum[d]), ...]`` for every n at which
    ``psum[d] % test_modulus == 0``; ``test_modulus=0`` disables the test.
    Requires ``n_start >= d`` and ``n_end <= p**(t+1)``.
    """
    d = len(parts)
    M = modulus
    # scale[i][v] = p^((t-v)*s_i) mod M, for an index with p-adic valuation v <= t
    scale = [[pow(p, (t - v) * s, M) for v in range(t + 1)] for s in parts]
    rng = range(1, d + 1)
    hits = []
    for n in range(n_start, n_end):
        k = n - d
        for i in rng:
            k += 1
            u, v = k, 0
            while u % p == 0:
                u //= p
                v += 1
            psum[i] = (psum[i] + scale[i - 1][v] * psum[i - 1] * pow(u, -parts[i - 1], M)) % M
        if test_modulus and psum[d] % test_modulus == 0:
            hits.append((n, psum[d]))
    return hits
