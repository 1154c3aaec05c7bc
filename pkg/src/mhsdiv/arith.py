"""Prime-power modular arithmetic and p-adic valuations.

Everything here is a pure function of its arguments. Residues are always
returned in canonical form ``0 <= r < modulus``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import ClassVar

from .errors import NotInvertible, ZeroDenominator, ZeroInput

FAST_LIMIT = 1 << 64

# Deterministic for n < 3.3e24 (Sorenson & Webster); covers every 64-bit input.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin with fixed bases)."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_between(lo: int, hi: int) -> list[int]:
    """Primes p with ``lo < p < hi`` (open interval), via a byte sieve."""
    if hi <= 2:
        return []
    sieve = bytearray([1]) * hi
    sieve[0:2] = b"\x00\x00"
    for q in range(2, isqrt(hi - 1) + 1):
        if sieve[q]:
            sieve[q * q::q] = bytes(len(range(q * q, hi, q)))
    return [n for n in range(max(lo + 1, 2), hi) if sieve[n]]


@dataclass(frozen=True)
class PrimePowerModulus:
    p: int
    k: int
    value: int = field(init=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"exponent must be >= 1, got {self.k}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "value", self.p ** self.k)

    @property
    def fast(self) -> bool:
        """True when residues and double-width products fit the 64/128-bit kernel."""
        return self.value < FAST_LIMIT


@dataclass(frozen=True)
class Valuation:
    finite: bool
    v: int = 0

    INF: ClassVar["Valuation"]

    def __str__(self):
        return str(self.v) if self.finite else "inf"

    def at_least(self, k: int) -> bool:
        return not self.finite or self.v >= k


Valuation.INF = Valuation(False)


def _modulus_value(M) -> int:
    return M.value if isinstance(M, PrimePowerModulus) else int(M)


def mod_mul(a: int, b: int, M) -> int:
    # Python ints never overflow; the compiled kernel does its own 128-bit products.
    m = _modulus_value(M)
    return a * b % m


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``a*x + b*y == g == gcd(a, b)``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def mod_inv(a: int, M) -> int:
    """Inverse of ``a`` modulo a prime power, by the extended Euclidean algorithm.

    Raises :class:`NotInvertible` when ``p | a``; callers are expected to strip
    powers of p before inverting.
    """
    m = _modulus_value(M)
    g, x, _ = egcd(a % m, m)
    if g != 1:
        raise NotInvertible(f"{a} is not invertible modulo {m}")
    return x % m


def padic_val(n: int, p: int) -> tuple[int, int]:
    """Split ``n = p**v * u`` with ``p`` not dividing ``u``."""
    if n == 0:
        raise ZeroInput("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def rational_val(num: int, den: int, p: int) -> Valuation:
    if den == 0:
        raise ZeroDenominator("zero denominator")
    if num == 0:
        return Valuation.INF
    return Valuation(True, padic_val(num, p)[0] - padic_val(den, p)[0])


def residue_val(r: int, p: int, cap: int) -> int:
    """Valuation of a residue mod ``p**cap``; a zero residue reports ``cap``."""
    if r == 0:
        return cap
    v = 0
    while r % p == 0 and v < cap:
        r //= p
        v += 1
    return v
