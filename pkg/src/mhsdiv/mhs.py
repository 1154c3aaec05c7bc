"""Multiple harmonic sums, exactly and as scaled residues modulo p**K.

Convention::

    H(s_1, ..., s_d; n) = sum over 1 <= k_1 < ... < k_d <= n of prod k_i**(-s_i)

with ``s_d`` attached to the largest index, so that

    H(s_1..s_i; k) = H(s_1..s_i; k-1) + H(s_1..s_{i-1}; k-1) / k**s_i.

``H`` of the empty composition is 1, and ``H(s; n) = 0`` whenever ``n < d``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm

from . import kernel
from .arith import FAST_LIMIT, Valuation, mod_inv, rational_val
from .errors import PrecisionLoss, SegmentExhausted

ExactRational = Fraction

_TOKEN = re.compile(r"^\s*(\d+)\s*(?:\^\s*(\d+))?\s*$")


@dataclass(frozen=True)
class Composition:
    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(s) for s in self.parts)
        if not parts:
            raise ValueError("composition must have at least one part")
        if any(s < 1 for s in parts):
            raise ValueError(f"parts must be >= 1, got {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def parse(cls, text: str) -> "Composition":
        """Parse ``"2,3"``; ``"2^4"`` repeats a part, so ``"1,2^3"`` is (1,2,2,2)."""
        parts: list[int] = []
        for token in str(text).split(","):
            m = _TOKEN.match(token)
            if not m:
                raise ValueError(f"bad composition token {token!r} in {text!r}")
            parts.extend([int(m.group(1))] * int(m.group(2) or 1))
        return cls(tuple(parts))

    @property
    def depth(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def min_part(self) -> int:
        return min(self.parts)

    @cached_property
    def prefix_weights(self) -> tuple[int, ...]:
        out, acc = [], 0
        for s in self.parts:
            acc += s
            out.append(acc)
        return tuple(out)

    def __str__(self):
        return ",".join(map(str, self.parts))

    def __iter__(self):
        return iter(self.parts)

    def __len__(self):
        return len(self.parts)


def as_composition(c) -> Composition:
    if isinstance(c, Composition):
        return c
    if isinstance(c, str):
        return Composition.parse(c)
    if isinstance(c, int):
        return Composition((c,))
    return Composition(tuple(c))


def exact_mhs(c, n: int) -> Fraction:
    """Exact value of H(c; n) as a reduced fraction.

    Works over the common denominator ``lcm(1..n)**wt_i`` so every step is an
    integer operation; cost grows quickly with n and weight, which is fine for
    an oracle.
    """
    c = as_composition(c)
    d = c.depth
    if n < d:
        return Fraction(0)
    L = lcm(*range(1, n + 1))
    Ls = [L ** s for s in c.parts]
    # num[i] = L**wt_i * H(s_1..s_i; k) after index k has been processed
    num = [1] + [0] * d
    for k in range(1, n + 1):
        for i in range(min(k, d), 0, -1):
            num[i] += num[i - 1] * (Ls[i - 1] // k ** c.parts[i - 1])
    return Fraction(num[d], L ** c.weight)


def exact_mhs_valuation(c, n: int, p: int) -> Valuation:
    x = exact_mhs(c, n)
    return rational_val(x.numerator, x.denominator, p)


def rational_mod(x: Fraction, modulus: int) -> int:
    """Reduce a p-integral rational modulo ``modulus``."""
    return x.numerator * mod_inv(x.denominator, modulus) % modulus


class ScaledStream:
    """Running values ``psum[i] = p**(t*wt_i) * H(s_1..s_i; n-d+i) mod p**K``.

    ``psum[0]`` is the constant 1. A fresh stream sits at ``n = d-1`` where
    every prefix sum is still empty. The scale ``t`` fixes the last index the
    stream may reach, ``p**(t+1) - 1``; below that bound every index has
    p-adic valuation at most t, so all residues are p-integral.
    """

    def __init__(self, composition, p: int, t: int, K: int, backend=None,
                 allow_bigint: bool = True):
        c = as_composition(composition)
        if t < 0 or K < 1:
            raise ValueError(f"need t >= 0 and K >= 1, got t={t}, K={K}")
        self.composition = c
        self.p, self.t, self.K = p, t, K
        self.modulus = p ** K
        self.n = c.depth - 1
        self.psum = [1] + [0] * c.depth
        self.backend = backend
        self.allow_bigint = allow_bigint

    @property
    def limit(self) -> int:
        """Exclusive upper bound on the index this scale can reach."""
        return self.p ** (self.t + 1)

    @property
    def value(self) -> int:
        return self.psum[-1]

    @property
    def fast(self) -> bool:
        return self.modulus < FAST_LIMIT

    def copy(self) -> "ScaledStream":
        new = object.__new__(ScaledStream)
        new.__dict__.update(self.__dict__)
        new.psum = list(self.psum)
        return new

    def advance(self) -> int:
        self.advance_to(self.n + 1)
        return self.value

    def advance_to(self, n_last: int, test_modulus: int = 0):
        """Advance through index ``n_last`` inclusive.

        Returns ``[(n, residue)]`` for the indices whose top residue is
        divisible by ``test_modulus`` (nothing is tested when it is 0).
        """
        if n_last >= self.limit:
            raise SegmentExhausted(
                f"index {n_last} needs scale > {self.t} (limit {self.limit})")
        hits = kernel.scan(self.composition.parts, self.p, self.t, self.modulus,
                           self.n + 1, n_last + 1, self.psum, test_modulus,
                           backend=self.backend, allow_bigint=self.allow_bigint)
        self.n = max(self.n, n_last)
        return hits

    def enter_next_segment(self, K: int | None = None) -> None:
        """Raise the scale by one, multiplying each psum[i] by p**wt_i.

        A residue known mod p**K_old becomes known mod p**(K_old + wt_i), so
        the new exponent may not exceed ``K_old + s_1``.
        """
        K = self.K if K is None else K
        if K > self.K + self.composition.parts[0]:
            raise PrecisionLoss(
                f"cannot rescale from p^{self.K} to p^{K}; at most p^{self.K + self.composition.parts[0]}")
        M = self.p ** K
        for i, w in enumerate(self.composition.prefix_weights, start=1):
            self.psum[i] = self.psum[i] * self.p ** w % M
        self.psum[0] = 1 % M
        self.t += 1
        self.K, self.modulus = K, M

    def __repr__(self):
        return (f"ScaledStream(s=({self.composition}), p={self.p}, t={self.t}, "
                f"K={self.K}, n={self.n}, psum={self.psum})")


def stream_new(c, p: int, t: int, K: int, previous: ScaledStream | None = None,
               **kwargs) -> ScaledStream:
    """Stream positioned so that its next step lands on ``max(d, p**t)``.

    With ``previous`` (a stream at scale t-1 that has finished its segment),
    the state is carried over and rescaled instead of recomputed.
    """
    if previous is not None:
        if previous.t != t - 1 or previous.n != p ** t - 1:
            raise ValueError("previous stream must have completed segment t-1")
        state = previous.copy()
        state.enter_next_segment(K)
        return state
    state = ScaledStream(c, p, t, K, **kwargs)
    start = max(state.composition.depth, p ** t)
    if start - 1 > state.n:
        state.advance_to(start - 1)
    return state


def stream_advance(state: ScaledStream) -> ScaledStream:
    """Return a copy of ``state`` advanced by one index."""
    new = state.copy()
    new.advance()
    return new
