"""p-divisible sets J(s|p^k) = {n >= 0 : v_p(H(s;n)) >= k}, segment by segment.

Segments are G_1 = [1, p) and G_tau = [p**(tau-1), p**tau) for tau >= 2;
n = 0 (and every n < d, where H vanishes) is a trivial member.

Depth one admits a cheap lifting step. Writing n = p*q + r,

    H(s; p*q + r) = p**(-s) * H(s; q) + (sum over indices prime to p),

and the second sum is p-integral. So v_p(H(s;n)) >= 0 forces
v_p(H(s;q)) >= s: only blocks above such parents q need to be examined,
and once a whole segment has no parent, the set is complete.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Iterable

from .arith import FAST_LIMIT, residue_val
from .criterion import DEFAULT_BUDGET, TauCertificate, criterion_rhs, scan_for_tau
from .errors import AsymmetricSet, DepthUnsupported, RuleUnavailable
from .mhs import Composition, ScaledStream, as_composition


@dataclass(frozen=True)
class Segment:
    p: int
    index: int

    @property
    def lower(self) -> int:
        return 1 if self.index == 1 else self.p ** (self.index - 1)

    @property
    def upper(self) -> int:
        return self.p ** self.index - 1

    def __contains__(self, n):
        return self.lower <= n <= self.upper


@dataclass(frozen=True)
class JMember:
    """``valuation`` is None for H = 0; ``exact`` False means it is only a lower bound."""

    n: int
    valuation: int | None
    exact: bool = False
    trivial: bool = False


@dataclass
class JReport:
    composition: tuple
    p: int
    k: int
    members: list
    segments_scanned: int
    certificate: TauCertificate | None
    strategy: str
    status: str = "inconclusive"

    @property
    def complete(self) -> bool:
        return self.status == "complete"

    def values(self, include_trivial: bool = False) -> list[int]:
        """Member indices; trivial ones other than 0 only on request."""
        return [m.n for m in self.members
                if include_trivial or not m.trivial or m.n == 0]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["certificate"] = None if self.certificate is None else asdict(self.certificate)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _trivial_members(d: int, lo: int, hi: int) -> list[JMember]:
    return [JMember(n, None, True, True) for n in range(lo, min(d, hi + 1))]


def _evidence_exponent(p: int, K: int, extra: int = 4) -> int:
    # a few spare digits turn "zero mod p^K" into an exact valuation, if still fast
    if p ** K >= FAST_LIMIT:
        return K
    E = K
    while E < K + extra and p ** (E + 1) < FAST_LIMIT:
        E += 1
    return E


def scan_segment(c, p: int, tau: int, k: int = 1, allow_bigint: bool = True,
                 backend=None) -> list[JMember]:
    """All n in G_tau with v_p(H(c; n)) >= k, by exhaustive scan.

    The stream is started fresh at scale tau-1 and modulus
    p**((tau-1)*wt + k) (plus spare digits for valuation evidence).
    """
    c = as_composition(c)
    seg = Segment(p, tau)
    d, t = c.depth, tau - 1
    K = t * c.weight + k
    E = _evidence_exponent(p, K)
    stream = ScaledStream(c, p, t, E, backend=backend, allow_bigint=allow_bigint)
    out = _trivial_members(d, seg.lower, seg.upper)
    start = max(seg.lower, d)
    if start > seg.upper:
        return out
    stream.advance_to(start - 1)
    for n, r in stream.advance_to(seg.upper, test_modulus=p ** K):
        v = residue_val(r, p, E)
        out.append(JMember(n, v - t * c.weight, r != 0))
    return out


def verify_candidates(c, p: int, tau: int, candidates, k: int = 1,
                      backend=None) -> list[JMember]:
    """Keep the candidates in G_tau with v_p(H(c; n)) >= k.

    For d >= 2 and tau >= 2 every member is a zero of the criterion scan,
    so the zeros recorded by :func:`scan_for_tau` are a complete candidate
    list. This pass reruns only up to the largest candidate, at the full
    membership modulus p**((tau-1)*wt + k).
    """
    c = as_composition(c)
    cand = sorted(set(candidates))
    if not cand:
        return []
    t = tau - 1
    K = t * c.weight + k
    E = _evidence_exponent(p, K)
    stream = ScaledStream(c, p, t, E, backend=backend)
    wanted = set(cand)
    out = []
    for n, r in stream.advance_to(cand[-1], test_modulus=p ** K):
        if n in wanted:
            out.append(JMember(n, residue_val(r, p, E) - t * c.weight, r != 0))
    return out


# -- depth-one lifting ---------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli(n: int) -> tuple[Fraction, ...]:
    """B_0..B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, j) * B[j] for j in range(m)) / (m + 1))
    return tuple(B)


def power_sum(N: int, l: int) -> int:
    """sum_{j=0}^{N-1} j**l (with 0**0 = 1), by Faulhaber's formula."""
    B = _bernoulli(l)
    total = sum(comb(l + 1, i) * B[i] * N ** (l + 1 - i) for i in range(l + 1))
    total /= l + 1
    assert total.denominator == 1
    return int(total)


class _DepthOneLifter:
    """Values H(s; n) mod p**prec for children of known parents."""

    def __init__(self, s: int, p: int, prec: int):
        self.s, self.p = s, p
        M = p ** prec
        # full-period sums sum_{r=1}^{p-1} r^(-x) mod p**prec, x = s..s+prec-1
        self.period = [sum(pow(r, -(s + l), M) for r in range(1, p)) % M
                       for l in range(prec)]

    def children(self, parent: int, value: int, prec: int) -> list[tuple[int, int]]:
        """``value`` is H(s; parent) mod p**prec, divisible by p**s.

        Returns ``[(n, H(s; n) mod p**(prec-s))]`` for n in [p*parent, p*parent+p).
        """
        s, p = self.s, self.p
        L = prec - s
        M = p ** L
        # sum of (p*j + r)^(-s) over 0 <= j < parent, 1 <= r < p, expanded in p*j/r
        head = 0
        for l in range(L):
            coeff = (-1) ** l * comb(s + l - 1, l)
            head += coeff * p ** l * power_sum(parent, l) * self.period[l]
        acc = (value // p ** s + head) % M
        base = p * parent
        out = [(base, acc)]
        for r in range(1, p):
            acc = (acc + pow(base + r, -s, M)) % M
            out.append((base + r, acc))
        return out


def _level_one(s: int, p: int, prec: int, backend=None) -> list[tuple[int, int]]:
    stream = ScaledStream((s,), p, 0, prec, backend=backend)
    return stream.advance_to(p - 1, test_modulus=1)


def _members_from_values(pairs, p, prec, k):
    out = []
    for n, r in pairs:
        v = residue_val(r, p, prec)
        if v >= k:
            out.append(JMember(n, v, r != 0))
    return out


def lift_candidates(c, p: int, tau: int, parents: Iterable[int], k: int = 1,
                    backend=None) -> list[JMember]:
    """Members of J_tau(s|p^k) found by scanning only the blocks above ``parents``.

    ``parents`` must lie in J_{tau-1}(s|p^s); that is the complete set of
    blocks that can hold members. Their values are recomputed here with a
    stream over G_{tau-1}.
    """
    c = as_composition(c)
    if c.depth != 1:
        raise DepthUnsupported("lifting is only available for depth one; use scan_segment")
    if tau < 2:
        raise ValueError("lifting starts at tau = 2")
    parents = sorted(set(parents))
    if not parents:
        return []
    s = c.parts[0]
    prec = s + max(k, s)
    t = tau - 2
    if any(q not in Segment(p, tau - 1) for q in parents):
        raise ValueError(f"parents must lie in G_{tau - 1}")
    stream = ScaledStream(c, p, t, t * s + prec, backend=backend)
    lo = Segment(p, tau - 1).lower
    stream.advance_to(lo - 1)
    wanted = set(parents)
    values = {}
    for n, r in stream.advance_to(parents[-1], test_modulus=1):
        if n in wanted:
            if r % p ** (t * s + s):
                raise ValueError(f"parent {n} is not in J_{tau - 1}(s|p^s)")
            values[n] = r // p ** (t * s)
    lifter = _DepthOneLifter(s, p, prec)
    out = []
    for q in parents:
        out += _members_from_values(lifter.children(q, values[q], prec), p, prec - s, k)
    return out


def _enumerate_lifted(c: Composition, p: int, k: int, horizon: int, backend=None):
    """Levels 1..horizon by lifting; returns (members, scanned, certifying tau or None)."""
    s = c.parts[0]
    cap = max(k, s)
    prec = cap + s * (horizon - 1)
    pairs = _level_one(s, p, prec, backend)
    members = _members_from_values(pairs, p, prec, k)
    parents = [(n, r) for n, r in pairs if residue_val(r, p, prec) >= s]
    lifter = _DepthOneLifter(s, p, prec)
    for tau in range(2, horizon + 1):
        children = []
        for q, value in parents:
            children += lifter.children(q, value, prec)
        prec -= s
        members += _members_from_values(children, p, prec, k)
        parents = [(n, r) for n, r in children if residue_val(r, p, prec) >= s]
        if not parents:
            return members, tau, tau
    return members, horizon, None


def enumerate_jset(c, p: int, k: int = 1, max_segment: int = 2, strategy: str = "auto",
                   e: int | None = None, budget: int | None = DEFAULT_BUDGET,
                   override: bool = False, backend=None) -> JReport:
    """J(c|p^k) over segments 1..max_segment, plus a finiteness certificate if one is found.

    The certificate search runs up to ``e`` (default ``max_segment``). With a
    certificate at tau_c, no member lies beyond G_tau_c, so the segments up
    to tau_c are scanned and the report is ``complete``.
    """
    c = as_composition(c)
    if max_segment < 1:
        raise ValueError("max_segment must be >= 1")
    if strategy == "auto":
        strategy = "lifted" if c.depth == 1 else "exhaustive"
    if strategy == "lifted" and c.depth != 1:
        raise DepthUnsupported("lifted strategy needs a depth-one composition")
    horizon = max(max_segment, e or 0, 2)
    members = [JMember(0, None, True, True)]
    cert = None

    if strategy == "lifted":
        found, scanned, tau_c = _enumerate_lifted(c, p, k, horizon, backend)
        members += _trivial_members(c.depth, 1, p - 1)
        members += found
        if tau_c is not None:
            cert = TauCertificate(c.parts, p, tau_c, horizon, criterion_rhs(c, tau_c),
                                  True, "lifted")
    elif strategy == "exhaustive":
        result, zeros = scan_for_tau(c, p, horizon, budget=budget, override=override,
                                     backend=backend)
        if isinstance(result, TauCertificate):
            cert = result
        if cert is None:
            last = max_segment
        elif c.depth == 1:
            last = cert.tau
        else:
            # for d >= 2 the certified segment itself has v_p(H) < 0 throughout
            last = cert.tau - 1
        for tau in range(1, last + 1):
            # at scale 0 a member need not vanish mod p**m, so scan G_1 in full
            if c.depth == 1 or tau == 1:
                members += scan_segment(c, p, tau, k, backend=backend)
            else:
                seg = Segment(p, tau)
                members += _trivial_members(c.depth, seg.lower, seg.upper)
                members += verify_candidates(c, p, tau, zeros.get(tau, ()), k, backend)
        scanned = last
    else:
        raise ValueError(f"unknown strategy {strategy!r}")

    uniq = {}
    for m in members:
        uniq.setdefault(m.n, m)
    status = "complete" if cert is not None else "inconclusive"
    return JReport(c.parts, p, k, sorted(uniq.values(), key=lambda m: m.n), scanned,
                   cert, strategy, status)


# -- first-segment structure and reserved sets ------------------------------------

def extract_T(j1, p: int, s: int) -> list[int]:
    """Representatives r < (p-1)/2 of the non-reserved part of J_1(s|p).

    ``j1`` holds the first-segment members (ints or JMember). Raises
    :class:`AsymmetricSet` if the remainder is not closed under r -> p-1-r.
    """
    ns = {m.n if isinstance(m, JMember) else int(m) for m in j1}
    reserved = {0, p - 1}
    if s % 2 == 0:
        reserved.add((p - 1) // 2)
    rest = ns - reserved
    bad = sorted(r for r in rest if p - 1 - r not in rest)
    if bad:
        raise AsymmetricSet(f"J_1({s}|{p}) is not symmetric: no partner for {bad}")
    return sorted(r for r in rest if 2 * r < p - 1)


@dataclass(frozen=True)
class ReservedSetRule:
    kind: str
    provider: Callable | None = field(default=None, compare=False)

    KINDS = ("depth1-odd", "depth1-even", "homogeneous", "homogeneous-literal", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == "custom" and self.provider is None:
            raise ValueError("custom rule needs a provider")


def default_rule(c) -> ReservedSetRule:
    c = as_composition(c)
    if c.depth == 1:
        return ReservedSetRule("depth1-even" if c.parts[0] % 2 == 0 else "depth1-odd")
    if len(set(c.parts)) == 1:
        return ReservedSetRule("homogeneous")
    raise RuleUnavailable(f"no reserved-set rule for mixed composition ({c}); "
                          "supply a custom provider")


def reserved_set(rule: ReservedSetRule | None, c, p: int) -> set[int]:
    c = as_composition(c)
    if rule is None:
        rule = default_rule(c)
    half = (p - 1) // 2
    if rule.kind == "custom":
        return set(rule.provider(c, p))
    if rule.kind == "depth1-odd":
        return {0, p - 1}
    if rule.kind == "depth1-even":
        return {0, half, p - 1}
    # homogeneous {s}^d. The index p is a member only when p**s divides
    # H({s}^(d-1); p-1), since the last step adds that sum over p**s. That
    # is rare (37 for {2}^3), so the default kind leaves p out and
    # "homogeneous-literal" keeps it.
    if len(set(c.parts)) != 1:
        raise RuleUnavailable(f"homogeneous rule does not apply to ({c})")
    s, d = c.parts[0], c.depth
    if d == 1:
        return reserved_set(ReservedSetRule("depth1-even" if s % 2 == 0 else "depth1-odd"), c, p)
    if s % 2:
        return {0, p - 1}
    out = {0, p - 1} | {half + i for i in range(d)}
    if rule.kind == "homogeneous-literal":
        out.add(p)
    return out
