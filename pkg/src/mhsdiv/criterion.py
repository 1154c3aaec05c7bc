"""Segment search certifying finiteness of J(s|p).

For a composition of weight wt and minimum part m, the test at segment
G_tau = [p**(tau-1), p**tau) is

    p**((tau-1)*wt) * H(s; n)  !=  0   (mod p**(m*tau))   for all n in G_tau,

which is equivalent to ``min(-v_p(H(s;n))) > (wt-m)(tau-1) - m`` over the
segment. Once it holds for some tau past the segment containing the depth,
J(s|p) is finite.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .errors import BudgetExceeded
from .mhs import ScaledStream, as_composition

DEFAULT_BUDGET = 10 ** 9


def first_scale(d: int, p: int) -> int:
    """Largest t with p**t <= d; the segment holding d is G_{t+1}."""
    t = 0
    while p ** (t + 1) <= d:
        t += 1
    return t


def criterion_rhs(c, tau: int) -> int:
    c = as_composition(c)
    return (c.weight - c.min_part) * (tau - 1) - c.min_part


@dataclass(frozen=True)
class TauCertificate:
    composition: tuple
    p: int
    tau: int
    e_bound: int
    rhs: int
    verified: bool
    method: str = "scan"
    zero_counts: tuple = field(default=())

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


@dataclass(frozen=True)
class Inconclusive:
    """No certifying segment with tau <= e_bound; the table notation is ">e"."""

    composition: tuple
    p: int
    e_bound: int
    zero_counts: tuple = field(default=())
    reason: str = "e has to be larger"

    verified = False

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _check_budget(spent, c, p, t, budget, override):
    if override or budget is None:
        return
    if spent > budget:
        raise BudgetExceeded(
            f"scanning G_{t + 1} for s=({c}), p={p} needs ~{spent:.3g} steps "
            f"(budget {budget:.3g}); pass an explicit override to run it")


def find_tau(c, p: int, e: int, budget: int | None = DEFAULT_BUDGET,
             override: bool = False, backend=None):
    """Scan segments until the criterion holds; ``TauCertificate`` or ``Inconclusive``.

    One stream runs through consecutive segments with modulus p**(m*t+m);
    between segments each prefix sum is multiplied by p**wt_i. Segments
    with tau <= t0 (where d lies in G_t0) never certify, since the criterion
    needs tau > t0.
    """
    return scan_for_tau(c, p, e, budget, override, backend)[0]


def scan_for_tau(c, p: int, e: int, budget: int | None = DEFAULT_BUDGET,
                 override: bool = False, backend=None):
    """:func:`find_tau` that also returns ``{tau: [n, ...]}``, the indices
    whose scaled sum vanished in each scanned segment."""
    c = as_composition(c)
    if e < 2:
        raise ValueError("e must be >= 2")
    d, m = c.depth, c.min_part
    t = first_scale(d, p)
    t0 = t + 1
    stream = ScaledStream(c, p, t, m * t + m, backend=backend)
    zeros = {}
    spent = 0
    first = True
    while t < e:
        if not first:
            stream.enter_next_segment(m * t + m)
        first = False
        lo, hi = max(d, p ** t), p ** (t + 1)
        spent += (hi - lo) * d
        _check_budget(spent, c, p, t, budget, override)
        tau = t + 1
        zeros[tau] = [n for n, _ in stream.advance_to(hi - 1, test_modulus=stream.modulus)]
        if not zeros[tau] and tau > t0:
            counts = tuple(len(z) for z in zeros.values())
            return TauCertificate(c.parts, p, tau, e, criterion_rhs(c, tau), True,
                                  "scan", counts), zeros
        t += 1
    return Inconclusive(c.parts, p, e, tuple(len(z) for z in zeros.values())), zeros


def segment_zeros(c, p: int, tau: int, budget: int | None = DEFAULT_BUDGET,
                  override: bool = False, backend=None) -> list[int]:
    """Indices n in G_tau whose scaled sum vanishes mod p**(m*tau); fresh prefix."""
    c = as_composition(c)
    d, m, t = c.depth, c.min_part, tau - 1
    hi = p ** tau
    _check_budget(hi * d, c, p, t, budget, override)
    stream = ScaledStream(c, p, t, m * tau, backend=backend)
    lo = max(d, p ** t)
    stream.advance_to(lo - 1)
    return [n for n, _ in stream.advance_to(hi - 1, test_modulus=stream.modulus)]


def criterion_check(cert, budget: int | None = DEFAULT_BUDGET, override: bool = False,
                    backend=None) -> bool:
    """Independently rescan G_tau; True iff the criterion holds there."""
    tau = getattr(cert, "tau", None)
    if tau is None:
        return False
    c = as_composition(cert.composition)
    if tau <= first_scale(c.depth, cert.p) + 1:
        return False
    return not segment_zeros(c, cert.p, tau, budget, override, backend)
