import random

import pytest

from mhsdiv.criterion import (Inconclusive, TauCertificate, criterion_check, criterion_rhs,
                              find_tau, first_scale, segment_zeros)
from mhsdiv.errors import BudgetExceeded
from mhsdiv.mhs import as_composition, exact_mhs_valuation


def test_first_scale():
    assert first_scale(1, 7) == 0
    assert first_scale(2, 2) == 1
    assert first_scale(5, 2) == 2
    assert first_scale(9, 3) == 2


def test_rhs():
    assert criterion_rhs((2, 2), 2) == 0
    assert criterion_rhs((3, 3, 3), 3) == 9


@pytest.mark.parametrize("parts,p,e,tau", [
    ((2, 2), 13, 8, 2),
    ((3, 3), 13, 8, 2),
    ((3, 3, 3), 13, 8, 3),
    ((4, 4), 19, 8, 2),
    ((5, 5), 13, 8, 2),
    ((6, 6), 17, 8, 2),
    ((1, 1), 3, 12, 6),
    ((1, 1, 1), 3, 12, 10),
    ((2, 2), 7, 8, 3),
])
def test_find_tau(parts, p, e, tau):
    cert = find_tau(parts, p, e)
    assert isinstance(cert, TauCertificate) and cert.verified
    assert cert.tau == tau and cert.rhs == criterion_rhs(parts, tau)


def test_inconclusive():
    res = find_tau((1, 1, 1, 1), 3, 3)
    assert isinstance(res, Inconclusive) and not res.verified
    assert res.e_bound == 3 and "larger" in res.reason


def test_e_must_be_two():
    with pytest.raises(ValueError):
        find_tau((2, 2), 13, 1)


def test_budget_guard():
    with pytest.raises(BudgetExceeded):
        find_tau((1, 1), 17, 8, budget=10 ** 5)
    assert isinstance(find_tau((2, 2), 13, 8, budget=10 ** 5), TauCertificate)
    assert isinstance(find_tau((1, 1), 3, 12, budget=10, override=True), TauCertificate)


@pytest.mark.parametrize("parts,p", [((1, 1, 1), 2), ((1, 2, 1), 2), ((2, 2, 2, 2), 3),
                                     ((1, 1, 1, 1, 1), 3), ((2, 1, 1), 3)])
def test_certificate_beyond_depth_segment(parts, p):
    res = find_tau(parts, p, 12)
    t0 = first_scale(len(parts), p) + 1
    if isinstance(res, TauCertificate):
        assert res.tau > t0
    else:
        assert all(z > 0 for z in res.zero_counts[1:])


@pytest.mark.parametrize("parts,p", [((2, 2), 13), ((1, 1), 7), ((3, 3), 11), ((2, 2), 7)])
def test_monotone_in_e(parts, p):
    seen = None
    for e in range(2, 7):
        res = find_tau(parts, p, e)
        if isinstance(res, TauCertificate):
            if seen is None:
                seen = res.tau
            assert res.tau == seen
        else:
            assert seen is None


def test_deterministic():
    a = find_tau((3, 3, 3), 13, 8).to_json()
    b = find_tau((3, 3, 3), 13, 8).to_json()
    assert a == b


class TestCheck:
    def test_from_find_tau(self):
        assert criterion_check(find_tau((2, 2), 13, 8))

    def test_first_segment_fails(self):
        cert = TauCertificate((2,), 7, 1, 8, criterion_rhs((2,), 1), True)
        assert not criterion_check(cert)

    def test_hand_built_5_5(self):
        cert = TauCertificate((5, 5), 13, 2, 8, criterion_rhs((5, 5), 2), True)
        assert criterion_check(cert)

    def test_too_early(self):
        # (2,2) at p=7 has zeros in G_2, and G_1 is never eligible
        assert not criterion_check(TauCertificate((2, 2), 7, 2, 8, 0, True))
        assert not criterion_check(TauCertificate((1, 1, 1), 2, 2, 8, 0, True))

    def test_inconclusive_is_not_certified(self):
        assert not criterion_check(find_tau((1, 1, 1, 1), 3, 3))


@pytest.mark.parametrize("parts,p,e", [((2, 2), 13, 8), ((3, 3), 13, 8), ((1, 1), 7, 8),
                                       ((2, 2), 7, 8), ((1, 1), 3, 12), ((3, 3, 3), 13, 8)])
def test_oracle_consistency(parts, p, e):
    cert = find_tau(parts, p, e)
    c = as_composition(parts)
    tau, m, wt = cert.tau, c.min_part, c.weight
    bound = m * (tau - 1) + m - (tau - 1) * wt
    lo, hi = max(c.depth, p ** (tau - 1)), min(p ** tau - 1, 10 ** 4)
    rng = random.Random(f"{parts}{p}")
    sample = rng.sample(range(lo, hi + 1), min(20, hi - lo + 1))
    for n in sample:
        assert exact_mhs_valuation(parts, n, p).v < bound, n


def test_segment_zeros_against_oracle():
    parts, p, tau = (1, 1), 7, 2
    c = as_composition(parts)
    bound = c.min_part * tau - (tau - 1) * c.weight
    expected = [n for n in range(p, p * p)
                if exact_mhs_valuation(parts, n, p).at_least(bound)]
    assert segment_zeros(parts, p, tau) == expected
