"""Per-prime verdicts J(s|p) == RJ(s;p) and reserved densities over primes.

A density survey is a list of independent prime tasks. Results are merged
in prime order, so the output does not depend on the number of workers, and
every finished task can be appended to a checkpoint store so that an
interrupted survey resumes where it stopped.
"""
from __future__ import annotations

import json
import logging
import os
import threading
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from functools import partial

from .arith import primes_between
from .criterion import DEFAULT_BUDGET
from .errors import BudgetExceeded, StoreCorrupt
from .jsets import ReservedSetRule, enumerate_jset, reserved_set
from .mhs import as_composition

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
EQUAL, NOT_EQUAL, INCONCLUSIVE = "equal", "not-equal", "inconclusive"


@dataclass
class PrimeTask:
    composition: tuple
    p: int
    rj_rule: ReservedSetRule | None = None
    max_segment: int = 2
    status: str = "pending"


@dataclass(frozen=True)
class PrimeRecord:
    """One line of the checkpoint store (see docs/checkpoint_schema.md)."""

    composition: tuple
    p: int
    verdict: str
    members: tuple
    tau: int | None
    elapsed_ms: int = 0
    schema_version: int = SCHEMA_VERSION

    def to_line(self) -> str:
        d = asdict(self)
        d["composition"] = list(self.composition)
        d["members"] = list(self.members)
        return json.dumps(d, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "PrimeRecord":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        return cls(tuple(d["composition"]), int(d["p"]), d["verdict"],
                   tuple(d["members"]), d["tau"], int(d["elapsed_ms"]), SCHEMA_VERSION)


@dataclass
class DensityRecord:
    composition: tuple
    X: int
    primes_total: int
    primes_matching: int
    primes_inconclusive: int
    verdicts: list = field(default_factory=list)

    @property
    def primes_not_matching(self) -> int:
        return self.primes_total - self.primes_matching - self.primes_inconclusive

    @property
    def ratio(self) -> Fraction:
        if self.primes_total == 0:
            return Fraction(0)
        return Fraction(self.primes_matching, self.primes_total)

    @property
    def percent(self) -> str:
        return format_percent(self.ratio)

    def to_dict(self) -> dict:
        return {
            "composition": list(self.composition),
            "X": self.X,
            "primes_total": self.primes_total,
            "primes_matching": self.primes_matching,
            "primes_not_matching": self.primes_not_matching,
            "primes_inconclusive": self.primes_inconclusive,
            "ratio": f"{self.ratio.numerator}/{self.ratio.denominator}",
            "percent": self.percent,
            "verdicts": [[p, v] for p, v in self.verdicts],
        }


def format_percent(ratio) -> str:
    """Two decimals, half-up: 272/429 -> '63.40%'."""
    r = Fraction(ratio)
    q = (Decimal(r.numerator) * 100 / Decimal(r.denominator)).quantize(
        Decimal("0.01"), rounding=ROUND_HALF_UP)
    return f"{q}%"


def decide_rj_equal(c, p: int, rj_rule: ReservedSetRule | None = None, max_segment: int = 2,
                    segments: int | None = None, e: int | None = None,
                    budget: int | None = DEFAULT_BUDGET) -> PrimeRecord:
    """Verdict on J(c|p) == RJ(c;p).

    By default the full set is required: ``equal`` needs a finiteness
    certificate, while a member outside RJ (or a missing RJ element inside
    the scanned range) settles ``not-equal`` without one. With ``segments=m``
    only the union of the first m segments is compared, which is the m-th
    reserved density variant.
    """
    c = as_composition(c)
    started = time.perf_counter()
    rj = reserved_set(rj_rule, c, p)
    if segments is not None:
        report = enumerate_jset(c, p, 1, max_segment=segments, e=max(segments, 2),
                                budget=budget)
        limit = p ** segments
        found = {n for n in report.values() if n < limit}
        rj = {n for n in rj if n < limit}
        verdict = EQUAL if found == rj else NOT_EQUAL
    else:
        try:
            report = enumerate_jset(c, p, 1, max_segment=max_segment, e=e, budget=budget)
        except BudgetExceeded as exc:
            log.warning("p=%d: %s", p, exc)
            return PrimeRecord(c.parts, p, INCONCLUSIVE, (), None,
                               int((time.perf_counter() - started) * 1000))
        found = set(report.values())
        covered = {n for n in rj if n < p ** report.segments_scanned}
        if found - rj or covered - found:
            verdict = NOT_EQUAL
        elif report.complete:
            verdict = EQUAL
        else:
            verdict = INCONCLUSIVE
    tau = report.certificate.tau if report.certificate else None
    elapsed = int((time.perf_counter() - started) * 1000)
    return PrimeRecord(c.parts, p, verdict, tuple(sorted(found)), tau, elapsed)


# -- checkpoint store ----------------------------------------------------------------

class CheckpointWriter:
    """Single serialized appender; safe to share between threads."""

    def __init__(self, path):
        self.path = os.fspath(path)
        self._lock = threading.Lock()
        _repair_tail(self.path)

    def append(self, record: PrimeRecord) -> None:
        line = record.to_line() + "\n"
        with self._lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())


def _repair_tail(path):
    # drop a partially written last line so that appends start on a fresh line
    if not os.path.exists(path):
        return
    with open(path, "rb+") as fh:
        data = fh.read()
        if data and not data.endswith(b"\n"):
            fh.truncate(data.rfind(b"\n") + 1)


def save_checkpoint(path, records) -> None:
    writer = CheckpointWriter(path)
    for rec in records:
        writer.append(rec)


def load_checkpoint(path) -> list[PrimeRecord]:
    """Read a store; a truncated final record is dropped with a warning."""
    if not os.path.exists(path):
        return []
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    lines = text.split("\n")
    complete_tail = text.endswith("\n") or text == ""
    if lines and lines[-1] == "":
        lines.pop()
    out = []
    for i, line in enumerate(lines):
        last = i == len(lines) - 1
        try:
            out.append(PrimeRecord.from_dict(json.loads(line)))
        except (ValueError, KeyError, TypeError) as exc:
            if last and not complete_tail:
                warnings.warn(f"{path}: discarding truncated record {i}", RuntimeWarning)
                break
            raise StoreCorrupt(f"{path}: record {i} is unreadable ({exc})", index=i) from exc
        else:
            if last and not complete_tail:
                # parsed, but the newline never made it to disk
                warnings.warn(f"{path}: discarding unterminated record {i}", RuntimeWarning)
                out.pop()
    return out


# -- density ---------------------------------------------------------------------------

def survey_primes(c, X: int, range_offset: int = 2) -> list[int]:
    """Primes p with wt + range_offset < p < X."""
    c = as_composition(c)
    return primes_between(c.weight + range_offset, X)


def density(c, X: int, rj_rule: ReservedSetRule | None = None, budget: int | None = DEFAULT_BUDGET,
            max_segment: int = 2, segments: int | None = None, e: int | None = None,
            workers: int = 1, store=None, range_offset: int = 2,
            stop_after: int | None = None) -> DensityRecord:
    """Reserved density of c over the primes in (wt + 2, X).

    Inconclusive primes are counted separately, never dropped. ``store`` is a
    checkpoint path: records already present for c are reused, new ones are
    appended as they finish. ``stop_after`` ends the run after that many new
    primes (used to simulate interruption).
    """
    c = as_composition(c)
    if X < c.weight + 3:
        raise ValueError(f"X must be at least wt+3 = {c.weight + 3}")
    primes = survey_primes(c, X, range_offset)
    reserved_set(rj_rule, c, primes[0] if primes else c.weight + 3)  # fail early if no rule

    done = {}
    writer = None
    if store is not None:
        for rec in load_checkpoint(store):
            if rec.composition == c.parts:
                done[rec.p] = rec
        writer = CheckpointWriter(store)

    todo = [p for p in primes if p not in done]
    if stop_after is not None:
        todo = todo[:stop_after]
    task = partial(decide_rj_equal, c, rj_rule=rj_rule, max_segment=max_segment,
                   segments=segments, e=e, budget=budget)
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(task, todo, chunksize=max(1, len(todo) // (8 * workers)))
            for rec in results:
                done[rec.p] = rec
                if writer:
                    writer.append(rec)
    else:
        for p in todo:
            rec = task(p)
            done[rec.p] = rec
            if writer:
                writer.append(rec)

    verdicts = [(p, done[p].verdict) for p in primes if p in done]
    matching = sum(v == EQUAL for _, v in verdicts)
    inconclusive = sum(v == INCONCLUSIVE for _, v in verdicts)
    inconclusive += len(primes) - len(verdicts)  # not yet computed
    return DensityRecord(c.parts, X, len(primes), matching, inconclusive, verdicts)
