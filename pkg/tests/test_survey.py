import json
import warnings
from fractions import Fraction

import pytest

from mhsdiv.errors import RuleUnavailable, StoreCorrupt
from mhsdiv.survey import (EQUAL, INCONCLUSIVE, NOT_EQUAL, PrimeRecord, decide_rj_equal,
                           density, format_percent, load_checkpoint, save_checkpoint,
                           survey_primes)


class TestVerdicts:
    @pytest.mark.parametrize("p,verdict", [(5, EQUAL), (37, NOT_EQUAL), (7, NOT_EQUAL),
                                           (11, EQUAL), (41, NOT_EQUAL)])
    def test_depth_one(self, p, verdict):
        assert decide_rj_equal((2,), p).verdict == verdict

    def test_record_fields(self):
        rec = decide_rj_equal((2,), 7)
        assert rec.members == (0, 3, 6, 26) and rec.composition == (2,) and rec.p == 7

    def test_homogeneous(self):
        assert decide_rj_equal((2, 2), 11).verdict == EQUAL
        assert decide_rj_equal((2, 2), 13).verdict == NOT_EQUAL

    def test_budget_makes_inconclusive(self):
        assert decide_rj_equal((3, 3), 101, budget=10).verdict == INCONCLUSIVE

    def test_first_segments_only(self):
        # 26 lies in the second segment, so J_1(2|7) alone matches
        assert decide_rj_equal((2,), 7, segments=1).verdict == EQUAL
        assert decide_rj_equal((2,), 7, segments=2).verdict == NOT_EQUAL

    def test_rule_unavailable(self):
        with pytest.raises(RuleUnavailable):
            decide_rj_equal((1, 2), 7)


class TestFormat:
    @pytest.mark.parametrize("ratio,text", [(Fraction(272, 429), "63.40%"),
                                            (Fraction(9, 13), "69.23%"),
                                            (Fraction(1, 800), "0.13%"),
                                            (Fraction(1, 1), "100.00%"),
                                            (Fraction(0), "0.00%")])
    def test_half_up(self, ratio, text):
        assert format_percent(ratio) == text


class TestDensity:
    def test_small_cutoff(self):
        rec = density((2,), 50)
        assert rec.ratio == Fraction(9, 13) and rec.percent == "69.23%"
        assert [p for p, v in rec.verdicts if v == NOT_EQUAL] == [7, 37, 41, 43]

    def test_range(self):
        assert survey_primes((2,), 50)[0] == 5
        assert survey_primes((1, 1), 20) == [5, 7, 11, 13, 17, 19]
        with pytest.raises(ValueError):
            density((2,), 4)

    def test_conservation(self):
        rec = density((2, 2), 60, budget=3000)
        assert rec.primes_inconclusive > 0
        total = rec.primes_matching + rec.primes_not_matching + rec.primes_inconclusive
        assert total == rec.primes_total == len(rec.verdicts)
        assert 0 <= rec.ratio <= 1

    def test_workers_do_not_change_output(self):
        a = density((3,), 120, workers=1).to_dict()
        b = density((3,), 120, workers=3).to_dict()
        assert a == b

    def test_first_segment_variant(self):
        rec = density((2,), 3002, segments=1, range_offset=1)
        assert (rec.primes_matching, rec.primes_total) == (272, 429)
        assert rec.percent == "63.40%"


class TestCheckpoint:
    def records(self):
        return [decide_rj_equal((2,), p) for p in (5, 7, 11)]

    def test_round_trip(self, tmp_path):
        path = tmp_path / "store.jsonl"
        recs = self.records()
        save_checkpoint(path, recs)
        assert load_checkpoint(path) == recs

    def test_empty(self, tmp_path):
        assert load_checkpoint(tmp_path / "missing.jsonl") == []
        (tmp_path / "empty.jsonl").write_text("")
        assert load_checkpoint(tmp_path / "empty.jsonl") == []

    def test_schema_fields(self, tmp_path):
        path = tmp_path / "store.jsonl"
        save_checkpoint(path, self.records()[:1])
        row = json.loads(path.read_text().splitlines()[0])
        assert set(row) == {"schema_version", "composition", "p", "verdict", "members",
                            "tau", "elapsed_ms"}
        assert row["schema_version"] == 1

    @pytest.mark.parametrize("cut", [1, 5, 20, -1])
    def test_truncated_tail(self, tmp_path, cut):
        path = tmp_path / "store.jsonl"
        recs = self.records()
        save_checkpoint(path, recs)
        data = path.read_bytes()
        last_start = data.rstrip(b"\n").rfind(b"\n") + 1
        path.write_bytes(data[:last_start + cut] if cut > 0 else data[:-1])
        with pytest.warns(RuntimeWarning):
            assert load_checkpoint(path) == recs[:2]

    def test_corrupt_middle(self, tmp_path):
        path = tmp_path / "store.jsonl"
        save_checkpoint(path, self.records())
        lines = path.read_text().splitlines(keepends=True)
        lines[1] = lines[1][:10] + "\n"
        path.write_text("".join(lines))
        with pytest.raises(StoreCorrupt) as info:
            load_checkpoint(path)
        assert info.value.index == 1

    def test_wrong_schema_version(self, tmp_path):
        path = tmp_path / "store.jsonl"
        row = json.loads(self.records()[0].to_line())
        row["schema_version"] = 99
        path.write_text(json.dumps(row) + "\n")
        with pytest.raises(StoreCorrupt):
            load_checkpoint(path)


class TestResume:
    X = 200

    def baseline(self):
        return density((2,), self.X).to_dict()

    @pytest.mark.parametrize("stop", [0, 1, 7, 20])
    def test_kill_and_resume(self, tmp_path, stop):
        path = tmp_path / "store.jsonl"
        partial = density((2,), self.X, store=path, stop_after=stop)
        assert partial.primes_inconclusive == partial.primes_total - stop
        resumed = density((2,), self.X, store=path)
        assert resumed.to_dict() == self.baseline()
        assert len(load_checkpoint(path)) == resumed.primes_total

    @pytest.mark.parametrize("cut", [3, 40])
    def test_resume_after_torn_write(self, tmp_path, cut):
        path = tmp_path / "store.jsonl"
        density((2,), self.X, store=path, stop_after=12)
        data = path.read_bytes()
        last_start = data.rstrip(b"\n").rfind(b"\n") + 1
        path.write_bytes(data[:last_start + cut])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            resumed = density((2,), self.X, store=path, workers=2)
        assert resumed.to_dict() == self.baseline()
        assert len(load_checkpoint(path)) == resumed.primes_total

    def test_other_compositions_ignored(self, tmp_path):
        path = tmp_path / "store.jsonl"
        save_checkpoint(path, [PrimeRecord((3,), 7, EQUAL, (0, 6), 2)])
        rec = density((2,), self.X, store=path)
        assert rec.to_dict() == self.baseline()
