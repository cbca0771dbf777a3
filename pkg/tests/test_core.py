import random
from datetime import timedelta

import pytest

from bugcensus.core import (
    BugArrivalTable,
    DuplicateReportError,
    IncrementalSampler,
    Report,
    StreamOrderError,
    stats_from_tag_rows,
    table_from_captures,
)

from conftest import T0, captures_from_rows, make_report


class TestReport:
    def test_bug_requires_tag(self):
        with pytest.raises(ValueError):
            Report("r1", "t", T0, is_bug=True)

    def test_non_bug_rejects_tag(self):
        with pytest.raises(ValueError):
            Report("r1", "t", T0, is_bug=False, bug_tag="b1")


class TestIncrementalSampler:
    def test_emits_on_buffer_threshold(self):
        sampler = IncrementalSampler(smp_size=3)
        assert sampler.ingest(make_report(1)) is None
        assert sampler.ingest(make_report(2)) is None
        capture = sampler.ingest(make_report(3))
        assert capture is not None
        assert capture.index == 1
        assert [r.report_id for r in capture.reports] == ["r0001", "r0002", "r0003"]

    def test_no_capture_below_tuned_size(self):
        sampler = IncrementalSampler(smp_size=8)
        for i in range(1, 8):
            assert sampler.ingest(make_report(i)) is None
        assert sampler.captures_emitted == 0

    def test_twenty_reports_at_three_gives_six_captures(self):
        # oracle: 20 // 3 captures, 20 % 3 pending
        sampler = IncrementalSampler(smp_size=3)
        captures = [c for i in range(1, 21) if (c := sampler.ingest(make_report(i)))]
        assert len(captures) == 20 // 3 == 6
        assert [c.index for c in captures] == [1, 2, 3, 4, 5, 6]
        assert len(sampler.pending) == 20 % 3 == 2

    def test_flush_drains_partial_buffer_without_capture(self):
        sampler = IncrementalSampler(smp_size=3)
        sampler.ingest(make_report(1))
        leftover = sampler.flush()
        assert [r.report_id for r in leftover] == ["r0001"]
        assert sampler.captures_emitted == 0
        assert sampler.pending == ()

    def test_rejects_duplicate_report_id(self):
        sampler = IncrementalSampler(smp_size=3)
        sampler.ingest(make_report(1))
        with pytest.raises(DuplicateReportError):
            sampler.ingest(make_report(1))

    def test_rejects_out_of_order_timestamp(self):
        sampler = IncrementalSampler(smp_size=3)
        sampler.ingest(make_report(5))
        with pytest.raises(StreamOrderError):
            sampler.ingest(make_report(6, at=T0))

    def test_ties_allowed(self):
        sampler = IncrementalSampler(smp_size=3)
        sampler.ingest(make_report(1, at=T0))
        assert sampler.ingest(make_report(2, at=T0)) is None

    def test_skew_tolerance_admits_small_backsteps(self):
        sampler = IncrementalSampler(smp_size=3, skew_tolerance=120.0)
        sampler.ingest(make_report(1, at=T0 + timedelta(seconds=300)))
        sampler.ingest(make_report(2, at=T0 + timedelta(seconds=200)))
        with pytest.raises(StreamOrderError):
            sampler.ingest(make_report(3, at=T0))


class TestBugArrivalTable:
    def test_walkthrough_dimensions(self, walkthrough_table):
        assert walkthrough_table.rows == 6
        assert len(walkthrough_table.columns) == 12

    def test_all_non_bug_capture_adds_zero_row(self):
        table = table_from_captures(captures_from_rows([["b1", "b2"]]))
        captures = captures_from_rows([["b1", "b2"], []])
        table = table_from_captures(captures)
        assert table.rows == 2
        assert len(table.columns) == 2
        assert table.stats().bugs_per_capture == (2, 0)

    def test_duplicate_tag_within_capture_is_one_cell(self):
        captures = captures_from_rows([["b1", "b1"]], smp_size=3)
        # same tag twice in one capture: one column, cell value 1
        table = table_from_captures(captures)
        assert len(table.columns) == 1
        assert table.cell(1, "b1") == 1
        assert table.stats().bugs_per_capture == (1,)

    def test_requires_consecutive_indices(self, walkthrough_table):
        stray = captures_from_rows([["b99"]])[0]  # index 1, table has 6 rows
        with pytest.raises(ValueError):
            walkthrough_table.append_capture(stray)

    def test_column_order_is_first_detection_order(self):
        rows = [["z9"], ["a1", "z9"], ["m5"]]
        table = table_from_captures(captures_from_rows(rows))
        assert table.columns == ("z9", "a1", "m5")

    def test_dense_matrix_matches_cells(self, walkthrough_table):
        dense = walkthrough_table.to_dense()
        assert len(dense) == 6
        assert sum(map(sum, dense)) == 22
        for i, row in enumerate(dense, start=1):
            for tag, value in zip(walkthrough_table.columns, row):
                assert walkthrough_table.cell(i, tag) == value


class TestFrequencyStats:
    def test_walkthrough_values(self, walkthrough_stats):
        assert walkthrough_stats.distinct_bugs == 12
        assert walkthrough_stats.captures == 6
        assert walkthrough_stats.bugs_per_capture == (3, 2, 2, 5, 6, 4)
        assert dict(walkthrough_stats.seen_exactly) == {1: 7, 2: 2, 3: 2, 5: 1}

    def test_single_capture_single_bug(self):
        stats = stats_from_tag_rows([["b1"]])
        assert stats.distinct_bugs == 1
        assert stats.captures == 1
        assert stats.bugs_per_capture == (1,)
        assert dict(stats.seen_exactly) == {1: 1}

    def test_full_recapture_case(self):
        stats = stats_from_tag_rows([["b1"]] * 4)
        assert stats.distinct_bugs == 1
        assert stats.captures == 4
        assert dict(stats.seen_exactly) == {4: 1}

    def test_incidence_identity_against_brute_force(self):
        # sum k*f_k == total (capture, bug) incidence pairs, recounted raw
        rng = random.Random(7)
        for _ in range(50):
            rows = [
                [f"b{rng.randrange(12)}" for _ in range(rng.randrange(6))]
                for _ in range(rng.randrange(1, 10))
            ]
            stats = stats_from_tag_rows(rows)
            brute = sum(len(set(row)) for row in rows)
            assert stats.total_incidences == brute
            assert sum(stats.seen_exactly.values()) == stats.distinct_bugs
            assert stats.seen_exactly.get(0) is None
            assert max(stats.seen_exactly, default=0) <= stats.captures

    def test_within_capture_permutation_invariance(self):
        rng = random.Random(3)
        rows = [["b1", "b2", "b3"], ["b2", "b4"], ["b5", "b1", "b2"]]
        base = table_from_captures(captures_from_rows(rows))
        for _ in range(5):
            shuffled = [list(row) for row in rows]
            for row in shuffled:
                rng.shuffle(row)
            table = table_from_captures(captures_from_rows(shuffled))
            assert table.columns == base.columns
            assert table.to_dense() == base.to_dense()

    def test_cross_capture_permutation_can_change_table(self):
        rows = [["b1"], ["b2"]]
        swapped = [["b2"], ["b1"]]
        a = table_from_captures(captures_from_rows(rows))
        b = table_from_captures(captures_from_rows(swapped))
        assert a.columns != b.columns

    def test_column_count_non_decreasing(self):
        rng = random.Random(11)
        rows = [
            [f"b{rng.randrange(8)}" for _ in range(rng.randrange(4))]
            for _ in range(12)
        ]
        table = BugArrivalTable()
        last = 0
        for capture in captures_from_rows(rows, smp_size=4):
            table.append_capture(capture)
            assert len(table.columns) >= last
            last = len(table.columns)
