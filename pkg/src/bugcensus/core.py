"""Core domain model: reports, incremental sampling, and the bug arrival table.

Crowdtesting reports arrive one at a time in chronological order. The
incremental sampler groups them into fixed-size captures; each capture
becomes one row of a binary capture-by-bug incidence table whose columns
are the distinct bug tags seen so far. All population estimators consume
the summary statistics of that table (``FrequencyStats``), never the raw
reports.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Mapping, Sequence


class StreamOrderError(ValueError):
    """A report arrived with a timestamp earlier than allowed by the stream."""


class DuplicateReportError(ValueError):
    """A report id was ingested twice for the same task."""


@dataclass(frozen=True, slots=True)
class Report:
    """One crowdworker submission.

    ``bug_tag`` identifies the unique bug a valid report detects; two
    reports carrying the same tag are duplicates of one bug. Non-bug
    reports carry no tag.
    """

    report_id: str
    task_id: str
    timestamp: datetime
    is_bug: bool
    bug_tag: str | None = None
    worker_id: str | None = None

    def __post_init__(self) -> None:
        if self.is_bug and not self.bug_tag:
            raise ValueError(f"report {self.report_id}: bug report without a bug_tag")
        if not self.is_bug and self.bug_tag:
            raise ValueError(f"report {self.report_id}: bug_tag on a non-bug report")


def sort_key(report: Report) -> tuple[datetime, str]:
    """Total order of reports within a task: timestamp, then report id."""
    return (report.timestamp, report.report_id)


@dataclass(frozen=True, slots=True)
class CaptureSample:
    """One fixed-size group of consecutive reports (a capture occasion)."""

    index: int
    reports: tuple[Report, ...]

    def bug_tags(self) -> set[str]:
        """Distinct bug tags detected in this capture."""
        return {r.bug_tag for r in self.reports if r.is_bug and r.bug_tag}

    @property
    def last_timestamp(self) -> datetime:
        return self.reports[-1].timestamp


class IncrementalSampler:
    """Groups a chronological report stream into captures of ``smp_size``.

    One sampler serves exactly one task and one writer. A capture is
    emitted the moment the pending buffer fills; a trailing partial
    buffer is never emitted as a capture (``flush`` only surfaces it for
    cost bookkeeping).

    Args:
        smp_size: Reports per capture, >= 1.
        skew_tolerance: How far (seconds) a timestamp may precede the
            previous report's before the stream is rejected as
            out-of-order. Default 0: ties are fine, going backwards is not.
    """

    def __init__(self, smp_size: int, skew_tolerance: float = 0.0) -> None:
        if smp_size < 1:
            raise ValueError(f"smp_size must be >= 1, got {smp_size}")
        if skew_tolerance < 0:
            raise ValueError("skew_tolerance must be >= 0 seconds")
        self.smp_size = smp_size
        self.skew_tolerance = timedelta(seconds=skew_tolerance)
        self._pending: list[Report] = []
        self._seen_ids: set[str] = set()
        self._last_timestamp: datetime | None = None
        self._next_index = 1
        self._ingested = 0

    @property
    def reports_ingested(self) -> int:
        return self._ingested

    @property
    def captures_emitted(self) -> int:
        return self._next_index - 1

    @property
    def pending(self) -> tuple[Report, ...]:
        return tuple(self._pending)

    def ingest(self, report: Report) -> CaptureSample | None:
        """Appends one report; returns a capture when the buffer fills.

        Raises:
            DuplicateReportError: The report id was seen before.
            StreamOrderError: The timestamp precedes the previous report's
                by more than the skew tolerance.
        """
        if report.report_id in self._seen_ids:
            raise DuplicateReportError(f"duplicate report id {report.report_id!r}")
        if (
            self._last_timestamp is not None
            and report.timestamp < self._last_timestamp - self.skew_tolerance
        ):
            raise StreamOrderError(
                f"report {report.report_id!r} at {report.timestamp.isoformat()} "
                f"precedes the stream position {self._last_timestamp.isoformat()}"
            )
        self._seen_ids.add(report.report_id)
        if self._last_timestamp is None or report.timestamp > self._last_timestamp:
            self._last_timestamp = report.timestamp
        self._pending.append(report)
        self._ingested += 1
        if len(self._pending) < self.smp_size:
            return None
        capture = CaptureSample(self._next_index, tuple(self._pending))
        self._pending.clear()
        self._next_index += 1
        return capture

    def flush(self) -> tuple[Report, ...]:
        """Drains the partial trailing buffer without emitting a capture.

        The leftover reports count toward consumed cost but are never
        analyzed; estimation operates on whole captures only.
        """
        leftover = tuple(self._pending)
        self._pending.clear()
        return leftover


@dataclass(frozen=True)
class FrequencyStats:
    """Summary counts of a bug arrival table at one point in time.

    Attributes:
        distinct_bugs: D, distinct bugs detected so far (columns).
        captures: t, number of captures so far (rows).
        bugs_per_capture: n_j, distinct bugs detected in capture j (row sums).
        seen_exactly: f_k, number of bugs detected in exactly k captures
            (histogram of column sums).
    """

    distinct_bugs: int
    captures: int
    bugs_per_capture: tuple[int, ...]
    seen_exactly: Mapping[int, int]

    def __post_init__(self) -> None:
        if sum(self.seen_exactly.values()) != self.distinct_bugs:
            raise ValueError("sum of f_k must equal the number of distinct bugs")
        if len(self.bugs_per_capture) != self.captures:
            raise ValueError("one row sum per capture required")
        if self.total_incidences != sum(self.bugs_per_capture):
            raise ValueError("sum of k*f_k must equal the sum of row sums")

    @property
    def total_incidences(self) -> int:
        """Total number of 1-cells: sum over k of k * f_k."""
        return sum(k * count for k, count in self.seen_exactly.items())

    @property
    def singletons(self) -> int:
        """f_1, bugs captured exactly once."""
        return self.seen_exactly.get(1, 0)


class BugArrivalTable:
    """Binary capture-by-bug incidence matrix, built one capture at a time.

    Stored column-sparse: each bug tag maps to the list of capture
    indices that detected it, with row sums and the column-sum histogram
    maintained incrementally. Columns appear in first-detection order.
    One writer per task; ``stats()`` snapshots are immutable and safe to
    share.
    """

    def __init__(self) -> None:
        self._column_captures: dict[str, list[int]] = {}
        self._column_order: list[str] = []
        self._row_sums: list[int] = []
        self._freq: Counter[int] = Counter()

    @property
    def rows(self) -> int:
        return len(self._row_sums)

    @property
    def columns(self) -> tuple[str, ...]:
        return tuple(self._column_order)

    def append_capture(self, capture: CaptureSample) -> "BugArrivalTable":
        """Adds one row; creates a column per first-seen bug tag.

        Duplicate detections of a bug within the capture still produce a
        single 1-cell.
        """
        if capture.index != self.rows + 1:
            raise ValueError(
                f"capture index {capture.index} does not extend a table "
                f"with {self.rows} rows"
            )
        # Sorting makes column creation invariant to report order inside
        # the capture; across captures, columns keep first-detection order.
        tags = sorted(capture.bug_tags())
        row = capture.index
        for tag in tags:
            seen = self._column_captures.get(tag)
            if seen is None:
                self._column_captures[tag] = [row]
                self._column_order.append(tag)
                self._freq[1] += 1
            else:
                k = len(seen)
                seen.append(row)
                self._freq[k] -= 1
                if not self._freq[k]:
                    del self._freq[k]
                self._freq[k + 1] += 1
        self._row_sums.append(len(tags))
        return self

    def cell(self, row: int, tag: str) -> int:
        """1 iff capture ``row`` detected bug ``tag`` (rows are 1-based)."""
        if not 1 <= row <= self.rows:
            raise IndexError(f"row {row} outside 1..{self.rows}")
        return int(row in self._column_captures.get(tag, ()))

    def to_dense(self) -> list[list[int]]:
        """Materializes the full binary matrix, rows-by-columns."""
        matrix = [[0] * len(self._column_order) for _ in range(self.rows)]
        for j, tag in enumerate(self._column_order):
            for row in self._column_captures[tag]:
                matrix[row - 1][j] = 1
        return matrix

    def stats(self) -> FrequencyStats:
        """Immutable snapshot of D, t, n_j and f_k."""
        return FrequencyStats(
            distinct_bugs=len(self._column_order),
            captures=self.rows,
            bugs_per_capture=tuple(self._row_sums),
            seen_exactly=dict(self._freq),
        )


def table_from_captures(captures: Iterable[CaptureSample]) -> BugArrivalTable:
    """Builds a table by appending captures in order."""
    table = BugArrivalTable()
    for capture in captures:
        table.append_capture(capture)
    return table


def stats_from_tag_rows(rows: Sequence[Iterable[str]]) -> FrequencyStats:
    """Frequency statistics for captures given directly as tag sets.

    Convenience for tests and simulations that do not carry full Report
    objects: ``rows[i]`` lists the bug tags detected in capture i+1.
    """
    columns: dict[str, int] = {}
    freq: Counter[int] = Counter()
    row_sums: list[int] = []
    for row in rows:
        tags = set(row)
        for tag in tags:
            k = columns.get(tag, 0)
            if k:
                freq[k] -= 1
                if not freq[k]:
                    del freq[k]
            columns[tag] = k + 1
            freq[k + 1] += 1
        row_sums.append(len(tags))
    return FrequencyStats(
        distinct_bugs=len(columns),
        captures=len(row_sums),
        bugs_per_capture=tuple(row_sums),
        seen_exactly=dict(freq),
    )
