from datetime import datetime, timedelta, timezone

import pytest

from bugcensus.core import CaptureSample, Report, table_from_captures

T0 = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)

#: Capture-by-bug incidence of the six-capture walkthrough table:
#: 12 bugs, row sums (3, 2, 2, 5, 6, 4), column-sum histogram
#: {1: 7, 2: 2, 3: 2, 5: 1}.
WALKTHROUGH_ROWS = [
    ["b01", "b02", "b03"],
    ["b03", "b04"],
    ["b03", "b05"],
    ["b04", "b05", "b06", "b07", "b08"],
    ["b03", "b04", "b08", "b09", "b10", "b11"],
    ["b01", "b03", "b05", "b12"],
]


def make_report(i, task_id="t1", is_bug=False, bug_tag=None, at=None, worker=None):
    return Report(
        report_id=f"r{i:04d}",
        task_id=task_id,
        timestamp=at or (T0 + timedelta(seconds=60 * i)),
        is_bug=is_bug,
        bug_tag=bug_tag,
        worker_id=worker,
    )


def captures_from_rows(rows, smp_size=None):
    """Builds CaptureSamples whose bug tags match the given rows.

    Each capture gets enough filler non-bug reports to reach ``smp_size``
    (default: widest row).
    """
    width = smp_size or max(len(r) for r in rows)
    captures = []
    counter = 0
    for index, tags in enumerate(rows, start=1):
        reports = []
        for tag in tags:
            counter += 1
            reports.append(make_report(counter, is_bug=True, bug_tag=tag))
        while len(reports) < width:
            counter += 1
            reports.append(make_report(counter))
        captures.append(CaptureSample(index, tuple(reports)))
    return captures


@pytest.fixture
def walkthrough_table():
    return table_from_captures(captures_from_rows(WALKTHROUGH_ROWS))


@pytest.fixture
def walkthrough_stats(walkthrough_table):
    return walkthrough_table.stats()
