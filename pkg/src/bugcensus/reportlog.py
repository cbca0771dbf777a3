"""Reading and writing report streams as CSV or JSON lines.

Both formats carry the same fields: ``task_id, report_id, timestamp,
is_bug, bug_tag`` (plus an optional ``worker_id``). Timestamps are
ISO-8601 UTC; ``is_bug`` is 0/1 in CSV and a boolean in JSONL; ``bug_tag``
is empty/null exactly when ``is_bug`` is false.
"""

from __future__ import annotations

import csv
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .core import Report, sort_key

CSV_FIELDS = ("task_id", "report_id", "timestamp", "is_bug", "bug_tag")


def parse_timestamp(value: str) -> datetime:
    """Parses an ISO-8601 instant, defaulting naive values to UTC."""
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def report_to_dict(report: Report) -> dict:
    record = {
        "task_id": report.task_id,
        "report_id": report.report_id,
        "timestamp": format_timestamp(report.timestamp),
        "is_bug": report.is_bug,
        "bug_tag": report.bug_tag,
    }
    if report.worker_id is not None:
        record["worker_id"] = report.worker_id
    return record


def report_from_dict(record: dict) -> Report:
    is_bug = record["is_bug"]
    if isinstance(is_bug, str):
        is_bug = is_bug.strip() in ("1", "true", "True")
    tag = record.get("bug_tag") or None
    return Report(
        report_id=str(record["report_id"]),
        task_id=str(record["task_id"]),
        timestamp=parse_timestamp(str(record["timestamp"])),
        is_bug=bool(is_bug),
        bug_tag=tag,
        worker_id=record.get("worker_id") or None,
    )


def write_reports_csv(path: str | Path, reports: Iterable[Report]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_FIELDS)
        for r in reports:
            writer.writerow(
                (
                    r.task_id,
                    r.report_id,
                    format_timestamp(r.timestamp),
                    int(r.is_bug),
                    r.bug_tag or "",
                )
            )


def write_reports_jsonl(path: str | Path, reports: Iterable[Report]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for r in reports:
            handle.write(json.dumps(report_to_dict(r)) + "\n")


def read_reports(path: str | Path) -> list[Report]:
    """Loads a report log, sniffing CSV vs JSON lines from the content."""
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        first = handle.readline()
        handle.seek(0)
        if first.lstrip().startswith("{"):
            reports = [
                report_from_dict(json.loads(line))
                for line in handle
                if line.strip()
            ]
        else:
            reader = csv.DictReader(handle)
            reports = [report_from_dict(row) for row in reader]
    return reports


def sort_stream(reports: Sequence[Report]) -> list[Report]:
    """Canonical replay order: timestamp, ties broken by report id."""
    return sorted(reports, key=sort_key)
