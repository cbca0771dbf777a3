"""Task-closing automation and quadrant trade-off classification.

Two decision aids over live estimates:

* automated closing -- a task closes at the first capture where the
  detected fraction of the (rounded) predicted total reaches the target
  AND the rounded prediction has held steady for ``stability_span``
  consecutive captures;
* trade-off analysis -- a quality benchmark and a cost benchmark split
  live tasks into four actionable regions (Continue, DrillDown,
  ThinkTwice, Close).

Comparisons run on ``n_hat_rounded``: raw real-valued estimates almost
never repeat exactly, and monitoring operates on integer bug counts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Sequence

from .crc import CrcEstimate

OBJECTIVE_STEP = 0.05


@dataclass(frozen=True)
class CloseCriterion:
    """Close when ``target_pct`` of the predicted total is detected, stably."""

    target_pct: float
    stability_span: int = 2

    def __post_init__(self) -> None:
        if not 0 < self.target_pct <= 1:
            raise ValueError("target_pct must be in (0, 1]")
        if self.stability_span < 1:
            raise ValueError("stability_span must be >= 1")


@dataclass(frozen=True)
class CloseDecision:
    """Outcome of close evaluation; optional fields set iff closed."""

    closed: bool
    close_capture_index: int | None = None
    close_time: datetime | None = None
    detected_at_close: int | None = None
    n_hat_at_close: int | None = None

    def __post_init__(self) -> None:
        if self.closed and (
            self.close_capture_index is None
            or self.detected_at_close is None
            or self.n_hat_at_close is None
        ):
            raise ValueError("a closed decision must carry its closing state")


NOT_CLOSED = CloseDecision(closed=False)


def evaluate_close(
    history: Sequence[CrcEstimate | None],
    detected: int | Sequence[int],
    criterion: CloseCriterion,
    capture_times: Sequence[datetime] | None = None,
) -> CloseDecision:
    """Scans an estimate history for the first capture meeting the criterion.

    Args:
        history: Per-capture estimates in capture order, ``None`` where no
            estimate existed yet (placeholders break the stability run).
        detected: Bugs detected per capture, aligned with ``history``; a
            bare int is treated as the count at the last capture, so only
            that capture can trigger a close (the incremental case).
        criterion: Target fraction and stability span.
        capture_times: Optional timestamps of each capture's last report,
            used to stamp ``close_time``.

    Returns:
        The first qualifying close, or a not-closed decision.
    """
    if isinstance(detected, int):
        per_capture: list[int | None] = [None] * len(history)
        if history:
            per_capture[-1] = detected
    else:
        if len(detected) != len(history):
            raise ValueError("detected counts must align with the estimate history")
        per_capture = list(detected)

    span = criterion.stability_span
    for i, est in enumerate(history):
        if est is None or per_capture[i] is None:
            continue
        if i + 1 < span:
            continue
        window = history[i + 1 - span : i + 1]
        if any(e is None for e in window):
            continue
        rounded = est.n_hat_rounded
        if any(e.n_hat_rounded != rounded for e in window):  # type: ignore[union-attr]
            continue
        if rounded <= 0:
            continue
        if per_capture[i] / rounded >= criterion.target_pct - 1e-12:
            return CloseDecision(
                closed=True,
                close_capture_index=i + 1,
                close_time=capture_times[i] if capture_times else None,
                detected_at_close=per_capture[i],
                n_hat_at_close=rounded,
            )
    return NOT_CLOSED


class TradeoffRegion(str, Enum):
    """Quadrants of the (cost to next objective, quality achieved) plane."""

    CONTINUE = "Continue"
    DRILL_DOWN = "DrillDown"
    THINK_TWICE = "ThinkTwice"
    CLOSE = "Close"


@dataclass(frozen=True)
class TradeoffBenchmarks:
    """Manager-set thresholds: minimal quality and maximal acceptable cost."""

    quality: float
    cost: float

    def __post_init__(self) -> None:
        if not 0 < self.quality <= 1:
            raise ValueError("quality benchmark must be in (0, 1]")
        if self.cost < 0:
            raise ValueError("cost benchmark must be >= 0")


def classify_tradeoff(
    achieved_pct: float,
    next_objective_cost: float,
    benchmarks: TradeoffBenchmarks,
) -> TradeoffRegion:
    """Places one task into its quadrant.

    Meeting a benchmark is inclusive: achieving exactly the quality
    benchmark counts as achieved, costing exactly the cost benchmark
    counts as affordable. Unreachable objectives enter as infinite cost.
    """
    if math.isnan(achieved_pct) or math.isnan(next_objective_cost):
        raise ValueError("inputs must be numbers (unreachable cost is +inf)")
    quality_met = achieved_pct >= benchmarks.quality
    affordable = next_objective_cost <= benchmarks.cost
    if quality_met:
        return TradeoffRegion.THINK_TWICE if affordable else TradeoffRegion.CLOSE
    return TradeoffRegion.CONTINUE if affordable else TradeoffRegion.DRILL_DOWN


def next_objective(achieved_pct: float) -> float:
    """The smallest 5%-grid objective strictly above the achieved level."""
    if achieved_pct < 0:
        raise ValueError("achieved_pct must be >= 0")
    if achieved_pct >= 1:
        raise ValueError("already at 100%; no next objective")
    steps = math.floor(achieved_pct / OBJECTIVE_STEP + 1e-9) + 1
    return min(round(steps * OBJECTIVE_STEP, 2), 1.0)


def decision_record(
    task_id: str,
    capture_index: int,
    decision: CloseDecision,
    target_pct: float,
    detected: int,
    n_hat_rounded: int | None,
    region: TradeoffRegion | None = None,
    benchmarks: TradeoffBenchmarks | None = None,
) -> dict:
    """JSON-ready export record for one decision evaluation."""
    return {
        "task_id": task_id,
        "capture_index": capture_index,
        "closed": decision.closed,
        "target_pct": target_pct,
        "detected": detected,
        "n_hat_rounded": n_hat_rounded,
        "region": region.value if region else None,
        "quality_benchmark": benchmarks.quality if benchmarks else None,
        "cost_benchmark": benchmarks.cost if benchmarks else None,
    }


def write_decisions_jsonl(path: str | Path, records: Sequence[dict]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record) + "\n")
