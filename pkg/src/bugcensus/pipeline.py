"""Per-task monitoring pipeline and the replay engine.

One :class:`TaskPipeline` owns the full live state of a single task:
the incremental sampler, the bug arrival table, the estimate history,
the sliding cost forecaster, and the close decision. Each ingested
report may produce typed events (capture completed, estimate updated,
forecast updated, task closed) that the service layer persists and the
dashboard consumes.

A pipeline has exactly one writer. Snapshots are frozen dataclasses and
safe to hand out; once a task closes its snapshot stops changing and
further reports are tallied separately for cost accounting only.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterable, Sequence

from .arima import ArimaParams, CostForecast, SlidingForecaster
from .core import BugArrivalTable, IncrementalSampler, Report
from .crc import (
    CrcEstimate,
    EstimatorKind,
    InsufficientDataError,
    estimate as run_estimator,
)
from .decisions import (
    CloseCriterion,
    CloseDecision,
    TradeoffBenchmarks,
    TradeoffRegion,
    classify_tradeoff,
    evaluate_close,
    next_objective,
)

FORECAST_EVENT_HORIZON = 5


@dataclass(frozen=True)
class PipelineConfig:
    """Knobs of one task's monitoring pipeline.

    ``forecasting=False`` skips the sliding ARIMA entirely for
    estimation-only replays; cost queries then report warm-up.
    """

    smp_size: int = 8
    estimator: EstimatorKind = EstimatorKind.MTH
    close_criterion: CloseCriterion | None = None
    arima: ArimaParams = field(default_factory=ArimaParams)
    horizon_cap: int = 100
    skew_tolerance: float = 0.0
    forecasting: bool = True


@dataclass(frozen=True)
class CaptureCompleted:
    capture_index: int
    reports_consumed: int
    new_bugs: int
    detected_total: int
    last_timestamp: datetime


@dataclass(frozen=True)
class EstimateUpdated:
    capture_index: int
    estimate: CrcEstimate


@dataclass(frozen=True)
class ForecastUpdated:
    window_index: int
    values: tuple[float, ...]


@dataclass(frozen=True)
class TaskClosed:
    capture_index: int
    close_time: datetime | None
    detected: int
    n_hat_rounded: int
    manual: bool


Event = CaptureCompleted | EstimateUpdated | ForecastUpdated | TaskClosed


@dataclass(frozen=True)
class TaskSnapshot:
    """Frozen view of a task's live state."""

    task_id: str
    status: str
    reports_received: int
    bugs_detected: int
    captures_completed: int
    estimates: dict[str, CrcEstimate | None]
    latest_forecast: tuple[float, ...] | None
    close: CloseDecision | None
    achieved_pct: float | None
    post_close_reports: int = 0


@dataclass(frozen=True)
class TradeoffView:
    """One task's position in the trade-off plane."""

    achieved_pct: float
    objective: float
    cost: CostForecast
    region: TradeoffRegion


@dataclass(frozen=True)
class TaskRunResult:
    """Everything evaluation needs from one finished replay."""

    task_id: str
    smp_size: int
    estimate_series: tuple[CrcEstimate | None, ...]
    detected_series: tuple[int, ...]
    capture_times: tuple[datetime, ...]
    total_reports: int
    total_bugs: int
    first_seen_report_index: tuple[int, ...]
    close_decision: CloseDecision

    def reports_at_close(self) -> int:
        if not self.close_decision.closed:
            raise ValueError("task never closed")
        assert self.close_decision.close_capture_index is not None
        return self.close_decision.close_capture_index * self.smp_size


class TaskPipeline:
    """Live monitoring state for one task; one writer, many readers."""

    def __init__(self, task_id: str, config: PipelineConfig | None = None) -> None:
        self.task_id = task_id
        self.config = config or PipelineConfig()
        self.sampler = IncrementalSampler(
            self.config.smp_size, self.config.skew_tolerance
        )
        self.table = BugArrivalTable()
        self.forecaster = SlidingForecaster(self.config.arima)
        self.estimate_history: list[CrcEstimate | None] = []
        self.detected_history: list[int] = []
        self.capture_times: list[datetime] = []
        self.close_decision: CloseDecision | None = None
        self.closed_manually = False
        self._seen_tags: set[str] = set()
        self._first_seen_index: list[int] = []
        self._reports_received = 0
        self._post_close_reports = 0
        self._window_fill = 0
        self._window_new = 0
        self._latest_forecast: tuple[float, ...] | None = None

    # -- ingestion ---------------------------------------------------------

    def ingest(self, report: Report) -> list[Event]:
        """Feeds one report through sampling, estimation and decisions."""
        if self.closed:
            self._post_close_reports += 1
            if report.is_bug and report.bug_tag not in self._seen_tags:
                self._seen_tags.add(report.bug_tag)  # type: ignore[arg-type]
                self._first_seen_index.append(
                    self._reports_received + self._post_close_reports
                )
            return []

        capture = self.sampler.ingest(report)
        self._reports_received += 1
        events: list[Event] = []

        is_new_tag = report.is_bug and report.bug_tag not in self._seen_tags
        if is_new_tag:
            self._seen_tags.add(report.bug_tag)  # type: ignore[arg-type]
            self._first_seen_index.append(self._reports_received)

        if self.config.forecasting:
            # Cost-forecast windows advance per report, independent of captures.
            self._window_fill += 1
            self._window_new += int(is_new_tag)
            if self._window_fill == self.config.arima.smp_size:
                self.forecaster.push(self._window_new)
                self._window_fill = 0
                self._window_new = 0
                if self.forecaster.ready:
                    values = tuple(self.forecaster.forecast(FORECAST_EVENT_HORIZON))
                    self._latest_forecast = values
                    events.append(ForecastUpdated(self.forecaster.window_index, values))

        if capture is not None:
            events.extend(self._complete_capture(capture))
        return events

    def _complete_capture(self, capture) -> list[Event]:
        events: list[Event] = []
        before = len(self.table.columns)
        self.table.append_capture(capture)
        detected = len(self.table.columns)
        stats = self.table.stats()
        try:
            est: CrcEstimate | None = run_estimator(stats, self.config.estimator)
        except InsufficientDataError:
            est = None
        self.estimate_history.append(est)
        self.detected_history.append(detected)
        self.capture_times.append(capture.last_timestamp)
        events.append(
            CaptureCompleted(
                capture_index=capture.index,
                reports_consumed=capture.index * self.config.smp_size,
                new_bugs=detected - before,
                detected_total=detected,
                last_timestamp=capture.last_timestamp,
            )
        )
        if est is not None:
            events.append(EstimateUpdated(capture.index, est))
        if self.config.close_criterion is not None:
            decision = evaluate_close(
                self.estimate_history,
                self.detected_history,
                self.config.close_criterion,
                self.capture_times,
            )
            if decision.closed:
                self.close_decision = decision
                events.append(
                    TaskClosed(
                        capture_index=decision.close_capture_index,  # type: ignore[arg-type]
                        close_time=decision.close_time,
                        detected=decision.detected_at_close,  # type: ignore[arg-type]
                        n_hat_rounded=decision.n_hat_at_close,  # type: ignore[arg-type]
                        manual=False,
                    )
                )
        return events

    def finish(self) -> tuple[Report, ...]:
        """Marks end of stream; drains the partial buffer for bookkeeping."""
        return self.sampler.flush()

    def close_manual(self, at_time: datetime | None = None) -> TaskClosed | None:
        """Closes the task now; idempotent if already closed."""
        if self.closed:
            return None
        detected = len(self._seen_tags)
        latest = self.latest_estimate
        decision = CloseDecision(
            closed=True,
            close_capture_index=self.sampler.captures_emitted,
            close_time=at_time or (self.capture_times[-1] if self.capture_times else None),
            detected_at_close=detected,
            n_hat_at_close=latest.n_hat_rounded if latest else detected,
        )
        self.close_decision = decision
        self.closed_manually = True
        return TaskClosed(
            capture_index=decision.close_capture_index,  # type: ignore[arg-type]
            close_time=decision.close_time,
            detected=detected,
            n_hat_rounded=decision.n_hat_at_close,  # type: ignore[arg-type]
            manual=True,
        )

    # -- queries -----------------------------------------------------------

    @property
    def closed(self) -> bool:
        return self.close_decision is not None

    @property
    def latest_estimate(self) -> CrcEstimate | None:
        for est in reversed(self.estimate_history):
            if est is not None:
                return est
        return None

    @property
    def bugs_detected(self) -> int:
        return len(self._seen_tags)

    def achieved_pct(self) -> float | None:
        """Detected share of the latest rounded prediction, if any."""
        latest = self.latest_estimate
        if latest is None or latest.n_hat_rounded <= 0:
            return None
        return len(self._seen_tags) / latest.n_hat_rounded

    def required_cost(self, target_pct: float) -> CostForecast:
        """Extra reports to reach ``target_pct`` of the predicted total."""
        latest = self.latest_estimate
        if latest is None:
            raise InsufficientDataError("no estimate yet for a cost query")
        return self.forecaster.required_cost(
            target_pct,
            latest.n_hat_rounded,
            len(self._seen_tags),
            self.config.horizon_cap,
        )

    def tradeoff(self, benchmarks: TradeoffBenchmarks) -> TradeoffView:
        """Quadrant placement against manager benchmarks."""
        achieved = self.achieved_pct()
        if achieved is None:
            raise InsufficientDataError("no estimate yet for trade-off analysis")
        if achieved >= 1.0:
            cost = CostForecast(1.0, 0, 0, 0, True)
            region = classify_tradeoff(achieved, 0.0, benchmarks)
            return TradeoffView(achieved, 1.0, cost, region)
        objective = next_objective(achieved)
        cost = self.required_cost(objective)
        cost_value = float(cost.extra_reports) if cost.reachable else float("inf")
        region = classify_tradeoff(achieved, cost_value, benchmarks)
        return TradeoffView(achieved, objective, cost, region)

    def snapshot(self) -> TaskSnapshot:
        latest = self.latest_estimate
        if self.closed and self.close_decision.detected_at_close is not None:  # type: ignore[union-attr]
            bugs = self.close_decision.detected_at_close  # type: ignore[union-attr]
        else:
            bugs = len(self._seen_tags)
        return TaskSnapshot(
            task_id=self.task_id,
            status="closed" if self.closed else "open",
            reports_received=self._reports_received,
            bugs_detected=bugs,
            captures_completed=self.sampler.captures_emitted,
            estimates={self.config.estimator.value: latest},
            latest_forecast=self._latest_forecast,
            close=self.close_decision,
            achieved_pct=self.achieved_pct(),
            post_close_reports=self._post_close_reports,
        )

    def run_result(self) -> TaskRunResult:
        """Summary for evaluation after the stream has fully replayed."""
        return TaskRunResult(
            task_id=self.task_id,
            smp_size=self.config.smp_size,
            estimate_series=tuple(self.estimate_history),
            detected_series=tuple(self.detected_history),
            capture_times=tuple(self.capture_times),
            total_reports=self._reports_received + self._post_close_reports,
            total_bugs=len(self._seen_tags),
            first_seen_report_index=tuple(self._first_seen_index),
            close_decision=self.close_decision or CloseDecision(closed=False),
        )


def replay(
    reports: Iterable[Report],
    pipeline: TaskPipeline,
    speed: float | str = "instant",
) -> list[Event]:
    """Feeds an ordered stream through a pipeline, optionally paced.

    ``speed`` is a wall-clock multiplier (2.0 replays twice as fast as
    the original inter-arrival gaps) or ``"instant"`` to ignore pacing.
    Pacing never changes the emitted event sequence.
    """
    events: list[Event] = []
    previous: datetime | None = None
    for report in reports:
        if speed != "instant" and previous is not None:
            gap = (report.timestamp - previous).total_seconds()
            if gap > 0:
                time.sleep(gap / float(speed))
        previous = report.timestamp
        events.extend(pipeline.ingest(report))
    pipeline.finish()
    return events


def run_task(
    reports: Sequence[Report],
    config: PipelineConfig,
    task_id: str | None = None,
) -> TaskRunResult:
    """Replays a full stream instantly and returns the evaluation summary."""
    tid = task_id or (reports[0].task_id if reports else "task")
    pipeline = TaskPipeline(tid, config)
    replay(reports, pipeline, speed="instant")
    return pipeline.run_result()
