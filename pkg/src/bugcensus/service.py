"""HTTP/JSON service over per-task pipelines with append-only persistence.

Every task's state lives in exactly one :class:`~bugcensus.pipeline.TaskPipeline`
guarded by a per-task lock (one writer, concurrent readers see frozen
snapshots). Mutations are persisted as JSON-lines events in one log file
per task; restarting the service replays those logs through fresh
pipelines, which reconstructs every snapshot exactly because the whole
pipeline is deterministic. Derived happenings (captures, estimates,
forecasts, closes) are also appended for audit and for the dashboard's
polling event feed, but recovery re-derives them from the raw reports
rather than trusting the log.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware

from .arima import ArimaParams, WarmUpError
from .core import DuplicateReportError, StreamOrderError
from .crc import EstimatorKind, InsufficientDataError, estimate_record
from .decisions import CloseCriterion, TradeoffBenchmarks
from .pipeline import (
    CaptureCompleted,
    EstimateUpdated,
    ForecastUpdated,
    PipelineConfig,
    TaskClosed,
    TaskPipeline,
    TaskSnapshot,
)
from .reportlog import format_timestamp, parse_timestamp, report_from_dict

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ServiceConfig:
    """Service-level settings; pipeline knobs apply to every task."""

    data_dir: Path
    port: int = 8350
    smp_size: int = 8
    estimator: EstimatorKind = EstimatorKind.MTH
    close_target: float | None = None
    stability_span: int = 2
    arima: ArimaParams = field(default_factory=ArimaParams)

    def pipeline_config(self) -> PipelineConfig:
        criterion = (
            CloseCriterion(self.close_target, self.stability_span)
            if self.close_target is not None
            else None
        )
        return PipelineConfig(
            smp_size=self.smp_size,
            estimator=self.estimator,
            close_criterion=criterion,
            arima=self.arima,
        )


class EventLog:
    """Append-only JSON-lines log; a truncated final line is dropped."""

    def __init__(self, path: Path) -> None:
        self.path = path
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, record: dict) -> None:
        with open(self.path, "a", encoding="utf-8") as handle:
            handle.write(json.dumps(record) + "\n")
            handle.flush()

    def read(self) -> list[dict]:
        if not self.path.exists():
            return []
        records = []
        with open(self.path, encoding="utf-8") as handle:
            lines = handle.read().split("\n")
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError:
                if i == len(lines) - 1 or not any(l.strip() for l in lines[i + 1 :]):
                    logger.warning(
                        "dropping truncated final event in %s", self.path
                    )
                    break
                raise
        return records


def _event_record(event, seq: int) -> dict:
    payload = asdict(event)
    for key, value in payload.items():
        if hasattr(value, "isoformat"):
            payload[key] = format_timestamp(value)
    if "estimate" in payload and payload["estimate"] is not None:
        payload["estimate"]["kind"] = event.estimate.kind.value
    return {"seq": seq, "type": type(event).__name__, **payload}


class ManagedTask:
    """One task's pipeline, lock, derived event feed, and persistence."""

    def __init__(self, task_id: str, config: PipelineConfig, log: EventLog) -> None:
        self.task_id = task_id
        self.pipeline = TaskPipeline(task_id, config)
        self.lock = threading.Lock()
        self.log = log
        self.events: list[dict] = []
        self._seq = 0

    def _record(self, event, persist: bool = True) -> dict:
        self._seq += 1
        record = _event_record(event, self._seq)
        self.events.append(record)
        if persist:
            self.log.append(record)
        return record

    def ingest_batch(self, reports: list[dict], persist: bool = True) -> list[dict]:
        emitted: list[dict] = []
        with self.lock:
            if persist:
                self.log.append({"type": "ReportsIngested", "reports": reports})
            for raw in reports:
                report = report_from_dict(raw)
                for event in self.pipeline.ingest(report):
                    emitted.append(self._record(event, persist=persist))
        return emitted

    def close_manual(self, at_time=None, persist: bool = True) -> tuple[bool, dict | None]:
        with self.lock:
            event = self.pipeline.close_manual(at_time)
            if event is None:
                return False, None
            if persist:
                self.log.append(
                    {
                        "type": "ManualClose",
                        "time": format_timestamp(event.close_time)
                        if event.close_time
                        else None,
                    }
                )
            return True, self._record(event, persist=persist)

    def snapshot(self) -> TaskSnapshot:
        with self.lock:
            return self.pipeline.snapshot()


class TaskStore:
    """All live tasks plus the recovery path from their event logs."""

    def __init__(self, config: ServiceConfig) -> None:
        self.config = config
        self.tasks: dict[str, ManagedTask] = {}
        self._store_lock = threading.Lock()
        self.config.data_dir.mkdir(parents=True, exist_ok=True)
        self.recover()

    def _log_path(self, task_id: str) -> Path:
        return self.config.data_dir / "tasks" / f"{task_id}.jsonl"

    def get_or_create(self, task_id: str) -> ManagedTask:
        with self._store_lock:
            task = self.tasks.get(task_id)
            if task is None:
                task = ManagedTask(
                    task_id,
                    self.config.pipeline_config(),
                    EventLog(self._log_path(task_id)),
                )
                self.tasks[task_id] = task
            return task

    def get(self, task_id: str) -> ManagedTask:
        task = self.tasks.get(task_id)
        if task is None:
            raise KeyError(task_id)
        return task

    def recover(self) -> None:
        """Replays persisted reports and manual closes; idempotent."""
        tasks_dir = self.config.data_dir / "tasks"
        if not tasks_dir.is_dir():
            return
        for log_file in sorted(tasks_dir.glob("*.jsonl")):
            task_id = log_file.stem
            task = ManagedTask(
                task_id, self.config.pipeline_config(), EventLog(log_file)
            )
            for record in task.log.read():
                kind = record.get("type")
                if kind == "ReportsIngested":
                    task.ingest_batch(record["reports"], persist=False)
                elif kind == "ManualClose":
                    at = record.get("time")
                    task.close_manual(
                        parse_timestamp(at) if at else None, persist=False
                    )
            self.tasks[task_id] = task


def snapshot_payload(snap: TaskSnapshot) -> dict:
    estimates = {}
    for kind, est in snap.estimates.items():
        estimates[kind] = None if est is None else {
            "capture_index": est.capture_index,
            "n_hat": est.n_hat,
            "n_hat_rounded": est.n_hat_rounded,
            "C": est.coverage,
            "gamma_sq": est.gamma_sq,
        }
    close = None
    if snap.close is not None and snap.close.closed:
        close = {
            "close_capture_index": snap.close.close_capture_index,
            "close_time": format_timestamp(snap.close.close_time)
            if snap.close.close_time
            else None,
            "detected_at_close": snap.close.detected_at_close,
            "n_hat_at_close": snap.close.n_hat_at_close,
        }
    return {
        "task_id": snap.task_id,
        "status": snap.status,
        "reports_received": snap.reports_received,
        "bugs_detected": snap.bugs_detected,
        "captures_completed": snap.captures_completed,
        "estimates": estimates,
        "latest_forecast": list(snap.latest_forecast) if snap.latest_forecast else None,
        "close": close,
        "achieved_pct": snap.achieved_pct,
        "post_close_reports": snap.post_close_reports,
    }


def create_app(store: TaskStore) -> FastAPI:
    app = FastAPI(title="bugcensus", version="0.1.0")
    # The dashboard is a static page on another origin; the API carries no
    # credentials, so a permissive policy is fine.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/tasks")
    def list_tasks() -> list[dict]:
        return [snapshot_payload(task.snapshot()) for task in store.tasks.values()]

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str) -> dict:
        try:
            return snapshot_payload(store.get(task_id).snapshot())
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")

    @app.get("/tasks/{task_id}/estimates")
    def get_estimates(task_id: str) -> list[dict]:
        try:
            task = store.get(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        with task.lock:
            series = list(task.pipeline.estimate_history)
        return [
            estimate_record(task_id, est)
            for est in series
            if est is not None
        ]

    @app.get("/tasks/{task_id}/forecast")
    def get_forecast(task_id: str, target: float = Query(..., gt=0.0, le=1.0)) -> dict:
        try:
            task = store.get(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        with task.lock:
            try:
                cost = task.pipeline.required_cost(target)
            except (WarmUpError, InsufficientDataError) as exc:
                raise HTTPException(status_code=409, detail=str(exc))
        return {
            "task_id": task_id,
            "target_pct": cost.target_pct,
            "target_bugs": cost.target_bugs,
            "extra_reports": cost.extra_reports,
            "horizon_windows": cost.horizon_windows,
            "reachable": cost.reachable,
        }

    @app.get("/tasks/{task_id}/tradeoff")
    def get_tradeoff(
        task_id: str,
        quality: float = Query(..., gt=0.0, le=1.0),
        cost: float = Query(..., ge=0.0),
    ) -> dict:
        try:
            task = store.get(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        with task.lock:
            try:
                view = task.pipeline.tradeoff(TradeoffBenchmarks(quality, cost))
            except (WarmUpError, InsufficientDataError) as exc:
                raise HTTPException(status_code=409, detail=str(exc))
        return {
            "task_id": task_id,
            "achieved_pct": view.achieved_pct,
            "next_objective": view.objective,
            "extra_reports": view.cost.extra_reports,
            "reachable": view.cost.reachable,
            "region": view.region.value,
            "quality_benchmark": quality,
            "cost_benchmark": cost,
        }

    @app.post("/tasks/{task_id}/reports")
    def post_reports(task_id: str, reports: list[dict] = Body(...)) -> dict:
        task = store.get_or_create(task_id)
        try:
            emitted = task.ingest_batch(reports)
        except (DuplicateReportError, StreamOrderError, ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {
            "task_id": task_id,
            "accepted": len(reports),
            "events": emitted,
            "snapshot": snapshot_payload(task.snapshot()),
        }

    @app.post("/tasks/{task_id}/close")
    def post_close(task_id: str) -> dict:
        try:
            task = store.get(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        closed_now, event = task.close_manual()
        return {
            "task_id": task_id,
            "closed_now": closed_now,
            "already_closed": not closed_now,
            "event": event,
            "snapshot": snapshot_payload(task.snapshot()),
        }

    @app.get("/tasks/{task_id}/events")
    def get_events(task_id: str, since: int = Query(0, ge=0)) -> list[dict]:
        try:
            task = store.get(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        with task.lock:
            return [e for e in task.events if e["seq"] > since]

    return app


def serve(config: ServiceConfig) -> None:
    """Runs the HTTP service until interrupted."""
    import uvicorn

    store = TaskStore(config)
    app = create_app(store)
    uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="warning")
