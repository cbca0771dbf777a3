"""Command-line entry points: generate, replay, evaluate, tune, serve, predict.

Every flag can also live in a plain ``key = value`` config file passed
with ``--config``; explicit flags win over file values.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .arima import ArimaParams
from .config import merge_settings, parse_config_file
from .crc import TUNED_SMP_SIZE, EstimatorKind
from .decisions import CloseCriterion
from .evaluate import (
    CheckpointKind,
    cost_effectiveness,
    run_experiment,
    tune_smp_size,
)
from .pipeline import PipelineConfig, TaskPipeline, replay as replay_stream
from .reportlog import read_reports, sort_stream, write_reports_csv, write_reports_jsonl
from .service import ServiceConfig, serve as run_service
from .simulate import generate_corpus, write_ground_truth


def _add_config_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None, help="key=value config file")


def _settings(args: argparse.Namespace, keys: list[str]) -> dict:
    file_values: dict = {}
    if getattr(args, "config", None):
        file_values = parse_config_file(args.config)
    cli_values = {k: getattr(args, k, None) for k in keys}
    return merge_settings(file_values, cli_values)


def cmd_generate(args: argparse.Namespace) -> int:
    settings = _settings(args, ["tasks", "seed", "reports_per_bug", "out_dir", "fmt"])
    out_dir = Path(settings["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = generate_corpus(
        int(settings.get("tasks", 20)),
        int(settings.get("seed", 0)),
        reports_per_bug=float(settings.get("reports_per_bug", 20.0)),
    )
    fmt = settings.get("fmt", "csv")
    for cfg, reports, truth in corpus:
        if fmt == "jsonl":
            write_reports_jsonl(out_dir / f"{cfg.task_id}.jsonl", reports)
        else:
            write_reports_csv(out_dir / f"{cfg.task_id}.csv", reports)
        write_ground_truth(out_dir / f"{cfg.task_id}.truth.json", truth)
    print(f"wrote {len(corpus)} tasks to {out_dir}")
    return 0


def _pipeline_config(settings: dict) -> PipelineConfig:
    kind = EstimatorKind(settings.get("estimator", "Mth"))
    smp = settings.get("smp_size")
    smp_size = int(smp) if smp is not None else TUNED_SMP_SIZE[kind]
    close_at = settings.get("close_at")
    criterion = CloseCriterion(float(close_at)) if close_at is not None else None
    return PipelineConfig(
        smp_size=smp_size,
        estimator=kind,
        close_criterion=criterion,
        arima=ArimaParams(),
    )


def cmd_replay(args: argparse.Namespace) -> int:
    settings = _settings(args, ["smp_size", "estimator", "close_at", "speed"])
    reports = sort_stream(read_reports(args.log_file))
    config = _pipeline_config(settings)
    pipeline = TaskPipeline(reports[0].task_id if reports else "task", config)
    speed = settings.get("speed", "instant")
    if speed != "instant":
        speed = float(speed)
    events = replay_stream(reports, pipeline, speed)
    result = pipeline.run_result()
    summary = {
        "task_id": pipeline.task_id,
        "reports": result.total_reports,
        "bugs": result.total_bugs,
        "captures": len(result.detected_series),
        "events": len(events),
        "closed": result.close_decision.closed,
    }
    if result.close_decision.closed:
        pct_bug, pct_reduced, f1 = cost_effectiveness(result)
        summary.update(
            close_capture=result.close_decision.close_capture_index,
            pct_bug=round(pct_bug, 4),
            pct_reduced_cost=round(pct_reduced, 4),
            f1=round(f1, 4),
        )
    latest = pipeline.latest_estimate
    if latest is not None:
        summary["n_hat_rounded"] = latest.n_hat_rounded
    print(json.dumps(summary, indent=2))
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    settings = _settings(args, ["smp_size", "estimator", "target"])
    reports = sort_stream(read_reports(args.log_file))
    config = _pipeline_config(settings)
    pipeline = TaskPipeline(reports[0].task_id if reports else "task", config)
    replay_stream(reports, pipeline, "instant")
    latest = pipeline.latest_estimate
    if latest is None:
        print(json.dumps({"error": "not enough data for an estimate"}))
        return 1
    out = {
        "task_id": pipeline.task_id,
        "estimator": latest.kind.value,
        "n_hat": latest.n_hat,
        "n_hat_rounded": latest.n_hat_rounded,
        "detected": pipeline.bugs_detected,
        "achieved_pct": pipeline.achieved_pct(),
    }
    target = settings.get("target")
    if target is not None:
        try:
            cost = pipeline.required_cost(float(target))
            out["required_cost"] = {
                "target_pct": cost.target_pct,
                "extra_reports": cost.extra_reports,
                "reachable": cost.reachable,
            }
        except Exception as exc:  # warm-up and the like
            out["required_cost"] = {"error": str(exc)}
    print(json.dumps(out, indent=2))
    return 0


def _load_corpus_dir(directory: Path) -> list[list]:
    streams = []
    for path in sorted(directory.iterdir()):
        if path.suffix in (".csv", ".jsonl") and not path.name.endswith("truth.json"):
            streams.append(sort_stream(read_reports(path)))
    return streams


def cmd_evaluate(args: argparse.Namespace) -> int:
    settings = _settings(args, ["checkpoints", "out_dir"])
    streams = _load_corpus_dir(Path(args.corpus_dir))
    if not streams:
        print("no report logs found", file=sys.stderr)
        return 1
    kind = CheckpointKind(settings.get("checkpoints", "report_pct"))
    tables = run_experiment(streams, checkpoint_kind=kind)
    out_dir = Path(settings.get("out_dir", "evaluation"))
    tables.write_csv(out_dir)
    tables.write_json(out_dir / "summary.json")
    for method in tables.methods:
        medians = " ".join(f"{v:+.2f}" for v in tables.median(method))
        print(f"{method:>9}: {medians}")
    print(f"tables written to {out_dir}")
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    settings = _settings(
        args, ["estimator", "candidates", "repetitions", "seed"]
    )
    streams = _load_corpus_dir(Path(args.corpus_dir))
    if len(streams) < 3:
        print("tuning needs at least 3 task logs", file=sys.stderr)
        return 1
    kind = EstimatorKind(settings.get("estimator", "Mth"))
    lo, _, hi = str(settings.get("candidates", "2:30")).partition(":")
    winner = tune_smp_size(
        streams,
        kind,
        candidates=tuple(range(int(lo), int(hi) + 1)),
        repetitions=int(settings.get("repetitions", 1000)),
        seed=int(settings.get("seed", 0)),
    )
    print(json.dumps({"estimator": kind.value, "smp_size": winner}))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    settings = _settings(
        args, ["port", "data_dir", "smp_size", "estimator", "close_at"]
    )
    kind = EstimatorKind(settings.get("estimator", "Mth"))
    smp = settings.get("smp_size")
    close_at = settings.get("close_at")
    config = ServiceConfig(
        data_dir=Path(settings.get("data_dir", "bugcensus-data")),
        port=int(settings.get("port", 8350)),
        smp_size=int(smp) if smp is not None else TUNED_SMP_SIZE[kind],
        estimator=kind,
        close_target=float(close_at) if close_at is not None else None,
    )
    run_service(config)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bugcensus",
        description="Crowdtesting decision support: bug totals, cost forecasts, closing",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic corpus with ground truth")
    p.add_argument("--tasks", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--reports-per-bug", dest="reports_per_bug", type=float, default=None)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--fmt", choices=("csv", "jsonl"), default=None)
    _add_config_flag(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("replay", help="replay a report log through the pipeline")
    p.add_argument("log_file", type=Path)
    p.add_argument("--smp-size", dest="smp_size", type=int, default=None)
    p.add_argument("--estimator", choices=[k.value for k in EstimatorKind], default=None)
    p.add_argument("--close-at", dest="close_at", type=float, default=None)
    p.add_argument("--speed", default=None, help="wall-clock multiplier or 'instant'")
    _add_config_flag(p)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("predict", help="one-shot prediction from a report log")
    p.add_argument("log_file", type=Path)
    p.add_argument("--smp-size", dest="smp_size", type=int, default=None)
    p.add_argument("--estimator", choices=[k.value for k in EstimatorKind], default=None)
    p.add_argument("--target", type=float, default=None, help="bug share for cost query")
    _add_config_flag(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="checkpoint error tables over a corpus")
    p.add_argument("corpus_dir", type=Path)
    p.add_argument("--checkpoints", choices=[k.value for k in CheckpointKind], default=None)
    p.add_argument("--out-dir", dest="out_dir", default=None)
    _add_config_flag(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("tune", help="tune capture size on a corpus")
    p.add_argument("corpus_dir", type=Path)
    p.add_argument("--estimator", choices=[k.value for k in EstimatorKind], default=None)
    p.add_argument("--candidates", default=None, help="range as LO:HI, default 2:30")
    p.add_argument("--repetitions", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    _add_config_flag(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("serve", help="run the HTTP/JSON service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--data-dir", dest="data_dir", default=None)
    p.add_argument("--smp-size", dest="smp_size", type=int, default=None)
    p.add_argument("--estimator", choices=[k.value for k in EstimatorKind], default=None)
    p.add_argument("--close-at", dest="close_at", type=float, default=None)
    _add_config_flag(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
