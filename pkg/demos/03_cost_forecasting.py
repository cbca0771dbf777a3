"""Price a bug-detection objective in reports with the sliding forecaster.

Midway through a task a manager asks: how many more reports until 95%
of the predicted bugs are found? The sliding window refits an
ARIMA(5, 0, 1) on the last ten windows of new-bug counts and accumulates
its forecasts until the deficit is covered.
"""

from bugcensus import (
    EstimatorKind,
    PipelineConfig,
    SyntheticTaskConfig,
    TaskPipeline,
    generate_task,
)


def main() -> None:
    cfg = SyntheticTaskConfig(
        n_true=35, total_reports=700, seed=99, task_id="demo-cost"
    )
    reports, truth = generate_task(cfg)

    pipeline = TaskPipeline(cfg.task_id, PipelineConfig(smp_size=8))
    midpoint = len(reports) // 5
    for report in reports[:midpoint]:
        pipeline.ingest(report)

    latest = pipeline.latest_estimate
    print(f"{midpoint} reports in, {pipeline.bugs_detected} bugs detected")
    print(f"predicted total ({latest.kind.value}): {latest.n_hat_rounded}")
    print(f"achieved share of prediction: {pipeline.achieved_pct():.1%}\n")

    print("objective   target bugs   extra reports   windows   reachable")
    for target in (0.80, 0.85, 0.90, 0.95, 1.00):
        cost = pipeline.required_cost(target)
        print(
            f"{target:>8.0%}   {cost.target_bugs:>11}   {cost.extra_reports:>13}"
            f"   {cost.horizon_windows:>7}   {cost.reachable}"
        )

    # how good was the mid-task answer? replay the rest and check
    cost_95 = pipeline.required_cost(0.95)
    target_bugs = cost_95.target_bugs
    spent = 0
    for report in reports[midpoint:]:
        spent += 1
        pipeline.ingest(report)
        if pipeline.bugs_detected >= target_bugs:
            break
    print(
        f"\nforecast for the 95% objective: {cost_95.extra_reports} reports;"
        f" the stream actually took {spent}"
        if pipeline.bugs_detected >= target_bugs
        else f"\nthe stream ended before reaching {target_bugs} bugs"
    )


if __name__ == "__main__":
    main()
