"""Slice a portfolio of live tasks into the four trade-off quadrants.

Six tasks are frozen mid-stream at the same moment. For each, the next
5% objective is priced in extra reports; a quality benchmark (y axis)
and a cost benchmark (x axis) then split the portfolio into Continue /
DrillDown / ThinkTwice / Close. Saves the quadrant scatter as a PNG.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from bugcensus import PipelineConfig, TaskPipeline, TradeoffBenchmarks
from bugcensus.simulate import SyntheticTaskConfig, generate_task

OUT = Path(__file__).parent / "out"
BENCHMARKS = TradeoffBenchmarks(quality=0.85, cost=10)


def main() -> None:
    views = []
    for i, (n_true, share) in enumerate(
        [(20, 0.20), (35, 0.20), (25, 0.60), (45, 0.08), (30, 0.45), (40, 0.20)]
    ):
        cfg = SyntheticTaskConfig(
            n_true=n_true, total_reports=n_true * 20, seed=500 + i, task_id=f"P{i+1}"
        )
        reports, _ = generate_task(cfg)
        pipeline = TaskPipeline(cfg.task_id, PipelineConfig(smp_size=8))
        for report in reports[: int(share * len(reports))]:
            pipeline.ingest(report)
        views.append((cfg.task_id, pipeline.tradeoff(BENCHMARKS)))

    print(
        f"benchmarks: quality >= {BENCHMARKS.quality:.0%},"
        f" cost <= {BENCHMARKS.cost:.0f} extra reports\n"
    )
    print("task   achieved   next obj   extra reports   region")
    for task_id, view in views:
        cost = view.cost.extra_reports if view.cost.reachable else float("inf")
        print(
            f"{task_id:>4}   {view.achieved_pct:>7.1%}   {view.objective:>7.0%}"
            f"   {cost:>13.0f}   {view.region.value}"
        )

    OUT.mkdir(exist_ok=True)
    fig, ax = plt.subplots(figsize=(7, 5))
    colors = {
        "Continue": "tab:green",
        "DrillDown": "tab:orange",
        "ThinkTwice": "tab:blue",
        "Close": "tab:red",
    }
    for task_id, view in views:
        x = view.cost.extra_reports if view.cost.reachable else BENCHMARKS.cost * 3
        ax.scatter(x, view.objective, c=colors[view.region.value], s=80, zorder=3)
        ax.annotate(task_id, (x, view.objective), xytext=(4, 5), textcoords="offset points")
    ax.axvline(BENCHMARKS.cost, color="tab:blue", lw=1.5, label="cost benchmark")
    ax.axhline(BENCHMARKS.quality, color="tab:red", lw=1.5, label="quality benchmark")
    ax.set_xlabel("predicted extra reports to next objective")
    ax.set_ylabel("next objective (share of predicted bugs)")
    ax.set_title("Trade-off quadrants across six live tasks")
    ax.legend(loc="lower right")
    fig.tight_layout()
    path = OUT / "tradeoff_quadrants.png"
    fig.savefig(path, dpi=120)
    print(f"\nplot saved to {path}")


if __name__ == "__main__":
    main()
