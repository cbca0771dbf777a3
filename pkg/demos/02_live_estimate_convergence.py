"""Watch the total-bug estimate converge as reports stream in.

Generates one synthetic task with known ground truth, replays it
capture by capture, and tracks the live prediction against both the
true bug count and the number detected so far. Saves a convergence plot
next to this script.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from bugcensus import EstimatorKind, PipelineConfig, SyntheticTaskConfig, generate_task
from bugcensus.pipeline import run_task

OUT = Path(__file__).parent / "out"


def main() -> None:
    cfg = SyntheticTaskConfig(
        n_true=40, total_reports=800, seed=4242, task_id="demo-convergence"
    )
    reports, truth = generate_task(cfg)
    result = run_task(
        reports,
        PipelineConfig(smp_size=8, estimator=EstimatorKind.MTH, forecasting=False),
    )

    print(f"task: {cfg.task_id}, {len(reports)} reports, true bugs = {truth.n_true}")
    print(f"historical unique bugs in the stream: {result.total_bugs}")
    print("\ncapture  detected  predicted")
    series = result.estimate_series
    for i in range(0, len(series), max(1, len(series) // 15)):
        est = series[i]
        shown = "-" if est is None else est.n_hat_rounded
        print(f"{i + 1:>7}  {result.detected_series[i]:>8}  {shown:>9}")

    OUT.mkdir(exist_ok=True)
    xs = range(1, len(series) + 1)
    predicted = [e.n_hat if e else None for e in series]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(xs, result.detected_series, label="detected so far", lw=2)
    ax.plot(xs, predicted, label="predicted total", lw=2)
    ax.axhline(truth.n_true, ls="--", c="gray", label="true total")
    ax.axhline(result.total_bugs, ls=":", c="black", label="historical total")
    ax.set_xlabel("capture")
    ax.set_ylabel("bugs")
    ax.set_title("Estimate convergence on one synthetic task")
    ax.legend()
    fig.tight_layout()
    path = OUT / "estimate_convergence.png"
    fig.savefig(path, dpi=120)
    print(f"\nplot saved to {path}")


if __name__ == "__main__":
    main()
