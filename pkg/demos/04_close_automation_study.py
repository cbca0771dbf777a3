"""Measure what automated closing saves on a synthetic corpus.

Replays every task under five close criteria. A task closes the first
time the detected share of the rounded prediction reaches the target
and the prediction has held for two consecutive captures. Detection
level is measured against each task's full historical bug count, cost
against its full report count — so the table shows what the automation
would have saved, and at what detection price.
"""

import numpy as np

from bugcensus import CloseCriterion, EstimatorKind, PipelineConfig
from bugcensus.evaluate import cost_effectiveness
from bugcensus.pipeline import run_task
from bugcensus.simulate import generate_corpus

N_TASKS = 60
SMP_SIZE = 30


def main() -> None:
    corpus = generate_corpus(N_TASKS, seed=8)
    print(f"corpus: {N_TASKS} tasks, capture size {SMP_SIZE}\n")
    print("target   closed   med %bug   med %reducedCost   med F1")
    for target in (0.80, 0.85, 0.90, 0.95, 1.00):
        config = PipelineConfig(
            smp_size=SMP_SIZE,
            estimator=EstimatorKind.MTH,
            close_criterion=CloseCriterion(target, stability_span=2),
            forecasting=False,
        )
        triples = []
        for _, reports, _ in corpus:
            result = run_task(reports, config)
            if result.close_decision.closed:
                triples.append(cost_effectiveness(result))
        arr = np.array(triples)
        print(
            f"{target:>6.0%}   {len(triples):>6}   {np.median(arr[:, 0]):>8.3f}"
            f"   {np.median(arr[:, 1]):>16.3f}   {np.median(arr[:, 2]):>6.3f}"
        )
    print(
        "\nLower targets close earlier and save more; the achieved detection"
        " level sits a little above each target because the stability rule"
        " waits for the prediction to settle."
    )


if __name__ == "__main__":
    main()
