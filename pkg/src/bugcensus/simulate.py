"""Synthetic crowdtesting tasks with known ground truth.

The generator realizes two-way heterogeneity: each bug draws a base
detectability, each worker a capability multiplier, and every valid
report picks a bug with probability proportional to the clamped product.
Degenerate distribution specs (point masses) collapse the model to the
homogeneous regimes, which the estimator tests exploit.

Ground truth never leaks into the pipeline: estimators consume only the
emitted report stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .core import Report

EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class BetaDist:
    """Beta(alpha, beta) sample spec."""

    alpha: float = 0.8
    beta: float = 4.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.beta(self.alpha, self.beta, size=size)


@dataclass(frozen=True)
class LogNormalDist:
    """LogNormal(mu, sigma) sample spec."""

    mu: float = 0.0
    sigma: float = 0.5

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.lognormal(self.mu, self.sigma, size=size)


@dataclass(frozen=True)
class PointDist:
    """Degenerate spec: every draw equals ``value``."""

    value: float

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, self.value)


@dataclass(frozen=True)
class SyntheticTaskConfig:
    """Everything needed to reproduce one synthetic task stream."""

    n_true: int
    total_reports: int
    seed: int
    task_id: str = "task"
    n_workers: int = 20
    bug_detectability: BetaDist | LogNormalDist | PointDist = field(
        default_factory=BetaDist
    )
    worker_capability: BetaDist | LogNormalDist | PointDist = field(
        default_factory=LogNormalDist
    )
    invalid_rate: float = 0.4
    inter_arrival: float = 60.0

    def __post_init__(self) -> None:
        if self.n_true < 1 or self.n_workers < 1:
            raise ValueError("n_true and n_workers must be >= 1")
        if not 0 <= self.invalid_rate <= 1:
            raise ValueError("invalid_rate must be in [0, 1]")
        if self.total_reports < 0:
            raise ValueError("total_reports must be >= 0")
        if self.inter_arrival <= 0:
            raise ValueError("inter_arrival must be positive seconds")


@dataclass(frozen=True)
class GroundTruth:
    """Hidden generator state for oracle checks."""

    n_true: int
    detectabilities: tuple[float, ...]
    capabilities: tuple[float, ...]
    bug_of_report: tuple[int | None, ...]
    seed: int

    @property
    def unique_bugs_emitted(self) -> int:
        return len({b for b in self.bug_of_report if b is not None})


def generate_task(cfg: SyntheticTaskConfig) -> tuple[list[Report], GroundTruth]:
    """Emits a chronological report stream plus its ground truth.

    Valid reports sample a worker uniformly, then a bug with probability
    proportional to ``clamp(detectability * capability, 0, 1)``.
    Timestamps advance by exponential inter-arrival gaps. Identical seeds
    reproduce identical streams.
    """
    rng = np.random.default_rng(cfg.seed)
    detectability = cfg.bug_detectability.sample(rng, cfg.n_true)
    capability = cfg.worker_capability.sample(rng, cfg.n_workers)
    total = cfg.total_reports

    valid = rng.random(total) >= cfg.invalid_rate
    workers = rng.integers(0, cfg.n_workers, size=total)
    picks = rng.random(total)
    gaps = rng.exponential(cfg.inter_arrival, size=total)

    # Per-worker bug CDFs support a single vectorized searchsorted per worker.
    cdfs: dict[int, np.ndarray] = {}
    bug_of_report: list[int | None] = [None] * total
    for w in range(cfg.n_workers):
        mask = valid & (workers == w)
        if not mask.any():
            continue
        weights = np.clip(detectability * capability[w], 0.0, 1.0)
        weight_sum = weights.sum()
        if weight_sum <= 0:
            continue
        cdf = np.cumsum(weights / weight_sum)
        chosen = np.searchsorted(cdf, picks[mask], side="right")
        chosen = np.minimum(chosen, cfg.n_true - 1)
        for idx, bug in zip(np.nonzero(mask)[0], chosen):
            bug_of_report[idx] = int(bug)

    reports: list[Report] = []
    elapsed = 0.0
    width = max(4, len(str(total)))
    for i in range(total):
        elapsed += gaps[i]
        ts = EPOCH + timedelta(seconds=round(elapsed))
        bug = bug_of_report[i]
        reports.append(
            Report(
                report_id=f"{cfg.task_id}-r{i + 1:0{width}d}",
                task_id=cfg.task_id,
                timestamp=ts,
                is_bug=bug is not None,
                bug_tag=None if bug is None else f"bug-{bug + 1:04d}",
                worker_id=f"w{int(workers[i]) + 1:03d}",
            )
        )
    truth = GroundTruth(
        n_true=cfg.n_true,
        detectabilities=tuple(float(v) for v in detectability),
        capabilities=tuple(float(v) for v in capability),
        bug_of_report=tuple(bug_of_report),
        seed=cfg.seed,
    )
    return reports, truth


#: Stream length per true bug for generated corpora. Mirrors the task
#: scale of industrial crowdtesting rounds, where tasks keep receiving
#: reports well past the point of diminishing bug returns.
REPORTS_PER_BUG = 20.0


def corpus_configs(
    n_tasks: int,
    seed: int,
    n_true_range: tuple[int, int] = (10, 90),
    reports_per_bug: float = REPORTS_PER_BUG,
    **overrides,
) -> list[SyntheticTaskConfig]:
    """Draws task configs for a corpus: sizes uniform over ``n_true_range``.

    Per-task seeds derive deterministically from the corpus seed, so the
    corpus is reproducible as a whole and per task.
    """
    rng = np.random.default_rng(seed)
    configs = []
    for i in range(n_tasks):
        n_true = int(rng.integers(n_true_range[0], n_true_range[1] + 1))
        task_seed = int(rng.integers(0, 2**31 - 1))
        configs.append(
            SyntheticTaskConfig(
                n_true=n_true,
                total_reports=max(30, round(reports_per_bug * n_true)),
                seed=task_seed,
                task_id=f"synthetic-{i + 1:03d}",
                **overrides,
            )
        )
    return configs


def generate_corpus(
    n_tasks: int,
    seed: int,
    **kwargs,
) -> list[tuple[SyntheticTaskConfig, list[Report], GroundTruth]]:
    """Generates a whole corpus of independent tasks."""
    out = []
    for cfg in corpus_configs(n_tasks, seed, **kwargs):
        reports, truth = generate_task(cfg)
        out.append((cfg, reports, truth))
    return out


def write_ground_truth(path: str | Path, truth: GroundTruth) -> None:
    """Sidecar oracle file: total, detectabilities, seed."""
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(
            {
                "n_true": truth.n_true,
                "detectabilities": list(truth.detectabilities),
                "seed": truth.seed,
            },
            handle,
        )


def read_ground_truth(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)
